#include "pageguard/cli.hpp"

#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

#include <CLI11.hpp>

#include "pageguard/assets.hpp"
#include "pageguard/corpus.hpp"
#include "pageguard/errors.hpp"
#include "pageguard/evaluator.hpp"
#include "pageguard/fragments.hpp"
#include "pageguard/gateway.hpp"
#include "pageguard/optimizer.hpp"
#include "pageguard/report.hpp"
#include "pageguard/site_export.hpp"

namespace pageguard {

namespace {

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoFailure("cannot open: " + path);
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

void spit(const std::string& path, const std::string& bytes) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoFailure("cannot open for writing: " + path);
  out << bytes;
  if (!out) throw IoFailure("write failed: " + path);
}

// Shared config plumbing. Defaults < config file < explicit flags.
struct ConfigFlags {
  std::string config_path;
  std::optional<uint64_t> seed;
  std::optional<std::string> persona;
  std::optional<std::string> mode;
  std::optional<std::string> family;
  std::optional<int> budget_chars;
  bool force_mock = false;
  bool force_live = false;
};

void add_config_flags(CLI::App* cmd, ConfigFlags& flags) {
  cmd->add_option("--config", flags.config_path,
                  "JSON run-config file (flags still win)");
  cmd->add_option("--seed", flags.seed, "Root RNG seed");
  cmd->add_option("--persona", flags.persona,
                  "Mock target persona: echo|compliant|partial|ipi-faithful");
  cmd->add_option("--mode", flags.mode,
                  "Defense mode: base|sanitizer|url_export");
  cmd->add_option("--family", flags.family,
                  "Sanitizer filter family (or 'mixed')");
  cmd->add_option("--budget-chars", flags.budget_chars,
                  "Fragment character budget");
  cmd->add_flag("--mock", flags.force_mock, "Use the deterministic mock suite");
  cmd->add_flag("--live", flags.force_live, "Use live HTTP endpoints");
}

RunConfig resolve_config(const ConfigFlags& flags) {
  RunConfig cfg;
  if (!flags.config_path.empty())
    cfg = run_config_from_json(slurp(flags.config_path));
  if (flags.seed) cfg.rng_seed = *flags.seed;
  if (flags.persona) cfg.gateway.persona = *flags.persona;
  if (flags.mode) cfg.mode = mode_from_name(*flags.mode);
  if (flags.family) cfg.family = family_from_name(*flags.family);
  if (flags.budget_chars) {
    cfg.budget_chars = *flags.budget_chars;
    cfg.gateway.budget_chars = *flags.budget_chars;
  }
  if (flags.force_mock) cfg.gateway.mock = true;
  if (flags.force_live) cfg.gateway.mock = false;
  return cfg;
}

struct LoadedRun {
  std::vector<PageRecord> corpus;
  CorpusSplit split;
};

LoadedRun load_run(const std::string& corpus_path,
                   const std::string& split_path) {
  LoadedRun run;
  run.corpus = read_corpus(corpus_path);
  run.split = read_split(split_path);
  return run;
}

MetricsReport metrics_for(ModelGateway& gateway,
                          const std::optional<DefenseFragment>& fragment,
                          const std::vector<const PageRecord*>& pages,
                          DefenseMode mode, bool judge, FilterFamily family,
                          bool benign, bool serial) {
  std::vector<LeakageReport> reports =
      serial ? evaluate_pages_serial(gateway, fragment, pages, mode, judge,
                                     family)
             : evaluate_fragment(gateway, fragment, pages, mode, judge,
                                 family);
  std::optional<BenignResult> benign_result;
  if (benign) benign_result = evaluate_benign(gateway, fragment, pages, mode);
  return build_metrics(reports, benign_result);
}

void emit_report(const ReportDocument& doc, const std::string& report_path,
                 const std::string& format) {
  if (!report_path.empty()) write_report(doc, format, report_path);
  std::cout << render_report_table(doc);
}

int cmd_gen(int count, uint64_t seed, const std::string& out) {
  std::vector<PageRecord> corpus = generate_corpus(count, seed);
  write_corpus(corpus, out);
  std::cout << "wrote " << corpus.size() << " pages to " << out << "\n";
  return 0;
}

int cmd_split(const std::string& corpus_path, const std::string& out,
              const SplitSpec& spec) {
  std::vector<PageRecord> corpus = read_corpus(corpus_path);
  CorpusSplit split = split_corpus(corpus, spec);
  write_split(split, out);
  std::cout << "split " << corpus.size() << " pages: " << split.seed_pages.size()
            << " seed, " << split.scoring_pages.size() << " scoring, "
            << split.eval_pages.size() << " eval (" << split.unused.size()
            << " unused) -> " << out << "\n";
  return 0;
}

int cmd_optimize(const ConfigFlags& flags, const std::string& corpus_path,
                 const std::string& split_path,
                 const std::string& checkpoint_path,
                 const std::string& resume_from, const std::string& pool_out,
                 const std::string& winner_out, const std::string& report_path,
                 const std::string& format,
                 const std::string& transcript_path) {
  RunConfig cfg = resolve_config(flags);
  LoadedRun run = load_run(corpus_path, split_path);
  std::vector<const PageRecord*> scoring =
      select_pages(run.corpus, run.split.scoring_pages);

  std::unique_ptr<ModelGateway> gateway = make_gateway(cfg.gateway);
  TranscriptLog transcript;
  RecordingGateway recording(*gateway, transcript);
  ModelGateway& gw =
      transcript_path.empty() ? *gateway : static_cast<ModelGateway&>(recording);

  CandidatePool pool = run_search(cfg, scoring, gw, checkpoint_path,
                                  resume_from);
  std::vector<Candidate> survivors =
      promote_survivors(pool, cfg.effective_slots());

  std::vector<std::vector<LeakageReport>> judge_reports;
  for (const Candidate& survivor : survivors) {
    judge_reports.push_back(evaluate_fragment(gw, survivor.fragment, scoring,
                                              cfg.mode, /*judge_mode=*/true,
                                              cfg.family));
  }
  Candidate winner = final_select(survivors, judge_reports);

  if (!pool_out.empty()) write_checkpoint(pool, pool_out);
  if (!winner_out.empty())
    spit(winner_out, fragment_to_json(winner.fragment) + "\n");
  if (!transcript_path.empty()) transcript.write_jsonl(transcript_path);

  double best_utility = 0.0;
  for (const Candidate& c : pool.candidates)
    if (c.score) best_utility = std::max(best_utility, c.score->utility);
  std::cout << "pool: " << pool.candidates.size() << " candidates over "
            << pool.iteration << " iterations; best utility " << best_utility
            << "\n";
  std::cout << "winner: " << winner.fragment.fragment_id << " at slot "
            << slot_name(winner.fragment.slot) << " (utility "
            << (winner.score ? winner.score->utility : 0.0) << ")\n";

  if (!report_path.empty() || format == "table") {
    ReportDocument doc;
    doc.mode = std::string(mode_name(cfg.mode));
    doc.config_hash = run_config_hash(cfg);
    doc.timestamp = report_timestamp(cfg.gateway.mock);
    doc.transcript_path = transcript_path;
    for (std::size_t i = 0; i < survivors.size(); ++i) {
      MetricsReport metrics = build_metrics(judge_reports[i], std::nullopt);
      doc.columns.push_back(make_fragment_column(
          std::string(slot_name(survivors[i].fragment.slot)), metrics,
          survivors[i].fragment));
    }
    if (!report_path.empty()) write_report(doc, format, report_path);
  }
  return 0;
}

int cmd_evaluate(const ConfigFlags& flags, const std::string& corpus_path,
                 const std::string& split_path,
                 const std::string& fragment_file, bool judge, bool benign,
                 const std::string& report_path, const std::string& format,
                 const std::string& transcript_path) {
  RunConfig cfg = resolve_config(flags);
  LoadedRun run = load_run(corpus_path, split_path);
  std::vector<const PageRecord*> pages =
      select_pages(run.corpus, run.split.eval_pages);

  std::unique_ptr<ModelGateway> gateway = make_gateway(cfg.gateway);
  TranscriptLog transcript;
  RecordingGateway recording(*gateway, transcript);
  const bool recording_on = !transcript_path.empty();
  ModelGateway& gw =
      recording_on ? static_cast<ModelGateway&>(recording) : *gateway;

  ReportDocument doc;
  doc.mode = std::string(mode_name(cfg.mode));
  doc.config_hash = run_config_hash(cfg);
  doc.timestamp = report_timestamp(cfg.gateway.mock);
  doc.transcript_path = transcript_path;

  MetricsReport control = metrics_for(gw, std::nullopt, pages, cfg.mode,
                                      judge, cfg.family, benign,
                                      recording_on);
  doc.columns.push_back(make_control_column(control));

  if (!fragment_file.empty()) {
    DefenseFragment fragment = fragment_from_json(slurp(fragment_file));
    MetricsReport defended = metrics_for(gw, fragment, pages, cfg.mode, judge,
                                         cfg.family, benign, recording_on);
    doc.columns.push_back(make_fragment_column(
        std::string(slot_name(fragment.slot)), defended, fragment));
  }

  if (recording_on) transcript.write_jsonl(transcript_path);
  emit_report(doc, report_path, format);
  return 0;
}

int cmd_baseline(const ConfigFlags& flags, const std::string& corpus_path,
                 const std::string& split_path, const std::string& report_path,
                 const std::string& format) {
  RunConfig cfg = resolve_config(flags);
  LoadedRun run = load_run(corpus_path, split_path);
  std::vector<const PageRecord*> pages =
      select_pages(run.corpus, run.split.eval_pages);
  std::unique_ptr<ModelGateway> gateway = make_gateway(cfg.gateway);

  ReportDocument doc;
  doc.mode = std::string(mode_name(DefenseMode::kBase));
  doc.config_hash = run_config_hash(cfg);
  doc.timestamp = report_timestamp(cfg.gateway.mock);

  for (BaselineVariant variant :
       {BaselineVariant::kIpi0, BaselineVariant::kIpi1, BaselineVariant::kIpi2}) {
    DefenseFragment payload;
    payload.fragment_id = "baseline-" + std::string(variant_name(variant));
    payload.slot = Slot::kAfter;
    payload.text = std::string(baseline_payload_text(variant));
    MetricsReport metrics = metrics_for(
        *gateway, payload, pages, DefenseMode::kBase, /*judge=*/true,
        cfg.family, /*benign=*/false, /*serial=*/false);
    doc.columns.push_back(make_fragment_column(
        std::string(variant_name(variant)), metrics, payload));
  }

  emit_report(doc, report_path, format);
  return 0;
}

int cmd_export_site(const std::string& corpus_path,
                    const std::string& split_path,
                    const std::string& fragment_file,
                    const std::string& out_dir) {
  std::vector<PageRecord> corpus = read_corpus(corpus_path);
  std::vector<const PageRecord*> pages;
  if (!split_path.empty()) {
    CorpusSplit split = read_split(split_path);
    pages = select_pages(corpus, split.eval_pages);
  } else {
    for (const PageRecord& page : corpus) pages.push_back(&page);
  }
  std::optional<DefenseFragment> fragment;
  if (!fragment_file.empty())
    fragment = fragment_from_json(slurp(fragment_file));

  SiteManifest manifest = export_static_site(pages, fragment, out_dir);
  std::cout << "exported " << manifest.routes.size() << " article pages + "
            << "index, archive, robots.txt, llms.txt, sitemap.xml to "
            << out_dir << "\n";
  return 0;
}

int cmd_report(const std::string& in_path, const std::string& format,
               const std::string& out_path) {
  ReportDocument doc = report_from_json(slurp(in_path));
  if (out_path.empty()) {
    if (format == "json") {
      std::cout << report_to_json(doc) << "\n";
    } else {
      std::cout << render_report_table(doc);
    }
  } else {
    write_report(doc, format, out_path);
  }
  return 0;
}

}  // namespace

int run_command(const std::vector<std::string>& args) {
  CLI::App app{"PII-defense pipeline: corpus synthesis, fragment search, "
               "leakage evaluation, baselines, and site export"};
  app.require_subcommand(1);

  // gen
  auto* gen = app.add_subcommand("gen", "Generate a synthetic page corpus");
  int gen_count = 900;
  uint64_t gen_seed = 0;
  std::string gen_out;
  gen->add_option("--count", gen_count, "Number of pages");
  gen->add_option("--seed", gen_seed, "Corpus RNG seed");
  gen->add_option("--out", gen_out, "Output JSONL path")->required();

  // split
  auto* split = app.add_subcommand("split", "Partition a corpus into sets");
  std::string split_corpus_path, split_out;
  SplitSpec split_spec;
  split->add_option("--corpus", split_corpus_path, "Corpus JSONL")->required();
  split->add_option("--out", split_out, "Output split JSON")->required();
  split->add_option("--seed", split_spec.rng_seed, "Shuffle seed");
  split->add_option("--seed-count", split_spec.seed_count, "Seed-set size");
  split->add_option("--scoring-size", split_spec.scoring_size,
                    "Scoring-set size");
  split->add_option("--eval-size", split_spec.eval_size, "Eval-set size");
  split->add_option("--extra-scoring", split_spec.extra_scoring,
                    "Extra scoring pages drawn from the remainder");

  // optimize
  auto* optimize = app.add_subcommand("optimize", "Run the fragment search");
  ConfigFlags opt_flags;
  std::string opt_corpus, opt_split, opt_checkpoint, opt_resume, opt_pool_out,
      opt_winner_out, opt_report, opt_format = "json", opt_transcript;
  optimize->add_option("--corpus", opt_corpus, "Corpus JSONL")->required();
  optimize->add_option("--split", opt_split, "Split JSON")->required();
  add_config_flags(optimize, opt_flags);
  optimize->add_option("--checkpoint", opt_checkpoint,
                       "Write a pool checkpoint after every iteration");
  optimize->add_option("--resume", opt_resume, "Resume from a checkpoint");
  optimize->add_option("--pool-out", opt_pool_out, "Write the final pool");
  optimize->add_option("--winner-out", opt_winner_out,
                       "Write the selected fragment as JSON");
  optimize->add_option("--report", opt_report, "Write a survivor report");
  optimize->add_option("--format", opt_format, "Report format: json|table");
  optimize->add_option("--transcript", opt_transcript,
                       "Write a JSONL gateway transcript");

  // evaluate
  auto* evaluate = app.add_subcommand("evaluate", "Score a fragment (or the "
                                      "no-defense control) on the eval set");
  ConfigFlags eval_flags;
  std::string eval_corpus, eval_split, eval_fragment, eval_report,
      eval_format = "table", eval_transcript;
  bool eval_judge = true, eval_benign = true;
  evaluate->add_option("--corpus", eval_corpus, "Corpus JSONL")->required();
  evaluate->add_option("--split", eval_split, "Split JSON")->required();
  add_config_flags(evaluate, eval_flags);
  evaluate->add_option("--fragment-file", eval_fragment,
                       "Fragment JSON to defend with");
  evaluate->add_flag("--judge,!--no-judge", eval_judge,
                     "Also compute judge-based leakage");
  evaluate->add_flag("--benign,!--no-benign", eval_benign,
                     "Also compute benign-utility metrics");
  evaluate->add_option("--report", eval_report, "Write the report here");
  evaluate->add_option("--format", eval_format, "Report format: json|table");
  evaluate->add_option("--transcript", eval_transcript,
                       "Write a JSONL gateway transcript (forces serial "
                       "evaluation)");

  // baseline
  auto* baseline = app.add_subcommand(
      "baseline", "Evaluate the three substitution-payload baselines");
  ConfigFlags base_flags;
  std::string base_corpus, base_split, base_report, base_format = "table";
  baseline->add_option("--corpus", base_corpus, "Corpus JSONL")->required();
  baseline->add_option("--split", base_split, "Split JSON")->required();
  add_config_flags(baseline, base_flags);
  baseline->add_option("--report", base_report, "Write the report here");
  baseline->add_option("--format", base_format, "Report format: json|table");

  // export-site
  auto* export_site = app.add_subcommand("export-site",
                                         "Write the corpus as a static site");
  std::string site_corpus, site_split, site_fragment, site_out;
  export_site->add_option("--corpus", site_corpus, "Corpus JSONL")->required();
  export_site->add_option("--split", site_split,
                          "Split JSON (exports the eval set)");
  export_site->add_option("--fragment-file", site_fragment,
                          "Defend exported pages with this fragment");
  export_site->add_option("--out", site_out, "Output directory")->required();

  // report
  auto* report = app.add_subcommand("report", "Re-render a JSON report");
  std::string report_in, report_format = "table", report_out;
  report->add_option("--in", report_in, "Report JSON path")->required();
  report->add_option("--format", report_format, "Output format: json|table");
  report->add_option("--out", report_out, "Output path (default stdout)");

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);  // prints the message and synopsis pointer to stderr
    return 2;
  }

  try {
    if (gen->parsed()) return cmd_gen(gen_count, gen_seed, gen_out);
    if (split->parsed())
      return cmd_split(split_corpus_path, split_out, split_spec);
    if (optimize->parsed())
      return cmd_optimize(opt_flags, opt_corpus, opt_split, opt_checkpoint,
                          opt_resume, opt_pool_out, opt_winner_out, opt_report,
                          opt_format, opt_transcript);
    if (evaluate->parsed())
      return cmd_evaluate(eval_flags, eval_corpus, eval_split, eval_fragment,
                          eval_judge, eval_benign, eval_report, eval_format,
                          eval_transcript);
    if (baseline->parsed())
      return cmd_baseline(base_flags, base_corpus, base_split, base_report,
                          base_format);
    if (export_site->parsed())
      return cmd_export_site(site_corpus, site_split, site_fragment, site_out);
    if (report->parsed())
      return cmd_report(report_in, report_format, report_out);
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 2;  // unreachable with require_subcommand(1)
}

}  // namespace pageguard
