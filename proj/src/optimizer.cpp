#include "pageguard/optimizer.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <limits>

#include <json.hpp>

#include "pageguard/assets.hpp"
#include "pageguard/errors.hpp"

namespace pageguard {

namespace {

using nlohmann::json;

std::string seed_candidate_id(std::size_t seed_index, Slot slot) {
  char buf[16];
  std::snprintf(buf, sizeof(buf), "seed-%02zu-", seed_index);
  return buf + std::string(slot_name(slot));
}

std::string mutant_candidate_id(std::size_t pool_size) {
  char buf[16];
  std::snprintf(buf, sizeof(buf), "mut-%04zu", pool_size);
  return buf;
}

bool expandable(const Candidate& c, int depth_budget) {
  return c.score.has_value() && c.lineage_depth < depth_budget;
}

// Utility argmax with the house tie-break: lower depth, then insertion order.
bool better_by_utility(const Candidate& challenger, const Candidate& best) {
  if (challenger.score->utility != best.score->utility)
    return challenger.score->utility > best.score->utility;
  return challenger.lineage_depth < best.lineage_depth;
}

json candidate_to_json(const Candidate& c) {
  json j;
  j["fragment"] = json::parse(fragment_to_json(c.fragment));
  if (c.score) {
    j["score"] = json{{"mu0", c.score->mu0},
                      {"mu025", c.score->mu025},
                      {"mean_rule_leakage", c.score->mean_rule_leakage},
                      {"utility", c.score->utility}};
  } else {
    j["score"] = nullptr;
  }
  j["lineage_depth"] = c.lineage_depth;
  j["parent_id"] = c.parent_id ? json(*c.parent_id) : json(nullptr);
  j["operator_used"] =
      c.operator_used ? json(std::string(operator_name(*c.operator_used)))
                      : json(nullptr);
  j["generation"] = c.generation;
  return j;
}

Candidate candidate_from_json(const json& j) {
  Candidate c;
  c.fragment = fragment_from_json(j.at("fragment").dump());
  if (!j.at("score").is_null()) {
    const json& s = j["score"];
    CandidateScore score;
    score.mu0 = s.at("mu0").get<double>();
    score.mu025 = s.at("mu025").get<double>();
    score.mean_rule_leakage = s.at("mean_rule_leakage").get<double>();
    score.utility = s.at("utility").get<double>();
    c.score = score;
  }
  c.lineage_depth = j.at("lineage_depth").get<int>();
  if (!j.at("parent_id").is_null())
    c.parent_id = j["parent_id"].get<std::string>();
  if (!j.at("operator_used").is_null())
    c.operator_used = operator_from_name(j["operator_used"].get<std::string>());
  c.generation = j.at("generation").get<int>();
  return c;
}

}  // namespace

Candidate* CandidatePool::find(const std::string& fragment_id) {
  for (Candidate& c : candidates)
    if (c.fragment.fragment_id == fragment_id) return &c;
  return nullptr;
}

const Candidate* CandidatePool::find(const std::string& fragment_id) const {
  for (const Candidate& c : candidates)
    if (c.fragment.fragment_id == fragment_id) return &c;
  return nullptr;
}

const std::vector<Slot>& RunConfig::effective_slots() const {
  return slots.empty() ? slots_for_mode(mode) : slots;
}

CandidatePool init_pool(const std::vector<std::string>& seed_texts,
                        const std::vector<Slot>& slots) {
  if (seed_texts.empty()) throw EmptySeeds("init_pool: no seed texts");
  if (slots.empty()) throw EmptySeeds("init_pool: no slots");
  CandidatePool pool;
  pool.candidates.reserve(seed_texts.size() * slots.size());
  for (std::size_t i = 0; i < seed_texts.size(); ++i) {
    for (Slot slot : slots) {
      Candidate c;
      c.fragment.fragment_id = seed_candidate_id(i, slot);
      c.fragment.slot = slot;
      c.fragment.text = seed_texts[i];
      pool.candidates.push_back(std::move(c));
    }
  }
  return pool;
}

CandidateScore composite_utility(const std::vector<double>& per_page_leakage) {
  if (per_page_leakage.empty())
    throw EmptyInput("composite_utility: empty leakage list");
  CandidateScore score;
  int zero = 0, low = 0;
  double sum = 0.0;
  for (double leak : per_page_leakage) {
    if (leak <= 0.0) ++zero;
    if (leak <= 0.25) ++low;
    sum += leak;
  }
  const double n = static_cast<double>(per_page_leakage.size());
  score.mu0 = zero / n;
  score.mu025 = low / n;
  score.mean_rule_leakage = sum / n;
  score.utility =
      2.0 * score.mu0 + (1.0 - score.mean_rule_leakage) + 0.25 * score.mu025;
  return score;
}

Candidate& select_parent(CandidatePool& pool, double epsilon,
                         int depth_budget) {
  if (pool.candidates.empty())
    throw NoExpandableCandidates("select_parent: empty pool");

  Candidate* unscored = nullptr;
  for (Candidate& c : pool.candidates) {
    if (c.score) continue;
    if (!unscored || c.generation < unscored->generation) unscored = &c;
  }
  if (unscored) return *unscored;

  std::vector<Candidate*> pickable;
  for (Candidate& c : pool.candidates)
    if (expandable(c, depth_budget)) pickable.push_back(&c);
  if (pickable.empty())
    throw NoExpandableCandidates("select_parent: all candidates at the depth cap");

  if (pool.rng.uniform01() < epsilon)
    return *pickable[pool.rng.bounded(pickable.size())];

  Candidate* best = pickable.front();
  for (Candidate* c : pickable)
    if (better_by_utility(*c, *best)) best = c;
  return *best;
}

CandidateScore score_fragment(ModelGateway& gateway,
                              const DefenseFragment& fragment,
                              const ScoringContext& ctx) {
  std::vector<LeakageReport> reports =
      ctx.serial ? evaluate_pages_serial(gateway, fragment, *ctx.scoring_pages,
                                         ctx.mode, /*judge_mode=*/false,
                                         ctx.family)
                 : evaluate_fragment(gateway, fragment, *ctx.scoring_pages,
                                     ctx.mode, /*judge_mode=*/false,
                                     ctx.family);
  std::vector<double> leakage;
  leakage.reserve(reports.size());
  for (const LeakageReport& report : reports)
    if (!report.unscored) leakage.push_back(report.aggregate_rule);
  if (leakage.empty())
    throw NoScoredReports("score_fragment: every scoring page failed");
  return composite_utility(leakage);
}

std::vector<Candidate> spawn_children(Candidate& parent, CandidatePool& pool,
                                      ModelGateway& gateway, int batch,
                                      const ScoringContext& ctx) {
  if (!parent.score)
    throw NoScoredReports("spawn_children: parent is unscored");
  // Copy what we need up front: inserting children reallocates the pool
  // vector and would invalidate the parent reference.
  const Candidate parent_copy = parent;

  // A hybridize peer must be a scored non-parent at least as good as the
  // parent; the best such candidate (insertion order on ties) is used.
  const Candidate* peer = nullptr;
  for (const Candidate& c : pool.candidates) {
    if (&c == &parent || !c.score) continue;
    if (c.score->utility < parent_copy.score->utility) continue;
    if (!peer || c.score->utility > peer->score->utility) peer = &c;
  }
  std::optional<DefenseFragment> peer_fragment;
  if (peer) peer_fragment = peer->fragment;

  std::vector<MutationOperator> operators;
  for (MutationOperator op : all_mutation_operators())
    if (op != MutationOperator::kHybridize || peer) operators.push_back(op);
  // Partial Fisher-Yates: the first `batch` entries are the sample.
  const std::size_t take =
      std::min<std::size_t>(static_cast<std::size_t>(batch), operators.size());
  for (std::size_t k = 0; k < take; ++k) {
    std::size_t j = k + pool.rng.bounded(operators.size() - k);
    std::swap(operators[k], operators[j]);
  }
  operators.resize(take);

  std::vector<Candidate> spawned;
  for (MutationOperator op : operators) {
    std::vector<DefenseFragment> children;
    try {
      children = gateway.mutate_fragment(op, parent_copy.fragment,
                                         peer_fragment, /*batch=*/1,
                                         parent_copy.lineage_depth + 1);
    } catch (const MutatorEmpty& e) {
      std::cerr << "mutation produced nothing: " << e.what() << "\n";
      continue;
    }
    for (DefenseFragment& fragment : children) {
      if (!fragment_valid(fragment, ctx.mode, ctx.budget_chars)) continue;
      Candidate child;
      child.fragment = std::move(fragment);
      child.fragment.fragment_id = mutant_candidate_id(pool.candidates.size());
      child.lineage_depth = parent_copy.lineage_depth + 1;
      child.parent_id = parent_copy.fragment.fragment_id;
      child.operator_used = op;
      child.generation = pool.iteration;
      child.score = score_fragment(gateway, child.fragment, ctx);
      pool.candidates.push_back(child);
      spawned.push_back(std::move(child));
    }
  }
  return spawned;
}

std::string pool_to_json(const CandidatePool& pool) {
  json j;
  j["asset_version"] = assets::kAssetVersion;
  j["iteration"] = pool.iteration;
  j["rng_state"] = pool.rng.save_state();
  json list = json::array();
  for (const Candidate& c : pool.candidates) list.push_back(candidate_to_json(c));
  j["candidates"] = std::move(list);
  return j.dump(2);
}

CandidatePool pool_from_json(const std::string& json_text) {
  json j = json::parse(json_text);
  CandidatePool pool;
  pool.iteration = j.at("iteration").get<int>();
  pool.rng.restore_state(j.at("rng_state").get<std::string>());
  for (const json& entry : j.at("candidates"))
    pool.candidates.push_back(candidate_from_json(entry));
  return pool;
}

void write_checkpoint(const CandidatePool& pool, const std::string& path) {
  const std::string tmp = path + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary);
    if (!out) throw IoFailure("cannot open for writing: " + tmp);
    out << pool_to_json(pool) << '\n';
    if (!out) throw IoFailure("write failed: " + tmp);
  }
  if (std::rename(tmp.c_str(), path.c_str()) != 0)
    throw IoFailure("cannot move checkpoint into place: " + path);
}

CandidatePool read_checkpoint(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoFailure("cannot open checkpoint: " + path);
  std::string text((std::istreambuf_iterator<char>(in)),
                   std::istreambuf_iterator<char>());
  return pool_from_json(text);
}

CandidatePool run_search(const RunConfig& cfg,
                         const std::vector<const PageRecord*>& scoring_pages,
                         ModelGateway& gateway,
                         const std::string& checkpoint_path,
                         const std::string& resume_from, SearchTrace* trace) {
  CandidatePool pool;
  if (!resume_from.empty()) {
    pool = read_checkpoint(resume_from);
  } else {
    std::vector<std::string> seeds;
    for (std::string_view text : assets::kSeedFragmentTexts)
      seeds.emplace_back(text);
    seeds.resize(std::min<std::size_t>(seeds.size(),
                                       static_cast<std::size_t>(cfg.seed_count)));
    pool = init_pool(seeds, cfg.effective_slots());
    pool.rng = SeededRng(cfg.rng_seed);
  }

  ScoringContext ctx;
  ctx.scoring_pages = &scoring_pages;
  ctx.mode = cfg.mode;
  ctx.family = cfg.family;
  ctx.budget_chars = cfg.budget_chars;

  auto record_step = [&](const Candidate& selected, bool had_unscored) {
    if (!trace) return;
    SearchTrace::Step step;
    step.iteration = pool.iteration;
    step.pool_had_unscored = had_unscored;
    step.selected_unscored = !selected.score.has_value();
    step.selected_id = selected.fragment.fragment_id;
    trace->steps.push_back(std::move(step));
  };

  // Score the whole starting pool before any mutation happens.
  while (std::any_of(pool.candidates.begin(), pool.candidates.end(),
                     [](const Candidate& c) { return !c.score; })) {
    Candidate& next = select_parent(pool, cfg.epsilon, cfg.D);
    record_step(next, /*had_unscored=*/true);
    next.score = score_fragment(gateway, next.fragment, ctx);
  }
  if (!checkpoint_path.empty() && resume_from.empty())
    write_checkpoint(pool, checkpoint_path);

  for (int iter = pool.iteration + 1; iter <= cfg.T; ++iter) {
    Candidate* parent = nullptr;
    try {
      parent = &select_parent(pool, cfg.epsilon, cfg.D);
    } catch (const NoExpandableCandidates&) {
      break;  // saturated pool: nothing left under the depth cap
    }
    pool.iteration = iter;
    record_step(*parent, /*had_unscored=*/false);
    std::vector<Candidate> children =
        spawn_children(*parent, pool, gateway, cfg.batch, ctx);
    if (trace && !trace->steps.empty()) {
      for (const Candidate& child : children)
        trace->steps.back().operators.emplace_back(
            operator_name(*child.operator_used));
    }
    if (!checkpoint_path.empty()) write_checkpoint(pool, checkpoint_path);
  }
  return pool;
}

std::vector<Candidate> promote_survivors(const CandidatePool& pool,
                                         const std::vector<Slot>& slots) {
  std::vector<Candidate> survivors;
  survivors.reserve(slots.size());
  for (Slot slot : slots) {
    const Candidate* best = nullptr;
    for (const Candidate& c : pool.candidates) {
      if (c.fragment.slot != slot || !c.score) continue;
      if (!best || better_by_utility(c, *best)) best = &c;
    }
    if (!best)
      throw SlotUnpopulated("no scored candidate for slot " +
                            std::string(slot_name(slot)));
    survivors.push_back(*best);
  }
  return survivors;
}

Candidate final_select(
    const std::vector<Candidate>& survivors,
    const std::vector<std::vector<LeakageReport>>& judge_reports) {
  if (survivors.empty() || survivors.size() != judge_reports.size())
    throw EmptyInput("final_select: survivors and reports must pair up");

  auto mean_of = [](const std::vector<LeakageReport>& reports, LeakKind kind) {
    double sum = 0.0;
    int n = 0;
    for (const LeakageReport& report : reports) {
      if (report.unscored) continue;
      if (kind == LeakKind::kJudge) {
        if (!report.aggregate_judge) continue;
        sum += *report.aggregate_judge;
      } else {
        sum += report.aggregate_rule;
      }
      ++n;
    }
    return n == 0 ? std::numeric_limits<double>::infinity() : sum / n;
  };

  std::size_t winner = 0;
  double best_judge = mean_of(judge_reports[0], LeakKind::kJudge);
  double best_rule = mean_of(judge_reports[0], LeakKind::kRule);
  for (std::size_t i = 1; i < survivors.size(); ++i) {
    double judge = mean_of(judge_reports[i], LeakKind::kJudge);
    double rule = mean_of(judge_reports[i], LeakKind::kRule);
    bool take = false;
    if (judge != best_judge) {
      take = judge < best_judge;
    } else if (rule != best_rule) {
      take = rule < best_rule;
    } else if (survivors[i].score && survivors[winner].score) {
      take = survivors[i].score->utility > survivors[winner].score->utility;
    }
    if (take) {
      winner = i;
      best_judge = judge;
      best_rule = rule;
    }
  }
  return survivors[winner];
}

}  // namespace pageguard
