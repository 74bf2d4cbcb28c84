#pragma once

#include <array>
#include <optional>
#include <string>
#include <vector>

#include "pageguard/corpus.hpp"
#include "pageguard/fragments.hpp"
#include "pageguard/gateway.hpp"
#include "pageguard/matcher.hpp"

namespace pageguard {

enum class LeakKind { kRule, kJudge };

// Per-page outcome across access paths. The sanitized path exists only in
// sanitizer mode; judge ratios only when the judge was consulted. A page the
// gateway could not score is flagged unscored and carries no aggregates.
struct LeakageReport {
  std::string page_id;
  LeakageRatio rule_raw;
  std::optional<LeakageRatio> rule_san;
  std::optional<LeakageRatio> judge_raw;
  std::optional<LeakageRatio> judge_san;
  double aggregate_rule = 0.0;          // max over present paths
  std::optional<double> aggregate_judge;
  bool unscored = false;
};

struct MetricsReport {
  double dsr_rule = 0.0;
  std::optional<double> dsr_judge;
  std::optional<double> maf1;  // percentage
  std::optional<double> bcr;   // percentage
  int n_pages = 0;
  int n_unscored = 0;
  // Scored pages on which each field leaked (rule mode, any path), indexed
  // by PiiField order.
  std::array<int, kAllPiiFields.size()> rule_leaks_per_field{};
};

LeakageReport evaluate_fragment_on_page(
    ModelGateway& gateway, const PageRecord& page,
    const std::optional<DefenseFragment>& fragment, DefenseMode mode,
    bool judge_mode, FilterFamily family);

// One report per page, input order preserved. Pages are independent, so the
// loop fans out with OpenMP; evaluate_pages_serial is the plain-loop
// reference the tests and the benchmark compare against.
std::vector<LeakageReport> evaluate_fragment(
    ModelGateway& gateway, const std::optional<DefenseFragment>& fragment,
    const std::vector<const PageRecord*>& pages, DefenseMode mode,
    bool judge_mode, FilterFamily family);

std::vector<LeakageReport> evaluate_pages_serial(
    ModelGateway& gateway, const std::optional<DefenseFragment>& fragment,
    const std::vector<const PageRecord*>& pages, DefenseMode mode,
    bool judge_mode, FilterFamily family);

double compute_dsr(const std::vector<LeakageReport>& reports, LeakKind which);

// Max token F1 over the gold set: lowercase, punctuation stripped,
// articles a/an/the dropped, whitespace-split, multiset overlap.
double compute_maf1(const std::string& answer,
                    const std::vector<std::string>& gold);

double compute_bcr(const std::vector<bool>& grades);

// Benign-utility pass: ask each page's benign question against the raw
// defended page, score MAF1 and judge-graded correctness.
struct BenignResult {
  double maf1 = 0.0;  // percentage
  double bcr = 0.0;   // percentage
  int n_pages = 0;
};

BenignResult evaluate_benign(ModelGateway& gateway,
                             const std::optional<DefenseFragment>& fragment,
                             const std::vector<const PageRecord*>& pages,
                             DefenseMode mode);

MetricsReport build_metrics(const std::vector<LeakageReport>& reports,
                            const std::optional<BenignResult>& benign);

// Report-file serialization (used by the CLI report writer).
std::string leakage_report_to_json(const LeakageReport& report);
LeakageReport leakage_report_from_json(const std::string& json_text);
std::string metrics_to_json(const MetricsReport& metrics);
MetricsReport metrics_from_json(const std::string& json_text);

}  // namespace pageguard
