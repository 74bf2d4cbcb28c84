#pragma once

#include <optional>
#include <string>
#include <vector>

#include "pageguard/corpus.hpp"
#include "pageguard/evaluator.hpp"
#include "pageguard/fragments.hpp"
#include "pageguard/gateway.hpp"
#include "pageguard/rng.hpp"

namespace pageguard {

struct CandidateScore {
  double mu0 = 0.0;                // fraction of pages with zero leakage
  double mu025 = 0.0;              // fraction with leakage <= 0.25
  double mean_rule_leakage = 0.0;
  double utility = 0.0;            // 2*mu0 + (1 - mean) + 0.25*mu025
};

struct Candidate {
  DefenseFragment fragment;
  std::optional<CandidateScore> score;
  int lineage_depth = 0;
  std::optional<std::string> parent_id;
  std::optional<MutationOperator> operator_used;
  int generation = 0;  // search iteration that produced it; seeds are 0
};

// Candidates keep insertion order (the final tie-breaker everywhere);
// lookup by id goes through find().
struct CandidatePool {
  std::vector<Candidate> candidates;
  int iteration = 0;
  SeededRng rng{0};

  Candidate* find(const std::string& fragment_id);
  const Candidate* find(const std::string& fragment_id) const;
};

// Search-time knobs. Defaults are the ones the whole pipeline is tuned
// around: 10 iterations, 3 children per batch, epsilon 0.15, depth cap 3,
// 20 seeds, 80 scoring pages, 100 eval pages, 1200-char fragments.
struct RunConfig {
  int T = 10;
  int batch = 3;
  double epsilon = 0.15;
  int D = 3;
  int seed_count = 20;
  int scoring_size = 80;
  int eval_size = 100;
  DefenseMode mode = DefenseMode::kBase;
  std::vector<Slot> slots;  // empty -> slots_for_mode(mode)
  int budget_chars = 1200;
  uint64_t rng_seed = 0;
  FilterFamily family = FilterFamily::kMixed;
  GatewayConfig gateway;

  const std::vector<Slot>& effective_slots() const;
};

std::string run_config_to_json(const RunConfig& cfg);
RunConfig run_config_from_json(const std::string& json_text);
// Stable content hash of the resolved config, for report/config linkage.
std::string run_config_hash(const RunConfig& cfg);

CandidatePool init_pool(const std::vector<std::string>& seed_texts,
                        const std::vector<Slot>& slots);

CandidateScore composite_utility(const std::vector<double>& per_page_leakage);

// Unscored candidates first (lowest generation, then insertion order).
// Otherwise epsilon-greedy over expandable candidates (scored, depth < D):
// with probability epsilon a uniform random one, else the utility argmax
// with ties broken by lower depth, then insertion order. Consumes pool RNG
// only on the scored branch.
Candidate& select_parent(CandidatePool& pool, double epsilon, int depth_budget);

// Everything child scoring needs besides the gateway. serial forces the
// plain loop so transcript entries keep call order.
struct ScoringContext {
  const std::vector<const PageRecord*>* scoring_pages = nullptr;
  DefenseMode mode = DefenseMode::kBase;
  FilterFamily family = FilterFamily::kMixed;
  int budget_chars = 1200;
  bool serial = false;
};

CandidateScore score_fragment(ModelGateway& gateway,
                              const DefenseFragment& fragment,
                              const ScoringContext& ctx);

// Samples `batch` mutation operators without replacement (hybridize only
// when a scored non-parent peer with utility >= parent's exists), asks the
// gateway for one child per operator, scores each valid child, inserts it
// into the pool, and returns copies of the inserted candidates.
std::vector<Candidate> spawn_children(Candidate& parent, CandidatePool& pool,
                                      ModelGateway& gateway, int batch,
                                      const ScoringContext& ctx);

// Audit record: one entry per select_parent call inside run_search.
struct SearchTrace {
  struct Step {
    int iteration = 0;
    bool pool_had_unscored = false;
    bool selected_unscored = false;
    std::string selected_id;
    std::vector<std::string> operators;
  };
  std::vector<Step> steps;
};

std::string pool_to_json(const CandidatePool& pool);
CandidatePool pool_from_json(const std::string& json_text);
void write_checkpoint(const CandidatePool& pool, const std::string& path);
CandidatePool read_checkpoint(const std::string& path);

// T iterations of select_parent + spawn_children over the scoring set in
// rule-only mode; seeds are scored before iteration 1. A checkpoint path
// makes every iteration durable; resume_from continues a previous run
// bit-identically.
CandidatePool run_search(const RunConfig& cfg,
                         const std::vector<const PageRecord*>& scoring_pages,
                         ModelGateway& gateway,
                         const std::string& checkpoint_path = "",
                         const std::string& resume_from = "",
                         SearchTrace* trace = nullptr);

// Per slot, the maximum-utility scored candidate (ties: lower depth, then
// insertion order).
std::vector<Candidate> promote_survivors(const CandidatePool& pool,
                                         const std::vector<Slot>& slots);

// Argmin of mean judge leakage; ties by lower mean rule leakage, then
// higher utility, then survivor order.
Candidate final_select(
    const std::vector<Candidate>& survivors,
    const std::vector<std::vector<LeakageReport>>& judge_reports);

}  // namespace pageguard
