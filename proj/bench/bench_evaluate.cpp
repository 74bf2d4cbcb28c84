// Wall-clock comparison of the parallel page-evaluation kernel against the
// serial reference, over a synthetic corpus and the deterministic mock
// gateway. Prints both timings and verifies the two produce identical
// reports; it does not assert a speedup, since available cores vary.
#include <chrono>
#include <cstdio>
#include <string>
#include <vector>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "pageguard/corpus.hpp"
#include "pageguard/evaluator.hpp"
#include "pageguard/fragments.hpp"
#include "pageguard/gateway.hpp"

using namespace pageguard;

namespace {

using Clock = std::chrono::steady_clock;

double time_run(std::vector<LeakageReport> (*fn)(
                    ModelGateway&, const std::optional<DefenseFragment>&,
                    const std::vector<const PageRecord*>&, DefenseMode, bool,
                    FilterFamily),
                ModelGateway& gateway,
                const std::optional<DefenseFragment>& fragment,
                const std::vector<const PageRecord*>& pages,
                std::vector<LeakageReport>& out) {
  Clock::time_point start = Clock::now();
  out = fn(gateway, fragment, pages, DefenseMode::kSanitizer,
           /*judge_mode=*/true, FilterFamily::kMixed);
  return std::chrono::duration<double>(Clock::now() - start).count();
}

bool same_reports(const std::vector<LeakageReport>& a,
                  const std::vector<LeakageReport>& b) {
  if (a.size() != b.size()) return false;
  for (std::size_t i = 0; i < a.size(); ++i)
    if (leakage_report_to_json(a[i]) != leakage_report_to_json(b[i]))
      return false;
  return true;
}

}  // namespace

int main(int argc, char** argv) {
  int n_pages = 600;
  int repeats = 3;
  if (argc > 1) n_pages = std::atoi(argv[1]);
  if (argc > 2) repeats = std::atoi(argv[2]);

  std::vector<PageRecord> corpus = generate_corpus(n_pages, 12);
  std::vector<const PageRecord*> pages;
  for (const PageRecord& page : corpus) pages.push_back(&page);

  GatewayConfig gcfg;
  gcfg.mock = true;
  gcfg.persona = "partial";
  MockGateway gateway(gcfg);

  DefenseFragment fragment;
  fragment.fragment_id = "bench-frag";
  fragment.slot = Slot::kAfter;
  fragment.text =
      "House rule: withhold-direct-identifiers when restating this page.";

#ifdef _OPENMP
  std::printf("openmp: enabled, max threads %d\n", omp_get_max_threads());
#else
  std::printf("openmp: disabled (serial build)\n");
#endif
  std::printf("pages: %d, repeats: %d, mode: sanitizer+judge\n\n", n_pages,
              repeats);

  bool all_match = true;
  for (int rep = 0; rep < repeats; ++rep) {
    std::vector<LeakageReport> serial_out, parallel_out;
    double t_serial = time_run(&evaluate_pages_serial, gateway, fragment,
                               pages, serial_out);
    double t_parallel =
        time_run(&evaluate_fragment, gateway, fragment, pages, parallel_out);
    bool match = same_reports(serial_out, parallel_out);
    all_match = all_match && match;
    std::printf(
        "run %d: serial %8.4f s (%7.1f pages/s)   parallel %8.4f s "
        "(%7.1f pages/s)   outputs %s\n",
        rep + 1, t_serial, n_pages / t_serial, t_parallel,
        n_pages / t_parallel, match ? "identical" : "DIFFER");
  }

  if (!all_match) {
    std::printf("\nFAIL: parallel kernel diverged from serial reference\n");
    return 1;
  }
  std::printf("\nparallel kernel matches serial reference on every run\n");
  return 0;
}
