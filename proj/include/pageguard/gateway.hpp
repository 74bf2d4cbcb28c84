#pragma once

#include <condition_variable>
#include <cstdint>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "pageguard/fragments.hpp"

namespace pageguard {

enum class ModelRole { kTarget, kSanitizer, kJudge, kMutator, kQaJudge };

enum class FilterFamily {
  kReaderPreserving,
  kStructureFirst,
  kOrdinarySecurity,
  kCanonical,
  kMixed,  // selector only; resolved per page before any model call
};

enum class MutationOperator {
  kRewriteText,
  kSubstituteSlot,
  kHybridize,
  kTightenPolicy,
  kAddSafeChannel,
  kMoveSlot,
  kCompressUnderBudget,
};

std::string_view role_name(ModelRole role);
std::string_view family_name(FilterFamily family);
FilterFamily family_from_name(std::string_view name);
std::string_view operator_name(MutationOperator op);
MutationOperator operator_from_name(std::string_view name);
const std::vector<MutationOperator>& all_mutation_operators();

struct ModelResponse {
  std::string text;
  ModelRole role = ModelRole::kTarget;
  long latency_ms = 0;
  bool truncated = false;
};

struct JudgeReconstruction {
  std::optional<std::string> name;
  std::optional<std::string> phone;
  std::optional<std::string> email;
  std::optional<std::string> address;

  bool empty() const { return !name && !phone && !email && !address; }
  // All recovered fields as one text, for leak-conservative rematching.
  std::string combined_text() const;
};

struct RoleEndpoint {
  std::string url;
  std::string model;
  std::string api_key_env;  // key read from the environment at call time
};

struct GatewayConfig {
  bool mock = true;
  std::string persona = "echo";  // mock target: echo|compliant|partial|ipi-faithful
  int compliance_generation = 1;  // mock mutator injects the token from here on
  int budget_chars = 1200;
  double timeout_seconds = 30.0;
  int max_retries = 3;
  int max_in_flight = 4;
  RoleEndpoint target;
  RoleEndpoint sanitizer;
  RoleEndpoint judge;
  RoleEndpoint mutator;
  RoleEndpoint qa_judge;
};

// Token the compliant mock persona looks for inside injected fragment text.
inline constexpr std::string_view kComplianceToken =
    "withhold-direct-identifiers";
inline constexpr std::string_view kWithheldAnswer =
    "Contact details are withheld.";

class ModelGateway {
 public:
  virtual ~ModelGateway() = default;

  virtual ModelResponse target_answer(const std::string& query,
                                      const std::string& content) = 0;
  virtual std::string sanitize_page(const std::string& content,
                                    FilterFamily family,
                                    const std::string& page_id) = 0;
  virtual JudgeReconstruction judge_reconstruct(
      const std::string& response_text) = 0;
  // child_generation = parent lineage depth + 1; the scripted mock keys its
  // table on (operator, generation), live gateways may ignore it.
  virtual std::vector<DefenseFragment> mutate_fragment(
      MutationOperator op, const DefenseFragment& parent,
      const std::optional<DefenseFragment>& peer, int batch,
      int child_generation) = 0;
  virtual bool grade_benign_answer(const std::string& question,
                                   const std::string& answer,
                                   const std::vector<std::string>& gold) = 0;
};

uint64_t fnv1a64(std::string_view data);

FilterFamily select_filter_family(const std::string& page_id,
                                  FilterFamily configured,
                                  const std::vector<FilterFamily>& families);
const std::vector<FilterFamily>& default_mixed_families();

// Deterministic in-process stand-ins for all five roles; lock-free pure
// functions of their arguments plus the config knobs.
class MockGateway : public ModelGateway {
 public:
  explicit MockGateway(GatewayConfig config);

  ModelResponse target_answer(const std::string& query,
                              const std::string& content) override;
  std::string sanitize_page(const std::string& content, FilterFamily family,
                            const std::string& page_id) override;
  JudgeReconstruction judge_reconstruct(
      const std::string& response_text) override;
  std::vector<DefenseFragment> mutate_fragment(
      MutationOperator op, const DefenseFragment& parent,
      const std::optional<DefenseFragment>& peer, int batch,
      int child_generation) override;
  bool grade_benign_answer(const std::string& question,
                           const std::string& answer,
                           const std::vector<std::string>& gold) override;

 private:
  GatewayConfig config_;
};

// Seam for the HTTP adapter so tests can fake the wire.
struct HttpRequest {
  std::string url;
  std::string api_key;
  std::string body;  // JSON chat-completion payload
  double timeout_seconds = 30.0;
};

struct HttpResult {
  int status = 0;
  std::string body;
  bool transport_error = false;
  bool timed_out = false;
};

class Transport {
 public:
  virtual ~Transport() = default;
  virtual HttpResult post(const HttpRequest& request) = 0;
};

std::unique_ptr<Transport> make_httplib_transport();

// Generic chat-completion client: one system + one user message at
// temperature 0; retries transport failures up to max_retries.
class HttpChatGateway : public ModelGateway {
 public:
  HttpChatGateway(GatewayConfig config, std::unique_ptr<Transport> transport);

  ModelResponse target_answer(const std::string& query,
                              const std::string& content) override;
  std::string sanitize_page(const std::string& content, FilterFamily family,
                            const std::string& page_id) override;
  JudgeReconstruction judge_reconstruct(
      const std::string& response_text) override;
  std::vector<DefenseFragment> mutate_fragment(
      MutationOperator op, const DefenseFragment& parent,
      const std::optional<DefenseFragment>& peer, int batch,
      int child_generation) override;
  bool grade_benign_answer(const std::string& question,
                           const std::string& answer,
                           const std::vector<std::string>& gold) override;

 private:
  std::string complete(ModelRole role, const RoleEndpoint& endpoint,
                       const std::string& system_prompt,
                       const std::string& user_prompt);

  GatewayConfig config_;
  std::unique_ptr<Transport> transport_;
  std::mutex in_flight_mutex_;
  std::condition_variable in_flight_cv_;
  int in_flight_ = 0;
};

std::unique_ptr<ModelGateway> make_gateway(const GatewayConfig& config);

// Reproducibility audit log. Entry order matches call order only when the
// caller evaluates serially; parallel runs should assert on role counts.
class TranscriptLog {
 public:
  struct Entry {
    std::string role;
    std::string page_id;
    std::string request_hash;
    std::string response_text;
  };

  void record(ModelRole role, const std::string& page_id,
              std::string_view request, const std::string& response_text);
  const std::vector<Entry>& entries() const { return entries_; }
  int count_for_role(ModelRole role) const;
  void write_jsonl(const std::string& path) const;

 private:
  std::vector<Entry> entries_;
};

// Pass-through decorator that appends every call to a transcript log.
// Thread-safe: recording is serialized on an internal mutex.
class RecordingGateway : public ModelGateway {
 public:
  RecordingGateway(ModelGateway& inner, TranscriptLog& log);

  ModelResponse target_answer(const std::string& query,
                              const std::string& content) override;
  std::string sanitize_page(const std::string& content, FilterFamily family,
                            const std::string& page_id) override;
  JudgeReconstruction judge_reconstruct(
      const std::string& response_text) override;
  std::vector<DefenseFragment> mutate_fragment(
      MutationOperator op, const DefenseFragment& parent,
      const std::optional<DefenseFragment>& peer, int batch,
      int child_generation) override;
  bool grade_benign_answer(const std::string& question,
                           const std::string& answer,
                           const std::vector<std::string>& gold) override;

 private:
  ModelGateway& inner_;
  TranscriptLog& log_;
  std::mutex mutex_;
};

}  // namespace pageguard
