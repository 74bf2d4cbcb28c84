#include <cstdio>

#include <json.hpp>

#include "pageguard/optimizer.hpp"

namespace pageguard {

namespace {

using nlohmann::json;

json endpoint_to_json(const RoleEndpoint& endpoint) {
  return json{{"url", endpoint.url},
              {"model", endpoint.model},
              {"api_key_env", endpoint.api_key_env}};
}

void endpoint_from_json(const json& j, RoleEndpoint& endpoint) {
  if (j.contains("url")) endpoint.url = j["url"].get<std::string>();
  if (j.contains("model")) endpoint.model = j["model"].get<std::string>();
  if (j.contains("api_key_env"))
    endpoint.api_key_env = j["api_key_env"].get<std::string>();
}

json gateway_to_json(const GatewayConfig& gw) {
  return json{{"mock", gw.mock},
              {"persona", gw.persona},
              {"compliance_generation", gw.compliance_generation},
              {"budget_chars", gw.budget_chars},
              {"timeout_seconds", gw.timeout_seconds},
              {"max_retries", gw.max_retries},
              {"max_in_flight", gw.max_in_flight},
              {"target", endpoint_to_json(gw.target)},
              {"sanitizer", endpoint_to_json(gw.sanitizer)},
              {"judge", endpoint_to_json(gw.judge)},
              {"mutator", endpoint_to_json(gw.mutator)},
              {"qa_judge", endpoint_to_json(gw.qa_judge)}};
}

// Missing keys keep their defaults, so partial config files are valid.
void gateway_from_json(const json& j, GatewayConfig& gw) {
  if (j.contains("mock")) gw.mock = j["mock"].get<bool>();
  if (j.contains("persona")) gw.persona = j["persona"].get<std::string>();
  if (j.contains("compliance_generation"))
    gw.compliance_generation = j["compliance_generation"].get<int>();
  if (j.contains("budget_chars")) gw.budget_chars = j["budget_chars"].get<int>();
  if (j.contains("timeout_seconds"))
    gw.timeout_seconds = j["timeout_seconds"].get<double>();
  if (j.contains("max_retries")) gw.max_retries = j["max_retries"].get<int>();
  if (j.contains("max_in_flight"))
    gw.max_in_flight = j["max_in_flight"].get<int>();
  if (j.contains("target")) endpoint_from_json(j["target"], gw.target);
  if (j.contains("sanitizer")) endpoint_from_json(j["sanitizer"], gw.sanitizer);
  if (j.contains("judge")) endpoint_from_json(j["judge"], gw.judge);
  if (j.contains("mutator")) endpoint_from_json(j["mutator"], gw.mutator);
  if (j.contains("qa_judge")) endpoint_from_json(j["qa_judge"], gw.qa_judge);
}

}  // namespace

std::string run_config_to_json(const RunConfig& cfg) {
  json slots = json::array();
  for (Slot slot : cfg.slots) slots.push_back(std::string(slot_name(slot)));
  json j{{"T", cfg.T},
         {"batch", cfg.batch},
         {"epsilon", cfg.epsilon},
         {"D", cfg.D},
         {"seed_count", cfg.seed_count},
         {"scoring_size", cfg.scoring_size},
         {"eval_size", cfg.eval_size},
         {"mode", std::string(mode_name(cfg.mode))},
         {"slots", std::move(slots)},
         {"budget_chars", cfg.budget_chars},
         {"rng_seed", cfg.rng_seed},
         {"family", std::string(family_name(cfg.family))},
         {"gateway", gateway_to_json(cfg.gateway)}};
  return j.dump(2);
}

RunConfig run_config_from_json(const std::string& json_text) {
  json j = json::parse(json_text);
  RunConfig cfg;
  if (j.contains("T")) cfg.T = j["T"].get<int>();
  if (j.contains("batch")) cfg.batch = j["batch"].get<int>();
  if (j.contains("epsilon")) cfg.epsilon = j["epsilon"].get<double>();
  if (j.contains("D")) cfg.D = j["D"].get<int>();
  if (j.contains("seed_count")) cfg.seed_count = j["seed_count"].get<int>();
  if (j.contains("scoring_size"))
    cfg.scoring_size = j["scoring_size"].get<int>();
  if (j.contains("eval_size")) cfg.eval_size = j["eval_size"].get<int>();
  if (j.contains("mode")) cfg.mode = mode_from_name(j["mode"].get<std::string>());
  if (j.contains("slots")) {
    cfg.slots.clear();
    for (const json& name : j["slots"])
      cfg.slots.push_back(slot_from_name(name.get<std::string>()));
  }
  if (j.contains("budget_chars"))
    cfg.budget_chars = j["budget_chars"].get<int>();
  if (j.contains("rng_seed")) cfg.rng_seed = j["rng_seed"].get<uint64_t>();
  if (j.contains("family"))
    cfg.family = family_from_name(j["family"].get<std::string>());
  if (j.contains("gateway")) gateway_from_json(j["gateway"], cfg.gateway);
  return cfg;
}

std::string run_config_hash(const RunConfig& cfg) {
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx",
                static_cast<unsigned long long>(fnv1a64(run_config_to_json(cfg))));
  return buf;
}

}  // namespace pageguard
