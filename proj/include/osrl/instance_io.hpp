#pragma once

#include <filesystem>
#include <string>

#include <json.hpp>

#include "osrl/core_model.hpp"

namespace osrl {

// Instance document:
//   { "states": n | [labels], "actions": [{"cost": c, "q": [...]}], "support": [[...]],
//     "utility": [[...]], "b_s": x, "b_u": y, "n_observations": C (optional) }
nlohmann::json instance_to_json(const Instance& inst);
Instance instance_from_json(const nlohmann::json& doc);

std::string dump_instance(const Instance& inst);
Instance parse_instance(const std::string& text);

void save_instance(const Instance& inst, const std::filesystem::path& path);
Instance load_instance(const std::filesystem::path& path);

nlohmann::json support_to_json(const BeliefSupport& support);
BeliefSupport support_from_json(const nlohmann::json& doc);

nlohmann::json rule_to_json(const ScoringRule& s);
ScoringRule rule_from_json(const nlohmann::json& doc);

/// FNV-1a over the canonical dump; stable across runs.
std::uint64_t instance_hash(const Instance& inst);

}  // namespace osrl
