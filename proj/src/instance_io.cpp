#include "osrl/instance_io.hpp"

#include <fstream>
#include <sstream>

#include "osrl/errors.hpp"

namespace osrl {

using nlohmann::json;

namespace {

std::vector<std::vector<double>> read_matrix(const json& j, const char* what) {
  if (!j.is_array()) throw InvalidInput(std::string("instance json: ") + what + " must be an array");
  std::vector<std::vector<double>> rows;
  for (const auto& r : j) {
    if (!r.is_array()) throw InvalidInput(std::string("instance json: ") + what + " rows must be arrays");
    rows.push_back(r.get<std::vector<double>>());
  }
  return rows;
}

const json& field(const json& doc, const char* key) {
  auto it = doc.find(key);
  if (it == doc.end()) throw InvalidInput(std::string("instance json: missing field '") + key + "'");
  return *it;
}

}  // namespace

json support_to_json(const BeliefSupport& support) {
  json out = json::array();
  for (const auto& b : support.beliefs())
    out.push_back(std::vector<double>(b.probs().begin(), b.probs().end()));
  return out;
}

BeliefSupport support_from_json(const json& doc) {
  std::vector<Belief> beliefs;
  for (auto& row : read_matrix(doc, "support")) beliefs.emplace_back(std::move(row));
  return BeliefSupport(std::move(beliefs));
}

json rule_to_json(const ScoringRule& s) { return s.table().to_nested(); }

ScoringRule rule_from_json(const json& doc) { return ScoringRule(read_matrix(doc, "rule")); }

json instance_to_json(const Instance& inst) {
  json doc;
  if (inst.states().labels.empty())
    doc["states"] = inst.n_states();
  else
    doc["states"] = inst.states().labels;
  json actions = json::array();
  for (std::size_t k = 0; k < inst.n_actions(); ++k) {
    const auto q = inst.q(k);
    actions.push_back({{"cost", inst.cost(k)}, {"q", std::vector<double>(q.begin(), q.end())}});
  }
  doc["actions"] = std::move(actions);
  doc["support"] = support_to_json(inst.support());
  doc["utility"] = inst.utility().table().to_nested();
  doc["b_s"] = inst.b_s();
  doc["b_u"] = inst.b_u();
  if (inst.n_observations()) doc["n_observations"] = *inst.n_observations();
  return doc;
}

Instance instance_from_json(const json& doc) {
  try {
    if (!doc.is_object()) throw InvalidInput("instance json: top level must be an object");
    const json& st = field(doc, "states");
    StateSpace states = st.is_array() ? StateSpace(st.size(), st.get<std::vector<std::string>>())
                                      : StateSpace(st.get<std::size_t>());
    std::vector<double> costs;
    std::vector<std::vector<double>> dists;
    for (const auto& a : field(doc, "actions")) {
      costs.push_back(field(a, "cost").get<double>());
      dists.push_back(field(a, "q").get<std::vector<double>>());
    }
    InformationStructure info(std::move(costs), support_from_json(field(doc, "support")),
                              std::move(dists));
    UtilityModel utility(Matrix(read_matrix(field(doc, "utility"), "utility")));
    std::optional<std::size_t> n_obs;
    if (doc.contains("n_observations") && !doc["n_observations"].is_null())
      n_obs = doc["n_observations"].get<std::size_t>();
    return Instance(std::move(states), std::move(info), std::move(utility),
                    field(doc, "b_s").get<double>(), field(doc, "b_u").get<double>(), n_obs);
  } catch (const json::exception& e) {
    throw InvalidInput(std::string("instance json: ") + e.what());
  }
}

std::string dump_instance(const Instance& inst) { return instance_to_json(inst).dump(2); }

Instance parse_instance(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw InvalidInput(std::string("instance json: ") + e.what());
  }
  return instance_from_json(doc);
}

void save_instance(const Instance& inst, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw InvalidInput("cannot open " + path.string() + " for writing");
  out << dump_instance(inst) << '\n';
}

Instance load_instance(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw InvalidInput("cannot open " + path.string());
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_instance(buf.str());
}

std::uint64_t instance_hash(const Instance& inst) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : instance_to_json(inst).dump()) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

}  // namespace osrl
