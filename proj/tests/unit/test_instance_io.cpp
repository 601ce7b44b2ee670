#include <doctest.h>

#include <filesystem>

#include "osrl/errors.hpp"
#include "osrl/harness.hpp"
#include "osrl/instance_io.hpp"

using namespace osrl;

TEST_SUITE("instance_io") {

TEST_CASE("round trip is lossless") {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    RandomInstanceSpec spec{1 + seed % 4, 1 + seed % 5, 2 + seed % 2, 1.0, 2.0, 0.05};
    auto inst = gen_random_instance(spec, seed);
    auto back = parse_instance(dump_instance(inst));
    CHECK(dump_instance(back) == dump_instance(inst));
    CHECK(instance_hash(back) == instance_hash(inst));
    for (std::size_t k = 0; k < inst.n_actions(); ++k) {
      CHECK(std::abs(back.cost(k) - inst.cost(k)) <= 1e-12);
      for (std::size_t i = 0; i < inst.n_beliefs(); ++i) CHECK(std::abs(back.q(k)[i] - inst.q(k)[i]) <= 1e-12);
    }
    for (std::size_t i = 0; i < inst.n_beliefs(); ++i)
      for (std::size_t w = 0; w < inst.n_states(); ++w)
        CHECK(std::abs(back.support()[i][w] - inst.support()[i][w]) <= 1e-12);
    CHECK(back.utility().table() == inst.utility().table());
    CHECK(back.b_s() == inst.b_s());
    CHECK(back.b_u() == inst.b_u());
  }
}

TEST_CASE("hard instance survives a file round trip") {
  const auto inst = gen_hard_instance(-0.25);
  const auto path = std::filesystem::temp_directory_path() / "osrl_io_hard.json";
  save_instance(inst, path);
  const auto back = load_instance(path);
  std::filesystem::remove(path);
  CHECK(dump_instance(back) == dump_instance(inst));
}

TEST_CASE("document shape") {
  const auto doc = instance_to_json(gen_hard_instance(-0.25));
  for (const char* key : {"states", "actions", "support", "utility", "b_s", "b_u"}) CHECK(doc.contains(key));
  REQUIRE(doc["actions"].size() == 3);
  CHECK(doc["actions"][0].contains("cost"));
  CHECK(doc["actions"][0]["q"].size() == 3);
  CHECK(doc["support"][1] == nlohmann::json::array({0.5, 0.5}));
}

TEST_CASE("labelled states and observation count") {
  const auto doc = nlohmann::json::parse(R"({
    "states": ["rain", "sun"],
    "actions": [{"cost": 0.1, "q": [0.5, 0.5]}, {"cost": 0.2, "q": [0.2, 0.8]}],
    "support": [[0.9, 0.1], [0.3, 0.7]],
    "utility": [[1.0, 0.0], [0.0, 1.0]],
    "b_s": 1.0, "b_u": 1.0, "n_observations": 2})");
  const auto inst = instance_from_json(doc);
  CHECK(inst.n_states() == 2);
  CHECK(inst.states().labels == std::vector<std::string>{"rain", "sun"});
  CHECK(inst.n_observations() == std::optional<std::size_t>(2));
  CHECK(instance_from_json(instance_to_json(inst)).states().labels == inst.states().labels);
}

TEST_CASE("malformed documents") {
  CHECK_THROWS_AS(parse_instance("{"), InvalidInput);
  CHECK_THROWS_AS(parse_instance(R"({"states": 2})"), InvalidInput);
  // q does not sum to one
  CHECK_THROWS_AS(parse_instance(R"({"states": 2, "actions": [{"cost": 0, "q": [0.5, 0.6]}],
    "support": [[1, 0], [0, 1]], "utility": [[1, 0]], "b_s": 1, "b_u": 1})"),
                  InvalidInput);
  // support dimension mismatch
  CHECK_THROWS_AS(parse_instance(R"({"states": 3, "actions": [{"cost": 0, "q": [1]}],
    "support": [[1, 0]], "utility": [[1, 0, 0]], "b_s": 1, "b_u": 1})"),
                  InvalidInput);
  CHECK_THROWS(load_instance("/nonexistent/osrl/instance.json"));
}

}
