#include <doctest.h>

#include <json.hpp>

#include <fstream>
#include <iterator>

#include "btconv/generate.hpp"
#include "support/support.hpp"

using namespace btconv;
using namespace btconv::testing;
using json = nlohmann::json;

namespace {

const char* const kBundled[] = {"counterexample.json", "eat_tree.json",    "manipulator_lib.json", "nine_region_funnel.json",
                                "surveying.json",      "surveying_dd.json", "surveying_lib.json"};

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

json counterexample_json() { return json::parse(read_file(model_path("counterexample.json"))); }

// Field path reported for a document, or "<ok>" if it parses.
std::string error_where(const json& j) {
  try {
    parse_spec(j.dump());
  } catch (const SpecError& e) {
    return e.where;
  }
  return "<ok>";
}

void check_round_trip(const SpecDocument& doc) {
  const std::string text = serialize_spec(doc);
  const SpecDocument back = parse_spec(text);
  CHECK(serialize_spec(back) == text);
  CHECK(back.model.has_value() == doc.model.has_value());
  if (doc.model && back.model) CHECK(same_model(*doc.model, *back.model));
  CHECK(back.abstraction == doc.abstraction);
  CHECK(back.seeds == doc.seeds);
  CHECK(back.delta == doc.delta);
  CHECK(back.max_steps == doc.max_steps);
  CHECK(back.library.has_value() == doc.library.has_value());
  CHECK(back.library_root == doc.library_root);
  CHECK(back.substitution.has_value() == doc.substitution.has_value());
  if (doc.substitution && back.substitution) CHECK(back.substitution->target == doc.substitution->target);
}

}  // namespace

TEST_CASE("bundled specs round-trip") {
  for (const char* name : kBundled) {
    CAPTURE(name);
    check_round_trip(load_model(name));
  }
}

TEST_CASE("generated gridworlds round-trip") {
  auto rng = make_rng("spec_io_grid");
  for (int k = 0; k < 50; ++k) {
    const std::uint64_t seed = rng();
    const SpecDocument doc = random_gridworld(seed);
    check_round_trip(doc);
    CHECK(serialize_spec(random_gridworld(seed)) == serialize_spec(doc));
  }
}

TEST_CASE("backchained and substituted models round-trip") {
  const SpecDocument lib = load_model("manipulator_lib.json");
  REQUIRE(lib.library);
  REQUIRE(lib.library_root);
  SpecDocument out;
  out.world = lib.world;
  out.model.emplace(build_bcbt(*lib.library, *lib.library_root));
  out.library = lib.library;
  out.library_root = lib.library_root;
  check_round_trip(out);

  const SpecDocument dd = load_model("surveying_dd.json");
  REQUIRE(dd.substitution);
  const SubstitutionResult sub = substitute(*dd.model, dd.substitution->spec);
  SpecDocument s;
  s.world = sub.aug.world();
  s.model.emplace(sub.model);
  check_round_trip(s);
}

TEST_CASE("same_model tells models apart") {
  const SpecDocument doc = load_model("counterexample.json");
  const BTModel& m = *doc.model;
  CHECK(same_model(m, m));
  json j = counterexample_json();
  j["leaves"][0]["success"] = json::array({4, 5});
  CHECK_FALSE(same_model(m, *parse_spec(j.dump()).model));
  j = counterexample_json();
  j["leaves"][0]["controller"][0] = 1;
  CHECK_FALSE(same_model(m, *parse_spec(j.dump()).model));
  j = counterexample_json();
  j["leaves"][0]["doa"]["tau"] = j["leaves"][0]["doa"]["tau"].get<int>() + 1;
  CHECK_FALSE(same_model(m, *parse_spec(j.dump()).model));
  j = counterexample_json();
  j["universe"]["labels"][0] = "renamed";
  CHECK_FALSE(same_model(m, *parse_spec(j.dump()).model));
}

TEST_CASE("validation errors name the offending field") {
  CHECK(error_where(counterexample_json()) == "<ok>");
  auto mutated = [](auto f) {
    json j = counterexample_json();
    f(j);
    return error_where(j);
  };
  CHECK(mutated([](json& j) { j["format"] = "btconv/0"; }) == "format");
  CHECK(mutated([](json& j) { j["universe"]["cells"] = 0; }) == "universe.cells");
  CHECK(mutated([](json& j) { j["leaves"][0]["success"] = json::array({6}); }) == "leaves[0].success[0]");
  CHECK(mutated([](json& j) { j["leaves"][0]["controller"].push_back(0); }) == "leaves[0].controller");
  CHECK(mutated([](json& j) { j["leaves"][0]["controller"][2] = 9; }) == "leaves[0].controller[2]");
  CHECK(mutated([](json& j) { j["leaves"][0]["kind"] = "decorator"; }) == "leaves[0].kind");
  CHECK(mutated([](json& j) { j["leaves"][0]["doa"]["tau"] = 0; }) == "leaves[0].doa.tau");
  CHECK(mutated([](json& j) { j["tree"] = "missing"; }) == "tree");
  CHECK(mutated([](json& j) { j["abstraction"] = json::array({"nowhere"}); }) == "abstraction[0]");
  CHECK(mutated([](json& j) { j["analysis"]["seeds"] = json::array({"park:z"}); }) == "analysis.seeds[0]");
  CHECK(mutated([](json& j) { j["universe"]["adjacency"][0] = json::array({0, 7}); }) == "universe.adjacency[0]");
  CHECK(mutated([](json& j) { j.erase("universe"); }) == "universe");
  CHECK_THROWS_AS(parse_spec("{\"format\": "), SpecError);
  CHECK_THROWS_AS(parse_spec("[]"), SpecError);
  CHECK_THROWS_AS(load_spec(model_path("no_such_model.json")), SpecError);
}

TEST_CASE("a leaf referenced twice is rejected") {
  json j = counterexample_json();
  j["tree"] = json{{"seq", json::array({"park", "park"})}};
  CHECK_THROWS_WITH_AS(parse_spec(j.dump()), doctest::Contains("used twice"), SpecError);
}

TEST_CASE("seeds resolve against the model") {
  const SpecDocument doc = load_model("surveying.json");
  const BTModel& m = *doc.model;
  const Seed s = parse_seed(m, "go_home:b");
  CHECK(m.name(s.owner) == "go_home");
  CHECK(s.flavor == Flavor::B);
  CHECK_THROWS_AS(parse_seed(m, "go_home"), Error);
  CHECK_THROWS_AS(parse_seed(m, "nobody:a"), Error);
}
