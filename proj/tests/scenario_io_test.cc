#include <doctest.h>

#include <string>
#include <variant>

#include "pflow/scenario_io.h"
#include "test_util.h"

namespace pflow {
namespace {

// Runs the parser and returns the error, or fails the test.
ParseError parse_error(const std::string& text) {
  try {
    parse_scenario_file(text);
  } catch (const ParseError& e) {
    return e;
  }
  FAIL("expected a parse error for:\n" << text);
  return ParseError("unreachable", 0);
}

TEST_CASE("minimal file takes the defaults") {
  const auto parsed = parse_scenario(testing::read_fixture("minimal3.scn"));
  REQUIRE(std::holds_alternative<Scenario>(parsed));
  const Scenario& sc = std::get<Scenario>(parsed);
  CHECK(sc.sharpness == 0.8);
  CHECK(sc.stiffness == 0.0);
  CHECK(sc.seed == 1);
  CHECK(sc.start == Cell{0, 0});
  REQUIRE(sc.goals.size() == 1);
  CHECK(sc.goals[0].cell == Cell{2, 2});
  CHECK(sc.map.blocked({1, 1}));
  CHECK(sc.horizon.kind == Horizon::Kind::kAutoMin);
  CHECK(sc.policy == NullPosteriorPolicy::kAbort);
  CHECK_FALSE(sc.start_action.has_value());
}

TEST_CASE("narrow passage fixture is a two-agent world") {
  const auto parsed = parse_scenario(testing::read_fixture("corridor2.scn"));
  REQUIRE(std::holds_alternative<WorldSpec>(parsed));
  const WorldSpec& w = std::get<WorldSpec>(parsed);
  REQUIRE(w.agents.size() == 2);
  CHECK(w.agents[0].id == 1);
  CHECK(w.agents[0].start == Cell{2, 1});
  CHECK(w.agents[0].goals.front().cell == Cell{3, 11});
  CHECK(w.agents[1].goals.front().cell == Cell{3, 1});
  CHECK(w.agents[0].policy == NullPosteriorPolicy::kWait);
  CHECK(w.max_horizon == 80);
  CHECK(w.arrived_block);
}

TEST_CASE("weights and extra goals") {
  const Scenario sc = std::get<Scenario>(parse_scenario(testing::read_fixture("multigoal.scn")));
  REQUIRE(sc.goals.size() == 2);
  CHECK(sc.goals[0].cell == Cell{1, 8});
  CHECK(sc.goals[0].weight == 0.2);
  CHECK(sc.goals[1].weight == 0.8);

  const Scenario extra = std::get<Scenario>(parse_scenario("goals = 0,2:3 2,0\n---\nS..\n...\n..G\n"));
  REQUIRE(extra.goals.size() == 3);
  CHECK(extra.goals[1].cell == Cell{0, 2});
  CHECK(extra.goals[1].weight == 3.0);
  CHECK(extra.goals[2].weight == 1.0);
}

TEST_CASE("header values") {
  const ScenarioFile f = parse_scenario_file(
      "horizon = auto:50\nkappa = 0.6\nlambda = 0.25\npolicy = sample\nstart_action = up-right\n"
      "goal_stop = false\n---\nS.G\n");
  CHECK(f.settings.horizon == Horizon::auto_min(50));
  CHECK(f.settings.kappa == 0.6);
  CHECK(f.settings.lambda == 0.25);
  CHECK(f.settings.policy == NullPosteriorPolicy::kSampleForward);
  CHECK(f.settings.start_action == Action::kUpRight);
  CHECK_FALSE(f.settings.goal_stop);
  CHECK(parse_scenario_file("horizon = 12\n---\nSG\n").settings.horizon == Horizon::fixed(12));
}

TEST_CASE("parse errors name line and column") {
  SUBCASE("goal on obstacle") {
    const ParseError e = parse_error("goals = 1,1\n---\nS..\n.#.\n..G\n");
    CHECK(std::string(e.what()).find("goal on obstacle") != std::string::npos);
    CHECK(e.line() == 1);
  }
  SUBCASE("unknown key") {
    const ParseError e = parse_error("horizon = 5\ncolour = blue\n---\nSG\n");
    CHECK(e.line() == 2);
    CHECK(std::string(e.what()).find("unknown key") != std::string::npos);
  }
  SUBCASE("duplicate key") { CHECK(parse_error("kappa = 0.5\nkappa = 0.6\n---\nSG\n").line() == 2); }
  SUBCASE("missing separator") { parse_error("kappa = 0.5\n"); }
  SUBCASE("ragged grid") {
    const ParseError e = parse_error("---\nS..\n..\n..G\n");
    CHECK(e.line() == 3);
    CHECK(std::string(e.what()).find("ragged") != std::string::npos);
  }
  SUBCASE("duplicate start") {
    const ParseError e = parse_error("---\nS.S\n..G\n");
    CHECK(e.line() == 2);
    CHECK(e.column() == 3);
  }
  SUBCASE("agent without goal") {
    const ParseError e = parse_error("---\n1.a\n2..\n");
    CHECK(e.line() == 3);
    CHECK(e.column() == 1);
  }
  SUBCASE("goal letter without agent") { CHECK(parse_error("---\n1.a\n..b\n").column() == 3); }
  SUBCASE("bad glyph") { CHECK(parse_error("---\nS.x\n..G\n").column() == 3); }
  SUBCASE("mixed glyphs") { parse_error("---\nS.G\n1.a\n"); }
  SUBCASE("weights count") { parse_error("weights = 1, 2\n---\nS.G\n"); }
  SUBCASE("bad kappa") { CHECK(parse_error("\nkappa = 1.5\n---\nSG\n").line() == 2); }
  SUBCASE("no start") { parse_error("---\n..G\n"); }
}

TEST_CASE("round trip on every fixture") {
  for (const char* name :
       {"empty5.scn", "minimal3.scn", "maze15.scn", "corridor2.scn", "five_agents.scn", "multigoal.scn"}) {
    CAPTURE(name);
    const ScenarioFile a = parse_scenario_file(testing::read_fixture(name));
    const std::string text = serialize_scenario(a);
    const ScenarioFile b = parse_scenario_file(text);
    CHECK(a == b);
    CHECK(serialize_scenario(b) == text);
  }
}

TEST_CASE("round trip keeps awkward values") {
  ScenarioFile f = parse_scenario_file("---\nS.G\n");
  f.settings.kappa = 0.1 + 0.2;  // not a short decimal
  f.settings.lambda = 1.0 / 3.0;
  f.settings.seed = 18446744073709551615ull;
  f.settings.extra_goals = {{{0, 1}, 0.7}};
  f.settings.horizon = Horizon::auto_min(77);
  CHECK(parse_scenario_file(serialize_scenario(f)) == f);
}

TEST_CASE("path csv round trip") {
  Path p;
  p.steps = {{1, {0, 0}, Action::kDownRight}, {2, {1, 1}, Action::kRight}, {3, {1, 2}, Action::kStill}};
  const std::string csv = path_csv(p);
  CHECK(csv == "t,row,col,action\n1,0,0,down-right\n2,1,1,right\n3,1,2,still\n");
  const Path back = parse_path_csv(csv);
  CHECK(back.steps == p.steps);
  CHECK(back.valid_on(GridMap(3, 3)));
  CHECK_THROWS_AS(parse_path_csv("t,row,col\n1,0,0\n"), ParseError);
  CHECK_THROWS_AS(parse_path_csv("t,row,col,action\n1,0,0,fly\n"), ParseError);
}

TEST_CASE("planned paths re-read as valid paths") {
  const Scenario sc = std::get<Scenario>(parse_scenario(testing::read_fixture("maze15.scn")));
  const Path p = greedy_plan(sc);
  const Path back = parse_path_csv(path_csv(p));
  CHECK(back.steps == p.steps);
  CHECK(back.valid_on(sc.map));
}

}  // namespace
}  // namespace pflow
