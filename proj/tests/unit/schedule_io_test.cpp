#include <gtest/gtest.h>

#include "fleet/config.hpp"
#include "fleet/schedule_io.hpp"
#include "json.hpp"

using namespace fleet;
using nlohmann::json;

namespace {

const char* kFourRobot = R"({
  // trailing comments are accepted
  "n_robots": 4, "horizon_k": 1, "formation_size_f": 2,
  "d0": [1100, 0, 0, 0], "x0": [1, 1, 0, 0], "hub_presence": [[0, 0, 1, 1]],
  "r_c": -50, "r_d": 50, "d_th": 1000, "w1": 1, "w2": 1, "hub_id": 7
})";

}  // namespace

TEST(SolveRequest, ParsesFields) {
  const SolveRequest r = parse_solve_request(kFourRobot);
  EXPECT_EQ(r.problem.n_robots, 4);
  EXPECT_EQ(r.problem.d0, (std::vector<double>{1100, 0, 0, 0}));
  EXPECT_EQ(r.problem.hub_presence.size(), 1u);
  EXPECT_EQ(r.problem.w2, 1.0);
  EXPECT_EQ(r.problem.capacity_mah, 1200.0);
  EXPECT_EQ(r.hub_id, 7);
}

TEST(SolveRequest, RoundTrip) {
  SolveRequest r = parse_solve_request(kFourRobot);
  r.problem.robot_ids = {11, 12, 13, 14};
  const SolveRequest back = parse_solve_request(solve_request_to_json(r));
  EXPECT_EQ(back.problem, r.problem);
  EXPECT_EQ(back.hub_id, r.hub_id);
}

TEST(SolveRequest, Rejects) {
  EXPECT_THROW(parse_solve_request("{"), std::invalid_argument);
  EXPECT_THROW(parse_solve_request(R"({"n_robots": 4})"), std::invalid_argument);
  json j = json::parse(kFourRobot, nullptr, true, true);
  j["x0"] = {1, 1, 1, 0};
  EXPECT_THROW(parse_solve_request(j.dump()), std::invalid_argument);
}

TEST(SolutionRecord, Fields) {
  const SolveRequest r = parse_solve_request(kFourRobot);
  const auto sol = solve(r.problem);
  ASSERT_TRUE(sol);
  const ReplacementOrder o = diff_solutions(r.problem.x0, sol->x.front(), r.hub_id);
  const json j = json::parse(solution_to_json(*sol, o));
  EXPECT_EQ(j.at("x"), json::parse("[[0, 1, 1, 0]]"));
  EXPECT_EQ(j.at("objective_value").get<double>(), 99.0);
  EXPECT_EQ(j.at("order").at("leaving"), json::parse("[1]"));
  EXPECT_EQ(j.at("order").at("entering"), json::parse("[3]"));
  EXPECT_EQ(j.at("order").at("hub_id"), 7);
  EXPECT_EQ(j.at("predicted_d"), json::parse("[[1050, 50, 50, 0]]"));
}

TEST(SolveRequest, ShippedProblemsParse) {
  for (const char* name : {"ten_robot", "four_robot", "infeasible"}) {
    const std::string path = std::string(FLEET_CONFIG_DIR) + "/problems/" + name + ".json";
    EXPECT_NO_THROW(parse_solve_request(read_text_file(path))) << name;
  }
}
