#include "fleet/schedule_io.hpp"

#include <stdexcept>

#include "json.hpp"

namespace fleet {

using nlohmann::json;

SolveRequest parse_solve_request(const std::string& text) {
  json j;
  try {
    j = json::parse(text, nullptr, true, true);
  } catch (const json::parse_error& e) {
    throw std::invalid_argument(std::string("problem record: ") + e.what());
  }
  SolveRequest req;
  ScheduleProblem& p = req.problem;
  try {
    p.n_robots = j.at("n_robots").get<int>();
    p.horizon_k = j.at("horizon_k").get<int>();
    p.formation_size_f = j.at("formation_size_f").get<int>();
    p.d0 = j.at("d0").get<std::vector<double>>();
    p.x0 = j.at("x0").get<Assignment>();
    p.hub_presence = j.at("hub_presence").get<std::vector<Assignment>>();
    p.r_c = j.at("r_c").get<double>();
    p.r_d = j.at("r_d").get<double>();
    p.d_th = j.at("d_th").get<double>();
    p.w1 = j.value("w1", p.w1);
    p.w2 = j.value("w2", p.w2);
    p.capacity_mah = j.value("capacity_mah", p.capacity_mah);
    p.robot_ids = j.value("robot_ids", std::vector<int>{});
    req.hub_id = j.value("hub_id", 0);
  } catch (const json::exception& e) {
    throw std::invalid_argument(std::string("problem record: ") + e.what());
  }
  p.validate();
  return req;
}

std::string solve_request_to_json(const SolveRequest& request) {
  const ScheduleProblem& p = request.problem;
  json j = {{"n_robots", p.n_robots},
            {"horizon_k", p.horizon_k},
            {"formation_size_f", p.formation_size_f},
            {"d0", p.d0},
            {"x0", p.x0},
            {"hub_presence", p.hub_presence},
            {"r_c", p.r_c},
            {"r_d", p.r_d},
            {"d_th", p.d_th},
            {"w1", p.w1},
            {"w2", p.w2},
            {"capacity_mah", p.capacity_mah},
            {"hub_id", request.hub_id}};
  if (!p.robot_ids.empty()) {
    j["robot_ids"] = p.robot_ids;
  }
  return j.dump(2);
}

std::string solution_to_json(const ScheduleSolution& solution, const ReplacementOrder& order) {
  json j = {{"x", solution.x},
            {"objective_value", solution.objective_value},
            {"predicted_d", solution.predicted_d},
            {"order", {{"hub_id", order.hub_id}, {"leaving", order.leaving}, {"entering", order.entering}}}};
  return j.dump(2);
}

}  // namespace fleet
