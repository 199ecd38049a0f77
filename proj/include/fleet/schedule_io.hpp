#pragma once

#include <string>

#include "fleet/scheduler.hpp"

namespace fleet {

/// JSON record for a one-shot solve. Field names follow ScheduleProblem;
/// an optional "hub_id" labels the resulting replacement order.
struct SolveRequest {
  ScheduleProblem problem;
  int hub_id = 0;
};

SolveRequest parse_solve_request(const std::string& text);
std::string solve_request_to_json(const SolveRequest& request);

/// Solution, objective and the X^0 -> X^1 replacement order.
std::string solution_to_json(const ScheduleSolution& solution, const ReplacementOrder& order);

}  // namespace fleet
