#pragma once

#include <optional>
#include <vector>

#include <Eigen/Dense>

namespace fleet {

using Assignment = std::vector<int>;  // 0/1 per robot

/// Moving-horizon selection problem. X^0 (x0) is the current assignment and is
/// data; the decision variables are X^1..X^k.
struct ScheduleProblem {
  int n_robots = 0;
  int horizon_k = 1;
  int formation_size_f = 0;
  std::vector<double> d0;                      // mAh consumed
  Assignment x0;
  std::vector<Assignment> hub_presence;        // H^1..H^k
  double r_c = 0.0;                            // mAh per leg while charging (negative)
  double r_d = 0.0;                            // mAh per leg while active
  double d_th = 0.0;
  double w1 = 1.0;
  double w2 = 0.5;
  double capacity_mah = 1200.0;
  std::vector<int> robot_ids;                  // empty: ids are 1..N

  void validate() const;
  int id_of(int index) const;
  bool operator==(const ScheduleProblem&) const = default;
};

struct ScheduleSolution {
  std::vector<Assignment> x;                   // X^1..X^k
  double objective_value = 0.0;
  std::vector<std::vector<double>> predicted_d;

  bool operator==(const ScheduleSolution&) const = default;
};

/// Robots leaving and entering the formation, paired by position.
struct ReplacementOrder {
  std::vector<int> leaving;
  std::vector<int> entering;
  int hub_id = 0;

  bool empty() const { return leaving.empty() && entering.empty(); }
  bool operator==(const ReplacementOrder&) const = default;
};

struct BaselineDecision {
  ReplacementOrder order;
  bool wait = false;  // more leavers than charged robots at the hub
};

struct QuadraticProgram {
  Eigen::MatrixXd P;
  Eigen::VectorXd Q;
};

/// D^m = D^0 + m r_c + (r_d - r_c) * sum_{j<=m} X^j, floored at 0.
std::vector<double> predict_discharge(const ScheduleProblem& problem, const std::vector<Assignment>& x_seq,
                                      int m);

QuadraticProgram build_qp(const ScheduleProblem& problem);

Eigen::VectorXd flatten(const std::vector<Assignment>& x_seq);

double objective_value(const Eigen::MatrixXd& P, const Eigen::VectorXd& Q, const Eigen::VectorXd& x_flat);

/// w1 * D^k.X^k - w2 * sum_j X^j.X^{j-1}, evaluated directly with an
/// unfloored D^k. Equals the quadratic form exactly (no dropped constant).
double direct_objective(const ScheduleProblem& problem, const std::vector<Assignment>& x_seq);

bool feasible(const ScheduleProblem& problem, const std::vector<Assignment>& x_seq);

/// Exact minimizer. Among equal optima the sequence whose chosen index sets
/// come first in lexicographic order wins. nullopt when infeasible.
std::optional<ScheduleSolution> solve(const ScheduleProblem& problem);

ReplacementOrder diff_solutions(const Assignment& prev_active, const Assignment& next_active, int hub_id,
                                const std::vector<int>& robot_ids = {});

/// Threshold rule on X^0 / H^1. Leavers are active robots below the threshold,
/// most discharged first; entrants are hub robots above
/// max(threshold, min_entry_fraction), most charged first.
BaselineDecision baseline_policy(const ScheduleProblem& problem, double threshold_fraction, int hub_id = 0,
                                 double min_entry_fraction = 0.0);

}  // namespace fleet
