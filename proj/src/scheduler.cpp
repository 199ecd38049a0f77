#include "fleet/scheduler.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <string>

namespace fleet {

namespace {

int count_ones(const Assignment& x) { return std::accumulate(x.begin(), x.end(), 0); }

void check_binary(const Assignment& x, std::size_t n, const char* what) {
  if (x.size() != n) {
    throw std::invalid_argument(std::string(what) + " has wrong length");
  }
  for (int v : x) {
    if (v != 0 && v != 1) {
      throw std::invalid_argument(std::string(what) + " must be binary");
    }
  }
}

}  // namespace

void ScheduleProblem::validate() const {
  if (n_robots < 1 || horizon_k < 1 || formation_size_f < 1 || formation_size_f > n_robots) {
    throw std::invalid_argument("need N >= 1, k >= 1 and 1 <= F <= N");
  }
  const auto n = static_cast<std::size_t>(n_robots);
  if (d0.size() != n) {
    throw std::invalid_argument("d0 has wrong length");
  }
  for (double d : d0) {
    if (!(d >= 0.0 && d <= capacity_mah)) {
      throw std::invalid_argument("d0 entries must lie in [0, capacity]");
    }
  }
  check_binary(x0, n, "x0");
  if (count_ones(x0) != formation_size_f) {
    throw std::invalid_argument("x0 must select exactly F robots");
  }
  if (hub_presence.size() != static_cast<std::size_t>(horizon_k)) {
    throw std::invalid_argument("hub_presence needs one vector per horizon step");
  }
  for (const auto& h : hub_presence) {
    check_binary(h, n, "hub_presence");
    for (std::size_t i = 0; i < n; ++i) {
      if (h[i] == 1 && x0[i] == 1) {
        throw std::invalid_argument("a robot cannot be both active and at a hub");
      }
    }
  }
  if (!(r_d > r_c)) {
    throw std::invalid_argument("r_d must exceed r_c");
  }
  if (!robot_ids.empty() && robot_ids.size() != n) {
    throw std::invalid_argument("robot_ids has wrong length");
  }
}

int ScheduleProblem::id_of(int index) const {
  return robot_ids.empty() ? index + 1 : robot_ids[static_cast<std::size_t>(index)];
}

std::vector<double> predict_discharge(const ScheduleProblem& problem, const std::vector<Assignment>& x_seq,
                                      int m) {
  if (m < 1 || static_cast<std::size_t>(m) > x_seq.size()) {
    throw std::invalid_argument("horizon index out of range");
  }
  std::vector<double> d(problem.d0.size());
  for (std::size_t i = 0; i < d.size(); ++i) {
    int active = 0;
    for (int j = 0; j < m; ++j) {
      active += x_seq[static_cast<std::size_t>(j)][i];
    }
    d[i] = std::max(problem.d0[i] + m * problem.r_c + (problem.r_d - problem.r_c) * active, 0.0);
  }
  return d;
}

QuadraticProgram build_qp(const ScheduleProblem& problem) {
  const int n = problem.n_robots;
  const int k = problem.horizon_k;
  const Eigen::MatrixXd eye = Eigen::MatrixXd::Identity(n, n);

  Eigen::MatrixXd pr_pattern = Eigen::MatrixXd::Zero(k, k);
  Eigen::MatrixXd pd_pattern = Eigen::MatrixXd::Zero(k, k);
  for (int j = 1; j < k; ++j) {
    pr_pattern(j, j - 1) = 1.0;
    pr_pattern(j - 1, j) = 1.0;
  }
  for (int j = 0; j < k; ++j) {
    pd_pattern(k - 1, j) = 1.0;
    pd_pattern(j, k - 1) = 1.0;
  }
  pd_pattern(k - 1, k - 1) = 2.0;

  Eigen::MatrixXd Pr = Eigen::MatrixXd::Zero(k * n, k * n);
  Eigen::MatrixXd Pd = Eigen::MatrixXd::Zero(k * n, k * n);
  for (int a = 0; a < k; ++a) {
    for (int b = 0; b < k; ++b) {
      Pr.block(a * n, b * n, n, n) = pr_pattern(a, b) * eye;
      Pd.block(a * n, b * n, n, n) = pd_pattern(a, b) * eye;
    }
  }

  Eigen::VectorXd Qr = Eigen::VectorXd::Zero(k * n);
  Eigen::VectorXd Qd = Eigen::VectorXd::Zero(k * n);
  for (int i = 0; i < n; ++i) {
    Qr(i) = problem.x0[static_cast<std::size_t>(i)];
    Qd((k - 1) * n + i) = problem.d0[static_cast<std::size_t>(i)] + k * problem.r_c;
  }

  QuadraticProgram qp;
  qp.P = problem.w1 * (problem.r_d - problem.r_c) * Pd - problem.w2 * Pr;
  qp.Q = problem.w1 * Qd - problem.w2 * Qr;
  return qp;
}

Eigen::VectorXd flatten(const std::vector<Assignment>& x_seq) {
  const std::size_t n = x_seq.empty() ? 0 : x_seq.front().size();
  Eigen::VectorXd x(static_cast<Eigen::Index>(x_seq.size() * n));
  for (std::size_t j = 0; j < x_seq.size(); ++j) {
    for (std::size_t i = 0; i < n; ++i) {
      x(static_cast<Eigen::Index>(j * n + i)) = x_seq[j][i];
    }
  }
  return x;
}

double objective_value(const Eigen::MatrixXd& P, const Eigen::VectorXd& Q, const Eigen::VectorXd& x_flat) {
  if (P.rows() != x_flat.size() || P.cols() != x_flat.size() || Q.size() != x_flat.size()) {
    throw std::invalid_argument("objective dimensions disagree");
  }
  return 0.5 * x_flat.dot(P * x_flat) + Q.dot(x_flat);
}

double direct_objective(const ScheduleProblem& problem, const std::vector<Assignment>& x_seq) {
  const int k = problem.horizon_k;
  const auto& xk = x_seq.back();
  double discharge = 0.0;
  for (std::size_t i = 0; i < xk.size(); ++i) {
    if (xk[i] == 0) {
      continue;
    }
    int active = 0;
    for (const auto& xj : x_seq) {
      active += xj[i];
    }
    discharge += problem.d0[i] + k * problem.r_c + (problem.r_d - problem.r_c) * active;
  }
  double retention = 0.0;
  const Assignment* prev = &problem.x0;
  for (const auto& xj : x_seq) {
    for (std::size_t i = 0; i < xj.size(); ++i) {
      retention += xj[i] * (*prev)[i];
    }
    prev = &xj;
  }
  return problem.w1 * discharge - problem.w2 * retention;
}

bool feasible(const ScheduleProblem& problem, const std::vector<Assignment>& x_seq) {
  const auto n = static_cast<std::size_t>(problem.n_robots);
  if (x_seq.size() != static_cast<std::size_t>(problem.horizon_k)) {
    return false;
  }
  const Assignment* prev = &problem.x0;
  for (std::size_t j = 0; j < x_seq.size(); ++j) {
    const Assignment& x = x_seq[j];
    if (x.size() != n || std::any_of(x.begin(), x.end(), [](int v) { return v != 0 && v != 1; })) {
      return false;
    }
    if (count_ones(x) != problem.formation_size_f) {
      return false;
    }
    const auto d = predict_discharge(problem, x_seq, static_cast<int>(j) + 1);
    const Assignment& h = problem.hub_presence[j];
    int reachable = 0;
    for (std::size_t i = 0; i < n; ++i) {
      if (x[i] == 1 && d[i] > problem.d_th) {
        return false;
      }
      reachable += x[i] * (((*prev)[i] == 1 || h[i] == 1) ? 1 : 0);
    }
    if (reachable != problem.formation_size_f) {
      return false;
    }
    prev = &x;
  }
  return true;
}

namespace {

class Search {
 public:
  explicit Search(const ScheduleProblem& p)
      : p_(p),
        n_(static_cast<std::size_t>(p.n_robots)),
        k_(p.horizon_k),
        f_(p.formation_size_f),
        slope_(p.r_d - p.r_c),
        prune_(p.w1 >= 0.0 && p.w2 >= 0.0),
        active_count_(n_, 0),
        seq_(static_cast<std::size_t>(k_), Assignment(n_, 0)) {}

  std::optional<std::vector<Assignment>> run() {
    step(1, p_.x0, 0.0);
    return best_seq_;
  }

 private:
  double tol() const { return 1e-9 * std::max(1.0, std::abs(best_)); }

  // discharge predicted for robot i at step j if it is active there
  double predicted_if_active(std::size_t i, int j) const {
    return std::max(p_.d0[i] + j * p_.r_c + slope_ * (active_count_[i] + 1), 0.0);
  }

  double lower_bound(int j_done, double retention) const {
    std::vector<double> v(n_);
    for (std::size_t i = 0; i < n_; ++i) {
      v[i] = p_.d0[i] + k_ * p_.r_c + slope_ * (active_count_[i] + 1);
    }
    std::partial_sort(v.begin(), v.begin() + f_, v.end());
    const double discharge = std::accumulate(v.begin(), v.begin() + f_, 0.0);
    return p_.w1 * discharge - p_.w2 * (retention + static_cast<double>(f_) * (k_ - j_done));
  }

  void step(int j, const Assignment& prev, double retention) {
    if (prune_ && best_seq_ && lower_bound(j - 1, retention) >= best_ - tol()) {
      return;
    }
    const Assignment& hub = p_.hub_presence[static_cast<std::size_t>(j - 1)];
    std::vector<std::size_t> avail;
    for (std::size_t i = 0; i < n_; ++i) {
      if ((prev[i] == 1 || hub[i] == 1) && predicted_if_active(i, j) <= p_.d_th) {
        avail.push_back(i);
      }
    }
    if (avail.size() < static_cast<std::size_t>(f_)) {
      return;
    }
    // ascending lexicographic enumeration of F-subsets of avail
    std::vector<std::size_t> pick(static_cast<std::size_t>(f_));
    std::iota(pick.begin(), pick.end(), 0);
    Assignment& x = seq_[static_cast<std::size_t>(j - 1)];
    while (true) {
      std::fill(x.begin(), x.end(), 0);
      double kept = 0.0;
      for (std::size_t idx : pick) {
        const std::size_t i = avail[idx];
        x[i] = 1;
        kept += prev[i];
        ++active_count_[i];
      }
      if (j == k_) {
        leaf(retention + kept);
      } else {
        step(j + 1, x, retention + kept);
      }
      for (std::size_t idx : pick) {
        --active_count_[avail[idx]];
      }
      // advance to next combination
      int pos = f_ - 1;
      while (pos >= 0 && pick[static_cast<std::size_t>(pos)] == avail.size() - static_cast<std::size_t>(f_ - pos)) {
        --pos;
      }
      if (pos < 0) {
        break;
      }
      ++pick[static_cast<std::size_t>(pos)];
      for (int q = pos + 1; q < f_; ++q) {
        pick[static_cast<std::size_t>(q)] = pick[static_cast<std::size_t>(q - 1)] + 1;
      }
    }
  }

  void leaf(double retention) {
    const Assignment& xk = seq_.back();
    double discharge = 0.0;
    for (std::size_t i = 0; i < n_; ++i) {
      if (xk[i] == 1) {
        discharge += p_.d0[i] + k_ * p_.r_c + slope_ * active_count_[i];
      }
    }
    const double value = p_.w1 * discharge - p_.w2 * retention;
    if (!best_seq_ || value < best_ - tol()) {
      best_ = value;
      best_seq_ = seq_;
    }
  }

  const ScheduleProblem& p_;
  std::size_t n_;
  int k_;
  int f_;
  double slope_;
  bool prune_;
  std::vector<int> active_count_;
  std::vector<Assignment> seq_;
  double best_ = std::numeric_limits<double>::infinity();
  std::optional<std::vector<Assignment>> best_seq_;
};

}  // namespace

std::optional<ScheduleSolution> solve(const ScheduleProblem& problem) {
  problem.validate();
  auto seq = Search(problem).run();
  if (!seq) {
    return std::nullopt;
  }
  ScheduleSolution sol;
  sol.x = std::move(*seq);
  const QuadraticProgram qp = build_qp(problem);
  sol.objective_value = objective_value(qp.P, qp.Q, flatten(sol.x));
  for (int m = 1; m <= problem.horizon_k; ++m) {
    sol.predicted_d.push_back(predict_discharge(problem, sol.x, m));
  }
  return sol;
}

ReplacementOrder diff_solutions(const Assignment& prev_active, const Assignment& next_active, int hub_id,
                                const std::vector<int>& robot_ids) {
  if (prev_active.size() != next_active.size()) {
    throw std::invalid_argument("assignment lengths differ");
  }
  if (count_ones(prev_active) != count_ones(next_active)) {
    throw std::invalid_argument("assignments select different formation sizes");
  }
  ReplacementOrder order;
  order.hub_id = hub_id;
  for (std::size_t i = 0; i < prev_active.size(); ++i) {
    const int id = robot_ids.empty() ? static_cast<int>(i) + 1 : robot_ids[i];
    if (prev_active[i] == 1 && next_active[i] == 0) {
      order.leaving.push_back(id);
    } else if (prev_active[i] == 0 && next_active[i] == 1) {
      order.entering.push_back(id);
    }
  }
  return order;
}

BaselineDecision baseline_policy(const ScheduleProblem& problem, double threshold_fraction, int hub_id,
                                 double min_entry_fraction) {
  if (!(threshold_fraction > 0.0 && threshold_fraction < 1.0)) {
    throw std::invalid_argument("threshold fraction must lie in (0, 1)");
  }
  const auto n = static_cast<std::size_t>(problem.n_robots);
  auto remaining = [&](std::size_t i) { return 1.0 - problem.d0[i] / problem.capacity_mah; };
  const double entry_floor = std::max(threshold_fraction, min_entry_fraction);
  const Assignment empty_hub(n, 0);
  const Assignment& hub = problem.hub_presence.empty() ? empty_hub : problem.hub_presence.front();

  std::vector<std::size_t> leavers;
  std::vector<std::size_t> entrants;
  for (std::size_t i = 0; i < n; ++i) {
    if (problem.x0[i] == 1 && remaining(i) < threshold_fraction) {
      leavers.push_back(i);
    }
    if (hub[i] == 1 && remaining(i) > entry_floor) {
      entrants.push_back(i);
    }
  }
  std::stable_sort(leavers.begin(), leavers.end(),
                   [&](std::size_t a, std::size_t b) { return problem.d0[a] > problem.d0[b]; });
  std::stable_sort(entrants.begin(), entrants.end(),
                   [&](std::size_t a, std::size_t b) { return problem.d0[a] < problem.d0[b]; });

  BaselineDecision out;
  out.order.hub_id = hub_id;
  const std::size_t swaps = std::min(leavers.size(), entrants.size());
  for (std::size_t s = 0; s < swaps; ++s) {
    out.order.leaving.push_back(problem.id_of(static_cast<int>(leavers[s])));
    out.order.entering.push_back(problem.id_of(static_cast<int>(entrants[s])));
  }
  out.wait = entrants.size() < leavers.size();
  return out;
}

}  // namespace fleet
