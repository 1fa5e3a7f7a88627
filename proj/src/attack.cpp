// Copyright 2026 The skfl Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "skfl/attack.hpp"

#include <cmath>
#include <limits>

namespace skfl {
namespace {

double sigmoid(double z) { return 1.0 / (1.0 + std::exp(-z)); }

}  // namespace

Eigen::VectorXd AttackModel::grad_w(const Eigen::VectorXd& x) const {
  if ((int)x.size() != dim()) {
    throw DimensionMismatch("AttackModel::grad_w: bad x length");
  }
  if (kind == AttackModelKind::LinearRegression) {
    return (w.dot(x) - y) * x;
  }
  // F = log(1 + exp(-y w'x)), y in {-1, +1}.
  const double s = sigmoid(-y * w.dot(x));
  return -y * s * x;
}

Eigen::MatrixXd AttackModel::phi(const Eigen::VectorXd& x) const {
  if ((int)x.size() != dim()) {
    throw DimensionMismatch("AttackModel::phi: bad x length");
  }
  const int d = dim();
  if (kind == AttackModelKind::LinearRegression) {
    Eigen::MatrixXd out = x * w.transpose();
    out.diagonal().array() += w.dot(x) - y;
    return out;
  }
  const double s = sigmoid(-y * w.dot(x));
  Eigen::MatrixXd out = s * (1.0 - s) * x * w.transpose();
  out.diagonal().array() += -y * s;
  return out;
}

AttackProblem AttackProblem::plain(const AttackModel& model,
                                   const Eigen::VectorXd& x_true) {
  AttackProblem p;
  p.model = model;
  p.x_true = x_true;
  p.observed = model.grad_w(x_true);
  return p;
}

AttackProblem AttackProblem::sketched(const AttackModel& model,
                                      const Eigen::VectorXd& x_true,
                                      const Eigen::MatrixXd& R) {
  if ((int)R.cols() != model.dim()) {
    throw DimensionMismatch("AttackProblem::sketched: R cols != d");
  }
  AttackProblem p;
  p.model = model;
  p.x_true = x_true;
  p.sketch = R;
  p.observed = R * model.grad_w(x_true);
  return p;
}

AttackProblem AttackProblem::noised(const AttackModel& model,
                                    const Eigen::VectorXd& x_true,
                                    double sigma, std::uint64_t seed) {
  AttackProblem p;
  p.model = model;
  p.x_true = x_true;
  p.observed = model.grad_w(x_true);
  Rng rng(mix64(seed));
  for (int i = 0; i < p.observed.size(); ++i) {
    p.observed[i] += sigma * rng.next_gaussian();
  }
  return p;
}

double AttackProblem::loss(const Eigen::VectorXd& x) const {
  const Eigen::VectorXd g = model.grad_w(x);
  if (sketch) return (*sketch * g - observed).squaredNorm();
  return (g - observed).squaredNorm();
}

Eigen::VectorXd AttackProblem::grad(const Eigen::VectorXd& x) const {
  const Eigen::VectorXd g = model.grad_w(x);
  const Eigen::MatrixXd phi = model.phi(x);
  if (sketch) {
    const Eigen::VectorXd resid = *sketch * g - observed;
    return 2.0 * phi.transpose() * (sketch->transpose() * resid);
  }
  return 2.0 * phi.transpose() * (g - observed);
}

Eigen::MatrixXd pseudo_kernel(const AttackProblem& problem,
                              const Eigen::VectorXd& x) {
  const Eigen::MatrixXd phi = problem.model.phi(x);
  return phi.transpose() * phi;
}

std::pair<double, double> estimate_thetas(const AttackProblem& problem,
                                          const Eigen::VectorXd& center,
                                          double radius, int sample_count,
                                          std::uint64_t seed) {
  if (sample_count < 1) throw InvalidParam("estimate_thetas: sample_count < 1");
  const auto samples = sample_ball(center, radius, sample_count, seed);
  double lo = std::numeric_limits<double>::infinity();
  double hi = 0.0;
  for (const auto& x : samples) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(pseudo_kernel(problem, x));
    lo = std::min(lo, std::sqrt(std::max(eig.eigenvalues().minCoeff(), 0.0)));
    hi = std::max(hi, std::sqrt(std::max(eig.eigenvalues().maxCoeff(), 0.0)));
  }
  return {lo, hi};
}

SketchStats sketch_stats(const Eigen::MatrixXd& R) {
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(R);
  const auto& sv = svd.singularValues();
  SketchStats stats;
  stats.tau = sv(0);
  stats.gamma2 = sv(0);
  stats.gamma1 = sv(sv.size() - 1);
  if (stats.gamma1 < 1e-10) {
    throw RankDeficient("sketch_stats: smallest singular value below 1e-10");
  }
  return stats;
}

SketchedConstants sketched_constants(const ConditionEstimates& est,
                                     const SketchStats& stats) {
  if (stats.gamma1 <= 0.0) {
    throw RankDeficient("sketched_constants: gamma1 must be positive");
  }
  SketchedConstants out;
  out.A = 2.0 * stats.tau * est.beta + 2.0 * est.theta2 * stats.gamma2;
  out.B = stats.tau * stats.tau * est.beta;
  out.theta1_R = 2.0 * est.theta1 * stats.gamma1;
  out.theta2_R = 2.0 * est.theta2 * stats.gamma2;
  return out;
}

AttackTrajectory attack_gd(const AttackProblem& problem,
                           const Eigen::VectorXd& x0, double eta,
                           int t_attack) {
  if (eta <= 0.0) throw InvalidParam("attack_gd: eta <= 0");
  AttackTrajectory traj;
  Eigen::VectorXd x = x0;
  traj.x.push_back(x);
  traj.loss.push_back(problem.loss(x));
  for (int t = 0; t < t_attack; ++t) {
    if (traj.loss.back() < 1e-16) break;
    x -= eta * problem.grad(x);
    const double l = problem.loss(x);
    if (!x.allFinite() || !std::isfinite(l)) {
      throw NonFinite("attack_gd: diverged at step " + std::to_string(t));
    }
    traj.x.push_back(x);
    traj.loss.push_back(l);
  }
  return traj;
}

std::pair<double, double> step_size_rule(const ConditionEstimates& est) {
  const double slack =
      est.theta1 * est.theta1 -
      est.a * std::pow(est.theta2, 2.0 - 2.0 * est.p);
  if (slack <= 0.0) {
    throw HypothesisViolated(
        "step_size_rule: requires theta1^2 > a theta2^{2-2p}");
  }
  const double eta = slack / (2.0 * est.b * est.theta2 * est.theta2);
  const double gamma = eta * slack / 2.0;
  return {eta, gamma};
}

std::vector<Violation> check_semi_smooth(const ScalarFn& L, const GradFn& gL,
                                         double a, double b, double p,
                                         const std::vector<PointPair>& pairs) {
  std::vector<Violation> out;
  for (const auto& [x, y] : pairs) {
    const double dist = (x - y).norm();
    const double rhs = L(x) + gL(x).dot(y - x) + b * dist * dist +
                       a * std::pow(dist, 2.0 - 2.0 * p) * std::pow(L(x), p);
    const double resid = L(y) - rhs;
    if (resid > kCheckerSlack) out.push_back({x, y, resid});
  }
  return out;
}

std::vector<Violation> check_non_critical(
    const ScalarFn& L, const GradFn& gL, double theta1, double theta2,
    const std::vector<Eigen::VectorXd>& samples) {
  std::vector<Violation> out;
  for (const auto& x : samples) {
    const double l = L(x);
    const double g2 = gL(x).squaredNorm();
    const double lower_resid = theta1 * theta1 * l - g2;
    const double upper_resid = g2 - theta2 * theta2 * l;
    const double resid = std::max(lower_resid, upper_resid);
    if (resid > kCheckerSlack) out.push_back({x, {}, resid});
  }
  return out;
}

std::vector<Violation> check_semi_lipschitz(
    const ScalarFn& L, const GradFn& gL, double alpha, double beta, double p,
    const std::vector<PointPair>& pairs) {
  std::vector<Violation> out;
  for (const auto& [x, y] : pairs) {
    const double dist = (x - y).norm();
    const double lhs = (gL(x) - gL(y)).squaredNorm();
    const double rhs = beta * beta * dist * dist +
                       alpha * alpha * std::pow(dist, 2.0 - 2.0 * p) *
                           std::pow(L(x), p);
    const double resid = lhs - rhs;
    if (resid > kCheckerSlack) out.push_back({x, y, resid});
  }
  return out;
}

std::vector<Violation> check_semi_strong_convex(
    const ScalarFn& L, const GradFn& gL, double c, double d, double p,
    const std::vector<PointPair>& pairs) {
  std::vector<Violation> out;
  for (const auto& [x, y] : pairs) {
    const double dist = (x - y).norm();
    const double rhs = L(y) + gL(y).dot(x - y) + d * dist * dist -
                       c * std::pow(dist, 2.0 - 2.0 * p) * std::pow(L(y), p);
    const double resid = rhs - L(x);
    if (resid > kCheckerSlack) out.push_back({x, y, resid});
  }
  return out;
}

std::vector<Eigen::VectorXd> sample_ball(const Eigen::VectorXd& center,
                                         double radius, int n,
                                         std::uint64_t seed) {
  Rng rng(mix64(seed));
  std::vector<Eigen::VectorXd> out;
  out.reserve(n);
  const int d = (int)center.size();
  for (int i = 0; i < n; ++i) {
    Eigen::VectorXd v(d);
    for (int j = 0; j < d; ++j) v[j] = rng.next_gaussian();
    const double norm = v.norm();
    // Uniform radius^{1/d} scaling keeps the ball filled, not shelled.
    const double r = radius * std::pow(rng.next_unit(), 1.0 / double(d));
    out.push_back(center + (r / norm) * v);
  }
  return out;
}

std::vector<PointPair> sample_pairs(const Eigen::VectorXd& center,
                                    double radius, int n, std::uint64_t seed) {
  const auto xs = sample_ball(center, radius, n, seed);
  const auto ys = sample_ball(center, radius, n, seed ^ 0x633d5dfull);
  std::vector<PointPair> out;
  out.reserve(n);
  for (int i = 0; i < n; ++i) out.push_back({xs[i], ys[i]});
  return out;
}

std::pair<double, double> measure_noncritical(
    const ScalarFn& L, const GradFn& gL,
    const std::vector<Eigen::VectorXd>& samples, double floor) {
  double lo = std::numeric_limits<double>::infinity();
  double hi = 0.0;
  for (const auto& x : samples) {
    const double l = L(x);
    if (l < floor) continue;
    const double ratio = gL(x).norm() / std::sqrt(l);
    lo = std::min(lo, ratio);
    hi = std::max(hi, ratio);
  }
  if (!std::isfinite(lo)) {
    throw InvalidParam("measure_noncritical: all samples below loss floor");
  }
  return {lo, hi};
}

double measure_smooth_b(const ScalarFn& L, const GradFn& gL,
                        const std::vector<PointPair>& pairs) {
  double b = 0.0;
  for (const auto& [x, y] : pairs) {
    const double dist_sq = (x - y).squaredNorm();
    if (dist_sq < 1e-24) continue;
    const double resid = L(y) - L(x) - gL(x).dot(y - x);
    b = std::max(b, resid / dist_sq);
  }
  return b;
}

UniqueMinReport unique_minimum_probe(const AttackProblem& problem,
                                     int multi_start,
                                     const Eigen::VectorXd& center,
                                     double radius, double eta, int t_attack,
                                     std::uint64_t seed) {
  if (multi_start < 1) throw InvalidParam("unique_minimum_probe: no starts");
  UniqueMinReport report;
  const auto starts = sample_ball(center, radius, multi_start, seed);
  for (const auto& x0 : starts) {
    const AttackTrajectory traj = attack_gd(problem, x0, eta, t_attack);
    report.endpoints.push_back(traj.x.back());
  }
  for (std::size_t i = 0; i < report.endpoints.size(); ++i) {
    for (std::size_t j = i + 1; j < report.endpoints.size(); ++j) {
      report.spread = std::max(
          report.spread, (report.endpoints[i] - report.endpoints[j]).norm());
    }
  }
  report.unique = report.spread <= 1e-6;
  return report;
}

}  // namespace skfl
