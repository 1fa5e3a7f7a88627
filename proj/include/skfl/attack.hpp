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

#ifndef SKFL_ATTACK_HPP
#define SKFL_ATTACK_HPP

#include <functional>
#include <optional>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "skfl/common.hpp"

namespace skfl {

enum class AttackModelKind { LinearRegression, LogisticRegression };

/// Model loss F(w, x) with known parameters w and target/label y; the
/// attack searches over the data x. Square regime d = m.
struct AttackModel {
  AttackModelKind kind = AttackModelKind::LinearRegression;
  Eigen::VectorXd w;
  double y = 0.0;

  int dim() const { return (int)w.size(); }
  /// grad_w F(w, x).
  Eigen::VectorXd grad_w(const Eigen::VectorXd& x) const;
  /// Pseudo-Hessian Phi(x, w) = d(grad_w F)/dx, d x m.
  Eigen::MatrixXd phi(const Eigen::VectorXd& x) const;
};

/// L(x) = |grad_w F(w,x) - g|^2, or its sketched counterpart
/// |R grad_w F - R g|^2 when a sketch is attached. `observed` is already
/// sketched (and possibly noised).
struct AttackProblem {
  AttackModel model;
  Eigen::VectorXd observed;
  std::optional<Eigen::MatrixXd> sketch;  // dense R
  Eigen::VectorXd x_true;

  static AttackProblem plain(const AttackModel& model,
                             const Eigen::VectorXd& x_true);
  static AttackProblem sketched(const AttackModel& model,
                                const Eigen::VectorXd& x_true,
                                const Eigen::MatrixXd& R);
  /// Gaussian noise N(0, sigma^2 I) added to the observed gradient.
  static AttackProblem noised(const AttackModel& model,
                              const Eigen::VectorXd& x_true, double sigma,
                              std::uint64_t seed);

  double loss(const Eigen::VectorXd& x) const;
  Eigen::VectorXd grad(const Eigen::VectorXd& x) const;
};

struct ConditionEstimates {
  double beta = 0.0;    // Lipschitz constant of x -> grad_w F
  double theta1 = 0.0;  // pseudo-kernel singular value bounds
  double theta2 = 0.0;
  double a = 0.0;       // semi-smoothness triple
  double b = 0.0;
  double p = 0.5;
  double tau = 1.0;     // sketch operator norm
  double gamma1 = 1.0;  // singular value range of R'
  double gamma2 = 1.0;
  double c = 0.0;       // semi-strong convexity
  double d_sc = 0.0;
  double alpha_sl = 0.0;  // semi-Lipschitz alpha
};

/// K(x) = Phi' Phi.
Eigen::MatrixXd pseudo_kernel(const AttackProblem& problem,
                              const Eigen::VectorXd& x);

/// Min/max over sampled x (ball around center) of the square roots of
/// K(x)'s eigenvalue extremes.
std::pair<double, double> estimate_thetas(const AttackProblem& problem,
                                          const Eigen::VectorXd& center,
                                          double radius, int sample_count,
                                          std::uint64_t seed);

struct SketchStats {
  double tau = 1.0;
  double gamma1 = 1.0;
  double gamma2 = 1.0;
};

/// Singular-value extremes of a materialized R (b <= d, so R' is tall and
/// gamma1 = smallest singular value of R). Throws RankDeficient below 1e-10.
SketchStats sketch_stats(const Eigen::MatrixXd& R);

struct SketchedConstants {
  double A = 0.0;   // semi-smooth a: 2 tau beta + 2 theta2 gamma2
  double B = 0.0;   // semi-smooth b: tau^2 beta
  double theta1_R = 0.0;  // non-critical: 2 theta1 gamma1
  double theta2_R = 0.0;  // non-critical: 2 theta2 gamma2
};

SketchedConstants sketched_constants(const ConditionEstimates& est,
                                     const SketchStats& stats);

struct AttackTrajectory {
  std::vector<Eigen::VectorXd> x;
  std::vector<double> loss;
};

/// Plain gradient descent on the data; early stop below 1e-16.
AttackTrajectory attack_gd(const AttackProblem& problem,
                           const Eigen::VectorXd& x0, double eta,
                           int t_attack);

/// Boundary step size and rate from the cost-convergence theorem:
/// eta = (theta1^2 - a theta2^{2-2p})/(2 b theta2^2), gamma = eta
/// (theta1^2 - a theta2^{2-2p})/2. Uses est.{theta1,theta2,a,b,p}.
std::pair<double, double> step_size_rule(const ConditionEstimates& est);

using ScalarFn = std::function<double(const Eigen::VectorXd&)>;
using GradFn = std::function<Eigen::VectorXd(const Eigen::VectorXd&)>;
using PointPair = std::pair<Eigen::VectorXd, Eigen::VectorXd>;

struct Violation {
  Eigen::VectorXd x;
  Eigen::VectorXd y;  // empty for point conditions
  double residual = 0.0;
};

inline constexpr double kCheckerSlack = 1e-9;

/// L(y) <= L(x) + <grad L(x), y-x> + b|y-x|^2 + a|x-y|^{2-2p} L(x)^p.
std::vector<Violation> check_semi_smooth(const ScalarFn& L, const GradFn& gL,
                                         double a, double b, double p,
                                         const std::vector<PointPair>& pairs);

/// theta1^2 L(x) <= |grad L(x)|^2 <= theta2^2 L(x).
std::vector<Violation> check_non_critical(
    const ScalarFn& L, const GradFn& gL, double theta1, double theta2,
    const std::vector<Eigen::VectorXd>& samples);

/// |grad L(x) - grad L(y)|^2 <= beta^2|x-y|^2 + alpha^2|x-y|^{2-2p} L(x)^p.
std::vector<Violation> check_semi_lipschitz(const ScalarFn& L,
                                            const GradFn& gL, double alpha,
                                            double beta, double p,
                                            const std::vector<PointPair>& pairs);

/// L(x) >= L(y) + <grad L(y), x-y> + d|x-y|^2 - c|x-y|^{2-2p} L(y)^p.
std::vector<Violation> check_semi_strong_convex(
    const ScalarFn& L, const GradFn& gL, double c, double d, double p,
    const std::vector<PointPair>& pairs);

std::vector<Eigen::VectorXd> sample_ball(const Eigen::VectorXd& center,
                                         double radius, int n,
                                         std::uint64_t seed);
std::vector<PointPair> sample_pairs(const Eigen::VectorXd& center,
                                    double radius, int n, std::uint64_t seed);

/// Empirical non-critical constants: min/max of |grad L|/sqrt(L) over the
/// samples (points with L below floor are skipped).
std::pair<double, double> measure_noncritical(
    const ScalarFn& L, const GradFn& gL,
    const std::vector<Eigen::VectorXd>& samples, double floor = 1e-18);

/// Smallest b making the semi-smooth inequality hold with a = 0 on the
/// sampled pairs.
double measure_smooth_b(const ScalarFn& L, const GradFn& gL,
                        const std::vector<PointPair>& pairs);

struct UniqueMinReport {
  double spread = 0.0;
  bool unique = false;
  std::vector<Eigen::VectorXd> endpoints;
};

/// Multi-start descent; unique iff all endpoints collapse within 1e-6.
UniqueMinReport unique_minimum_probe(const AttackProblem& problem,
                                     int multi_start,
                                     const Eigen::VectorXd& center,
                                     double radius, double eta, int t_attack,
                                     std::uint64_t seed);

}  // namespace skfl

#endif  // SKFL_ATTACK_HPP
