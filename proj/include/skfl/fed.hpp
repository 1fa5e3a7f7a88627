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

#ifndef SKFL_FED_HPP
#define SKFL_FED_HPP

#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "skfl/objectives.hpp"
#include "skfl/privacy.hpp"
#include "skfl/sketch.hpp"

namespace skfl {

struct DPRunSpec {
  double eps_hat = 0.0;
  double delta_hat = 0.0;
  int batch_size = 1;
  /// Test hook: overrides the accountant's noise scale when set (>= 0).
  std::optional<double> sigma_override;
};

struct RunConfig {
  int T = 1;
  int K = 1;
  double eta_local = 0.1;
  double eta_global = 1.0;
  SketchSpec sketch;
  std::optional<DPRunSpec> dp;
  int n_seeds = 20;
  bool record_average_iterate = true;
};

/// State w^t at round start (t server updates applied so far).
struct RoundRecord {
  int t = 0;
  double f_gap = 0.0;
  double dist_sq = 0.0;
  double grad_sq = 0.0;  // |grad f(w^t)|^2
  std::uint64_t bits = 0;  // cumulative communicated bits
};

/// Local-step record: client-average iterate after step k of round t.
struct StepRecord {
  int t = 0;
  int k = 0;
  double f_gap_u = 0.0;  // f(u-bar^{t,k}) - f*
  double variance = 0.0;  // V^{t,k} = (1/N) sum |u_c - u-bar|^2
};

struct RoundTrace {
  std::vector<RoundRecord> rounds;  // index i = state after i server updates
  std::vector<StepRecord> steps;
  Eigen::VectorXd w_final;
  Eigen::VectorXd w_avg;  // (1/KT) sum_{t=1..T} sum_{k=0..K-1} u-bar^{t,k}
  double f_gap_avg_iterate = 0.0;
  bool diverged = false;
  std::uint64_t bits_total = 0;
  std::vector<std::string> warnings;
};

/// K plain local GD steps from w_t; returns u^{t,K} - w_t. With dp set,
/// each step uses a uniform batch (with repetition) plus N(0, sigma^2 I_d)
/// noise.
Eigen::VectorXd local_steps(const FederatedObjective& obj, int c,
                            const Eigen::VectorXd& w_t, int K,
                            double eta_local,
                            const std::optional<DPRunSpec>& dp, double sigma,
                            Rng* rng);

/// eta_global times the arithmetic mean in client order.
Eigen::VectorXd server_aggregate(
    const std::vector<Eigen::VectorXd>& sketched_deltas, double eta_global);

RoundTrace run_fl(const FederatedObjective& obj, const RunConfig& config,
                  const Eigen::VectorXd& w0);

struct PrivateRunResult {
  RoundTrace trace;
  PrivacyBudget budget;
  double sigma_used = 0.0;
};

PrivateRunResult run_private_fl(const FederatedObjective& obj,
                                const RunConfig& config,
                                const Eigen::VectorXd& w0);

/// Mean traces over config.n_seeds independent master seeds
/// (sketch.master_seed + s).
struct AveragedTrace {
  std::vector<double> f_gap;        // per round index
  std::vector<double> dist_sq;      // per round index
  std::vector<double> grad_sq;      // |grad f(w^t)|^2 per round index
  double f_gap_avg_iterate = 0.0;   // mean over seeds of f(w-bar^T) - f*
  std::uint64_t bits_total = 0;
  int n_seeds = 0;
};

AveragedTrace run_fl_averaged(const FederatedObjective& obj,
                              const RunConfig& config,
                              const Eigen::VectorXd& w0);

struct BoundParams {
  double L = 0.0;
  double mu = 0.0;
  double sigma_sq = 0.0;
  double D0 = 0.0;      // E|w^0 - w*|^2
  double alpha = 0.0;
  double eta_local = 0.0;
  double eta_global = 1.0;
  double G = 0.0;       // gradient norm bound (non-convex case)
  double f_gap0 = 0.0;  // f(w^0) - f*
  int K = 1;
};

enum class Regime { StronglyConvex, Convex, NonConvex };

/// Appends step-size guard warnings (violations warn, never throw).
std::vector<std::string> check_guards(Regime regime, const BoundParams& p,
                                      bool k_step);

/// K-step strongly convex: L/2 D0 e^{-mu eta_local t} + 4 eta^2 L^2 K^3
/// sigma^2 / mu, for the state after t server updates.
double bound_strongly_convex(const BoundParams& p, int t);

/// K-step convex, for the average iterate after T rounds:
/// 4 D0/(eta_local K T) + 32 eta_local^2 L K^2 sigma^2.
double bound_convex(const BoundParams& p, int T);

/// K-step non-convex, bounding min_t E|grad f(w^t)|^2 over t = 0..T:
/// f_gap0/((T+1) eta_global) + eta_local L K^2 G^2 (eta_local +
/// (eta/2)(1+alpha)), eta = eta_global eta_local.
double bound_nonconvex(const BoundParams& p, int T);

/// Single-step (K=1) bounds with eta = eta_global * eta_local.
double bound_single_step(Regime regime, const BoundParams& p, int t);

struct CommBits {
  std::uint64_t per_round = 0;
  std::uint64_t total = 0;
};

/// 64-bit floats, N uploads + 1 broadcast of b_sketch coordinates per round.
CommBits communication_bits(const RunConfig& config, int N);

struct CommBudget {
  double eta_local = 0.0;
  double kx_eta = 0.0;  // K * eta_local (convex case)
  double T = 0.0;
  double total_bits = 0.0;
  bool noise_dominated = false;  // which corollary case applied
};

struct CommTargets {
  double eps = 0.0;
  double L = 0.0;
  double mu = 0.0;
  double sigma_sq = 0.0;
  double D0 = 0.0;
  double alpha = 0.0;
  int b_sketch = 0;
  int N = 0;
};

/// Evaluates the corollaries' optimal (eta_local, T) split exactly:
/// strongly convex splits on eps vs sigma^2/(16(1+alpha)^2 mu) with K = 1;
/// convex splits on eps vs sigma^2/((1+alpha)^2 L) choosing K*eta_local.
CommBudget communication_budget(Regime regime, const CommTargets& t);

}  // namespace skfl

#endif  // SKFL_FED_HPP
