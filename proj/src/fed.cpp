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

#include "skfl/fed.hpp"

#include <cmath>
#include <limits>

namespace skfl {
namespace {

/// Distinct stream from the operator seeds for DP batch/noise draws.
Rng dp_rng(std::uint64_t master_seed, int t, int c) {
  const std::uint64_t round_seed =
      derive_round_seed(master_seed ^ 0x8f1bbcdcbfa53e0bull, (std::uint64_t)t);
  return Rng(mix64(round_seed + 0x9e3779b97f4a7c15ull * (std::uint64_t)(c + 1)));
}

Eigen::VectorXd dp_step_gradient(const FederatedObjective& obj, int c,
                                 const Eigen::VectorXd& u, int batch_size,
                                 double sigma, Rng& rng) {
  const int n = obj.num_samples(c);
  Eigen::VectorXd g;
  if (batch_size >= n) {
    g = obj.grad_client(c, u);
  } else {
    g = Eigen::VectorXd::Zero(obj.dim());
    for (int i = 0; i < batch_size; ++i) {
      g += obj.per_sample_grad(c, u, (int)rng.next_below((std::uint64_t)n));
    }
    g /= double(batch_size);
  }
  if (sigma > 0.0) {
    for (int i = 0; i < g.size(); ++i) g[i] += sigma * rng.next_gaussian();
  }
  return g;
}

}  // namespace

Eigen::VectorXd local_steps(const FederatedObjective& obj, int c,
                            const Eigen::VectorXd& w_t, int K,
                            double eta_local,
                            const std::optional<DPRunSpec>& dp, double sigma,
                            Rng* rng) {
  if (K < 1) throw InvalidParam("local_steps: K must be >= 1");
  Eigen::VectorXd u = w_t;
  for (int k = 0; k < K; ++k) {
    Eigen::VectorXd g;
    if (dp) {
      g = dp_step_gradient(obj, c, u, dp->batch_size, sigma, *rng);
    } else {
      g = obj.grad_client(c, u);
    }
    u -= eta_local * g;
  }
  return u - w_t;
}

Eigen::VectorXd server_aggregate(
    const std::vector<Eigen::VectorXd>& sketched_deltas, double eta_global) {
  if (sketched_deltas.empty()) {
    throw EmptyClientList("server_aggregate: no deltas");
  }
  Eigen::VectorXd acc = sketched_deltas[0];
  for (std::size_t c = 1; c < sketched_deltas.size(); ++c) {
    if (sketched_deltas[c].size() != acc.size()) {
      throw DimensionMismatch("server_aggregate: delta length mismatch");
    }
    acc += sketched_deltas[c];
  }
  acc /= double(sketched_deltas.size());
  acc *= eta_global;
  return acc;
}

RoundTrace run_fl(const FederatedObjective& obj, const RunConfig& config,
                  const Eigen::VectorXd& w0) {
  if ((int)w0.size() != obj.dim()) {
    throw DimensionMismatch("run_fl: w0 length != objective dim");
  }
  if (config.sketch.d != obj.dim()) {
    throw DimensionMismatch("run_fl: sketch.d != objective dim");
  }
  const int N = obj.num_clients();
  const int K = config.K;

  // Per-client Gaussian noise scale for the DP variant.
  std::vector<double> sigma(N, 0.0);
  if (config.dp) {
    for (int c = 0; c < N; ++c) {
      if (config.dp->sigma_override) {
        sigma[c] = *config.dp->sigma_override;
      } else {
        sigma[c] = gaussian_sigma(l2_sensitivity(obj, c), config.dp->eps_hat,
                                  config.dp->delta_hat);
      }
    }
  }

  RoundTrace trace;
  const CommBits bits = communication_bits(config, N);

  Eigen::VectorXd w = w0;
  trace.rounds.push_back({0, obj.f_gap(w), (w - obj.optimum()).squaredNorm(),
                          obj.grad(w).squaredNorm(), 0});

  Eigen::VectorXd avg_acc = Eigen::VectorXd::Zero(obj.dim());
  std::vector<Eigen::VectorXd> u(N);
  std::vector<Eigen::VectorXd> sketched(N);

  for (int t = 1; t <= config.T; ++t) {
    const SketchOperator op = build_sketch(config.sketch, (std::uint64_t)t);

    // Round start: all clients synchronized at w, so V^{t,0} = 0 exactly.
    for (int c = 0; c < N; ++c) u[c] = w;
    trace.steps.push_back({t, 0, obj.f_gap(w), 0.0});
    if (config.record_average_iterate) avg_acc += w;

    std::vector<Rng> rngs;
    if (config.dp) {
      rngs.reserve(N);
      for (int c = 0; c < N; ++c) {
        rngs.push_back(dp_rng(config.sketch.master_seed, t, c));
      }
    }

    for (int k = 1; k <= K; ++k) {
      for (int c = 0; c < N; ++c) {
        Eigen::VectorXd g;
        if (config.dp) {
          g = dp_step_gradient(obj, c, u[c], config.dp->batch_size, sigma[c],
                               rngs[c]);
        } else {
          g = obj.grad_client(c, u[c]);
        }
        u[c] -= config.eta_local * g;
      }
      Eigen::VectorXd u_bar = Eigen::VectorXd::Zero(obj.dim());
      for (int c = 0; c < N; ++c) u_bar += u[c];
      u_bar /= double(N);
      double v = 0.0;
      for (int c = 0; c < N; ++c) v += (u[c] - u_bar).squaredNorm();
      v /= double(N);
      trace.steps.push_back({t, k, obj.f_gap(u_bar), v});
      // The average iterate runs over k = 0..K-1 within each round.
      if (config.record_average_iterate && k < K) avg_acc += u_bar;
    }

    for (int c = 0; c < N; ++c) sketched[c] = op.sk(u[c] - w);
    const Eigen::VectorXd delta_tilde =
        server_aggregate(sketched, config.eta_global);
    // Pair desk with the operator that produced the sketch, so the
    // round-trip is exactly R'R.
    w += op.desk(delta_tilde);

    trace.rounds.push_back(
        {t, obj.f_gap(w), (w - obj.optimum()).squaredNorm(),
         obj.grad(w).squaredNorm(), bits.per_round * (std::uint64_t)t});
    trace.bits_total = bits.per_round * (std::uint64_t)t;

    if (!w.allFinite()) {
      trace.diverged = true;
      trace.rounds.back().f_gap = std::numeric_limits<double>::quiet_NaN();
      break;
    }
  }

  trace.w_final = w;
  if (config.record_average_iterate && !trace.diverged && config.T > 0) {
    trace.w_avg = avg_acc / double((std::uint64_t)K * config.T);
    trace.f_gap_avg_iterate = obj.f_gap(trace.w_avg);
  } else {
    trace.w_avg = w;
    trace.f_gap_avg_iterate = obj.f_gap(w);
  }
  return trace;
}

PrivateRunResult run_private_fl(const FederatedObjective& obj,
                                const RunConfig& config,
                                const Eigen::VectorXd& w0) {
  if (!config.dp) throw InvalidParam("run_private_fl: dp spec missing");
  PrivateRunResult result;
  result.trace = run_fl(obj, config, w0);

  DPSpec spec;
  spec.eps_hat = config.dp->eps_hat;
  spec.delta_hat = config.dp->delta_hat;
  spec.K = config.K;
  spec.T = config.T;
  spec.batch_size = config.dp->batch_size;
  spec.lipschitz = obj.constants().lipschitz;
  for (int c = 0; c < obj.num_clients(); ++c) {
    spec.dataset_sizes.push_back(obj.num_samples(c));
  }
  result.budget = total_budget(spec);
  result.sigma_used =
      config.dp->sigma_override
          ? *config.dp->sigma_override
          : gaussian_sigma(l2_sensitivity(obj, 0), config.dp->eps_hat,
                           config.dp->delta_hat);
  return result;
}

AveragedTrace run_fl_averaged(const FederatedObjective& obj,
                              const RunConfig& config,
                              const Eigen::VectorXd& w0) {
  if (config.n_seeds < 1) throw InvalidParam("run_fl_averaged: n_seeds < 1");
  AveragedTrace avg;
  avg.n_seeds = config.n_seeds;
  avg.f_gap.assign(config.T + 1, 0.0);
  avg.dist_sq.assign(config.T + 1, 0.0);
  avg.grad_sq.assign(config.T + 1, 0.0);

  for (int s = 0; s < config.n_seeds; ++s) {
    RunConfig cfg = config;
    cfg.sketch.master_seed = config.sketch.master_seed + (std::uint64_t)s;
    const RoundTrace trace = run_fl(obj, cfg, w0);
    if (trace.diverged) {
      throw NonFinite("run_fl_averaged: seed " + std::to_string(s) +
                      " diverged");
    }
    for (int t = 0; t <= config.T; ++t) {
      avg.f_gap[t] += trace.rounds[t].f_gap;
      avg.dist_sq[t] += trace.rounds[t].dist_sq;
      avg.grad_sq[t] += trace.rounds[t].grad_sq;
    }
    avg.f_gap_avg_iterate += trace.f_gap_avg_iterate;
    avg.bits_total = trace.bits_total;
  }

  const double inv = 1.0 / double(config.n_seeds);
  for (double& x : avg.f_gap) x *= inv;
  for (double& x : avg.dist_sq) x *= inv;
  for (double& x : avg.grad_sq) x *= inv;
  avg.f_gap_avg_iterate *= inv;
  return avg;
}

std::vector<std::string> check_guards(Regime regime, const BoundParams& p,
                                      bool k_step) {
  std::vector<std::string> warnings;
  if (k_step) {
    const double limit = 1.0 / (8.0 * (1.0 + p.alpha) * p.L * p.K);
    if (regime != Regime::NonConvex && p.eta_local > limit * (1.0 + 1e-12)) {
      warnings.push_back("eta_local exceeds 1/(8(1+alpha)LK)");
    }
  } else {
    const double limit = 1.0 / ((1.0 + p.alpha) * p.L);
    if (p.eta_global * p.eta_local > limit * (1.0 + 1e-12)) {
      warnings.push_back("eta_global*eta_local exceeds 1/((1+alpha)L)");
    }
  }
  return warnings;
}

double bound_strongly_convex(const BoundParams& p, int t) {
  if (p.mu <= 0.0) throw InvalidParam("bound_strongly_convex: mu <= 0");
  const double floor = 4.0 * p.eta_local * p.eta_local * p.L * p.L *
                       std::pow(double(p.K), 3) * p.sigma_sq / p.mu;
  return 0.5 * p.L * p.D0 * std::exp(-p.mu * p.eta_local * double(t)) + floor;
}

double bound_convex(const BoundParams& p, int T) {
  if (T < 1) throw InvalidParam("bound_convex: T < 1");
  return 4.0 * p.D0 / (p.eta_local * double(p.K) * double(T)) +
         32.0 * p.eta_local * p.eta_local * p.L * double(p.K) * double(p.K) *
             p.sigma_sq;
}

double bound_nonconvex(const BoundParams& p, int T) {
  if (T < 0) throw InvalidParam("bound_nonconvex: T < 0");
  const double eta = p.eta_global * p.eta_local;
  return p.f_gap0 / (double(T + 1) * p.eta_global) +
         p.eta_local * p.L * double(p.K) * double(p.K) * p.G * p.G *
             (p.eta_local + 0.5 * eta * (1.0 + p.alpha));
}

double bound_single_step(Regime regime, const BoundParams& p, int t) {
  const double eta = p.eta_global * p.eta_local;
  switch (regime) {
    case Regime::StronglyConvex:
      if (p.mu <= 0.0) throw InvalidParam("single-step bound: mu <= 0");
      return std::pow(1.0 - p.mu * eta, t) * p.f_gap0;
    case Regime::Convex:
      return p.D0 / (eta * double(t + 1));
    case Regime::NonConvex:
      return 2.0 * p.f_gap0 / (eta * double(t + 1));
  }
  throw InvalidParam("unknown regime");
}

CommBits communication_bits(const RunConfig& config, int N) {
  CommBits bits;
  bits.per_round = 64ull * (std::uint64_t)config.sketch.b_sketch *
                   (std::uint64_t)(N + 1);
  bits.total = bits.per_round * (std::uint64_t)config.T;
  return bits;
}

CommBudget communication_budget(Regime regime, const CommTargets& t) {
  if (t.eps <= 0.0 || t.L <= 0.0 || t.D0 <= 0.0) {
    throw InvalidParam("communication_budget: need eps, L, D0 > 0");
  }
  CommBudget out;
  const double one_alpha = 1.0 + t.alpha;
  const double sigma = std::sqrt(t.sigma_sq);
  const double per_round = 64.0 * double(t.b_sketch) * double(t.N + 1);

  if (regime == Regime::StronglyConvex) {
    if (t.mu <= 0.0) throw InvalidParam("communication_budget: mu <= 0");
    const double log_arg = std::log(t.L * t.D0 / t.eps);
    const double threshold = t.sigma_sq / (16.0 * one_alpha * one_alpha * t.mu);
    if (t.eps >= threshold) {
      out.eta_local = 1.0 / (8.0 * one_alpha * t.L);
      out.T = (8.0 * one_alpha * t.L / t.mu) * log_arg;
    } else {
      out.noise_dominated = true;
      out.eta_local = std::sqrt(0.5 * t.mu * t.eps) / (2.0 * t.L * sigma);
      out.T = (2.0 * t.L * sigma / std::pow(t.mu, 1.5)) *
              std::sqrt(2.0 / t.eps) * log_arg;
    }
    out.kx_eta = out.eta_local;
  } else if (regime == Regime::Convex) {
    const double threshold = t.sigma_sq / (one_alpha * one_alpha * t.L);
    if (t.eps >= threshold) {
      out.kx_eta = 1.0 / (8.0 * one_alpha * t.L);
      out.T = 64.0 * t.D0 * one_alpha * t.L / t.eps;
    } else {
      out.noise_dominated = true;
      out.kx_eta = std::sqrt(t.eps / t.L) / (8.0 * sigma);
      out.T = 64.0 * t.D0 * sigma * std::sqrt(t.L) / std::pow(t.eps, 1.5);
    }
    out.eta_local = out.kx_eta;
  } else {
    throw InvalidParam("communication_budget: non-convex has no corollary");
  }
  out.total_bits = per_round * std::ceil(out.T);
  return out;
}

}  // namespace skfl
