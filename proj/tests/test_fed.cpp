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

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "skfl/fed.hpp"

using namespace skfl;

namespace {

Eigen::VectorXd random_vec(int d, std::uint64_t seed) {
  Rng rng(seed);
  Eigen::VectorXd v(d);
  for (int i = 0; i < d; ++i) v[i] = rng.next_gaussian();
  return v;
}

SketchSpec identity_spec(int d, std::uint64_t seed) {
  SketchSpec spec;
  spec.kind = SketchKind::Identity;
  spec.d = d;
  spec.b_sketch = d;
  spec.master_seed = seed;
  return spec;
}

}  // namespace

TEST_CASE("local steps match a hand-unrolled K=3 loop") {
  const auto obj = gen_synthetic(ObjectiveKind::Quadratic, 2, 6, 10, 0.4, 5);
  const Eigen::VectorXd w = random_vec(6, 9);
  const double eta = 0.05;
  const Eigen::VectorXd delta =
      local_steps(obj, 1, w, 3, eta, std::nullopt, 0.0, nullptr);
  Eigen::VectorXd u = w;
  u = u - eta * obj.grad_client(1, u);
  u = u - eta * obj.grad_client(1, u);
  u = u - eta * obj.grad_client(1, u);
  CHECK((delta - (u - w)).norm() == 0.0);
  CHECK_THROWS_AS(local_steps(obj, 0, w, 0, eta, std::nullopt, 0.0, nullptr),
                  InvalidParam);
}

TEST_CASE("server aggregate is the global mean times eta_global") {
  const Eigen::VectorXd a{{1.0, 2.0}};
  const Eigen::VectorXd b{{3.0, -2.0}};
  const Eigen::VectorXd out = server_aggregate({a, b}, 0.5);
  CHECK(out[0] == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(out[1] == doctest::Approx(0.0).epsilon(1e-15));
  CHECK_THROWS_AS(server_aggregate({}, 1.0), EmptyClientList);
  CHECK_THROWS_AS(server_aggregate({a, Eigen::VectorXd::Zero(3)}, 1.0),
                  DimensionMismatch);
}

TEST_CASE("identity sketch K=1 N=1 is bit-identical to plain GD") {
  const auto obj = gen_synthetic(ObjectiveKind::Quadratic, 1, 8, 16, 0.0, 13);
  const Eigen::VectorXd w0 = random_vec(8, 21);
  RunConfig config;
  config.T = 100;
  config.K = 1;
  config.eta_local = 0.5 / obj.constants().L;
  config.eta_global = 1.0;
  config.sketch = identity_spec(8, 3);

  const RoundTrace trace = run_fl(obj, config, w0);
  Eigen::VectorXd w = w0;
  for (int t = 1; t <= config.T; ++t) {
    w = w - config.eta_local * obj.grad(w);
  }
  // Exact: identity round trip, mean over one client, eta_global = 1.
  CHECK((trace.w_final - w).norm() == 0.0);
  CHECK(trace.rounds.size() == 101);
  CHECK(trace.rounds.back().f_gap == obj.f_gap(w));
}

TEST_CASE("run_fl matches an independently written simulator") {
  const auto obj = gen_synthetic(ObjectiveKind::Quadratic, 3, 16, 24, 0.6, 31);
  const Eigen::VectorXd w0 = random_vec(16, 4);
  RunConfig config;
  config.T = 5;
  config.K = 4;
  config.eta_local = 0.02;
  config.eta_global = 0.9;
  config.sketch.kind = SketchKind::CountSketch;
  config.sketch.d = 16;
  config.sketch.b_sketch = 8;
  config.sketch.master_seed = 777;

  const RoundTrace trace = run_fl(obj, config, w0);

  // Oracle: fresh loop written against the definitions only.
  Eigen::VectorXd w = w0;
  for (int t = 1; t <= config.T; ++t) {
    const SketchOperator op = build_sketch(config.sketch, (std::uint64_t)t);
    Eigen::VectorXd sum = Eigen::VectorXd::Zero(op.spec().b_sketch);
    for (int c = 0; c < obj.num_clients(); ++c) {
      Eigen::VectorXd u = w;
      for (int k = 0; k < config.K; ++k) {
        u -= config.eta_local * obj.grad_client(c, u);
      }
      sum += op.sk(u - w);
    }
    w += op.desk(config.eta_global * (sum / double(obj.num_clients())));
    CHECK(trace.rounds[t].f_gap ==
          doctest::Approx(obj.f_gap(w)).epsilon(1e-12));
  }
  CHECK((trace.w_final - w).norm() <= 1e-12 * (1.0 + w.norm()));
}

TEST_CASE("trace bookkeeping") {
  const auto obj = gen_synthetic(ObjectiveKind::Quadratic, 4, 8, 12, 0.5, 3);
  const Eigen::VectorXd w0 = random_vec(8, 14);
  RunConfig config;
  config.T = 6;
  config.K = 3;
  config.eta_local = 0.01;
  config.sketch = identity_spec(8, 11);

  const RoundTrace trace = run_fl(obj, config, w0);
  REQUIRE(trace.rounds.size() == 7);
  // Steps: per round one k=0 record plus K step records.
  CHECK(trace.steps.size() == (size_t)(config.T * (config.K + 1)));
  for (const auto& step : trace.steps) {
    if (step.k == 0) CHECK(step.variance == 0.0);
  }
  // Heterogeneous clients drift apart during local steps.
  bool some_positive_variance = false;
  for (const auto& step : trace.steps) {
    if (step.k > 0 && step.variance > 0.0) some_positive_variance = true;
  }
  CHECK(some_positive_variance);
  // Bits: 64 * b * (N+1) per round, cumulative in t.
  const std::uint64_t per_round = 64ull * 8 * 5;
  for (size_t t = 0; t < trace.rounds.size(); ++t) {
    CHECK(trace.rounds[t].bits == per_round * t);
  }
  CHECK(trace.bits_total == per_round * 6);
  // Round 0 is the initial state.
  CHECK(trace.rounds[0].f_gap == obj.f_gap(w0));
  CHECK(trace.rounds[0].dist_sq ==
        (w0 - obj.optimum()).squaredNorm());
}

TEST_CASE("average iterate matches its definition") {
  const auto obj = gen_synthetic(ObjectiveKind::Quadratic, 2, 6, 10, 0.3, 8);
  const Eigen::VectorXd w0 = random_vec(6, 2);
  RunConfig config;
  config.T = 4;
  config.K = 3;
  config.eta_local = 0.02;
  config.sketch = identity_spec(6, 5);

  const RoundTrace trace = run_fl(obj, config, w0);
  // w_bar = (1/KT) sum_t sum_{k=0..K-1} u_bar^{t,k}; reconstruct from the
  // step records by replaying the identity-sketch run.
  Eigen::VectorXd acc = Eigen::VectorXd::Zero(6);
  Eigen::VectorXd w = w0;
  for (int t = 1; t <= config.T; ++t) {
    std::vector<Eigen::VectorXd> u(2, w);
    acc += w;  // k = 0 average iterate is w itself
    for (int k = 1; k <= config.K; ++k) {
      for (int c = 0; c < 2; ++c) {
        u[c] -= config.eta_local * obj.grad_client(c, u[c]);
      }
      if (k < config.K) acc += 0.5 * (u[0] + u[1]);
    }
    w += 0.5 * ((u[0] - w) + (u[1] - w));
  }
  acc /= double(config.K * config.T);
  CHECK((trace.w_avg - acc).norm() <= 1e-13 * (1.0 + acc.norm()));
  CHECK(trace.f_gap_avg_iterate == doctest::Approx(obj.f_gap(acc)));
}

TEST_CASE("dp run with zero noise and full batch equals the plain run") {
  auto obj = gen_synthetic(ObjectiveKind::LogCosh, 3, 8, 10, 0.4, 23);
  const Eigen::VectorXd w0 = random_vec(8, 6);
  RunConfig plain;
  plain.T = 10;
  plain.K = 2;
  plain.eta_local = 0.1;
  plain.sketch = identity_spec(8, 17);

  RunConfig dp = plain;
  DPRunSpec dps;
  dps.eps_hat = 0.3;
  dps.delta_hat = 1e-5;
  dps.batch_size = 1000;  // >= n, so the exact client gradient is used
  dps.sigma_override = 0.0;
  dp.dp = dps;

  const RoundTrace a = run_fl(obj, plain, w0);
  const RoundTrace b = run_fl(obj, dp, w0);
  CHECK((a.w_final - b.w_final).norm() == 0.0);
}

TEST_CASE("dp noise and minibatching change the trajectory but stay finite") {
  auto obj = gen_synthetic(ObjectiveKind::LogCosh, 2, 6, 12, 0.4, 29);
  const Eigen::VectorXd w0 = random_vec(6, 7);
  RunConfig config;
  config.T = 8;
  config.K = 2;
  config.eta_local = 0.05;
  config.sketch = identity_spec(6, 19);
  DPRunSpec dps;
  dps.eps_hat = 0.4;
  dps.delta_hat = 1e-5;
  dps.batch_size = 4;
  config.dp = dps;

  const PrivateRunResult result = run_private_fl(obj, config, w0);
  CHECK_FALSE(result.trace.diverged);
  CHECK(result.sigma_used > 0.0);
  // Budget agrees with the accountant called directly.
  DPSpec spec;
  spec.eps_hat = dps.eps_hat;
  spec.delta_hat = dps.delta_hat;
  spec.K = config.K;
  spec.T = config.T;
  const PrivacyBudget direct = total_budget(spec);
  CHECK(result.budget.eps_dp == direct.eps_dp);
  CHECK(result.budget.delta_dp == direct.delta_dp);
  CHECK(result.budget.eps_exact == direct.eps_exact);
  // Reruns are reproducible.
  const PrivateRunResult again = run_private_fl(obj, config, w0);
  CHECK((result.trace.w_final - again.trace.w_final).norm() == 0.0);
  // Noise actually perturbs the run.
  RunConfig plain = config;
  plain.dp.reset();
  const RoundTrace base = run_fl(obj, plain, w0);
  CHECK((result.trace.w_final - base.w_final).norm() > 0.0);
}

TEST_CASE("seed averaging uses distinct seeds and averages the gap") {
  const auto obj = gen_synthetic(ObjectiveKind::Quadratic, 2, 8, 12, 0.5, 37);
  const Eigen::VectorXd w0 = random_vec(8, 8);
  RunConfig config;
  config.T = 5;
  config.K = 2;
  config.eta_local = 0.02;
  config.sketch.kind = SketchKind::Gaussian;
  config.sketch.d = 8;
  config.sketch.b_sketch = 4;
  config.sketch.master_seed = 100;
  config.n_seeds = 3;

  const AveragedTrace avg = run_fl_averaged(obj, config, w0);
  REQUIRE(avg.f_gap.size() == 6);
  double manual = 0.0;
  for (int s = 0; s < 3; ++s) {
    RunConfig cfg = config;
    cfg.sketch.master_seed = 100 + s;
    manual += run_fl(obj, cfg, w0).rounds[5].f_gap;
  }
  CHECK(avg.f_gap[5] == doctest::Approx(manual / 3.0).epsilon(1e-14));
  CHECK(avg.n_seeds == 3);
}

TEST_CASE("divergence is flagged not fatal") {
  const auto obj = gen_synthetic(ObjectiveKind::Quadratic, 1, 6, 10, 0.0, 2);
  const Eigen::VectorXd w0 = random_vec(6, 3);
  RunConfig config;
  config.T = 400;
  config.K = 1;
  config.eta_local = 100.0 / obj.constants().L;  // far past stability
  config.sketch = identity_spec(6, 1);
  const RoundTrace trace = run_fl(obj, config, w0);
  CHECK(trace.diverged);
  CHECK(trace.rounds.size() < 401);  // partial trace retained
  CHECK(std::isnan(trace.rounds.back().f_gap));
}

TEST_CASE("bound formulas dual transcription") {
  BoundParams p;
  p.L = 2.0;
  p.mu = 0.5;
  p.sigma_sq = 0.3;
  p.D0 = 1.5;
  p.alpha = 6.0;
  p.eta_local = 0.004;
  p.eta_global = 1.0;
  p.G = 1.2;
  p.f_gap0 = 0.8;
  p.K = 4;

  const double sc = bound_strongly_convex(p, 10);
  const double sc_oracle =
      0.5 * 2.0 * 1.5 * std::exp(-0.5 * 0.004 * 10.0) +
      4.0 * 0.004 * 0.004 * 4.0 * 64.0 * 0.3 / 0.5;
  CHECK(sc == doctest::Approx(sc_oracle).epsilon(1e-14));

  const double cv = bound_convex(p, 20);
  const double cv_oracle = 4.0 * 1.5 / (0.004 * 4.0 * 20.0) +
                           32.0 * 0.004 * 0.004 * 2.0 * 16.0 * 0.3;
  CHECK(cv == doctest::Approx(cv_oracle).epsilon(1e-14));

  const double nc = bound_nonconvex(p, 20);
  const double eta = 0.004;
  const double nc_oracle =
      0.8 / 21.0 +
      0.004 * 2.0 * 16.0 * 1.44 * (0.004 + 0.5 * eta * 7.0);
  CHECK(nc == doctest::Approx(nc_oracle).epsilon(1e-14));

  // Single step.
  CHECK(bound_single_step(Regime::StronglyConvex, p, 3) ==
        doctest::Approx(std::pow(1.0 - 0.5 * 0.004, 3) * 0.8).epsilon(1e-14));
  CHECK(bound_single_step(Regime::Convex, p, 3) ==
        doctest::Approx(1.5 / (0.004 * 4.0)).epsilon(1e-14));
  CHECK(bound_single_step(Regime::NonConvex, p, 3) ==
        doctest::Approx(2.0 * 0.8 / (0.004 * 4.0)).epsilon(1e-14));

  p.mu = 0.0;
  CHECK_THROWS_AS(bound_strongly_convex(p, 1), InvalidParam);
}

TEST_CASE("guards warn but never throw") {
  BoundParams p;
  p.L = 2.0;
  p.mu = 0.5;
  p.alpha = 3.0;
  p.K = 4;
  p.eta_local = 1.0 / (8.0 * 4.0 * 2.0 * 4.0);  // exactly at the limit
  CHECK(check_guards(Regime::StronglyConvex, p, true).empty());
  p.eta_local *= 2.0;
  CHECK(check_guards(Regime::StronglyConvex, p, true).size() == 1);
  p.eta_local = 0.9 / ((1.0 + p.alpha) * p.L);
  CHECK(check_guards(Regime::StronglyConvex, p, false).empty());
  p.eta_local = 1.1 / ((1.0 + p.alpha) * p.L);
  CHECK(check_guards(Regime::StronglyConvex, p, false).size() == 1);
}

TEST_CASE("communication bits accounting") {
  RunConfig config;
  config.T = 10;
  config.sketch.b_sketch = 16;
  const CommBits four = communication_bits(config, 4);
  CHECK(four.per_round == 64ull * 16 * 5);
  CHECK(four.total == four.per_round * 10);
  // Doubling N doubles the upload share exactly: (2N+1) vs (N+1) scaled.
  const CommBits eight = communication_bits(config, 8);
  CHECK(eight.per_round == 64ull * 16 * 9);
}

TEST_CASE("communication budget case splits") {
  CommTargets t;
  t.L = 2.0;
  t.mu = 0.5;
  t.D0 = 1.0;
  t.alpha = 3.0;
  t.sigma_sq = 0.4;
  t.b_sketch = 16;
  t.N = 4;

  // Strongly convex, eps above the noise threshold: fixed step size.
  t.eps = 1.0;
  const CommBudget a = communication_budget(Regime::StronglyConvex, t);
  CHECK_FALSE(a.noise_dominated);
  CHECK(a.eta_local == doctest::Approx(1.0 / (8.0 * 4.0 * 2.0)).epsilon(1e-14));
  CHECK(a.T ==
        doctest::Approx((8.0 * 4.0 * 2.0 / 0.5) * std::log(2.0)).epsilon(1e-12));
  CHECK(a.total_bits ==
        doctest::Approx(64.0 * 16 * 5 * std::ceil(a.T)).epsilon(1e-12));

  // Below the threshold sigma^2/(16(1+alpha)^2 mu) = 0.4/128: noise path.
  t.eps = 1e-4;
  const CommBudget b = communication_budget(Regime::StronglyConvex, t);
  CHECK(b.noise_dominated);
  CHECK(b.eta_local ==
        doctest::Approx(std::sqrt(0.5 * 0.5 * 1e-4) / (2.0 * 2.0 *
                                                       std::sqrt(0.4)))
            .epsilon(1e-12));

  // Convex: threshold sigma^2/((1+alpha)^2 L) = 0.4/32.
  t.eps = 0.5;
  const CommBudget c = communication_budget(Regime::Convex, t);
  CHECK_FALSE(c.noise_dominated);
  CHECK(c.kx_eta == doctest::Approx(1.0 / 64.0).epsilon(1e-14));
  CHECK(c.T == doctest::Approx(64.0 * 4.0 * 2.0 / 0.5).epsilon(1e-12));
  t.eps = 1e-3;
  const CommBudget d = communication_budget(Regime::Convex, t);
  CHECK(d.noise_dominated);

  CHECK_THROWS_AS(communication_budget(Regime::NonConvex, t), InvalidParam);
  t.eps = 0.0;
  CHECK_THROWS_AS(communication_budget(Regime::Convex, t), InvalidParam);
}
