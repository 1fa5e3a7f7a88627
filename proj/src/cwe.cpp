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

#include "skfl/cwe.hpp"

#include <cmath>

namespace skfl {
namespace {

void check_dims(const SketchSpec& spec, const Eigen::VectorXd& g,
                const Eigen::VectorXd& h) {
  if ((int)g.size() != spec.d || (int)h.size() != spec.d) {
    throw DimensionMismatch("cwe: vector length does not match spec.d");
  }
}

/// One draw of g'R'Rh = (Rg)'(Rh).
double bilinear_sample(const SketchSpec& spec, std::uint64_t round,
                       const Eigen::VectorXd& g, const Eigen::VectorXd& h) {
  const SketchOperator op = build_sketch(spec, round);
  return op.sk(g).dot(op.sk(h));
}

struct RunningStats {
  double sum = 0.0;
  double sum_sq = 0.0;
  int n = 0;
  void add(double x) {
    sum += x;
    sum_sq += x * x;
    ++n;
  }
  double mean() const { return sum / n; }
  double stderr_mean() const {
    const double m = mean();
    const double var = (sum_sq - n * m * m) / (n - 1);
    return std::sqrt(std::max(var, 0.0) / n);
  }
};

}  // namespace

double second_moment_constant(SketchKind kind, int d) {
  switch (kind) {
    case SketchKind::Gaussian: return 3.0;
    case SketchKind::SRHT: return 2.0;
    case SketchKind::AMS: return 2.0;
    case SketchKind::CountSketch: return 3.0;
    case SketchKind::SparseEmbedding: return 2.0;
    case SketchKind::UniformSampling: return double(d);
    case SketchKind::Identity: return 0.0;
  }
  throw InvalidSpec("unknown sketch kind");
}

FirstMoment estimate_first_moment(const SketchSpec& spec,
                                  const Eigen::VectorXd& g,
                                  const Eigen::VectorXd& h, int n_samples,
                                  std::uint64_t base_round) {
  check_dims(spec, g, h);
  if (n_samples < 100) throw InvalidParam("estimate_first_moment: n < 100");
  RunningStats stats;
  for (int i = 0; i < n_samples; ++i) {
    stats.add(bilinear_sample(spec, base_round + i, g, h));
  }
  return {stats.mean(), stats.stderr_mean()};
}

SecondMoment estimate_second_moment(const SketchSpec& spec,
                                    const Eigen::VectorXd& g,
                                    const Eigen::VectorXd& h, int n_samples,
                                    std::uint64_t base_round) {
  check_dims(spec, g, h);
  if (n_samples < 1000) throw InvalidParam("estimate_second_moment: n < 1000");
  RunningStats stats;
  for (int i = 0; i < n_samples; ++i) {
    const double s = bilinear_sample(spec, base_round + i, g, h);
    stats.add(s * s);
  }
  const double gh = g.dot(h);
  const double a = second_moment_constant(spec.kind, spec.d);
  const double bound =
      gh * gh + (a / spec.b_sketch) * g.squaredNorm() * h.squaredNorm();
  return {stats.mean(), stats.stderr_mean(), bound};
}

MomentReport moment_report(const SketchSpec& spec, const Eigen::VectorXd& g,
                           const Eigen::VectorXd& h, int n_samples,
                           std::uint64_t base_round) {
  check_dims(spec, g, h);
  RunningStats first;
  RunningStats second;
  for (int i = 0; i < n_samples; ++i) {
    const double s = bilinear_sample(spec, base_round + i, g, h);
    first.add(s);
    second.add(s * s);
  }
  MomentReport rep;
  rep.kind = spec.kind;
  rep.d = spec.d;
  rep.b = spec.b_sketch;
  rep.n_samples = n_samples;
  rep.empirical_mean = first.mean();
  rep.target = g.dot(h);
  rep.stderr_mean = first.stderr_mean();
  rep.empirical_second_moment = second.mean();
  rep.stderr_second = second.stderr_mean();
  const double a = second_moment_constant(spec.kind, spec.d);
  rep.second_moment_bound = rep.target * rep.target +
                            (a / spec.b_sketch) * g.squaredNorm() *
                                h.squaredNorm();
  rep.pass =
      std::abs(rep.empirical_mean - rep.target) <= kCweZ * rep.stderr_mean &&
      rep.empirical_second_moment <=
          rep.second_moment_bound + kCweZ * rep.stderr_second;
  return rep;
}

TailReport estimate_tail(const SketchSpec& spec, const Eigen::VectorXd& g,
                         const Eigen::VectorXd& h, double threshold,
                         double claimed_delta, int n_samples,
                         std::uint64_t base_round) {
  check_dims(spec, g, h);
  if (threshold <= 0.0) throw InvalidParam("estimate_tail: threshold <= 0");
  const double target = g.dot(h);
  int exceed = 0;
  for (int i = 0; i < n_samples; ++i) {
    const double s = bilinear_sample(spec, base_round + i, g, h);
    if (std::abs(s - target) >= threshold) ++exceed;
  }
  TailReport rep;
  rep.kind = spec.kind;
  rep.threshold = threshold;
  rep.empirical_exceed_prob = double(exceed) / double(n_samples);
  rep.claimed_delta = claimed_delta;
  rep.n_samples = n_samples;
  return rep;
}

std::vector<BatteryPair> vector_battery(int d, std::uint64_t seed) {
  Rng rng(seed);
  auto random_unit = [&]() {
    Eigen::VectorXd v(d);
    for (int i = 0; i < d; ++i) v[i] = rng.next_gaussian();
    return Eigen::VectorXd(v / v.norm());
  };
  std::vector<BatteryPair> battery;

  Eigen::VectorXd e1 = Eigen::VectorXd::Zero(d);
  e1[0] = 1.0;
  Eigen::VectorXd e2 = Eigen::VectorXd::Zero(d);
  if (d > 1) e2[1] = 1.0;
  battery.push_back({"axis_same", e1, e1});
  if (d > 1) battery.push_back({"axis_orthogonal", e1, e2});

  const Eigen::VectorXd u = random_unit();
  Eigen::VectorXd v = random_unit();
  battery.push_back({"dense_random", u, v});
  battery.push_back({"parallel", u, u});
  // Gram-Schmidt for an exactly orthogonal dense pair.
  Eigen::VectorXd w = v - u.dot(v) * u;
  w.normalize();
  battery.push_back({"dense_orthogonal", u, w});
  return battery;
}

EmbeddingReport verify_embedding(const SketchSpec& spec, int trials,
                                 std::uint64_t battery_seed) {
  EmbeddingReport rep;
  rep.spec = spec;
  const AlphaParam alpha = alpha_param(spec.kind, spec.d, spec.b_sketch);
  rep.alpha = alpha.value;
  rep.alpha_certified = alpha.certified;

  const auto battery = vector_battery(spec.d, battery_seed);
  std::uint64_t round = 0;
  for (const auto& pair : battery) {
    const MomentReport mr = moment_report(spec, pair.g, pair.h, trials, round);
    round += trials;

    EmbeddingCheck first;
    first.pair_name = pair.name;
    first.property = "first_moment";
    first.empirical = mr.empirical_mean;
    first.target_or_bound = mr.target;
    first.stderr_val = mr.stderr_mean;
    first.pass =
        std::abs(mr.empirical_mean - mr.target) <= kCweZ * mr.stderr_mean;
    rep.checks.push_back(first);

    EmbeddingCheck second;
    second.pair_name = pair.name;
    second.property = "second_moment";
    second.empirical = mr.empirical_second_moment;
    second.target_or_bound = mr.second_moment_bound;
    second.stderr_val = mr.stderr_second;
    second.pass = mr.empirical_second_moment <=
                  mr.second_moment_bound + kCweZ * mr.stderr_second;
    rep.checks.push_back(second);

    // E|R'Rh|^2 <= (1+alpha)|h|^2 for the pair's h.
    RunningStats norm_stats;
    for (int i = 0; i < trials; ++i) {
      const SketchOperator op = build_sketch(spec, round + i);
      norm_stats.add(op.desk(op.sk(pair.h)).squaredNorm());
    }
    round += trials;
    EmbeddingCheck norm_check;
    norm_check.pair_name = pair.name;
    norm_check.property = "desk_sk_norm";
    norm_check.empirical = norm_stats.mean();
    norm_check.target_or_bound = (1.0 + rep.alpha) * pair.h.squaredNorm();
    norm_check.stderr_val = norm_stats.stderr_mean();
    norm_check.pass = norm_stats.mean() <=
                      norm_check.target_or_bound + kCweZ * norm_check.stderr_val;
    rep.checks.push_back(norm_check);
  }
  for (const auto& c : rep.checks) rep.all_pass = rep.all_pass && c.pass;
  return rep;
}

}  // namespace skfl
