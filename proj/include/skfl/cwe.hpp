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

#ifndef SKFL_CWE_HPP
#define SKFL_CWE_HPP

#include <string>
#include <vector>

#include <Eigen/Dense>

#include "skfl/sketch.hpp"

namespace skfl {

/// CLT band half-width in units of stderr; false-alarm < 1e-6 per check.
inline constexpr double kCweZ = 5.0;

struct MomentReport {
  SketchKind kind = SketchKind::Gaussian;
  int d = 0;
  int b = 0;
  int n_samples = 0;
  double empirical_mean = 0.0;
  double target = 0.0;  // g'h
  double stderr_mean = 0.0;
  double empirical_second_moment = 0.0;
  double stderr_second = 0.0;
  double second_moment_bound = 0.0;  // (g'h)^2 + (a/b)|g|^2|h|^2
  bool pass = false;
};

struct TailReport {
  SketchKind kind = SketchKind::Gaussian;
  double threshold = 0.0;
  double empirical_exceed_prob = 0.0;
  double claimed_delta = 0.0;
  int n_samples = 0;
};

struct FirstMoment {
  double mean = 0.0;
  double stderr_mean = 0.0;
};

struct SecondMoment {
  double second_moment = 0.0;
  double stderr_second = 0.0;
  double bound = 0.0;
};

/// Sample mean of g'R'Rh over fresh operators at rounds base_round,
/// base_round+1, ... Deterministic given the spec's master_seed.
FirstMoment estimate_first_moment(const SketchSpec& spec,
                                  const Eigen::VectorXd& g,
                                  const Eigen::VectorXd& h, int n_samples,
                                  std::uint64_t base_round = 0);

SecondMoment estimate_second_moment(const SketchSpec& spec,
                                    const Eigen::VectorXd& g,
                                    const Eigen::VectorXd& h, int n_samples,
                                    std::uint64_t base_round = 0);

/// Per-kind second-moment constant a (bound = (g'h)^2 + (a/b)|g|^2|h|^2).
double second_moment_constant(SketchKind kind, int d);

MomentReport moment_report(const SketchSpec& spec, const Eigen::VectorXd& g,
                           const Eigen::VectorXd& h, int n_samples,
                           std::uint64_t base_round = 0);

TailReport estimate_tail(const SketchSpec& spec, const Eigen::VectorXd& g,
                         const Eigen::VectorXd& h, double threshold,
                         double claimed_delta, int n_samples,
                         std::uint64_t base_round = 0);

/// Named vector pair from the fixed battery: axis, dense random,
/// orthogonal, parallel.
struct BatteryPair {
  std::string name;
  Eigen::VectorXd g;
  Eigen::VectorXd h;
};

std::vector<BatteryPair> vector_battery(int d, std::uint64_t seed);

struct EmbeddingCheck {
  std::string pair_name;
  std::string property;  // "first_moment" | "second_moment" | "desk_sk_norm"
  double empirical = 0.0;
  double target_or_bound = 0.0;
  double stderr_val = 0.0;
  bool pass = false;
};

struct EmbeddingReport {
  SketchSpec spec;
  double alpha = 0.0;
  bool alpha_certified = true;
  std::vector<EmbeddingCheck> checks;
  bool all_pass = true;
};

/// Full battery verification: unbiasedness of g'R'Rh, the per-kind second
/// moment bound, and E|R'Rh|^2 <= (1+alpha)|h|^2.
EmbeddingReport verify_embedding(const SketchSpec& spec, int trials,
                                 std::uint64_t battery_seed = 7);

}  // namespace skfl

#endif  // SKFL_CWE_HPP
