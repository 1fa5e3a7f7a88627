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

#ifndef SKFL_SKETCH_HPP
#define SKFL_SKETCH_HPP

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "skfl/common.hpp"

namespace skfl {

enum class SketchKind {
  Gaussian,
  SRHT,
  AMS,
  CountSketch,
  SparseEmbedding,
  UniformSampling,
  Identity,
};

std::string to_string(SketchKind kind);
SketchKind sketch_kind_from_string(const std::string& name);

struct SketchSpec {
  SketchKind kind = SketchKind::Gaussian;
  int d = 0;
  int b_sketch = 0;
  std::uint64_t master_seed = 0;
  /// Nonzeros per column; used by SparseEmbedding only.
  int sparsity = 1;
};

/// Variance-inflation parameter of desk∘sk. `certified` is false for kinds
/// whose second moment does not scale as a/b with constant a (uniform
/// sampling has a = d, ruining the communication savings).
struct AlphaParam {
  double value = 0.0;
  bool certified = true;
};

AlphaParam alpha_param(SketchKind kind, int d, int b);

/// Degree-(k-1) polynomial over the Mersenne prime 2^61-1, giving a k-wise
/// independent hash family.
struct PolyHash {
  std::array<std::uint64_t, 4> coeff{};
  int degree = 0;

  std::uint64_t eval(std::uint64_t x) const;
  /// eval reduced mod m.
  std::uint64_t bucket(std::uint64_t x, std::uint64_t m) const;
  /// ±1 from the low bit of eval.
  double sign(std::uint64_t x) const;
};

/// A seeded random linear map R: ℝ^d → ℝ^b with Rᵀ as the de-sketch.
/// Immutable after build; application is read-only.
class SketchOperator {
 public:
  const SketchSpec& spec() const { return spec_; }
  std::uint64_t round() const { return round_; }
  std::uint64_t seed() const { return seed_; }

  /// sk: v ↦ R v.
  Eigen::VectorXd sk(const Eigen::VectorXd& v) const;
  /// desk: u ↦ Rᵀ u.
  Eigen::VectorXd desk(const Eigen::VectorXd& u) const;

  /// Materializes R as a dense b × d matrix (oracle / SVD path).
  Eigen::MatrixXd to_dense() const;

  /// Dense export, row-major, 17 significant digits per entry.
  void export_csv(std::ostream& out) const;

  int padded_dim() const { return padded_; }

 private:
  friend SketchOperator build_sketch(const SketchSpec& spec,
                                     std::uint64_t round);

  SketchSpec spec_;
  std::uint64_t round_ = 0;
  std::uint64_t seed_ = 0;

  // Gaussian: dense row-major (b × d).
  std::vector<double> dense_;
  // SRHT / UniformSampling: sampled row indices (without replacement) and
  // Rademacher diagonal. SRHT works on the zero-padded power-of-two space.
  int padded_ = 0;
  std::vector<int> rows_;
  std::vector<double> signs_;
  // AMS: one 4-wise hash per output row.
  std::vector<PolyHash> row_hash_;
  // CountSketch / SparseEmbedding: 2-wise position hash, 4-wise sign hash.
  PolyHash pos_hash_;
  PolyHash sign_hash_;
};

/// Builds the operator for a given round. Seeding is
/// derive_round_seed(spec.master_seed, round), so every client can
/// regenerate the identical operator locally.
SketchOperator build_sketch(const SketchSpec& spec, std::uint64_t round);

}  // namespace skfl

#endif  // SKFL_SKETCH_HPP
