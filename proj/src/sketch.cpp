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

#include "skfl/sketch.hpp"

#include <cmath>
#include <cstdio>
#include <numeric>
#include <ostream>

namespace skfl {
namespace {

constexpr std::uint64_t kMersenne61 = (1ull << 61) - 1;

std::uint64_t mulmod61(std::uint64_t a, std::uint64_t b) {
  const unsigned __int128 prod = (unsigned __int128)a * b;
  std::uint64_t lo = (std::uint64_t)(prod & kMersenne61);
  std::uint64_t hi = (std::uint64_t)(prod >> 61);
  std::uint64_t r = lo + hi;
  if (r >= kMersenne61) r -= kMersenne61;
  return r;
}

int next_pow2(int n) {
  int p = 1;
  while (p < n) p <<= 1;
  return p;
}

/// In-place unnormalized Walsh-Hadamard butterfly; length must be a power
/// of two.
void fwht(std::vector<double>& x) {
  const std::size_t n = x.size();
  for (std::size_t len = 1; len < n; len <<= 1) {
    for (std::size_t i = 0; i < n; i += len << 1) {
      for (std::size_t j = i; j < i + len; ++j) {
        const double u = x[j];
        const double v = x[j + len];
        x[j] = u + v;
        x[j + len] = u - v;
      }
    }
  }
}

PolyHash draw_poly(Rng& rng, int degree) {
  PolyHash h;
  h.degree = degree;
  for (int i = 0; i <= degree; ++i) h.coeff[i] = rng.next_below(kMersenne61);
  return h;
}

void sample_without_replacement(Rng& rng, int population, int count,
                                std::vector<int>& out) {
  std::vector<int> idx(population);
  std::iota(idx.begin(), idx.end(), 0);
  out.resize(count);
  for (int i = 0; i < count; ++i) {
    const int j = i + (int)rng.next_below((std::uint64_t)(population - i));
    std::swap(idx[i], idx[j]);
    out[i] = idx[i];
  }
}

void check_vec(int got, int want, const char* what) {
  if (got != want) {
    throw DimensionMismatch(std::string(what) + ": length " +
                            std::to_string(got) + ", expected " +
                            std::to_string(want));
  }
}

}  // namespace

std::string to_string(SketchKind kind) {
  switch (kind) {
    case SketchKind::Gaussian: return "gaussian";
    case SketchKind::SRHT: return "srht";
    case SketchKind::AMS: return "ams";
    case SketchKind::CountSketch: return "countsketch";
    case SketchKind::SparseEmbedding: return "sparse_embedding";
    case SketchKind::UniformSampling: return "uniform_sampling";
    case SketchKind::Identity: return "identity";
  }
  throw InvalidSpec("unknown sketch kind");
}

SketchKind sketch_kind_from_string(const std::string& name) {
  if (name == "gaussian") return SketchKind::Gaussian;
  if (name == "srht") return SketchKind::SRHT;
  if (name == "ams") return SketchKind::AMS;
  if (name == "countsketch") return SketchKind::CountSketch;
  if (name == "sparse_embedding") return SketchKind::SparseEmbedding;
  if (name == "uniform_sampling") return SketchKind::UniformSampling;
  if (name == "identity") return SketchKind::Identity;
  throw InvalidSpec("unknown sketch kind: " + name);
}

AlphaParam alpha_param(SketchKind kind, int d, int b) {
  if (b < 1) throw InvalidSpec("alpha_param: b_sketch must be >= 1");
  const double ratio = double(d) / double(b);
  switch (kind) {
    case SketchKind::Gaussian: return {3.0 * ratio, true};
    case SketchKind::SRHT: return {2.0 * ratio, true};
    case SketchKind::AMS: return {2.0 * ratio, true};
    case SketchKind::CountSketch: return {3.0 * ratio, true};
    case SketchKind::SparseEmbedding: return {2.0 * ratio, true};
    case SketchKind::UniformSampling:
      // Second-moment constant is a = d, not O(1): no variance savings.
      return {double(d) * ratio, false};
    case SketchKind::Identity: return {0.0, true};
  }
  throw InvalidSpec("unknown sketch kind");
}

std::uint64_t PolyHash::eval(std::uint64_t x) const {
  std::uint64_t xr = x % kMersenne61;
  std::uint64_t acc = coeff[degree];
  for (int i = degree - 1; i >= 0; --i) {
    acc = mulmod61(acc, xr);
    acc += coeff[i];
    if (acc >= kMersenne61) acc -= kMersenne61;
  }
  return acc;
}

std::uint64_t PolyHash::bucket(std::uint64_t x, std::uint64_t m) const {
  return eval(x) % m;
}

double PolyHash::sign(std::uint64_t x) const {
  return (eval(x) & 1ull) ? 1.0 : -1.0;
}

SketchOperator build_sketch(const SketchSpec& spec, std::uint64_t round) {
  if (spec.d < 1 || spec.b_sketch < 1) {
    throw InvalidSpec("build_sketch: d and b_sketch must be >= 1");
  }
  if (spec.b_sketch > spec.d) {
    throw InvalidSpec("build_sketch: b_sketch > d");
  }
  if (spec.kind == SketchKind::Identity && spec.b_sketch != spec.d) {
    throw InvalidSpec("build_sketch: Identity requires b_sketch = d");
  }
  if (spec.kind == SketchKind::SparseEmbedding) {
    if (spec.sparsity < 1 || spec.sparsity > spec.b_sketch ||
        spec.b_sketch % spec.sparsity != 0) {
      throw InvalidSpec(
          "build_sketch: SparseEmbedding needs 1 <= s <= b_sketch with s | "
          "b_sketch");
    }
  }

  SketchOperator op;
  op.spec_ = spec;
  op.round_ = round;
  op.seed_ = derive_round_seed(spec.master_seed, round);
  Rng rng(op.seed_);

  const int d = spec.d;
  const int b = spec.b_sketch;

  switch (spec.kind) {
    case SketchKind::Gaussian: {
      const double scale = 1.0 / std::sqrt(double(b));
      op.dense_.resize((std::size_t)b * d);
      for (double& e : op.dense_) e = scale * rng.next_gaussian();
      break;
    }
    case SketchKind::SRHT: {
      op.padded_ = next_pow2(d);
      op.signs_.resize(op.padded_);
      for (double& s : op.signs_) s = rng.next_sign();
      sample_without_replacement(rng, op.padded_, b, op.rows_);
      break;
    }
    case SketchKind::AMS: {
      op.row_hash_.reserve(b);
      for (int i = 0; i < b; ++i) op.row_hash_.push_back(draw_poly(rng, 3));
      break;
    }
    case SketchKind::CountSketch: {
      op.pos_hash_ = draw_poly(rng, 1);
      op.sign_hash_ = draw_poly(rng, 3);
      break;
    }
    case SketchKind::SparseEmbedding: {
      op.pos_hash_ = draw_poly(rng, 1);
      op.sign_hash_ = draw_poly(rng, 3);
      break;
    }
    case SketchKind::UniformSampling: {
      op.signs_.resize(d);
      for (double& s : op.signs_) s = rng.next_sign();
      sample_without_replacement(rng, d, b, op.rows_);
      break;
    }
    case SketchKind::Identity:
      break;
  }
  return op;
}

Eigen::VectorXd SketchOperator::sk(const Eigen::VectorXd& v) const {
  check_vec((int)v.size(), spec_.d, "sk input");
  const int d = spec_.d;
  const int b = spec_.b_sketch;
  Eigen::VectorXd out = Eigen::VectorXd::Zero(b);

  switch (spec_.kind) {
    case SketchKind::Gaussian: {
      for (int i = 0; i < b; ++i) {
        const double* row = dense_.data() + (std::size_t)i * d;
        double acc = 0.0;
        for (int j = 0; j < d; ++j) acc += row[j] * v[j];
        out[i] = acc;
      }
      break;
    }
    case SketchKind::SRHT: {
      std::vector<double> x((std::size_t)padded_, 0.0);
      for (int j = 0; j < d; ++j) x[j] = signs_[j] * v[j];
      fwht(x);
      const double scale = 1.0 / std::sqrt(double(b));
      for (int i = 0; i < b; ++i) out[i] = scale * x[rows_[i]];
      break;
    }
    case SketchKind::AMS: {
      const double scale = 1.0 / std::sqrt(double(b));
      for (int i = 0; i < b; ++i) {
        double acc = 0.0;
        for (int j = 0; j < d; ++j) acc += row_hash_[i].sign(j) * v[j];
        out[i] = scale * acc;
      }
      break;
    }
    case SketchKind::CountSketch: {
      for (int j = 0; j < d; ++j) {
        out[pos_hash_.bucket(j, b)] += sign_hash_.sign(j) * v[j];
      }
      break;
    }
    case SketchKind::SparseEmbedding: {
      const int s = spec_.sparsity;
      const int block = b / s;
      const double scale = 1.0 / std::sqrt(double(s));
      for (int j = 0; j < d; ++j) {
        for (int k = 0; k < s; ++k) {
          const std::uint64_t key = (std::uint64_t)j * s + k;
          const int row = k * block + (int)pos_hash_.bucket(key, block);
          out[row] += scale * sign_hash_.sign(key) * v[j];
        }
      }
      break;
    }
    case SketchKind::UniformSampling: {
      const double scale = std::sqrt(double(d) / double(b));
      for (int i = 0; i < b; ++i) {
        out[i] = scale * signs_[rows_[i]] * v[rows_[i]];
      }
      break;
    }
    case SketchKind::Identity:
      out = v;
      break;
  }
  return out;
}

Eigen::VectorXd SketchOperator::desk(const Eigen::VectorXd& u) const {
  check_vec((int)u.size(), spec_.b_sketch, "desk input");
  const int d = spec_.d;
  const int b = spec_.b_sketch;
  Eigen::VectorXd out = Eigen::VectorXd::Zero(d);

  switch (spec_.kind) {
    case SketchKind::Gaussian: {
      for (int j = 0; j < d; ++j) {
        double acc = 0.0;
        for (int i = 0; i < b; ++i) acc += dense_[(std::size_t)i * d + j] * u[i];
        out[j] = acc;
      }
      break;
    }
    case SketchKind::SRHT: {
      std::vector<double> x((std::size_t)padded_, 0.0);
      for (int i = 0; i < b; ++i) x[rows_[i]] += u[i];
      fwht(x);
      const double scale = 1.0 / std::sqrt(double(b));
      for (int j = 0; j < d; ++j) out[j] = scale * signs_[j] * x[j];
      break;
    }
    case SketchKind::AMS: {
      const double scale = 1.0 / std::sqrt(double(b));
      for (int j = 0; j < d; ++j) {
        double acc = 0.0;
        for (int i = 0; i < b; ++i) acc += row_hash_[i].sign(j) * u[i];
        out[j] = scale * acc;
      }
      break;
    }
    case SketchKind::CountSketch: {
      for (int j = 0; j < d; ++j) {
        out[j] = sign_hash_.sign(j) * u[pos_hash_.bucket(j, b)];
      }
      break;
    }
    case SketchKind::SparseEmbedding: {
      const int s = spec_.sparsity;
      const int block = b / s;
      const double scale = 1.0 / std::sqrt(double(s));
      for (int j = 0; j < d; ++j) {
        double acc = 0.0;
        for (int k = 0; k < s; ++k) {
          const std::uint64_t key = (std::uint64_t)j * s + k;
          const int row = k * block + (int)pos_hash_.bucket(key, block);
          acc += scale * sign_hash_.sign(key) * u[row];
        }
        out[j] = acc;
      }
      break;
    }
    case SketchKind::UniformSampling: {
      const double scale = std::sqrt(double(d) / double(b));
      for (int i = 0; i < b; ++i) {
        out[rows_[i]] = scale * signs_[rows_[i]] * u[i];
      }
      break;
    }
    case SketchKind::Identity:
      out = u;
      break;
  }
  return out;
}

Eigen::MatrixXd SketchOperator::to_dense() const {
  const int d = spec_.d;
  const int b = spec_.b_sketch;
  Eigen::MatrixXd R = Eigen::MatrixXd::Zero(b, d);

  switch (spec_.kind) {
    case SketchKind::Gaussian: {
      for (int i = 0; i < b; ++i)
        for (int j = 0; j < d; ++j) R(i, j) = dense_[(std::size_t)i * d + j];
      break;
    }
    case SketchKind::SRHT: {
      // Row r of the padded Hadamard matrix: H(r, c) = (-1)^{popcount(r&c)}.
      const double scale = 1.0 / std::sqrt(double(b));
      for (int i = 0; i < b; ++i) {
        const int r = rows_[i];
        for (int j = 0; j < d; ++j) {
          const int par = __builtin_popcount((unsigned)(r & j)) & 1;
          R(i, j) = scale * (par ? -1.0 : 1.0) * signs_[j];
        }
      }
      break;
    }
    case SketchKind::AMS: {
      const double scale = 1.0 / std::sqrt(double(b));
      for (int i = 0; i < b; ++i)
        for (int j = 0; j < d; ++j) R(i, j) = scale * row_hash_[i].sign(j);
      break;
    }
    case SketchKind::CountSketch: {
      for (int j = 0; j < d; ++j) {
        R((int)pos_hash_.bucket(j, b), j) = sign_hash_.sign(j);
      }
      break;
    }
    case SketchKind::SparseEmbedding: {
      const int s = spec_.sparsity;
      const int block = b / s;
      const double scale = 1.0 / std::sqrt(double(s));
      for (int j = 0; j < d; ++j) {
        for (int k = 0; k < s; ++k) {
          const std::uint64_t key = (std::uint64_t)j * s + k;
          const int row = k * block + (int)pos_hash_.bucket(key, block);
          R(row, j) = scale * sign_hash_.sign(key);
        }
      }
      break;
    }
    case SketchKind::UniformSampling: {
      const double scale = std::sqrt(double(d) / double(b));
      for (int i = 0; i < b; ++i) {
        R(i, rows_[i]) = scale * signs_[rows_[i]];
      }
      break;
    }
    case SketchKind::Identity:
      R.setIdentity();
      break;
  }
  return R;
}

void SketchOperator::export_csv(std::ostream& out) const {
  const Eigen::MatrixXd R = to_dense();
  char buf[64];
  for (int i = 0; i < R.rows(); ++i) {
    for (int j = 0; j < R.cols(); ++j) {
      std::snprintf(buf, sizeof(buf), "%.17g", R(i, j));
      out << buf;
      if (j + 1 < R.cols()) out << ',';
    }
    out << '\n';
  }
}

}  // namespace skfl
