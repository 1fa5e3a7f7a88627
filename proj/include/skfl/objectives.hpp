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

#ifndef SKFL_OBJECTIVES_HPP
#define SKFL_OBJECTIVES_HPP

#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "skfl/common.hpp"

namespace skfl {

enum class ObjectiveKind { Quadratic, LogCosh };

/// f_c(w) = 1/2 |A_c w - b_c|^2.
struct QuadraticClient {
  Eigen::MatrixXd A;
  Eigen::VectorXd b;
};

/// f_c(w) = (1/n_c) sum_i log cosh(a_i'w - y_i). Globally Lipschitz
/// (|tanh| <= 1) with per-sample gradient bound max_i |a_i|.
struct LogCoshClient {
  Eigen::MatrixXd A;
  Eigen::VectorXd y;
};

struct ObjectiveConstants {
  double mu = 0.0;
  double L = 0.0;
  double sigma_sq = 0.0;       // heterogeneity (1/N) sum |grad f_c(w*)|^2
  double G = 0.0;              // gradient norm bound (logcosh; NaN otherwise)
  std::vector<double> lipschitz;  // per-client l_c (NaN when unavailable)
  bool degenerate = false;        // rank-deficient stacked system, w* min-norm
};

class FederatedObjective {
 public:
  static FederatedObjective from_quadratic(std::vector<QuadraticClient> clients);
  static FederatedObjective from_logcosh(std::vector<LogCoshClient> clients);

  ObjectiveKind kind() const { return kind_; }
  int dim() const { return d_; }
  int num_clients() const { return N_; }
  int num_samples(int c) const;

  double value(const Eigen::VectorXd& w) const;
  double value_client(int c, const Eigen::VectorXd& w) const;
  Eigen::VectorXd grad(const Eigen::VectorXd& w) const;
  Eigen::VectorXd grad_client(int c, const Eigen::VectorXd& w) const;
  /// Per-sample gradient; averages over i to grad_client.
  Eigen::VectorXd per_sample_grad(int c, const Eigen::VectorXd& w, int i) const;

  const ObjectiveConstants& constants() const { return constants_; }
  const Eigen::VectorXd& optimum() const { return w_star_; }
  double f_star() const { return f_star_; }
  double f_gap(const Eigen::VectorXd& w) const { return value(w) - f_star_; }

  /// Declares a Lipschitz ball |w - center| <= radius for quadratic
  /// clients, enabling l2 sensitivity (per-sample gradient sup over the
  /// ball). Recomputes the cached l_c list.
  void declare_ball(const Eigen::VectorXd& center, double radius);

  const QuadraticClient& quadratic_client(int c) const;
  const LogCoshClient& logcosh_client(int c) const;

  std::string to_json() const;
  static FederatedObjective from_json(const std::string& text);

 private:
  FederatedObjective() = default;
  void finalize();
  void check_client(int c) const;

  ObjectiveKind kind_ = ObjectiveKind::Quadratic;
  int d_ = 0;
  int N_ = 0;
  std::vector<QuadraticClient> quad_;
  std::vector<LogCoshClient> logcosh_;
  ObjectiveConstants constants_;
  Eigen::VectorXd w_star_;
  double f_star_ = 0.0;
  std::optional<std::pair<Eigen::VectorXd, double>> ball_;
};

/// Synthetic instance: shared base matrix A, per-client targets perturbed by
/// the heterogeneity knob (targets only, so mu and L are shared exactly).
/// heterogeneity = 0 gives identical clients and sigma_sq = 0.
FederatedObjective gen_synthetic(ObjectiveKind kind, int N, int d,
                                 int n_per_client, double heterogeneity,
                                 std::uint64_t seed);

/// Variant with a rank-deficient stacked system (rank = given value < d)
/// for the convex (mu = 0) bound fixtures.
FederatedObjective gen_synthetic_rank_deficient(int N, int d, int n_per_client,
                                                int rank, double heterogeneity,
                                                std::uint64_t seed);

}  // namespace skfl

#endif  // SKFL_OBJECTIVES_HPP
