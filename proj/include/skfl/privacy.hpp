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

#ifndef SKFL_PRIVACY_HPP
#define SKFL_PRIVACY_HPP

#include <utility>
#include <vector>

#include "skfl/common.hpp"
#include "skfl/objectives.hpp"

namespace skfl {

struct DPSpec {
  double eps_hat = 0.0;
  double delta_hat = 0.0;
  std::vector<double> lipschitz;  // per-client l_c
  int K = 1;
  int T = 1;
  int batch_size = 1;
  std::vector<int> dataset_sizes;
};

struct PrivacyBudget {
  // Simplified composition path: (sqrt(TK) eps_hat, TK delta_hat).
  double eps_dp = 0.0;
  double delta_dp = 0.0;
  // Exact advanced-composition value reported alongside.
  double eps_exact = 0.0;
  double delta_exact = 0.0;
};

/// Gaussian mechanism scale sigma = sqrt(2 ln(1.25/delta)) * sensitivity / eps.
double gaussian_sigma(double l2_sensitivity, double eps, double delta);

/// Batch-averaged stochastic gradient sensitivity: the client's l_c.
/// Throws NoLipschitzBound when the client carries none (quadratic without
/// a declared ball).
double l2_sensitivity(const FederatedObjective& obj, int client);

/// Advanced sequential composition of k mechanisms, each (eps, delta)-DP:
/// (sqrt(2k ln(1/delta_prime)) eps + 2k eps^2, delta_prime + k delta).
std::pair<double, double> advanced_compose(double eps, double delta, int k,
                                           double delta_prime);

/// Parallel composition over disjoint data: componentwise maxima.
std::pair<double, double> parallel_compose(
    const std::vector<std::pair<double, double>>& budgets);

/// Amplification by sampling a batch of size k out of n (with repetition,
/// eps <= 1, k <= n/2): (6 eps k/n, exp(6 eps k/n) * (4k/n) delta).
std::pair<double, double> amplify_subsample(double eps, double delta, int k,
                                            int n);

/// Whole-run budget: K local steps composed per client, parallel across
/// clients, advanced composition over T rounds; simplified form
/// (sqrt(TK) eps_hat, TK delta_hat) plus the exact two-level advanced
/// composition value (delta' = delta_hat at each level).
PrivacyBudget total_budget(const DPSpec& spec);

}  // namespace skfl

#endif  // SKFL_PRIVACY_HPP
