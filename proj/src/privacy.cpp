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

#include "skfl/privacy.hpp"

#include <cmath>

namespace skfl {

double gaussian_sigma(double l2_sensitivity, double eps, double delta) {
  if (eps <= 0.0 || eps >= 1.0 || delta <= 0.0 || delta >= 1.0) {
    throw InvalidParam("gaussian_sigma: eps and delta must lie in (0,1)");
  }
  if (l2_sensitivity <= 0.0) {
    throw InvalidParam("gaussian_sigma: sensitivity must be positive");
  }
  return std::sqrt(2.0 * std::log(1.25 / delta)) * l2_sensitivity / eps;
}

double l2_sensitivity(const FederatedObjective& obj, int client) {
  const auto& l = obj.constants().lipschitz;
  if (client < 0 || client >= (int)l.size()) {
    throw IndexOutOfRange("l2_sensitivity: bad client index");
  }
  if (!std::isfinite(l[client])) {
    throw NoLipschitzBound(
        "l2_sensitivity: client has no Lipschitz bound (quadratic without a "
        "declared ball)");
  }
  return l[client];
}

std::pair<double, double> advanced_compose(double eps, double delta, int k,
                                           double delta_prime) {
  if (eps < 0.0 || delta < 0.0 || k < 1 || delta_prime <= 0.0 ||
      delta_prime > 1.0) {
    throw InvalidParam("advanced_compose: bad arguments");
  }
  const double eps_out =
      std::sqrt(2.0 * k * std::log(1.0 / delta_prime)) * eps +
      2.0 * k * eps * eps;
  return {eps_out, delta_prime + k * delta};
}

std::pair<double, double> parallel_compose(
    const std::vector<std::pair<double, double>>& budgets) {
  if (budgets.empty()) throw EmptyClientList("parallel_compose: empty list");
  double eps = 0.0;
  double delta = 0.0;
  for (const auto& [e, d] : budgets) {
    eps = std::max(eps, e);
    delta = std::max(delta, d);
  }
  return {eps, delta};
}

std::pair<double, double> amplify_subsample(double eps, double delta, int k,
                                            int n) {
  if (eps < 0.0 || eps > 1.0 || delta < 0.0 || k < 1 || n < 1) {
    throw InvalidParam("amplify_subsample: bad arguments");
  }
  if (2 * k > n) throw InvalidParam("amplify_subsample: requires k <= n/2");
  const double scaled = 6.0 * eps * k / double(n);
  return {scaled, std::exp(scaled) * (4.0 * k / double(n)) * delta};
}

PrivacyBudget total_budget(const DPSpec& spec) {
  if (spec.eps_hat <= 0.0 || spec.delta_hat <= 0.0 || spec.K < 1 ||
      spec.T < 1) {
    throw InvalidParam("total_budget: bad spec");
  }
  if (spec.eps_hat >= 1.0 / std::sqrt(double(spec.K))) {
    throw GuardViolated("total_budget: requires eps_hat < 1/sqrt(K)");
  }

  PrivacyBudget out;
  out.eps_dp = std::sqrt(double(spec.T) * spec.K) * spec.eps_hat;
  out.delta_dp = double(spec.T) * spec.K * spec.delta_hat;

  // Exact path: K-step advanced composition per client (parallel across
  // clients adds nothing), then advanced composition over the T rounds.
  const auto per_client =
      advanced_compose(spec.eps_hat, spec.delta_hat, spec.K, spec.delta_hat);
  const auto whole_run =
      advanced_compose(per_client.first, per_client.second, spec.T,
                       spec.delta_hat);
  out.eps_exact = whole_run.first;
  out.delta_exact = whole_run.second;
  return out;
}

}  // namespace skfl
