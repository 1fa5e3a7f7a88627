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

#include "skfl/objectives.hpp"

#include <cmath>
#include <limits>

#include <nlohmann/json.hpp>

namespace skfl {
namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

/// Overflow-safe log cosh.
double log_cosh(double x) {
  const double ax = std::abs(x);
  return ax + std::log1p(std::exp(-2.0 * ax)) - std::log(2.0);
}

Eigen::MatrixXd random_matrix(Rng& rng, int rows, int cols) {
  Eigen::MatrixXd m(rows, cols);
  for (int i = 0; i < rows; ++i)
    for (int j = 0; j < cols; ++j) m(i, j) = rng.next_gaussian();
  return m;
}

Eigen::VectorXd random_vector(Rng& rng, int n) {
  Eigen::VectorXd v(n);
  for (int i = 0; i < n; ++i) v[i] = rng.next_gaussian();
  return v;
}

nlohmann::json matrix_to_json(const Eigen::MatrixXd& m) {
  nlohmann::json rows = nlohmann::json::array();
  for (int i = 0; i < m.rows(); ++i) {
    nlohmann::json row = nlohmann::json::array();
    for (int j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
    rows.push_back(row);
  }
  return rows;
}

Eigen::MatrixXd matrix_from_json(const nlohmann::json& j) {
  const int rows = (int)j.size();
  const int cols = rows > 0 ? (int)j[0].size() : 0;
  Eigen::MatrixXd m(rows, cols);
  for (int i = 0; i < rows; ++i)
    for (int k = 0; k < cols; ++k) m(i, k) = j[i][k].get<double>();
  return m;
}

nlohmann::json vector_to_json(const Eigen::VectorXd& v) {
  nlohmann::json arr = nlohmann::json::array();
  for (int i = 0; i < v.size(); ++i) arr.push_back(v[i]);
  return arr;
}

Eigen::VectorXd vector_from_json(const nlohmann::json& j) {
  Eigen::VectorXd v((int)j.size());
  for (int i = 0; i < v.size(); ++i) v[i] = j[i].get<double>();
  return v;
}

}  // namespace

FederatedObjective FederatedObjective::from_quadratic(
    std::vector<QuadraticClient> clients) {
  if (clients.empty()) throw EmptyClientList("from_quadratic: no clients");
  FederatedObjective obj;
  obj.kind_ = ObjectiveKind::Quadratic;
  obj.quad_ = std::move(clients);
  obj.N_ = (int)obj.quad_.size();
  obj.d_ = (int)obj.quad_[0].A.cols();
  for (const auto& c : obj.quad_) {
    if ((int)c.A.cols() != obj.d_ || c.A.rows() != c.b.size() ||
        c.A.rows() < 1) {
      throw DimensionMismatch("from_quadratic: inconsistent client shapes");
    }
    if (!c.A.allFinite() || !c.b.allFinite()) {
      throw InvalidParam("from_quadratic: non-finite client data");
    }
  }
  obj.finalize();
  return obj;
}

FederatedObjective FederatedObjective::from_logcosh(
    std::vector<LogCoshClient> clients) {
  if (clients.empty()) throw EmptyClientList("from_logcosh: no clients");
  FederatedObjective obj;
  obj.kind_ = ObjectiveKind::LogCosh;
  obj.logcosh_ = std::move(clients);
  obj.N_ = (int)obj.logcosh_.size();
  obj.d_ = (int)obj.logcosh_[0].A.cols();
  for (const auto& c : obj.logcosh_) {
    if ((int)c.A.cols() != obj.d_ || c.A.rows() != c.y.size() ||
        c.A.rows() < 1) {
      throw DimensionMismatch("from_logcosh: inconsistent client shapes");
    }
    if (!c.A.allFinite() || !c.y.allFinite()) {
      throw InvalidParam("from_logcosh: non-finite client data");
    }
  }
  obj.finalize();
  return obj;
}

void FederatedObjective::check_client(int c) const {
  if (c < 0 || c >= N_) {
    throw IndexOutOfRange("client index " + std::to_string(c) + " not in [0," +
                          std::to_string(N_) + ")");
  }
}

int FederatedObjective::num_samples(int c) const {
  check_client(c);
  return kind_ == ObjectiveKind::Quadratic ? (int)quad_[c].A.rows()
                                           : (int)logcosh_[c].A.rows();
}

const QuadraticClient& FederatedObjective::quadratic_client(int c) const {
  check_client(c);
  if (kind_ != ObjectiveKind::Quadratic) {
    throw InvalidParam("not a quadratic objective");
  }
  return quad_[c];
}

const LogCoshClient& FederatedObjective::logcosh_client(int c) const {
  check_client(c);
  if (kind_ != ObjectiveKind::LogCosh) {
    throw InvalidParam("not a logcosh objective");
  }
  return logcosh_[c];
}

double FederatedObjective::value_client(int c, const Eigen::VectorXd& w) const {
  check_client(c);
  if ((int)w.size() != d_) {
    throw DimensionMismatch("value_client: wrong parameter dimension");
  }
  if (kind_ == ObjectiveKind::Quadratic) {
    return 0.5 * (quad_[c].A * w - quad_[c].b).squaredNorm();
  }
  const Eigen::VectorXd r = logcosh_[c].A * w - logcosh_[c].y;
  double acc = 0.0;
  for (int i = 0; i < r.size(); ++i) acc += log_cosh(r[i]);
  return acc / double(r.size());
}

double FederatedObjective::value(const Eigen::VectorXd& w) const {
  double acc = 0.0;
  for (int c = 0; c < N_; ++c) acc += value_client(c, w);
  return acc / double(N_);
}

Eigen::VectorXd FederatedObjective::grad_client(int c,
                                                const Eigen::VectorXd& w) const {
  check_client(c);
  if ((int)w.size() != d_) {
    throw DimensionMismatch("grad_client: wrong parameter dimension");
  }
  if (kind_ == ObjectiveKind::Quadratic) {
    return quad_[c].A.transpose() * (quad_[c].A * w - quad_[c].b);
  }
  const Eigen::VectorXd r = logcosh_[c].A * w - logcosh_[c].y;
  Eigen::VectorXd t(r.size());
  for (int i = 0; i < r.size(); ++i) t[i] = std::tanh(r[i]);
  return logcosh_[c].A.transpose() * t / double(r.size());
}

Eigen::VectorXd FederatedObjective::grad(const Eigen::VectorXd& w) const {
  Eigen::VectorXd acc = Eigen::VectorXd::Zero(d_);
  for (int c = 0; c < N_; ++c) acc += grad_client(c, w);
  return acc / double(N_);
}

Eigen::VectorXd FederatedObjective::per_sample_grad(int c,
                                                    const Eigen::VectorXd& w,
                                                    int i) const {
  check_client(c);
  const int n = num_samples(c);
  if (i < 0 || i >= n) throw IndexOutOfRange("sample index out of range");
  if (kind_ == ObjectiveKind::Quadratic) {
    // f_c = (1/n) sum_i f_i with f_i = (n/2)(a_i'w - b_i)^2.
    const auto& cl = quad_[c];
    const double r = cl.A.row(i).dot(w) - cl.b[i];
    return double(n) * r * cl.A.row(i).transpose();
  }
  const auto& cl = logcosh_[c];
  const double r = cl.A.row(i).dot(w) - cl.y[i];
  return std::tanh(r) * cl.A.row(i).transpose();
}

void FederatedObjective::finalize() {
  constants_.lipschitz.assign(N_, kNaN);
  double mu = std::numeric_limits<double>::infinity();
  double L = 0.0;

  if (kind_ == ObjectiveKind::Quadratic) {
    Eigen::MatrixXd stacked_gram = Eigen::MatrixXd::Zero(d_, d_);
    int total_rows = 0;
    for (const auto& c : quad_) total_rows += (int)c.A.rows();
    Eigen::MatrixXd stacked(total_rows, d_);
    Eigen::VectorXd stacked_b(total_rows);
    int at = 0;
    for (const auto& c : quad_) {
      const Eigen::MatrixXd gram = c.A.transpose() * c.A;
      stacked_gram += gram;
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(gram);
      mu = std::min(mu, eig.eigenvalues().minCoeff());
      L = std::max(L, eig.eigenvalues().maxCoeff());
      stacked.middleRows(at, (int)c.A.rows()) = c.A;
      stacked_b.segment(at, (int)c.b.size()) = c.b;
      at += (int)c.A.rows();
    }
    mu = std::max(mu, 0.0);

    Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXd> cod(stacked);
    constants_.degenerate = cod.rank() < d_;
    w_star_ = cod.solve(stacked_b);
    constants_.G = kNaN;
  } else {
    for (const auto& c : logcosh_) {
      const Eigen::MatrixXd gram =
          c.A.transpose() * c.A / double(c.A.rows());
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(gram);
      L = std::max(L, eig.eigenvalues().maxCoeff());
    }
    mu = 0.0;

    double G = 0.0;
    for (int c = 0; c < N_; ++c) {
      double row_max = 0.0;
      for (int i = 0; i < logcosh_[c].A.rows(); ++i) {
        row_max = std::max(row_max, logcosh_[c].A.row(i).norm());
      }
      constants_.lipschitz[c] = row_max;
      G = std::max(G, row_max);
    }
    constants_.G = G;

    // Damped Newton to high precision; convex, so this is a global min.
    Eigen::VectorXd w = Eigen::VectorXd::Zero(d_);
    const double tol = 1e-13 * std::max(1.0, L);
    for (int iter = 0; iter < 500; ++iter) {
      const Eigen::VectorXd g = grad(w);
      if (g.norm() <= tol) break;
      Eigen::MatrixXd H = Eigen::MatrixXd::Zero(d_, d_);
      for (int c = 0; c < N_; ++c) {
        const auto& cl = logcosh_[c];
        const Eigen::VectorXd r = cl.A * w - cl.y;
        Eigen::VectorXd s(r.size());
        for (int i = 0; i < r.size(); ++i) {
          const double ch = std::cosh(std::min(std::abs(r[i]), 350.0));
          s[i] = 1.0 / (ch * ch);
        }
        H += cl.A.transpose() * s.asDiagonal() * cl.A / double(r.size());
      }
      H /= double(N_);
      H.diagonal().array() += 1e-12 * std::max(1.0, L);
      const Eigen::VectorXd step = H.ldlt().solve(g);
      double t = 1.0;
      const double f0 = value(w);
      const double slope = g.dot(step);
      while (t > 1e-8 && value(w - t * step) > f0 - 0.25 * t * slope) {
        t *= 0.5;
      }
      w -= t * step;
    }
    w_star_ = w;
  }

  constants_.mu = mu;
  constants_.L = L;
  f_star_ = value(w_star_);

  double het = 0.0;
  for (int c = 0; c < N_; ++c) het += grad_client(c, w_star_).squaredNorm();
  constants_.sigma_sq = het / double(N_);
  // Identical clients share the optimum exactly; clamp solver dust.
  if (constants_.sigma_sq < 1e-22) constants_.sigma_sq = 0.0;
}

void FederatedObjective::declare_ball(const Eigen::VectorXd& center,
                                      double radius) {
  if ((int)center.size() != d_ || radius <= 0.0) {
    throw InvalidParam("declare_ball: bad center or radius");
  }
  ball_ = {center, radius};
  if (kind_ == ObjectiveKind::Quadratic) {
    for (int c = 0; c < N_; ++c) {
      const auto& cl = quad_[c];
      const int n = (int)cl.A.rows();
      double worst = 0.0;
      for (int i = 0; i < n; ++i) {
        const double an = cl.A.row(i).norm();
        const double center_resid = std::abs(cl.A.row(i).dot(center) - cl.b[i]);
        worst = std::max(worst, double(n) * an * (center_resid + an * radius));
      }
      constants_.lipschitz[c] = worst;
    }
  }
}

std::string FederatedObjective::to_json() const {
  nlohmann::json j;
  j["kind"] = kind_ == ObjectiveKind::Quadratic ? "quadratic" : "logcosh";
  j["d"] = d_;
  j["N"] = N_;
  nlohmann::json clients = nlohmann::json::array();
  for (int c = 0; c < N_; ++c) {
    nlohmann::json jc;
    if (kind_ == ObjectiveKind::Quadratic) {
      jc["A"] = matrix_to_json(quad_[c].A);
      jc["b"] = vector_to_json(quad_[c].b);
    } else {
      jc["A"] = matrix_to_json(logcosh_[c].A);
      jc["y"] = vector_to_json(logcosh_[c].y);
    }
    clients.push_back(jc);
  }
  j["clients"] = clients;
  return j.dump(2);
}

FederatedObjective FederatedObjective::from_json(const std::string& text) {
  const nlohmann::json j = nlohmann::json::parse(text);
  const std::string kind = j.at("kind").get<std::string>();
  if (kind == "quadratic") {
    std::vector<QuadraticClient> clients;
    for (const auto& jc : j.at("clients")) {
      clients.push_back({matrix_from_json(jc.at("A")),
                         vector_from_json(jc.at("b"))});
    }
    return from_quadratic(std::move(clients));
  }
  if (kind == "logcosh") {
    std::vector<LogCoshClient> clients;
    for (const auto& jc : j.at("clients")) {
      clients.push_back({matrix_from_json(jc.at("A")),
                         vector_from_json(jc.at("y"))});
    }
    return from_logcosh(std::move(clients));
  }
  throw InvalidParam("from_json: unknown objective kind " + kind);
}

FederatedObjective gen_synthetic(ObjectiveKind kind, int N, int d,
                                 int n_per_client, double heterogeneity,
                                 std::uint64_t seed) {
  if (N < 1 || d < 1 || n_per_client < 1 || heterogeneity < 0.0) {
    throw InvalidParam("gen_synthetic: bad shape or heterogeneity");
  }
  Rng rng(mix64(seed));
  const Eigen::MatrixXd A =
      random_matrix(rng, n_per_client, d) / std::sqrt(double(n_per_client));
  const Eigen::VectorXd w_true = random_vector(rng, d);
  const Eigen::VectorXd base = A * w_true;

  if (kind == ObjectiveKind::Quadratic) {
    std::vector<QuadraticClient> clients;
    for (int c = 0; c < N; ++c) {
      const Eigen::VectorXd noise = random_vector(rng, n_per_client);
      clients.push_back({A, base + heterogeneity * noise});
    }
    return FederatedObjective::from_quadratic(std::move(clients));
  }
  std::vector<LogCoshClient> clients;
  for (int c = 0; c < N; ++c) {
    const Eigen::VectorXd noise = random_vector(rng, n_per_client);
    clients.push_back({A, base + heterogeneity * noise});
  }
  return FederatedObjective::from_logcosh(std::move(clients));
}

FederatedObjective gen_synthetic_rank_deficient(int N, int d, int n_per_client,
                                                int rank, double heterogeneity,
                                                std::uint64_t seed) {
  if (N < 1 || d < 1 || n_per_client < 1 || rank < 1 || rank >= d ||
      heterogeneity < 0.0) {
    throw InvalidParam("gen_synthetic_rank_deficient: bad parameters");
  }
  Rng rng(mix64(seed ^ 0x5bd1e995u));
  const Eigen::MatrixXd B =
      random_matrix(rng, n_per_client, rank) / std::sqrt(double(n_per_client));
  const Eigen::MatrixXd C = random_matrix(rng, rank, d) / std::sqrt(double(rank));
  const Eigen::MatrixXd A = B * C;
  const Eigen::VectorXd w_true = random_vector(rng, d);
  const Eigen::VectorXd base = A * w_true;
  std::vector<QuadraticClient> clients;
  for (int c = 0; c < N; ++c) {
    const Eigen::VectorXd noise = random_vector(rng, n_per_client);
    clients.push_back({A, base + heterogeneity * noise});
  }
  return FederatedObjective::from_quadratic(std::move(clients));
}

}  // namespace skfl
