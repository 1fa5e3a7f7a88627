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

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <nlohmann/json.hpp>

namespace fs = std::filesystem;
using json = nlohmann::json;

namespace {

std::string cli_path() {
  const char* path = std::getenv("SKFL_CLI");
  REQUIRE_MESSAGE(path != nullptr, "SKFL_CLI must point at the binary");
  return path;
}

fs::path scratch_dir() {
  const fs::path dir = fs::temp_directory_path() / "skfl_cli_test";
  fs::create_directories(dir);
  return dir;
}

fs::path write_config(const std::string& name, const json& config) {
  const fs::path path = scratch_dir() / name;
  std::ofstream out(path);
  out << config.dump(2);
  return path;
}

int run_cli(const std::string& args) {
  const std::string cmd = cli_path() + " " + args + " 2>/dev/null";
  const int status = std::system(cmd.c_str());
  return WEXITSTATUS(status);
}

std::string slurp(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

json run_config() {
  return json{
      {"seed", 7},
      {"objective",
       {{"kind", "quadratic"},
        {"clients", 2},
        {"dim", 8},
        {"samples_per_client", 16},
        {"heterogeneity", 0.0},
        {"seed", 3}}},
      {"sketch", {{"kind", "identity"}}},
      {"run",
       {{"T", 40},
        {"K", 1},
        {"eta_local", 0.05},
        {"n_seeds", 1},
        {"regime", "strongly_convex"}}}};
}

}  // namespace

TEST_CASE("run-fl minimal identity config exits zero and writes artifacts") {
  json config = run_config();
  // Safe step size for the strongly convex bound assertion.
  const fs::path cfg = write_config("run.json", config);
  const fs::path out = scratch_dir() / "run_out";
  fs::remove_all(out);
  const int code =
      run_cli("run-fl --config " + cfg.string() + " --out " + out.string());
  CHECK(code == 0);
  CHECK(fs::exists(out / "trace.csv"));
  CHECK(fs::exists(out / "bound_overlay.csv"));
  CHECK(fs::exists(out / "summary.json"));
  const json summary = json::parse(slurp(out / "summary.json"));
  CHECK(summary.at("assertions_pass").get<bool>());
  CHECK(summary.at("final_gap").get<double>() >= 0.0);
  // Header of the trace CSV matches the documented schema.
  std::ifstream trace(out / "trace.csv");
  std::string header;
  std::getline(trace, header);
  CHECK(header == "seed,t,k,f_gap,dist_sq,V,bits,bound_value");
}

TEST_CASE("same config and seed give byte-identical outputs") {
  const fs::path cfg = write_config("run2.json", run_config());
  const fs::path out1 = scratch_dir() / "rep1";
  const fs::path out2 = scratch_dir() / "rep2";
  fs::remove_all(out1);
  fs::remove_all(out2);
  REQUIRE(run_cli("run-fl --config " + cfg.string() + " --out " +
                  out1.string()) == 0);
  REQUIRE(run_cli("run-fl --config " + cfg.string() + " --out " +
                  out2.string()) == 0);
  CHECK(slurp(out1 / "trace.csv") == slurp(out2 / "trace.csv"));
  CHECK(slurp(out1 / "summary.json") == slurp(out2 / "summary.json"));
}

TEST_CASE("seed flag and env override change the stream") {
  json config = run_config();
  config["sketch"] = {{"kind", "gaussian"}, {"b_sketch", 4}};
  config["run"]["eta_local"] = 0.01;
  config["run"]["regime"] = "nonconvex";  // no bound assertion on gaussian run
  const fs::path cfg = write_config("run3.json", config);
  const fs::path out1 = scratch_dir() / "seed1";
  const fs::path out2 = scratch_dir() / "seed2";
  const fs::path out3 = scratch_dir() / "seed3";
  for (const auto& dir : {out1, out2, out3}) fs::remove_all(dir);
  REQUIRE(run_cli("run-fl --config " + cfg.string() + " --seed 1 --out " +
                  out1.string()) == 0);
  REQUIRE(run_cli("run-fl --config " + cfg.string() + " --seed 2 --out " +
                  out2.string()) == 0);
  CHECK(slurp(out1 / "trace.csv") != slurp(out2 / "trace.csv"));
  // Env var wins over the flag.
  REQUIRE(std::system(("SKFL_SEED=1 " + cli_path() + " run-fl --config " +
                       cfg.string() + " --seed 2 --out " + out3.string() +
                       " 2>/dev/null")
                          .c_str()) == 0);
  CHECK(slurp(out1 / "trace.csv") == slurp(out3 / "trace.csv"));
}

TEST_CASE("unknown config keys are rejected") {
  json config = run_config();
  config["run"]["learning_rate"] = 0.1;  // typo for eta_local
  const fs::path cfg = write_config("bad.json", config);
  const int code = run_cli("run-fl --config " + cfg.string() + " --out " +
                           (scratch_dir() / "bad_out").string());
  CHECK(code == 2);
}

TEST_CASE("guard violation completes with a warning") {
  json config = run_config();
  config["run"]["K"] = 4;
  config["run"]["eta_local"] = 10.0;  // way past 1/(8(1+alpha)LK)
  const fs::path cfg = write_config("guard.json", config);
  const fs::path out = scratch_dir() / "guard_out";
  fs::remove_all(out);
  const int code = run_cli("run-fl --config " + cfg.string() + " --no-assert" +
                           " --out " + out.string());
  CHECK(code == 0);  // assertions disabled; run records the warning
  const json summary = json::parse(slurp(out / "summary.json"));
  CHECK(summary.contains("warnings"));
  CHECK_FALSE(summary.at("warnings").empty());
}

TEST_CASE("account-privacy reports the documented budget") {
  const json config = {{"account",
                        {{"eps_hat", 0.1},
                         {"delta_hat", 1e-5},
                         {"T", 10},
                         {"K", 4},
                         {"sensitivity", 1.0}}}};
  const fs::path cfg = write_config("account.json", config);
  const fs::path out = scratch_dir() / "account_out";
  fs::remove_all(out);
  REQUIRE(run_cli("account-privacy --config " + cfg.string() + " --out " +
                  out.string()) == 0);
  const json summary = json::parse(slurp(out / "summary.json"));
  CHECK(summary.at("eps_dp").get<double>() ==
        doctest::Approx(std::sqrt(40.0) * 0.1).epsilon(1e-12));
  CHECK(summary.at("delta_dp").get<double>() ==
        doctest::Approx(4e-4).epsilon(1e-12));
  CHECK(summary.contains("sigma"));
}

TEST_CASE("verify-sketch small run emits the csv") {
  const json config = {{"seed", 5},
                       {"verify",
                        {{"kinds", {"srht", "countsketch"}},
                         {"dim", 32},
                         {"b_sketch", 8},
                         {"trials", 1500}}}};
  const fs::path cfg = write_config("verify.json", config);
  const fs::path out = scratch_dir() / "verify_out";
  fs::remove_all(out);
  REQUIRE(run_cli("verify-sketch --config " + cfg.string() + " --out " +
                  out.string()) == 0);
  const std::string csv = slurp(out / "verify_sketch.csv");
  CHECK(csv.find("kind,pair,property") == 0);
  CHECK(csv.find("srht") != std::string::npos);
  CHECK(csv.find("countsketch") != std::string::npos);
  const json summary = json::parse(slurp(out / "summary.json"));
  CHECK(summary.at("all_certified_pass").get<bool>());
}

TEST_CASE("run-dp-fl reports the budget") {
  json config = run_config();
  config["objective"]["kind"] = "logcosh";
  config["run"]["regime"] = "nonconvex";
  config["run"]["T"] = 5;
  config["dp"] = {{"eps_hat", 0.3}, {"delta_hat", 1e-5}, {"batch_size", 4}};
  const fs::path cfg = write_config("dp.json", config);
  const fs::path out = scratch_dir() / "dp_out";
  fs::remove_all(out);
  REQUIRE(run_cli("run-dp-fl --config " + cfg.string() + " --out " +
                  out.string()) == 0);
  const json summary = json::parse(slurp(out / "summary.json"));
  CHECK(summary.at("budget").at("eps_dp").get<double>() ==
        doctest::Approx(std::sqrt(5.0) * 0.3).epsilon(1e-12));
  CHECK(summary.at("sigma_used").get<double>() > 0.0);
}

TEST_CASE("attack subcommand recovers the data") {
  const json config = {
      {"seed", 11},
      {"attack",
       {{"model", "linreg"},
        {"w", {0.1, 0.2, -0.1, 0.15}},
        {"y", -2.0},
        {"x_true", {0.4, -0.3, 0.5, 0.2}},
        {"variant", "plain"},
        {"steps", 5000}}}};
  const fs::path cfg = write_config("attack.json", config);
  const fs::path out = scratch_dir() / "attack_out";
  fs::remove_all(out);
  REQUIRE(run_cli("attack --config " + cfg.string() + " --out " +
                  out.string()) == 0);
  const json summary = json::parse(slurp(out / "summary.json"));
  CHECK(summary.at("final_rel_error").get<double>() <= 1e-5);
  CHECK(summary.at("assertions_pass").get<bool>());
  CHECK(fs::exists(out / "attack_trace.csv"));
}

TEST_CASE("sweep reaches the target at several sketch sizes") {
  const json config = {
      {"seed", 13},
      {"objective",
       {{"kind", "quadratic"},
        {"clients", 2},
        {"dim", 16},
        {"samples_per_client", 24},
        {"heterogeneity", 0.0},
        {"seed", 5}}},
      {"sweep",
       {{"kind", "srht"},
        {"b_values", {16, 8}},
        {"target_eps", 1e-3},
        {"K", 2},
        {"max_T", 4000}}}};
  const fs::path cfg = write_config("sweep.json", config);
  const fs::path out = scratch_dir() / "sweep_out";
  fs::remove_all(out);
  REQUIRE(run_cli("sweep --config " + cfg.string() + " --out " +
                  out.string()) == 0);
  const json summary = json::parse(slurp(out / "summary.json"));
  CHECK(summary.at("all_reached").get<bool>());
  const std::string csv = slurp(out / "sweep.csv");
  CHECK(csv.find("b_sketch,alpha") == 0);
}
