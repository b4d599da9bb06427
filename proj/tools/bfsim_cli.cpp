// Copyright 2026 The bfsim Authors
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


// Command-line front end. Talks to the library only through the C API.

#include <CLI11.hpp>
#include <charconv>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <memory>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "bfsim/bfsim.h"
#include "json.hpp"

namespace {

using nlohmann::json;

constexpr int kExitOk = 0;
constexpr int kExitCheckFailed = 1;
constexpr int kExitUsage = 2;
constexpr int kExitRuntime = 3;

// Configuration problems exit with kExitUsage, library failures with
// kExitRuntime.
struct CliError {
  int code;
  std::string message;
};

struct CString {
  char* p = nullptr;
  ~CString() { bfs_string_free(p); }
  std::string str() const { return p ? std::string(p) : std::string(); }
};

void Check(bfs_status s) {
  if (s == BFS_OK) return;
  const int code = (s == BFS_INVALID_ARGUMENT || s == BFS_INVALID_INPUT) ? kExitUsage : kExitRuntime;
  throw CliError{code, std::string(bfs_status_name(s)) + ": " + bfs_last_error()};
}

std::string ReadFile(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw CliError{kExitUsage, "cannot read file '" + path + "'"};
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

json LoadConfig(const std::string& path) {
  if (path.empty()) return json::object();
  try {
    json j = json::parse(ReadFile(path));
    if (!j.is_object()) throw CliError{kExitUsage, "config '" + path + "' is not a JSON object"};
    return j;
  } catch (const json::exception& e) {
    throw CliError{kExitUsage, "config '" + path + "': " + e.what()};
  }
}

// "bf", "er" or "custom:<file>".
json ParseRule(const std::string& rule) {
  if (rule == "bf" || rule == "er") return rule;
  const std::string prefix = "custom:";
  if (rule.rfind(prefix, 0) == 0) {
    try {
      json j = json::parse(ReadFile(rule.substr(prefix.size())));
      if (!j.contains("mode")) j["mode"] = "custom";
      return j;
    } catch (const json::exception& e) {
      throw CliError{kExitUsage, "rule file: " + std::string(e.what())};
    }
  }
  throw CliError{kExitUsage, "unknown rule '" + rule + "' (expected bf, er or custom:<file>)"};
}

void Emit(const std::string& text, const std::string& out) {
  if (out.empty() || out == "-") {
    std::cout << text;
    if (!text.empty() && text.back() != '\n') std::cout << '\n';
    std::cout.flush();
    return;
  }
  std::ofstream f(out);
  if (!f) throw CliError{kExitRuntime, "cannot write '" + out + "'"};
  f << text;
  if (!text.empty() && text.back() != '\n') f << '\n';
}

void EchoConfig(const char* command, const json& config) {
  std::cerr << "bfsim " << command << ": resolved config " << config.dump() << '\n';
}

void LogProgress(const char* message, void*) { std::cerr << "bfsim: " << message << '\n'; }

std::string Fmt(double v) {
  char buf[32];
  const auto r = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, r.ptr);
}

struct Common {
  std::string config;
  std::string out;
  std::string format;
};

void AddCommon(CLI::App* sub, Common& c, const std::vector<std::string>& formats,
               const std::string& default_format) {
  c.format = default_format;
  sub->add_option("--config", c.config, "JSON configuration file");
  sub->add_option("--out", c.out, "output file (default: standard output)");
  sub->add_option("--format", c.format, "output format")
      ->check(CLI::IsMember(formats));
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Bohman-Frieze process simulator and numerical toolkit"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(bfs_version()));
  const int hw = static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));

  // simulate
  auto* sim = app.add_subcommand("simulate", "run replicas and emit component censuses");
  Common sim_c;
  AddCommon(sim, sim_c, {"json", "csv", "ndjson"}, "json");
  std::uint64_t n = 0, seed = 0;
  std::vector<double> ts;
  std::vector<std::uint64_t> ms;
  std::string rule;
  int replicas = 0, threads = hw;
  double omega = 0;
  sim->add_option("--n", n, "number of vertices");
  sim->add_option("--t", ts, "snapshot times (m = floor(t n))");
  sim->add_option("--m", ms, "snapshot steps");
  sim->add_option("--rule", rule, "bf, er or custom:<file>");
  sim->add_option("--seed", seed, "master seed");
  sim->add_option("--replicas", replicas, "number of replicas");
  sim->add_option("--omega", omega, "slowly growing parameter omega");
  auto* sim_threads = sim->add_option("--threads", threads, "worker threads");

  // trajectory
  auto* tra = app.add_subcommand("trajectory", "emit the rho1, A, B grid");
  Common tra_c;
  AddCommon(tra, tra_c, {"csv", "json"}, "csv");
  double t_max = 2.0, dt = 1e-4;
  std::size_t stride = 1;
  std::string tra_rule = "bf";
  tra->add_option("--t-max", t_max, "final time");
  tra->add_option("--dt", dt, "step size");
  tra->add_option("--stride", stride, "emit every stride-th row");
  tra->add_option("--rule", tra_rule, "bf or er")->check(CLI::IsMember({"bf", "er"}));

  // mu
  auto* mu = app.add_subcommand("mu", "emit the (k, t, mu, rho_k) table");
  Common mu_c;
  AddCommon(mu, mu_c, {"csv", "json"}, "csv");
  std::vector<double> mu_ts;
  int k_max = 8, max_edges = 0, nodes = 0;
  std::string method, mu_rule = "bf";
  std::uint64_t samples = 0, mu_seed = 0;
  double mu_tmax = 2.0, mu_dt = 1e-4;
  mu->add_option("--t", mu_ts, "times");
  mu->add_option("--k-max", k_max, "largest tree size");
  mu->add_option("--method", method, "quad, mc or closed_form_er")
      ->check(CLI::IsMember({"quad", "mc", "closed_form_er"}));
  mu->add_option("--samples", samples, "Monte Carlo samples per class");
  mu->add_option("--seed", mu_seed, "Monte Carlo seed");
  mu->add_option("--max-edges", max_edges, "quadrature size cap");
  mu->add_option("--nodes", nodes, "quadrature nodes");
  mu->add_option("--rule", mu_rule, "bf or er")->check(CLI::IsMember({"bf", "er"}));
  mu->add_option("--t-max", mu_tmax, "trajectory horizon");
  mu->add_option("--dt", mu_dt, "trajectory step");

  // critical
  auto* cri = app.add_subcommand("critical", "estimate tc and xi, optionally fit densities");
  Common cri_c;
  AddCommon(cri, cri_c, {"json", "csv"}, "json");
  std::vector<std::uint64_t> ladder;
  std::vector<double> fit_eps;
  std::string cri_rule;
  std::uint64_t cri_seed = 0;
  int cri_replicas = 0, cri_threads = hw;
  double t_min = 0, cri_tmax = 0, t_step = 0;
  cri->add_option("--n", ladder, "n ladder");
  cri->add_option("--rule", cri_rule, "bf, er or custom:<file>");
  cri->add_option("--seed", cri_seed, "seed");
  cri->add_option("--replicas", cri_replicas, "replicas per n");
  auto* cri_threads_opt = cri->add_option("--threads", cri_threads, "worker threads");
  cri->add_option("--t-min", t_min, "grid start");
  cri->add_option("--t-max", cri_tmax, "grid end");
  cri->add_option("--t-step", t_step, "grid spacing");
  cri->add_option("--fit-eps", fit_eps, "offsets from tc at which to fit (delta, gamma)");

  // verify
  auto* ver = app.add_subcommand("verify", "run named verification suites");
  Common ver_c;
  AddCommon(ver, ver_c, {"json"}, "json");
  std::string suite = "all";
  std::uint64_t ver_seed = 0;
  int ver_threads = hw;
  double ver_omega = 0;
  bool list = false;
  ver->add_option("--suite", suite, "comma-separated suites or 'all'");
  ver->add_option("--seed", ver_seed, "master seed");
  auto* ver_threads_opt = ver->add_option("--threads", ver_threads, "worker threads");
  ver->add_option("--omega", ver_omega, "omega");
  ver->add_flag("--list", list, "list suite names and exit");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (sim->parsed()) {
      json cfg = LoadConfig(sim_c.config);
      if (sim->count("--n")) cfg["n"] = n;
      if (sim->count("--t")) {
        cfg["t"] = ts;
        cfg.erase("m");
      }
      if (sim->count("--m")) {
        cfg["m"] = ms;
        cfg.erase("t");
      }
      if (sim->count("--rule")) cfg["rule"] = ParseRule(rule);
      if (sim->count("--seed")) cfg["seed"] = seed;
      if (sim->count("--replicas")) cfg["replicas"] = replicas;
      if (sim->count("--omega")) cfg["omega"] = omega;
      if (sim_threads->count() || !cfg.contains("threads")) cfg["threads"] = threads;
      CString res;
      Check(bfs_simulate_json(cfg.dump().c_str(), sim_c.format == "ndjson", &res.p));
      if (sim_c.format == "ndjson") {
        EchoConfig("simulate", cfg);
        Emit(res.str(), sim_c.out);
        return kExitOk;
      }
      const json doc = json::parse(res.str());
      EchoConfig("simulate", doc["config"]);
      if (sim_c.format == "json") {
        Emit(doc.dump(1), sim_c.out);
        return kExitOk;
      }
      std::ostringstream os;
      os << "replica,seed,n,m,kind,size,count\n";
      for (const auto& r : doc["replicas"]) {
        for (const auto& c : r["snapshots"]) {
          for (const char* kind : {"tree", "nontree"}) {
            const json& counts = c[std::string(kind) + "_counts"];
            for (const auto& [size, count] : counts.items()) {
              os << r["replica"] << ',' << r["seed"] << ',' << c["n"] << ',' << c["m"] << ','
                 << kind << ',' << size << ',' << count << '\n';
            }
          }
        }
      }
      Emit(os.str(), sim_c.out);
      return kExitOk;
    }

    if (tra->parsed()) {
      json cfg = LoadConfig(tra_c.config);
      if (tra->count("--t-max") || !cfg.contains("t_max")) cfg["t_max"] = t_max;
      if (tra->count("--dt") || !cfg.contains("dt")) cfg["dt"] = dt;
      if (tra->count("--stride") || !cfg.contains("stride")) cfg["stride"] = stride;
      if (tra->count("--rule") || !cfg.contains("rule")) cfg["rule"] = tra_rule;
      EchoConfig("trajectory", cfg);
      bfs_trajectory* traj = nullptr;
      Check(bfs_trajectory_solve(cfg["t_max"].get<double>(), cfg["dt"].get<double>(),
                                 cfg["rule"] == "er", &traj));
      std::unique_ptr<bfs_trajectory, void (*)(bfs_trajectory*)> guard(traj, bfs_trajectory_free);
      CString csv;
      Check(bfs_trajectory_csv(traj, cfg["stride"].get<std::size_t>(), &csv.p));
      if (tra_c.format == "csv") {
        Emit(csv.str(), tra_c.out);
        return kExitOk;
      }
      json rows = json::array();
      std::istringstream in(csv.str());
      std::string line;
      std::getline(in, line);  // header
      while (std::getline(in, line)) {
        json row = json::array();
        std::istringstream ls(line);
        for (std::string cell; std::getline(ls, cell, ',');) row.push_back(std::stod(cell));
        rows.push_back(row);
      }
      Emit(json({{"schema", "bfsim.trajectory/1"}, {"config", cfg},
                 {"columns", {"t", "rho1", "A", "B"}}, {"rows", rows}})
               .dump(),
           tra_c.out);
      return kExitOk;
    }

    if (mu->parsed()) {
      json cfg = LoadConfig(mu_c.config);
      if (mu->count("--t")) cfg["t"] = mu_ts;
      if (mu->count("--k-max")) cfg["k_max"] = k_max;
      if (mu->count("--method")) cfg["method"] = method;
      if (mu->count("--samples")) cfg["samples"] = samples;
      if (mu->count("--seed")) cfg["seed"] = mu_seed;
      if (mu->count("--max-edges")) cfg["max_edges"] = max_edges;
      if (mu->count("--nodes")) cfg["nodes"] = nodes;
      const std::string r = mu->count("--rule") ? mu_rule : cfg.value("mode", mu_rule);
      const double tm = mu->count("--t-max") ? mu_tmax : cfg.value("t_max", mu_tmax);
      const double step = mu->count("--dt") ? mu_dt : cfg.value("dt", mu_dt);
      cfg.erase("mode");
      cfg.erase("t_max");
      cfg.erase("dt");
      bfs_trajectory* traj = nullptr;
      Check(bfs_trajectory_solve(tm, step, r == "er", &traj));
      std::unique_ptr<bfs_trajectory, void (*)(bfs_trajectory*)> guard(traj, bfs_trajectory_free);
      CString res;
      Check(bfs_mu_table_json(traj, cfg.dump().c_str(), &res.p));
      const json doc = json::parse(res.str());
      EchoConfig("mu", doc["config"]);
      if (mu_c.format == "json") {
        Emit(doc.dump(1), mu_c.out);
        return kExitOk;
      }
      std::ostringstream os;
      os << "k,t,mu,mu_se,rho,rho_se,method\n";
      for (const auto& row : doc["rows"]) {
        os << row["k"] << ',' << Fmt(row["t"]) << ',' << Fmt(row["mu"]) << ','
           << Fmt(row["mu_se"]) << ',' << Fmt(row["rho"]) << ',' << Fmt(row["rho_se"]) << ','
           << row["method"].get<std::string>() << '\n';
      }
      Emit(os.str(), mu_c.out);
      return kExitOk;
    }

    if (cri->parsed()) {
      json cfg = LoadConfig(cri_c.config);
      if (cri->count("--n")) cfg["n_ladder"] = ladder;
      if (cri->count("--rule")) cfg["rule"] = ParseRule(cri_rule);
      if (cri->count("--seed")) cfg["seed"] = cri_seed;
      if (cri->count("--replicas")) cfg["replicas"] = cri_replicas;
      if (cri_threads_opt->count() || !cfg.contains("threads")) cfg["threads"] = cri_threads;
      if (cri->count("--t-min")) cfg["t_min"] = t_min;
      if (cri->count("--t-max")) cfg["t_max"] = cri_tmax;
      if (cri->count("--t-step")) cfg["t_step"] = t_step;
      if (cri->count("--fit-eps")) cfg["fit_eps"] = fit_eps;
      CString res;
      Check(bfs_critical_json(cfg.dump().c_str(), LogProgress, nullptr, &res.p));
      const json doc = json::parse(res.str());
      EchoConfig("critical", doc["config"]);
      if (cri_c.format == "json") {
        Emit(doc.dump(1), cri_c.out);
        return kExitOk;
      }
      std::ostringstream os;
      os << "quantity,value\n"
         << "tc," << Fmt(doc["tc"]) << "\ntc_lo," << Fmt(doc["tc_ci"][0]) << "\ntc_hi,"
         << Fmt(doc["tc_ci"][1]) << "\nxi," << Fmt(doc["xi"]) << "\nxi_se," << Fmt(doc["xi_se"])
         << '\n';
      Emit(os.str(), cri_c.out);
      return kExitOk;
    }

    if (ver->parsed()) {
      if (list) {
        CString names;
        Check(bfs_verify_suite_names(&names.p));
        for (const auto& s : json::parse(names.str())) std::cout << s.get<std::string>() << '\n';
        return kExitOk;
      }
      json opts = LoadConfig(ver_c.config);
      if (ver->count("--seed")) opts["seed"] = ver_seed;
      if (ver->count("--omega")) opts["omega"] = ver_omega;
      if (ver_threads_opt->count() || !opts.contains("threads")) opts["threads"] = ver_threads;
      int passed = 0;
      CString res;
      Check(bfs_verify_json(suite.c_str(), opts.dump().c_str(), LogProgress, nullptr, &passed,
                            &res.p));
      const json doc = json::parse(res.str());
      EchoConfig("verify", doc["options"]);
      for (const auto& s : doc["suites"]) {
        for (const auto& c : s["checks"]) {
          std::cerr << (c["passed"].get<bool>() ? "PASS " : "FAIL ") << s["suite"].get<std::string>()
                    << '/' << c["name"].get<std::string>() << " statistic=" << Fmt(c["statistic"])
                    << ' ' << c["comparison"].get<std::string>();
          if (c["comparison"].get<std::string>().rfind("in", 0) != 0) {
            std::cerr << ' ' << Fmt(c["threshold"]);
          }
          std::cerr << '\n';
        }
      }
      Emit(doc.dump(1), ver_c.out);
      return passed ? kExitOk : kExitCheckFailed;
    }
  } catch (const CliError& e) {
    std::cerr << "bfsim: " << e.message << '\n';
    return e.code;
  } catch (const json::exception& e) {
    std::cerr << "bfsim: configuration error: " << e.what() << '\n';
    return kExitUsage;
  }
  return kExitUsage;
}
