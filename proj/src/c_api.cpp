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


#include "bfsim/bfsim.h"

#include <cstdlib>
#include <cstring>
#include <algorithm>
#include <functional>
#include <new>
#include <set>
#include <sstream>
#include <string>

#include "bfsim/criticality.hpp"
#include "bfsim/error.hpp"
#include "bfsim/harness.hpp"
#include "bfsim/process.hpp"
#include "bfsim/rng.hpp"
#include "bfsim/suites.hpp"
#include "bfsim/trajectory.hpp"
#include "bfsim/tree_measure.hpp"
#include "json.hpp"

struct bfs_rule {
  bfsim::RuleSpec spec;
};

struct bfs_process {
  bfsim::ProcessState state;
};

struct bfs_trajectory {
  bfsim::Trajectory traj;
};

namespace {

using nlohmann::json;

thread_local std::string g_last_error;

bfs_status Report(bfs_status status, const std::string& message) {
  g_last_error = message;
  return status;
}

// Runs fn, mapping exceptions onto status codes.
template <class Fn>
bfs_status Guard(Fn&& fn) {
  try {
    g_last_error.clear();
    fn();
    return BFS_OK;
  } catch (const bfsim::Error& e) {
    return Report(static_cast<bfs_status>(e.code()), e.what());
  } catch (const json::exception& e) {
    return Report(BFS_INVALID_INPUT, std::string("malformed JSON: ") + e.what());
  } catch (const std::bad_alloc&) {
    return Report(BFS_RESOURCE_LIMIT, "out of memory");
  } catch (const std::exception& e) {
    return Report(BFS_INTERNAL, e.what());
  } catch (...) {
    return Report(BFS_INTERNAL, "unknown failure");
  }
}

void Need(const void* p, const char* what) {
  if (p == nullptr) bfsim::Fail(bfsim::ErrorCode::kInvalidArgument, std::string(what) + " is null");
}

char* Dup(const std::string& s) {
  char* out = static_cast<char*>(std::malloc(s.size() + 1));
  if (out == nullptr) throw std::bad_alloc();
  std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

json Parse(const char* text) {
  if (text == nullptr || *text == '\0') return json::object();
  return json::parse(text);
}

std::function<void(const std::string&)> Progress(bfs_progress_fn fn, void* user) {
  if (fn == nullptr) return {};
  return [fn, user](const std::string& msg) { fn(msg.c_str(), user); };
}

bfsim::RuleSpec RuleFrom(const json& j) {
  if (j.is_string()) return bfsim::RuleSpec::FromJson({{"mode", j.get<std::string>()}});
  return bfsim::RuleSpec::FromJson(j);
}

}  // namespace

extern "C" {

const char* bfs_version(void) { return "1.0.0"; }

const char* bfs_status_name(bfs_status status) {
  switch (status) {
    case BFS_OK: return "ok";
    case BFS_INVALID_ARGUMENT: return "invalid-argument";
    case BFS_INVALID_INPUT: return "invalid-input";
    case BFS_UNSUPPORTED_SIZE: return "unsupported-size";
    case BFS_INVALID_STATE: return "invalid-state";
    case BFS_OUT_OF_RANGE: return "out-of-range";
    case BFS_SINGULAR_INPUT: return "singular-input";
    case BFS_OUT_OF_REGIME: return "out-of-regime";
    case BFS_IO: return "io";
    case BFS_RESOURCE_LIMIT: return "resource-limit";
    case BFS_INTERNAL: return "internal";
  }
  return "unknown";
}

const char* bfs_last_error(void) { return g_last_error.c_str(); }

void bfs_string_free(char* s) { std::free(s); }

bfs_status bfs_rule_new(const char* spec, bfs_rule** out) {
  return Guard([&] {
    Need(spec, "spec");
    Need(out, "out");
    const std::string s(spec);
    json j = (s == "bf" || s == "er") ? json(s) : json::parse(s);
    *out = new bfs_rule{RuleFrom(j)};
  });
}

bfs_status bfs_rule_to_json(const bfs_rule* rule, char** out) {
  return Guard([&] {
    Need(rule, "rule");
    Need(out, "out");
    *out = Dup(rule->spec.ToJson().dump());
  });
}

void bfs_rule_free(bfs_rule* rule) { delete rule; }

bfs_status bfs_process_new(uint64_t n, const bfs_rule* rule, uint64_t seed, bfs_process** out) {
  return Guard([&] {
    Need(rule, "rule");
    Need(out, "out");
    *out = new bfs_process{bfsim::ProcessState(n, rule->spec, seed)};
  });
}

void bfs_process_free(bfs_process* p) { delete p; }

bfs_status bfs_process_step(bfs_process* p, bfs_edge_event* event) {
  return Guard([&] {
    Need(p, "process");
    const bfsim::EdgeEvent e = p->state.Step();
    if (event != nullptr) {
      event->step = e.step;
      event->first[0] = e.first_candidate.a;
      event->first[1] = e.first_candidate.b;
      event->second[0] = e.second_candidate.a;
      event->second[1] = e.second_candidate.b;
      event->chosen[0] = e.chosen.a;
      event->chosen[1] = e.chosen.b;
      event->was_first_isolated_pair = e.was_first_isolated_pair ? 1 : 0;
    }
  });
}

bfs_status bfs_process_run_until(bfs_process* p, uint64_t m) {
  return Guard([&] {
    Need(p, "process");
    p->state.RunUntil(m);
  });
}

bfs_status bfs_process_stats_get(const bfs_process* p, bfs_process_stats* out) {
  return Guard([&] {
    Need(p, "process");
    Need(out, "out");
    out->n = p->state.n();
    out->m = p->state.steps();
    out->isolated = p->state.isolated();
    out->largest = p->state.largest();
    out->sum_sq_sizes = p->state.sum_sq_sizes();
  });
}

bfs_status bfs_process_census_json(const bfs_process* p, size_t num_largest, char** out) {
  return Guard([&] {
    Need(p, "process");
    Need(out, "out");
    *out = Dup(p->state.Census(num_largest).ToJson(p->state.seed(), p->state.rule()).dump());
  });
}

bfs_status bfs_trajectory_solve(double t_max, double dt, int er_mode, bfs_trajectory** out) {
  return Guard([&] {
    Need(out, "out");
    *out = new bfs_trajectory{bfsim::Trajectory::Solve(
        t_max, dt, er_mode ? bfsim::TrajectoryMode::kEr : bfsim::TrajectoryMode::kBohmanFrieze)};
  });
}

void bfs_trajectory_free(bfs_trajectory* traj) { delete traj; }

bfs_status bfs_trajectory_rho1(const bfs_trajectory* traj, double t, double* out) {
  return Guard([&] {
    Need(traj, "trajectory");
    Need(out, "out");
    *out = traj->traj.Rho1At(t);
  });
}

bfs_status bfs_trajectory_integrals(const bfs_trajectory* traj, double t, double* a,
                                    double* b) {
  return Guard([&] {
    Need(traj, "trajectory");
    const auto in = traj->traj.IntegralsAt(t);
    if (a != nullptr) *a = in.A;
    if (b != nullptr) *b = in.B;
  });
}

bfs_status bfs_trajectory_csv(const bfs_trajectory* traj, size_t stride, char** out) {
  return Guard([&] {
    Need(traj, "trajectory");
    Need(out, "out");
    std::ostringstream os;
    traj->traj.WriteCsv(os, stride);
    *out = Dup(os.str());
  });
}

bfs_status bfs_mu_table_json(const bfs_trajectory* traj, const char* options, char** out) {
  return Guard([&] {
    Need(traj, "trajectory");
    Need(out, "out");
    const json j = Parse(options);
    bfsim::MuOptions mo;
    const std::string method = j.value("method", std::string("quad"));
    if (method == "quad") {
      mo.method = bfsim::MuMethod::kQuadrature;
    } else if (method == "mc") {
      mo.method = bfsim::MuMethod::kMonteCarlo;
    } else if (method == "closed_form_er") {
      mo.method = bfsim::MuMethod::kClosedFormEr;
    } else {
      bfsim::Fail(bfsim::ErrorCode::kInvalidInput, "unknown method '" + method + "'");
    }
    mo.samples = j.value("samples", mo.samples);
    mo.seed = j.value("seed", mo.seed);
    mo.quad.nodes = j.value("nodes", mo.quad.nodes);
    mo.quad.max_edges = j.value("max_edges", mo.quad.max_edges);
    const int k_max = j.value("k_max", 8);
    mo.k_max = std::max(mo.k_max, k_max);
    std::vector<double> ts = {0.5};
    if (j.contains("t")) {
      ts = j["t"].is_array() ? j["t"].get<std::vector<double>>()
                             : std::vector<double>{j["t"].get<double>()};
    }
    bfsim::TreeMeasure tm(traj->traj, mo);
    json rows = json::array();
    for (double t : ts) {
      for (int k = 1; k <= k_max; ++k) {
        const bfsim::MuEstimate mu = tm.MuK0(k, t);
        rows.push_back({{"k", k},
                        {"t", t},
                        {"mu", mu.value},
                        {"mu_se", mu.std_error},
                        {"rho", k * mu.value},
                        {"rho_se", k * mu.std_error},
                        {"method", bfsim::MuMethodName(mu.method)},
                        {"samples", mu.samples}});
      }
    }
    json cfg = {{"method", method}, {"k_max", k_max}, {"t", ts},
                {"samples", mo.samples}, {"seed", mo.seed}, {"nodes", mo.quad.nodes},
                {"max_edges", mo.quad.max_edges},
                {"mode", traj->traj.mode() == bfsim::TrajectoryMode::kEr ? "er" : "bf"},
                {"t_max", traj->traj.t_max()}, {"dt", traj->traj.dt()}};
    *out = Dup(json({{"schema", "bfsim.mu/1"}, {"config", cfg}, {"rows", rows}}).dump());
  });
}

bfs_status bfs_fit_json(const char* rho_table, double t, int k_min, int k_max, char** out) {
  return Guard([&] {
    Need(rho_table, "rho_table");
    Need(out, "out");
    const json j = json::parse(rho_table);
    bfsim::RhoTable table;
    for (const auto& [key, v] : j.items()) {
      const double value = v.is_array() ? v.at(0).get<double>() : v.get<double>();
      const double se = v.is_array() && v.size() > 1 ? v.at(1).get<double>() : 0.0;
      table[std::stoi(key)] = {value, se};
    }
    *out = Dup(bfsim::FitDeltaGamma(table, t, k_min, k_max).ToJson().dump());
  });
}

bfs_status bfs_critical_json(const char* config, bfs_progress_fn progress, void* user,
                             char** out) {
  return Guard([&] {
    Need(out, "out");
    const json j = Parse(config);
    static const std::set<std::string> kKeys = {
        "rule", "t_grid", "t_min", "t_max", "t_step", "n_ladder", "replicas", "seed",
        "xi_window", "bootstrap", "confidence", "threads", "fit_eps",
        "fit_pilot_replicas", "fit_n"};
    for (const auto& [key, _] : j.items()) {
      if (!kKeys.count(key)) {
        bfsim::Fail(bfsim::ErrorCode::kInvalidInput, "unknown critical config key '" + key + "'");
      }
    }
    bfsim::TcSweepConfig cfg;
    if (j.contains("rule")) cfg.rule = RuleFrom(j["rule"]);
    if (j.contains("t_grid")) {
      cfg.t_grid = j["t_grid"].get<std::vector<double>>();
    } else {
      const bool er = cfg.rule.mode == bfsim::RuleMode::kErAlwaysSecond;
      const double lo = j.value("t_min", er ? 0.42 : 0.50);
      const double hi = j.value("t_max", er ? 0.58 : 0.68);
      const double step = j.value("t_step", 0.004);
      bfsim::Require(step > 0.0 && hi > lo, bfsim::ErrorCode::kInvalidArgument,
                     "bad t grid bounds");
      for (int i = 0; lo + i * step <= hi + 1e-12; ++i) cfg.t_grid.push_back(lo + i * step);
    }
    cfg.n_ladder = j.value("n_ladder", std::vector<std::uint64_t>{10000, 100000, 1000000});
    cfg.replicas = j.value("replicas", cfg.replicas);
    cfg.seed = j.value("seed", cfg.seed);
    cfg.xi_window = j.value("xi_window", cfg.xi_window);
    cfg.bootstrap = j.value("bootstrap", cfg.bootstrap);
    cfg.confidence = j.value("confidence", cfg.confidence);
    cfg.threads = j.value("threads", cfg.threads);
    const auto log = Progress(progress, user);
    if (log) log("sweeping the susceptibility");
    bfsim::CriticalityReport rep = bfsim::EstimateTc(cfg);
    const auto eps_list = j.value("fit_eps", std::vector<double>{});
    const std::uint64_t fit_n = j.value("fit_n", cfg.n_ladder.back());
    const int pilots = j.value("fit_pilot_replicas", 40);
    if (!eps_list.empty()) {
      bfsim::Require(cfg.rule.mode != bfsim::RuleMode::kCustom,
                     bfsim::ErrorCode::kInvalidArgument,
                     "density fits need the bf or er integrand");
      const auto mode = cfg.rule.mode == bfsim::RuleMode::kErAlwaysSecond
                            ? bfsim::TrajectoryMode::kEr
                            : bfsim::TrajectoryMode::kBohmanFrieze;
      const bfsim::Trajectory traj = bfsim::Trajectory::Solve(2.5, 1e-4, mode);
      for (std::size_t i = 0; i < eps_list.size(); ++i) {
        if (log) log("fitting densities at tc " + std::to_string(eps_list[i]));
        rep.fits.push_back(bfsim::FitOffCritical(cfg.rule, rep.tc + eps_list[i], fit_n, pilots,
                                                 bfsim::Rng::DeriveSeed(cfg.seed, 1000 + i),
                                                 cfg.threads, traj)
                               .fit);
      }
    }
    json result = rep.ToJson();
    result["config"]["fit_eps"] = eps_list;
    result["config"]["threads"] = cfg.threads;
    result["config"]["fit_n"] = fit_n;
    result["config"]["fit_pilot_replicas"] = pilots;
    *out = Dup(result.dump());
  });
}

bfs_status bfs_simulate_json(const char* config, int ndjson, char** out) {
  return Guard([&] {
    Need(out, "out");
    const bfsim::ExperimentConfig cfg = bfsim::ExperimentConfig::FromJson(Parse(config));
    const bfsim::ReplicaResults r = bfsim::RunReplicas(cfg);
    if (ndjson) {
      std::ostringstream os;
      bfsim::WriteNdjson(r, os);
      *out = Dup(os.str());
      return;
    }
    json reps = json::array();
    for (std::size_t i = 0; i < r.replicas.size(); ++i) {
      json snaps = json::array();
      for (const auto& c : r.replicas[i].snapshots) {
        snaps.push_back(c.ToJson(r.replicas[i].seed, cfg.rule));
      }
      reps.push_back({{"replica", i}, {"seed", r.replicas[i].seed}, {"snapshots", snaps}});
    }
    *out = Dup(json({{"schema", "bfsim.simulate/1"}, {"config", cfg.ToJson()},
                     {"replicas", reps}})
                   .dump());
  });
}

bfs_status bfs_verify_json(const char* suites, const char* options, bfs_progress_fn progress,
                           void* user, int* passed, char** out) {
  return Guard([&] {
    Need(suites, "suites");
    Need(out, "out");
    bfsim::SuiteOptions opt;
    opt.Merge(Parse(options));
    opt.progress = Progress(progress, user);
    std::vector<std::string> names;
    std::stringstream ss(suites);
    for (std::string item; std::getline(ss, item, ',');) {
      if (item == "all") {
        const auto& all = bfsim::VerifyContext::SuiteNames();
        names.insert(names.end(), all.begin(), all.end());
      } else if (!item.empty()) {
        names.push_back(item);
      }
    }
    bfsim::Require(!names.empty(), bfsim::ErrorCode::kInvalidArgument, "no suite named");
    const auto& known = bfsim::VerifyContext::SuiteNames();
    for (const auto& n : names) {
      bfsim::Require(std::find(known.begin(), known.end(), n) != known.end(),
                     bfsim::ErrorCode::kInvalidArgument, "unknown suite '" + n + "'");
    }
    bfsim::VerifyContext ctx(opt);
    json reports = json::array();
    bool ok = true;
    for (const auto& n : names) {
      if (opt.progress) opt.progress("suite " + n);
      const bfsim::SuiteReport rep = ctx.Run(n);
      ok = ok && rep.passed;
      reports.push_back(rep.ToJson());
    }
    if (passed != nullptr) *passed = ok ? 1 : 0;
    *out = Dup(json({{"schema", "bfsim.verify/1"}, {"passed", ok}, {"options", opt.ToJson()},
                     {"suites", reports}})
                   .dump());
  });
}

bfs_status bfs_verify_suite_names(char** out) {
  return Guard([&] {
    Need(out, "out");
    *out = Dup(json(bfsim::VerifyContext::SuiteNames()).dump());
  });
}

}  // extern "C"
