#include "irsopt/experiment.hpp"

#include <atomic>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <thread>

#include "irsopt/system_model.hpp"
#include "json.hpp"

namespace irsopt {

using nlohmann::json;

std::string_view to_string(SweepVariable var) {
  switch (var) {
    case SweepVariable::PmaxDbm: return "pmax_dbm";
    case SweepVariable::N: return "n";
    case SweepVariable::M: return "m";
  }
  return "?";
}

SweepVariable sweep_from_string(std::string_view name) {
  if (name == "pmax" || name == "pmax_dbm" || name == "Pmax") return SweepVariable::PmaxDbm;
  if (name == "n" || name == "N") return SweepVariable::N;
  if (name == "m" || name == "M") return SweepVariable::M;
  throw Error("unknown sweep variable '" + std::string(name) + "'");
}

SystemConfig ExperimentSpec::config_at(double v) const {
  int K = num_users, M = num_bs_antennas, N = num_irs_elements;
  double pmax = max_power_dbm;
  switch (sweep_var) {
    case SweepVariable::PmaxDbm: pmax = v; break;
    case SweepVariable::N: N = static_cast<int>(std::lround(v)); break;
    case SweepVariable::M: M = static_cast<int>(std::lround(v)); break;
  }
  SystemConfig c = SystemConfig::uniform(K, M, N, dbm_to_watt(pmax), std::exp2(min_rate_bps_hz) - 1.0);
  c.bandwidth = bandwidth_hz;
  c.noise_psd = dbm_to_watt(noise_psd_dbm_hz);
  c.circuit_power = circuit_power_w;
  c.amp_inefficiency = amp_inefficiency;
  return c;
}

void ExperimentSpec::validate() const {
  if (sweep_values.empty()) throw Error("experiment: sweep list is empty");
  if (trials < 1) throw Error("experiment: trials must be >= 1");
  if (modes.empty()) throw Error("experiment: no modes selected");
  if (min_rate_bps_hz < 0) throw Error("experiment: min rate must be >= 0");
  if (sweep_var != SweepVariable::PmaxDbm)
    for (double v : sweep_values)
      if (v < 1 || v != std::round(v)) throw Error("experiment: N/M sweep values must be positive integers");
  channel.validate();
  for (double v : sweep_values) config_at(v).validate();
  if (solver.max_outer_iters < 1 || !(solver.ee_rel_tol > 0) || solver.randomization_Q < 0)
    throw Error("experiment: solver settings must be positive");
}

ExperimentSpec ExperimentSpec::defaults(SweepVariable var) {
  ExperimentSpec s;
  s.sweep_var = var;
  if (var == SweepVariable::PmaxDbm)
    s.sweep_values = {0, 5, 10, 15, 20, 25, 30};
  else
    s.sweep_values = {2, 4, 6, 8};
  return s;
}

ExperimentSpec spec_from_json(const std::string& text) {
  ExperimentSpec s;
  try {
    const json j = json::parse(text);
    if (j.contains("system")) {
      const auto& y = j["system"];
      s.num_users = y.value("num_users", s.num_users);
      s.num_bs_antennas = y.value("num_bs_antennas", s.num_bs_antennas);
      s.num_irs_elements = y.value("num_irs_elements", s.num_irs_elements);
      s.bandwidth_hz = y.value("bandwidth_hz", s.bandwidth_hz);
      s.noise_psd_dbm_hz = y.value("noise_psd_dbm_hz", s.noise_psd_dbm_hz);
      s.circuit_power_w = y.value("circuit_power_w", s.circuit_power_w);
      s.amp_inefficiency = y.value("amp_inefficiency", s.amp_inefficiency);
      s.max_power_dbm = y.value("max_power_dbm", s.max_power_dbm);
      s.min_rate_bps_hz = y.value("min_rate_bps_hz", s.min_rate_bps_hz);
    }
    if (j.contains("channel")) {
      const auto& c = j["channel"];
      s.channel.rician_k_factor = c.value("rician_k_factor", s.channel.rician_k_factor);
      if (c.contains("pathloss_bs_irs")) {
        s.channel.pathloss_bs_irs.offset_db = c["pathloss_bs_irs"].value("offset_db", 30.0);
        s.channel.pathloss_bs_irs.slope = c["pathloss_bs_irs"].value("slope", 24.0);
      }
      if (c.contains("pathloss_irs_user")) {
        s.channel.pathloss_irs_user.offset_db = c["pathloss_irs_user"].value("offset_db", 30.0);
        s.channel.pathloss_irs_user.slope = c["pathloss_irs_user"].value("slope", 28.0);
      }
      if (c.contains("d_bs_irs_m")) {
        auto r = c["d_bs_irs_m"].get<std::vector<double>>();
        if (r.size() != 2) throw Error("channel.d_bs_irs_m must be [lo, hi]");
        s.channel.d_bs_irs_range = {r[0], r[1]};
      }
      if (c.contains("d_irs_user_m")) {
        auto r = c["d_irs_user_m"].get<std::vector<double>>();
        if (r.size() != 2) throw Error("channel.d_irs_user_m must be [lo, hi]");
        s.channel.d_irs_user_range = {r[0], r[1]};
      }
    }
    if (j.contains("sweep")) {
      s.sweep_var = sweep_from_string(j["sweep"].at("variable").get<std::string>());
      s.sweep_values = ExperimentSpec::defaults(s.sweep_var).sweep_values;
      if (j["sweep"].contains("values")) s.sweep_values = j["sweep"]["values"].get<std::vector<double>>();
    }
    s.trials = j.value("trials", s.trials);
    if (j.contains("modes")) {
      s.modes.clear();
      for (const auto& m : j["modes"]) s.modes.push_back(mode_from_string(m.get<std::string>()));
    }
    s.master_seed = j.value("seed", s.master_seed);
    s.output_path = j.value("output", s.output_path);
    s.threads = j.value("threads", s.threads);
    if (j.contains("solver")) {
      const auto& o = j["solver"];
      s.solver.max_outer_iters = o.value("max_outer_iters", s.solver.max_outer_iters);
      s.solver.ee_rel_tol = o.value("ee_rel_tol", s.solver.ee_rel_tol);
      s.solver.randomization_Q = o.value("randomization_trials", s.solver.randomization_Q);
    }
  } catch (const json::exception& e) {
    throw Error(std::string("experiment spec: ") + e.what());
  }
  s.validate();
  return s;
}

std::string spec_to_json(const ExperimentSpec& s) {
  json j;
  j["system"] = {{"num_users", s.num_users},
                 {"num_bs_antennas", s.num_bs_antennas},
                 {"num_irs_elements", s.num_irs_elements},
                 {"bandwidth_hz", s.bandwidth_hz},
                 {"noise_psd_dbm_hz", s.noise_psd_dbm_hz},
                 {"circuit_power_w", s.circuit_power_w},
                 {"amp_inefficiency", s.amp_inefficiency},
                 {"max_power_dbm", s.max_power_dbm},
                 {"min_rate_bps_hz", s.min_rate_bps_hz}};
  j["channel"] = {
      {"rician_k_factor", s.channel.rician_k_factor},
      {"pathloss_bs_irs", {{"offset_db", s.channel.pathloss_bs_irs.offset_db}, {"slope", s.channel.pathloss_bs_irs.slope}}},
      {"pathloss_irs_user",
       {{"offset_db", s.channel.pathloss_irs_user.offset_db}, {"slope", s.channel.pathloss_irs_user.slope}}},
      {"d_bs_irs_m", {s.channel.d_bs_irs_range.first, s.channel.d_bs_irs_range.second}},
      {"d_irs_user_m", {s.channel.d_irs_user_range.first, s.channel.d_irs_user_range.second}}};
  j["sweep"] = {{"variable", std::string(to_string(s.sweep_var))}, {"values", s.sweep_values}};
  j["trials"] = s.trials;
  auto modes = json::array();
  for (auto m : s.modes) modes.push_back(std::string(to_string(m)));
  j["modes"] = modes;
  j["seed"] = s.master_seed;
  j["output"] = s.output_path;
  j["threads"] = s.threads;
  j["solver"] = {{"max_outer_iters", s.solver.max_outer_iters},
                 {"ee_rel_tol", s.solver.ee_rel_tol},
                 {"randomization_trials", s.solver.randomization_Q}};
  return j.dump(2);
}

ExperimentSpec load_spec(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open spec file " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return spec_from_json(ss.str());
}

ResultTable run_experiment(const ExperimentSpec& spec) {
  spec.validate();
  const int V = static_cast<int>(spec.sweep_values.size());
  const int Mo = static_cast<int>(spec.modes.size());
  const int T = spec.trials;
  const std::size_t jobs = static_cast<std::size_t>(V) * Mo * T;
  std::vector<TrialRecord> records(jobs);
  const SplitRng master(spec.master_seed);

  auto run_job = [&](std::size_t idx) {
    const int t = static_cast<int>(idx % T);
    const int m = static_cast<int>((idx / T) % Mo);
    const int v = static_cast<int>(idx / (static_cast<std::size_t>(T) * Mo));
    const SystemConfig cfg = spec.config_at(spec.sweep_values[v]);
    const SplitRng trial_rng = master.child("trial", static_cast<std::uint64_t>(t));
    // Draws are keyed per entry, so every sweep value sees nested blocks of one realization.
    const ChannelSet ch = generate_realization(cfg, spec.channel, trial_rng.child("channel"));
    const SolutionState s = optimize(cfg, ch, spec.modes[m], spec.solver, trial_rng.child("solve"));
    records[idx] = {spec.sweep_values[v], spec.modes[m], t, s.feasible, s.ee, static_cast<int>(s.trace.size())};
  };

  int threads = spec.threads > 0 ? spec.threads : static_cast<int>(std::thread::hardware_concurrency());
  threads = std::max(1, std::min<int>(threads, static_cast<int>(jobs)));
  if (threads == 1) {
    for (std::size_t i = 0; i < jobs; ++i) run_job(i);
  } else {
    std::atomic<std::size_t> next{0};
    std::vector<std::exception_ptr> errors(threads);
    std::vector<std::thread> pool;
    for (int w = 0; w < threads; ++w)
      pool.emplace_back([&, w] {
        try {
          for (std::size_t i = next++; i < jobs; i = next++) run_job(i);
        } catch (...) {
          errors[w] = std::current_exception();
          next = jobs;
        }
      });
    for (auto& th : pool) th.join();
    for (auto& e : errors)
      if (e) std::rethrow_exception(e);
  }

  ResultTable table;
  table.trials = records;
  for (int v = 0; v < V; ++v)
    for (int m = 0; m < Mo; ++m) {
      ResultRow row;
      row.sweep_var = spec.sweep_var;
      row.sweep_value = spec.sweep_values[v];
      row.mode = spec.modes[m];
      row.n_trials = T;
      row.seed = spec.master_seed;
      double sum = 0.0;
      for (int t = 0; t < T; ++t) {
        const auto& r = records[(static_cast<std::size_t>(v) * Mo + m) * T + t];
        if (!r.feasible) continue;
        ++row.n_feasible;
        sum += r.ee;
      }
      row.mean_ee = row.n_feasible > 0 ? sum / row.n_feasible : std::nan("");
      double ss = 0.0;
      for (int t = 0; t < T; ++t) {
        const auto& r = records[(static_cast<std::size_t>(v) * Mo + m) * T + t];
        if (r.feasible) ss += (r.ee - row.mean_ee) * (r.ee - row.mean_ee);
      }
      row.std_ee = row.n_feasible > 1 ? std::sqrt(ss / (row.n_feasible - 1)) : 0.0;
      table.rows.push_back(row);
    }
  return table;
}

std::string to_csv(const ResultTable& table) {
  std::string out = "sweep_var,sweep_value,mode,mean_ee,std_ee,n_feasible,n_trials,seed\n";
  char buf[256];
  for (const auto& r : table.rows) {
    std::snprintf(buf, sizeof(buf), "%s,%.6g,%s,%.6g,%.6g,%d,%d,%llu\n", std::string(to_string(r.sweep_var)).c_str(),
                  r.sweep_value, std::string(to_string(r.mode)).c_str(), r.mean_ee, r.std_ee, r.n_feasible,
                  r.n_trials, static_cast<unsigned long long>(r.seed));
    out += buf;
  }
  return out;
}

void emit_csv(const ResultTable& table, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot open " + path + " for writing");
  out << to_csv(table);
  out.flush();
  if (!out) throw Error("failed writing " + path);
}

}  // namespace irsopt
