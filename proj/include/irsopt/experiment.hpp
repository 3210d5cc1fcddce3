#ifndef IRSOPT_EXPERIMENT_HPP_
#define IRSOPT_EXPERIMENT_HPP_

#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "irsopt/bcd.hpp"
#include "irsopt/channel.hpp"
#include "irsopt/types.hpp"

namespace irsopt {

enum class SweepVariable { PmaxDbm, N, M };

std::string_view to_string(SweepVariable var);
/// "pmax" / "pmax_dbm", "n", "m".
SweepVariable sweep_from_string(std::string_view name);

inline double dbm_to_watt(double dbm) { return std::pow(10.0, (dbm - 30.0) / 10.0); }
inline double watt_to_dbm(double w) { return 10.0 * std::log10(w) + 30.0; }

struct ExperimentSpec {
  int num_users = 3;
  int num_bs_antennas = 4;
  int num_irs_elements = 4;
  double bandwidth_hz = 1e6;
  double noise_psd_dbm_hz = -174.0;
  double circuit_power_w = 0.05;
  double amp_inefficiency = 0.35;
  double max_power_dbm = 20.0;
  double min_rate_bps_hz = 0.5;  // per user; min SINR = 2^rate - 1

  ChannelParams channel;
  SweepVariable sweep_var = SweepVariable::PmaxDbm;
  std::vector<double> sweep_values{0, 5, 10, 15, 20, 25, 30};
  int trials = 100;
  std::vector<OptimizerMode> modes{kAllModes.begin(), kAllModes.end()};
  std::uint64_t master_seed = 1;
  std::string output_path = "results.csv";
  int threads = 0;  // 0: hardware concurrency
  BcdSettings solver;

  /// Scenario at one sweep point.
  SystemConfig config_at(double sweep_value) const;
  void validate() const;

  static ExperimentSpec defaults(SweepVariable var);
};

ExperimentSpec spec_from_json(const std::string& text);
std::string spec_to_json(const ExperimentSpec& spec);
ExperimentSpec load_spec(const std::string& path);

struct ResultRow {
  SweepVariable sweep_var = SweepVariable::PmaxDbm;
  double sweep_value = 0.0;
  OptimizerMode mode = OptimizerMode::Proposed;
  double mean_ee = 0.0;  // over feasible trials, bit/J
  double std_ee = 0.0;
  int n_feasible = 0;
  int n_trials = 0;
  std::uint64_t seed = 0;
};

struct TrialRecord {
  double sweep_value = 0.0;
  OptimizerMode mode = OptimizerMode::Proposed;
  int trial = 0;
  bool feasible = false;
  double ee = 0.0;
  int trace_length = 0;
};

struct ResultTable {
  std::vector<ResultRow> rows;       // sweep-major, then mode in spec order
  std::vector<TrialRecord> trials;   // sweep-major, then mode, then trial index
};

/// Runs every (sweep value, mode, trial) job. Trial t uses the same channel draw and the
/// same initial phases for every mode and sweep value; jobs run on a thread pool and are
/// reduced in index order, so the table does not depend on the schedule.
ResultTable run_experiment(const ExperimentSpec& spec);

/// Header: sweep_var,sweep_value,mode,mean_ee,std_ee,n_feasible,n_trials,seed. Six significant digits.
std::string to_csv(const ResultTable& table);
void emit_csv(const ResultTable& table, const std::string& path);

}  // namespace irsopt

#endif  // IRSOPT_EXPERIMENT_HPP_
