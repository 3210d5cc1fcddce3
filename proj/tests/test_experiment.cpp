#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "irsopt/experiment.hpp"

using namespace irsopt;

namespace {

ExperimentSpec small_spec() {
  ExperimentSpec s = ExperimentSpec::defaults(SweepVariable::PmaxDbm);
  s.num_users = 2;
  s.num_bs_antennas = 2;
  s.num_irs_elements = 3;
  s.min_rate_bps_hz = 0.0;
  s.sweep_values = {10, 20};
  s.trials = 3;
  s.modes = {OptimizerMode::Proposed, OptimizerMode::FixAll};
  s.solver.randomization_Q = 5;
  s.solver.max_outer_iters = 4;
  s.threads = 1;
  return s;
}

std::vector<std::string> lines(const std::string& text) {
  std::vector<std::string> out;
  std::stringstream ss(text);
  for (std::string l; std::getline(ss, l);) out.push_back(l);
  return out;
}

}  // namespace

TEST(Units, DbmConversions) {
  EXPECT_DOUBLE_EQ(dbm_to_watt(30.0), 1.0);
  EXPECT_NEAR(dbm_to_watt(20.0), 0.1, 1e-15);
  EXPECT_NEAR(dbm_to_watt(-174.0), 3.981071705534972e-21, 1e-33);
  EXPECT_NEAR(watt_to_dbm(dbm_to_watt(17.3)), 17.3, 1e-12);
}

TEST(Spec, ConfigAtAppliesSweepValue) {
  ExperimentSpec s = ExperimentSpec::defaults(SweepVariable::N);
  EXPECT_EQ(s.config_at(8).num_irs_elements, 8);
  EXPECT_NEAR(s.config_at(8).max_power(0), 0.1, 1e-15);
  EXPECT_NEAR(s.config_at(8).min_sinr(0), std::sqrt(2.0) - 1.0, 1e-15);
  s.sweep_var = SweepVariable::M;
  EXPECT_EQ(s.config_at(6).num_bs_antennas, 6);
  s.sweep_values = {2.5};
  EXPECT_THROW(s.validate(), Error);
  EXPECT_THROW(sweep_from_string("q"), Error);
}

TEST(Spec, JsonRoundTrip) {
  ExperimentSpec s = small_spec();
  s.channel.rician_k_factor = 3.0;
  s.master_seed = 99;
  s.sweep_var = SweepVariable::M;
  s.sweep_values = {2, 4};
  const ExperimentSpec r = spec_from_json(spec_to_json(s));
  EXPECT_EQ(spec_to_json(r), spec_to_json(s));
  EXPECT_EQ(r.modes, s.modes);
  EXPECT_EQ(r.master_seed, 99u);
  EXPECT_EQ(r.sweep_var, SweepVariable::M);
  EXPECT_THROW(spec_from_json("{\"modes\": [\"Nope\"]}"), Error);
  EXPECT_THROW(spec_from_json("{"), Error);
  EXPECT_THROW(load_spec("/nonexistent/spec.json"), Error);
}

TEST(Experiment, SingleTrialMatchesDirectSolve) {
  ExperimentSpec s = small_spec();
  s.trials = 1;
  s.sweep_values = {20};
  s.modes = {OptimizerMode::FixAll, OptimizerMode::Proposed};
  const ResultTable table = run_experiment(s);
  const SystemConfig cfg = s.config_at(20);
  const SplitRng rng = SplitRng(s.master_seed).child("trial", 0);
  const ChannelSet ch = generate_realization(cfg, s.channel, rng.child("channel"));
  for (std::size_t m = 0; m < 2; ++m) {
    const SolutionState direct = optimize(cfg, ch, s.modes[m], s.solver, rng.child("solve"));
    EXPECT_EQ(table.rows[m].mean_ee, direct.ee);
    EXPECT_EQ(table.rows[m].std_ee, 0.0);
    EXPECT_EQ(table.rows[m].n_feasible, 1);
  }
}

TEST(Experiment, ScheduleDoesNotChangeResults) {
  ExperimentSpec s = small_spec();
  const std::string one = to_csv(run_experiment(s));
  s.threads = 3;
  EXPECT_EQ(to_csv(run_experiment(s)), one);
}

TEST(Experiment, AggregatesMatchTrialRecords) {
  const ExperimentSpec s = small_spec();
  const ResultTable table = run_experiment(s);
  ASSERT_EQ(table.rows.size(), 4u);
  ASSERT_EQ(table.trials.size(), 12u);
  for (std::size_t r = 0; r < 4; ++r) {
    double sum = 0.0, sq = 0.0;
    for (int t = 0; t < 3; ++t) sum += table.trials[r * 3 + t].ee;
    const double mean = sum / 3;
    for (int t = 0; t < 3; ++t) sq += std::pow(table.trials[r * 3 + t].ee - mean, 2);
    EXPECT_NEAR(table.rows[r].mean_ee, mean, 1e-9 * mean);
    EXPECT_NEAR(table.rows[r].std_ee, std::sqrt(sq / 2), 1e-9 * mean);
    EXPECT_EQ(table.rows[r].n_feasible, 3);
    EXPECT_EQ(table.rows[r].mode, s.modes[r % 2]);
  }
}

TEST(Csv, HeaderRowsAndValues) {
  EXPECT_EQ(to_csv({}), "sweep_var,sweep_value,mode,mean_ee,std_ee,n_feasible,n_trials,seed\n");
  ResultTable t;
  t.rows.push_back({SweepVariable::PmaxDbm, 15.0, OptimizerMode::FixBS, 12345678.9, 0.5, 7, 10, 42});
  t.rows.push_back({SweepVariable::N, 8.0, OptimizerMode::Proposed, std::nan(""), 0.0, 0, 10, 42});
  const auto l = lines(to_csv(t));
  ASSERT_EQ(l.size(), 3u);
  EXPECT_EQ(l[1], "pmax_dbm,15,FixBS,1.23457e+07,0.5,7,10,42");
  EXPECT_EQ(l[2], "n,8,Proposed,nan,0,0,10,42");

  const auto path = std::filesystem::temp_directory_path() / "irsopt_csv_test.csv";
  emit_csv(t, path.string());
  std::ifstream in(path);
  std::stringstream ss;
  ss << in.rdbuf();
  EXPECT_EQ(ss.str(), to_csv(t));
  std::filesystem::remove(path);
  EXPECT_THROW(emit_csv(t, "/nonexistent/dir/out.csv"), Error);
}
