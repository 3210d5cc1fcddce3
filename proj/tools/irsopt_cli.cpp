// Command-line front end: Monte-Carlo sweeps and channel fixtures.
#include <cstdio>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "irsopt/channel.hpp"
#include "irsopt/experiment.hpp"

namespace {

std::vector<irsopt::OptimizerMode> parse_modes(const std::string& list) {
  std::vector<irsopt::OptimizerMode> modes;
  std::stringstream ss(list);
  std::string item;
  while (std::getline(ss, item, ','))
    if (!item.empty()) modes.push_back(irsopt::mode_from_string(item));
  return modes;
}

void print_table(const irsopt::ResultTable& table) {
  std::printf("%-10s %-9s %14s %14s %6s\n", "sweep", "mode", "mean EE [b/J]", "std", "feas");
  for (const auto& r : table.rows)
    std::printf("%-10g %-9s %14.6g %14.6g %3d/%-3d\n", r.sweep_value, std::string(irsopt::to_string(r.mode)).c_str(),
                r.mean_ee, r.std_ee, r.n_feasible, r.n_trials);
}

int run_and_write(const irsopt::ExperimentSpec& spec, bool quiet) {
  const auto table = irsopt::run_experiment(spec);
  irsopt::emit_csv(table, spec.output_path);
  if (!quiet) print_table(table);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Energy-efficient resource allocation for IRS-assisted multi-antenna uplinks"};
  app.require_subcommand(1);

  // run <spec-file>
  auto* run = app.add_subcommand("run", "Run an experiment described by a JSON spec file");
  std::string spec_path, run_out;
  int run_threads = -1;
  bool quiet = false;
  run->add_option("spec", spec_path, "Experiment spec (JSON)")->required()->check(CLI::ExistingFile);
  run->add_option("--out", run_out, "Override the CSV output path");
  run->add_option("--threads", run_threads, "Worker threads (0 = all cores)");
  run->add_flag("-q,--quiet", quiet, "Do not print the summary table");

  // sweep --var {pmax|n|m}
  auto* sweep = app.add_subcommand("sweep", "Run a default sweep with the standard scenario");
  std::string var = "pmax", modes_list, sweep_out = "results.csv", values_list;
  int trials = 100, sweep_threads = 0;
  double min_rate = irsopt::ExperimentSpec{}.min_rate_bps_hz;
  std::uint64_t seed = 1;
  sweep->add_option("--var", var, "Sweep variable")->check(CLI::IsMember({"pmax", "n", "m"}));
  sweep->add_option("--values", values_list, "Comma-separated sweep values (default per variable)");
  sweep->add_option("--trials", trials, "Trials per sweep point")->check(CLI::PositiveNumber);
  sweep->add_option("--seed", seed, "Master seed");
  sweep->add_option("--min-rate", min_rate, "Per-user rate floor in bit/s/Hz (0 disables QoS)")
      ->check(CLI::NonNegativeNumber);
  sweep->add_option("--modes", modes_list, "Comma-separated modes (Proposed,FixIRS,FixBS,FixPA,FixAll)");
  sweep->add_option("--out", sweep_out, "CSV output path");
  sweep->add_option("--threads", sweep_threads, "Worker threads (0 = all cores)");
  sweep->add_flag("-q,--quiet", quiet, "Do not print the summary table");

  // spec --var: print a default spec file
  auto* spec_cmd = app.add_subcommand("spec", "Print a default experiment spec as JSON");
  std::string spec_var = "pmax";
  spec_cmd->add_option("--var", spec_var, "Sweep variable")->check(CLI::IsMember({"pmax", "n", "m"}));

  // channel: export one realization as a fixture
  auto* channel = app.add_subcommand("channel", "Export one channel realization as a JSON fixture");
  int users = 3, antennas = 4, elements = 4;
  std::uint64_t ch_seed = 1, ch_trial = 0;
  std::string ch_out;
  channel->add_option("--users", users)->check(CLI::PositiveNumber);
  channel->add_option("--antennas", antennas)->check(CLI::PositiveNumber);
  channel->add_option("--elements", elements)->check(CLI::PositiveNumber);
  channel->add_option("--seed", ch_seed, "Master seed");
  channel->add_option("--trial", ch_trial, "Trial index within the master seed");
  channel->add_option("--out", ch_out, "Output path (stdout when omitted)");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*run) {
      auto spec = irsopt::load_spec(spec_path);
      if (!run_out.empty()) spec.output_path = run_out;
      if (run_threads >= 0) spec.threads = run_threads;
      return run_and_write(spec, quiet);
    }
    if (*sweep) {
      auto spec = irsopt::ExperimentSpec::defaults(irsopt::sweep_from_string(var));
      if (!values_list.empty()) {
        spec.sweep_values.clear();
        std::stringstream ss(values_list);
        std::string item;
        while (std::getline(ss, item, ','))
          if (!item.empty()) spec.sweep_values.push_back(std::stod(item));
      }
      spec.trials = trials;
      spec.master_seed = seed;
      spec.min_rate_bps_hz = min_rate;
      if (!modes_list.empty()) spec.modes = parse_modes(modes_list);
      spec.output_path = sweep_out;
      spec.threads = sweep_threads;
      return run_and_write(spec, quiet);
    }
    if (*spec_cmd) {
      std::cout << irsopt::spec_to_json(irsopt::ExperimentSpec::defaults(irsopt::sweep_from_string(spec_var))) << '\n';
      return 0;
    }
    if (*channel) {
      irsopt::ExperimentSpec defaults;
      defaults.num_users = users;
      defaults.num_bs_antennas = antennas;
      defaults.num_irs_elements = elements;
      const auto cfg = defaults.config_at(defaults.max_power_dbm);
      const auto rng = irsopt::SplitRng(ch_seed).child("trial", ch_trial).child("channel");
      const auto ch = irsopt::generate_realization(cfg, defaults.channel, rng);
      if (ch_out.empty())
        std::cout << irsopt::channel_to_json(ch) << '\n';
      else
        irsopt::save_channel(ch, ch_out);
      return 0;
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
