#include "irsopt/bcd.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <numbers>

#include "irsopt/active_beamforming.hpp"
#include "irsopt/system_model.hpp"

namespace irsopt {

std::string_view to_string(OptimizerMode mode) {
  switch (mode) {
    case OptimizerMode::Proposed: return "Proposed";
    case OptimizerMode::FixIRS: return "FixIRS";
    case OptimizerMode::FixBS: return "FixBS";
    case OptimizerMode::FixPA: return "FixPA";
    case OptimizerMode::FixAll: return "FixAll";
  }
  return "?";
}

OptimizerMode mode_from_string(std::string_view name) {
  std::string key;
  for (char c : name)
    if (c != '_' && c != ' ' && c != '-') key.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
  for (OptimizerMode m : kAllModes) {
    std::string ref;
    for (char c : to_string(m)) ref.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
    if (ref == key) return m;
  }
  if (key == "prop") return OptimizerMode::Proposed;
  throw Error("unknown optimizer mode '" + std::string(name) + "'");
}

bool updates_power(OptimizerMode m) {
  return m == OptimizerMode::Proposed || m == OptimizerMode::FixIRS || m == OptimizerMode::FixBS;
}
bool updates_beams(OptimizerMode m) {
  return m == OptimizerMode::Proposed || m == OptimizerMode::FixIRS || m == OptimizerMode::FixPA;
}
bool updates_phases(OptimizerMode m) {
  return m == OptimizerMode::Proposed || m == OptimizerMode::FixBS || m == OptimizerMode::FixPA;
}

SolutionState initialize(const SystemConfig& config, const ChannelSet& channels, OptimizerMode mode,
                         const SplitRng& rng) {
  config.validate();
  channels.validate(config);
  const int N = config.num_irs_elements;
  RVector theta(N);
  for (int j = 0; j < N; ++j) {
    auto eng = rng.child("init_phase", j).engine();
    theta(j) = std::uniform_real_distribution<double>(0.0, 2.0 * std::numbers::pi)(eng);
  }
  SolutionState s;
  s.phases = PhaseVector::from_angles(theta);
  s.power = {config.max_power};
  try {
    s.beams = mmse_receiver(config, channels, s.phases, s.power);
  } catch (const DegenerateChannel&) {
    s.beams = {CMatrix::Ones(config.num_bs_antennas, config.num_users)};
    evaluate(config, channels, s);
    s.feasible = false;
    s.trace = {s.ee};
    return s;
  }

  const GainTable gains = build_gain_table(config, channels, s.phases, s.beams);
  const bool full_power = mode == OptimizerMode::FixPA || mode == OptimizerMode::FixAll;
  bool ok = true;
  if (!(full_power && power_feasible(config.max_power, gains, config))) {
    try {
      s.power = qos_feasible_init(gains, config);
    } catch (const Infeasible&) {
      ok = false;
    }
  }
  evaluate(config, channels, s);
  s.feasible = ok && s.feasible;
  s.trace = {s.ee};
  return s;
}

SolutionState optimize_from(const SystemConfig& config, const ChannelSet& channels, OptimizerMode mode,
                            const BcdSettings& settings, SolutionState state, const SplitRng& rng) {
  if (!state.feasible || mode == OptimizerMode::FixAll) return state;

  // Keeps a block update only when the EE does not drop and QoS still holds.
  auto accept = [&](SolutionState candidate) {
    evaluate(config, channels, candidate);
    if (candidate.feasible && candidate.ee >= state.ee) {
      candidate.trace = std::move(state.trace);
      state = std::move(candidate);
    }
    state.trace.push_back(state.ee);
  };

  for (int it = 0; it < settings.max_outer_iters; ++it) {
    const double ee_start = state.ee;
    if (updates_power(mode)) {
      SolutionState c = state;
      try {
        const GainTable gains = build_gain_table(config, channels, c.phases, c.beams);
        c.power = power_control_step(gains, config, c.power, settings.power, settings.full_power_restart).power;
      } catch (const Error&) {
        c = state;
      }
      accept(std::move(c));
    }
    if (updates_beams(mode)) {
      SolutionState c = state;
      c.beams = mmse_receiver(config, channels, c.phases, c.power);
      accept(std::move(c));
    }
    if (updates_phases(mode)) {
      SolutionState c = state;
      c.phases = optimize_phases(config, channels, c.beams, c.power, c.phases, settings.randomization_Q,
                                 rng.child("phase_step", static_cast<std::uint64_t>(it)), settings.passive);
      accept(std::move(c));
    }
    if (std::abs(state.ee - ee_start) <= settings.ee_rel_tol * std::abs(ee_start)) break;
  }
  return state;
}

SolutionState optimize(const SystemConfig& config, const ChannelSet& channels, OptimizerMode mode,
                       const BcdSettings& settings, const SplitRng& rng) {
  return optimize_from(config, channels, mode, settings, initialize(config, channels, mode, rng), rng.child("bcd"));
}

}  // namespace irsopt
