#ifndef IRSOPT_BCD_HPP_
#define IRSOPT_BCD_HPP_

#include <array>
#include <string>
#include <string_view>

#include "irsopt/passive_beamforming.hpp"
#include "irsopt/power_control.hpp"
#include "irsopt/rng.hpp"
#include "irsopt/types.hpp"

namespace irsopt {

/// Which blocks the alternating loop updates.
///   Proposed: power, receive filters, phases
///   FixIRS:   power, receive filters
///   FixBS:    power, phases
///   FixPA:    receive filters, phases
///   FixAll:   nothing (random phases, MMSE at Pmax, P = Pmax)
enum class OptimizerMode { Proposed, FixIRS, FixBS, FixPA, FixAll };

inline constexpr std::array<OptimizerMode, 5> kAllModes = {OptimizerMode::Proposed, OptimizerMode::FixIRS,
                                                           OptimizerMode::FixBS, OptimizerMode::FixPA,
                                                           OptimizerMode::FixAll};

std::string_view to_string(OptimizerMode mode);
/// Accepts "Proposed", "FixIRS", "FixBS", "FixPA", "FixAll" (case-insensitive, '_' and ' ' ignored).
OptimizerMode mode_from_string(std::string_view name);

bool updates_power(OptimizerMode mode);
bool updates_beams(OptimizerMode mode);
bool updates_phases(OptimizerMode mode);

struct BcdSettings {
  int max_outer_iters = 20;
  double ee_rel_tol = 1e-4;
  int randomization_Q = 50;
  bool full_power_restart = true;  // see power_control_step
  PowerControlOptions power;
  PassiveOptions passive;
};

/// Random phases, MMSE filters at full power, and the minimum-power QoS allocation
/// (full power, clipped to the QoS allocation, for FixPA and FixAll).
/// Infeasibility is reported through `feasible`, never thrown.
SolutionState initialize(const SystemConfig& config, const ChannelSet& channels, OptimizerMode mode,
                         const SplitRng& rng);

/// Alternating updates until the relative EE change of one pass drops below ee_rel_tol.
/// Every block update is kept only if it does not lower the EE, so `trace` is non-decreasing.
SolutionState optimize(const SystemConfig& config, const ChannelSet& channels, OptimizerMode mode,
                       const BcdSettings& settings, const SplitRng& rng);

/// Same loop, continuing from an existing feasible state.
SolutionState optimize_from(const SystemConfig& config, const ChannelSet& channels, OptimizerMode mode,
                            const BcdSettings& settings, SolutionState state, const SplitRng& rng);

}  // namespace irsopt

#endif  // IRSOPT_BCD_HPP_
