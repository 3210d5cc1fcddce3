#ifndef IRSOPT_POWER_CONTROL_HPP_
#define IRSOPT_POWER_CONTROL_HPP_

#include <utility>
#include <vector>

#include "irsopt/types.hpp"

namespace irsopt {

/// g(k, i) = |v_k^H G Phi h_i|^2 / (N0 B |v_k|^2): gain of user i into filter k,
/// normalized by the post-filter noise power.
struct GainTable {
  RMatrix g;

  int num_users() const { return static_cast<int>(g.rows()); }
};

struct PowerControlOptions {
  int max_inner = 50;
  double inner_rel_tol = 1e-8;
  int max_outer = 30;
  double outer_tol = 1e-6;
  double kernel_tol = 1e-10;
};

GainTable build_gain_table(const SystemConfig& config, const ChannelSet& channels, const PhaseVector& phases,
                           const BeamformerSet& beams);

/// SINR of every user implied by a gain table.
RVector sinr_from_gains(const RVector& P, const GainTable& gains);

/// P satisfies P_k g_kk >= gamma_k (sum_{i!=k} P_i g_ki + 1) within kQosRelTol, and 0 <= P <= Pmax.
bool power_feasible(const RVector& P, const GainTable& gains, const SystemConfig& config);

/// (f1, f2) of the subtractive objective, f1 - f2 = sum log2(1 + sinr) - lambda (psi sum P + Pc).
std::pair<double, double> eval_f1_f2(const RVector& P, const GainTable& gains, double lambda,
                                     const SystemConfig& config);

/// Gradient of f2(P) = sum_k log2(sum_{i!=k} P_i g_ki + 1).
RVector grad_f2(const RVector& P, const GainTable& gains);

/// Minimum total power meeting every QoS constraint within the caps. Throws Infeasible.
PowerAllocation qos_feasible_init(const GainTable& gains, const SystemConfig& config);

/// Successive linearization of f2 for a fixed Dinkelbach parameter, warm-started at P0.
/// `objective_trace` (optional) receives f1 - f2 at P0 and after every accepted iterate.
PowerAllocation dc_inner_solve(const GainTable& gains, double lambda, const SystemConfig& config,
                               const PowerAllocation& P0, const PowerControlOptions& options = {},
                               std::vector<double>* objective_trace = nullptr);

struct DinkelbachResult {
  PowerAllocation power;
  double lambda = 0.0;  // (bit/s/Hz)/W at the returned power
  std::vector<double> lambdas;  // lambda^(l), l = 0, 1, ...
  std::vector<double> epsilons;  // epsilon^(l), l = 1, 2, ...
  int iterations = 0;
};

/// Maximizes sum log2(1 + sinr) / (psi sum P + Pc) over feasible P. Throws Infeasible
/// when P_init violates the constraints.
DinkelbachResult dinkelbach_solve(const GainTable& gains, const SystemConfig& config, const PowerAllocation& P_init,
                                  const PowerControlOptions& options = {});

/// Power block of the alternating loop: Dinkelbach from `incumbent`, plus a second run from
/// P = Pmax when `full_power_restart` is set and full power meets QoS. Returns the better one.
/// Starting only from a low-power point tends to stall at allocations that silence a user.
DinkelbachResult power_control_step(const GainTable& gains, const SystemConfig& config,
                                    const PowerAllocation& incumbent, const PowerControlOptions& options = {},
                                    bool full_power_restart = true);

}  // namespace irsopt

#endif  // IRSOPT_POWER_CONTROL_HPP_
