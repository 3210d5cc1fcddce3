#ifndef IRSOPT_PASSIVE_BEAMFORMING_HPP_
#define IRSOPT_PASSIVE_BEAMFORMING_HPP_

#include <utility>
#include <vector>

#include "irsopt/rng.hpp"
#include "irsopt/types.hpp"

namespace irsopt {

/// Lifted form of the phase subproblem for fixed powers and receive filters:
/// H[k][i] = P_i hhat_{k,i} hhat_{k,i}^H with hhat_{k,i} = (v_k^H G) o h_i, so that
/// Tr(W H[k][i]) = P_i |w^H hhat_{k,i}|^2 when W = w w^H.
struct LiftedProblem {
  std::vector<std::vector<CMatrix>> H;
  RVector sigma2;  // post-filter noise power per user
  RVector gamma_min;

  int order() const { return H.empty() ? 0 : static_cast<int>(H.front().front().rows()); }
  int num_users() const { return static_cast<int>(H.size()); }
};

struct LiftedIterate {
  CMatrix W;
  CVector wbar;
};

struct PassiveOptions {
  int max_dc = 30;
  double dc_rel_tol = 1e-6;
  double sdp_tol = 1e-9;
  int randomization_trials = 50;
  double clip_tol = 1e-10;
};

LiftedProblem build_lifted(const SystemConfig& config, const ChannelSet& channels, const BeamformerSet& beams,
                           const PowerAllocation& power);

/// f3(W) = sum_k log2(Tr(W sum_i H_ki) + s_k), f4(W) = sum_k log2(Tr(W sum_{i!=k} H_ki) + s_k).
std::pair<double, double> eval_f3_f4(const CMatrix& W, const LiftedProblem& lifted);

/// Partial derivatives of f4 w.r.t. Re W(n, j) and Im W(n, j) for n > j (other entries zero).
/// Each derivative moves W(n, j) and its Hermitian mirror W(j, n) together.
std::pair<RMatrix, RMatrix> partials_f4(const CMatrix& W, const LiftedProblem& lifted);

/// sum_k log2(1 + sinr_k) for the rank-one point w (w_j = conj(phi_j)).
double lifted_sum_rate(const LiftedProblem& lifted, const CVector& w);
bool lifted_qos(const LiftedProblem& lifted, const CVector& w);

/// DC ascent on f3 - f4 over the relaxed set {diag W = 1, W >= 0, [[W, wbar], [wbar^H, 1]] >= 0, QoS}.
/// Every step maximizes f3 minus the linearization of f4 at the previous W. Throws Infeasible
/// when (W0, wbar0) violates the QoS traces or the relaxed set has no interior.
LiftedIterate dc_sdp_iterate(const LiftedProblem& lifted, const CMatrix& W0, const CVector& wbar0,
                             const PassiveOptions& options = {}, std::vector<double>* value_trace = nullptr);

/// Draws Q candidates from CN(wbar, W - wbar wbar^H), maps each entry to unit modulus and
/// returns the QoS-feasible candidate with the highest sum rate. Throws NoFeasibleCandidate.
PhaseVector gaussian_randomization(const LiftedProblem& lifted, const LiftedIterate& iterate, int Q,
                                   const SplitRng& rng, double clip_tol = 1e-10);

/// Full phase step. Returns the randomized candidate only when it keeps QoS and does not
/// lower the energy efficiency of `incumbent`; otherwise returns `incumbent`.
PhaseVector optimize_phases(const SystemConfig& config, const ChannelSet& channels, const BeamformerSet& beams,
                            const PowerAllocation& power, const PhaseVector& incumbent, int Q, const SplitRng& rng,
                            const PassiveOptions& options = {});

}  // namespace irsopt

#endif  // IRSOPT_PASSIVE_BEAMFORMING_HPP_
