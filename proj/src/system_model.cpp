#include "irsopt/system_model.hpp"

#include <cmath>

namespace irsopt {

void SystemConfig::validate() const {
  if (num_users < 1 || num_bs_antennas < 1 || num_irs_elements < 1) throw Error("SystemConfig: K, M, N must be >= 1");
  if (!(bandwidth > 0) || !(noise_psd > 0) || !(circuit_power > 0)) throw Error("SystemConfig: B, N0, Pc must be > 0");
  if (!(amp_inefficiency > 0)) throw Error("SystemConfig: psi must be > 0");
  if (max_power.size() != num_users || min_sinr.size() != num_users)
    throw DimensionMismatch("SystemConfig: per-user vectors must have K entries");
  if ((max_power.array() <= 0).any()) throw Error("SystemConfig: max power must be > 0");
  if ((min_sinr.array() < 0).any()) throw Error("SystemConfig: min SINR must be >= 0");
}

SystemConfig SystemConfig::uniform(int K, int M, int N, double pmax_watt, double gamma_min) {
  SystemConfig c;
  c.num_users = K;
  c.num_bs_antennas = M;
  c.num_irs_elements = N;
  c.max_power = RVector::Constant(K, pmax_watt);
  c.min_sinr = RVector::Constant(K, gamma_min);
  return c;
}

void ChannelSet::validate(const SystemConfig& config) const {
  if (G.rows() != config.num_bs_antennas || G.cols() != config.num_irs_elements)
    throw DimensionMismatch("ChannelSet: G must be M x N");
  if (static_cast<int>(h.size()) != config.num_users) throw DimensionMismatch("ChannelSet: need K user channels");
  if (!G.allFinite()) throw Error("ChannelSet: non-finite entry in G");
  for (const auto& hk : h) {
    if (hk.size() != config.num_irs_elements) throw DimensionMismatch("ChannelSet: h_k must have N entries");
    if (!hk.allFinite()) throw Error("ChannelSet: non-finite entry in h");
  }
}

bool PhaseVector::unit_modulus(double tol) const {
  for (Eigen::Index j = 0; j < w.size(); ++j)
    if (std::abs(std::abs(w(j)) - 1.0) > tol) return false;
  return true;
}

PhaseVector PhaseVector::from_angles(const RVector& theta) {
  PhaseVector p;
  p.w.resize(theta.size());
  for (Eigen::Index j = 0; j < theta.size(); ++j) p.w(j) = std::polar(1.0, theta(j));
  return p;
}

RVector compute_sinr(const SystemConfig& config, const ChannelSet& channels, const PhaseVector& phases,
                     const PowerAllocation& power, const BeamformerSet& beams) {
  const int K = channels.num_users();
  if (power.P.size() != K || beams.V.cols() != K || beams.V.rows() != channels.num_bs_antennas())
    throw DimensionMismatch("compute_sinr: dimension mismatch");

  std::vector<CVector> hbar(K);
  for (int i = 0; i < K; ++i) hbar[i] = effective_channel(channels, phases, i);

  RVector sinr(K);
  for (int k = 0; k < K; ++k) {
    const auto v = beams.V.col(k);
    if (v.squaredNorm() == 0.0) throw Error("compute_sinr: zero beamformer column");
    double interference = noise_power(config, v);
    double signal = 0.0;
    for (int i = 0; i < K; ++i) {
      const double g = std::norm(v.dot(hbar[i]));  // dot() conjugates v
      if (i == k)
        signal = g * power.P(k);
      else
        interference += g * power.P(i);
    }
    sinr(k) = signal / interference;
  }
  return sinr;
}

bool qos_satisfied(const SystemConfig& config, const RVector& sinr) {
  for (Eigen::Index k = 0; k < sinr.size(); ++k)
    if (sinr(k) < config.min_sinr(k) * (1.0 - kQosRelTol)) return false;
  return true;
}

void evaluate(const SystemConfig& config, const ChannelSet& channels, SolutionState& state) {
  state.sinr = compute_sinr(config, channels, state.phases, state.power, state.beams);
  state.rate.resize(state.sinr.size());
  for (Eigen::Index k = 0; k < state.sinr.size(); ++k)
    state.rate(k) = config.bandwidth * std::log2(1.0 + state.sinr(k));
  state.ee = compute_ee(config, state.sinr, state.power.P);
  state.feasible = qos_satisfied(config, state.sinr);
}

}  // namespace irsopt
