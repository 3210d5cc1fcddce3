#include "irsopt/active_beamforming.hpp"

#include <vector>

#include "irsopt/system_model.hpp"

namespace irsopt {

namespace {

// Interference-plus-noise covariance of user k, normalized by N0 B, factorized.
struct UserSolve {
  std::vector<CVector> hbar;
  double sigma2;

  Eigen::LDLT<CMatrix> covariance(const PowerAllocation& power, int k) const {
    const Eigen::Index M = hbar.front().size();
    CMatrix R = CMatrix::Identity(M, M);
    for (std::size_t i = 0; i < hbar.size(); ++i)
      if (static_cast<int>(i) != k && power.P(i) != 0.0)
        R.noalias() += (power.P(i) / sigma2) * hbar[i] * hbar[i].adjoint();
    return Eigen::LDLT<CMatrix>(R);
  }
};

UserSolve prepare(const SystemConfig& config, const ChannelSet& channels, const PhaseVector& phases,
                  const PowerAllocation& power) {
  const int K = channels.num_users();
  if (power.P.size() != K) throw DimensionMismatch("mmse_receiver: power vector size");
  UserSolve s{std::vector<CVector>(K), config.noise_power_total()};
  for (int k = 0; k < K; ++k) {
    s.hbar[k] = effective_channel(channels, phases, k);
    if (s.hbar[k].squaredNorm() == 0.0) throw DegenerateChannel("mmse_receiver: zero effective channel");
  }
  return s;
}

}  // namespace

BeamformerSet mmse_receiver(const SystemConfig& config, const ChannelSet& channels, const PhaseVector& phases,
                            const PowerAllocation& power) {
  const UserSolve s = prepare(config, channels, phases, power);
  const int K = channels.num_users();
  BeamformerSet out{CMatrix(channels.num_bs_antennas(), K)};
  // The 1/sigma2 normalization only rescales v_k, which leaves every SINR unchanged.
  for (int k = 0; k < K; ++k) out.V.col(k) = s.covariance(power, k).solve(s.hbar[k]);
  return out;
}

RVector mmse_output_sinr(const SystemConfig& config, const ChannelSet& channels, const PhaseVector& phases,
                         const PowerAllocation& power) {
  const UserSolve s = prepare(config, channels, phases, power);
  const int K = channels.num_users();
  RVector out(K);
  for (int k = 0; k < K; ++k) {
    const CVector x = s.covariance(power, k).solve(s.hbar[k]);
    out(k) = power.P(k) / s.sigma2 * s.hbar[k].dot(x).real();
  }
  return out;
}

}  // namespace irsopt
