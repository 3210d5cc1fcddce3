#ifndef IRSOPT_SYSTEM_MODEL_HPP_
#define IRSOPT_SYSTEM_MODEL_HPP_

#include <cmath>
#include <numbers>
#include <string>

#include "irsopt/types.hpp"

namespace irsopt {

namespace detail {
inline void require(bool ok, const char* what) {
  if (!ok) throw DimensionMismatch(what);
}
}  // namespace detail

/// Cascaded channel G * Phi * h with Phi = diag(conj(w)).
template <typename DerivedG, typename DerivedW, typename DerivedH>
auto effective_channel(const Eigen::MatrixBase<DerivedG>& G, const Eigen::MatrixBase<DerivedW>& w,
                       const Eigen::MatrixBase<DerivedH>& h) {
  using Scalar = typename DerivedG::Scalar;
  detail::require(G.cols() == w.size() && w.size() == h.size(), "effective_channel: dimension mismatch");
  Eigen::Matrix<Scalar, Eigen::Dynamic, 1> out = G * (w.conjugate().cwiseProduct(h));
  return out;
}

inline CVector effective_channel(const ChannelSet& ch, const PhaseVector& ph, int k) {
  return effective_channel(ch.G, ph.w, ch.h.at(k));
}

/// Expected noise power after the receive filter: N0 * B * |v|^2.
template <typename DerivedV>
double noise_power(const SystemConfig& config, const Eigen::MatrixBase<DerivedV>& v) {
  return config.noise_power_total() * v.squaredNorm();
}

/// Row vector v^H G laid out as a column and multiplied element-wise with h.
/// Satisfies |w^H result|^2 = |v^H G Phi h|^2.
template <typename DerivedV, typename DerivedG, typename DerivedH>
auto hadamard_channel(const Eigen::MatrixBase<DerivedV>& v, const Eigen::MatrixBase<DerivedG>& G,
                      const Eigen::MatrixBase<DerivedH>& h) {
  using Scalar = typename DerivedG::Scalar;
  detail::require(v.size() == G.rows() && G.cols() == h.size(), "hadamard_channel: dimension mismatch");
  Eigen::Matrix<Scalar, Eigen::Dynamic, 1> out = (G.adjoint() * v).conjugate().cwiseProduct(h);
  return out;
}

/// Per-user SINR for arbitrary receive filters (columns of beams.V).
RVector compute_sinr(const SystemConfig& config, const ChannelSet& channels, const PhaseVector& phases,
                     const PowerAllocation& power, const BeamformerSet& beams);

/// Spectral efficiency sum_k log2(1 + sinr_k) in bit/s/Hz.
template <typename Derived>
double sum_log_rate(const Eigen::MatrixBase<Derived>& sinr) {
  double s = 0.0;
  for (Eigen::Index k = 0; k < sinr.size(); ++k) s += std::log2(1.0 + sinr(k));
  return s;
}

/// Energy efficiency in bit/J: B * sum log2(1 + sinr) / (psi * sum P + Pc).
template <typename DerivedS, typename DerivedP>
double compute_ee(const SystemConfig& config, const Eigen::MatrixBase<DerivedS>& sinr,
                  const Eigen::MatrixBase<DerivedP>& power) {
  const double consumed = config.amp_inefficiency * power.sum() + config.circuit_power;
  return config.bandwidth * sum_log_rate(sinr) / consumed;
}

/// True when every user meets its SINR target within kQosRelTol.
bool qos_satisfied(const SystemConfig& config, const RVector& sinr);

/// Fills sinr, rate, ee and feasible from (power, beams, phases).
void evaluate(const SystemConfig& config, const ChannelSet& channels, SolutionState& state);

}  // namespace irsopt

#endif  // IRSOPT_SYSTEM_MODEL_HPP_
