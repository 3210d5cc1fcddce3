#ifndef IRSOPT_ACTIVE_BEAMFORMING_HPP_
#define IRSOPT_ACTIVE_BEAMFORMING_HPP_

#include "irsopt/types.hpp"

namespace irsopt {

/// MMSE receive filters v_k = (N0 B I + sum_{i!=k} P_i hbar_i hbar_i^H)^{-1} hbar_k.
/// Throws DegenerateChannel when some effective channel hbar_k is zero.
BeamformerSet mmse_receiver(const SystemConfig& config, const ChannelSet& channels, const PhaseVector& phases,
                            const PowerAllocation& power);

/// gamma_k = P_k hbar_k^H (N0 B I + sum_{i!=k} P_i hbar_i hbar_i^H)^{-1} hbar_k.
RVector mmse_output_sinr(const SystemConfig& config, const ChannelSet& channels, const PhaseVector& phases,
                         const PowerAllocation& power);

}  // namespace irsopt

#endif  // IRSOPT_ACTIVE_BEAMFORMING_HPP_
