#ifndef IRSOPT_CHANNEL_HPP_
#define IRSOPT_CHANNEL_HPP_

#include <cstdint>
#include <string>
#include <utility>

#include "irsopt/rng.hpp"
#include "irsopt/types.hpp"

namespace irsopt {

struct PathLossModel {
  double offset_db = 30.0;
  double slope = 24.0;
};

struct ChannelParams {
  double rician_k_factor = 5.0;
  PathLossModel pathloss_bs_irs{30.0, 24.0};
  PathLossModel pathloss_irs_user{30.0, 28.0};
  std::pair<double, double> d_bs_irs_range{20.0, 50.0};
  std::pair<double, double> d_irs_user_range{20.0, 100.0};
  std::uint64_t rng_seed = 1;

  void validate() const;
};

/// Power attenuation 10^(-(offset + slope*log10(d))/10). Throws Error for d <= 0.
double path_loss_linear(double offset_db, double slope, double distance);
inline double path_loss_linear(const PathLossModel& m, double distance) {
  return path_loss_linear(m.offset_db, m.slope, distance);
}

/// sqrt(k/(1+k)) * LOS + sqrt(1/(1+k)) * CN(0,1) with LOS(i,j) = exp(j(a_i + b_j)).
/// Each entry (and each LOS angle) comes from its own sub-stream of `rng`, so the
/// leading block of a larger draw equals a smaller draw with the same rng.
CMatrix sample_rician(int rows, int cols, double k_factor, const SplitRng& rng);

/// i.i.d. CN(0,1) entries, one sub-stream per index.
CVector sample_rayleigh(int n, const SplitRng& rng);

/// One channel realization; nested across K, M and N for a fixed rng.
ChannelSet generate_realization(const SystemConfig& config, const ChannelParams& params, const SplitRng& rng);

/// Leading block (first M antennas, first N elements, first K users).
ChannelSet truncate(const ChannelSet& channels, int num_users, int num_bs_antennas, int num_irs_elements);

/// JSON fixture with complex entries stored as [re, im] pairs.
std::string channel_to_json(const ChannelSet& channels);
ChannelSet channel_from_json(const std::string& text);
void save_channel(const ChannelSet& channels, const std::string& path);
ChannelSet load_channel(const std::string& path);

}  // namespace irsopt

#endif  // IRSOPT_CHANNEL_HPP_
