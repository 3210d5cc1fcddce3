#include "irsopt/channel.hpp"

#include <cmath>
#include <fstream>
#include <numbers>
#include <sstream>

#include "json.hpp"

namespace irsopt {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

cdouble standard_complex_normal(const SplitRng& rng) {
  auto eng = rng.engine();
  std::normal_distribution<double> n(0.0, std::sqrt(0.5));
  const double re = n(eng);
  const double im = n(eng);
  return {re, im};
}

double uniform(const SplitRng& rng, double lo, double hi) {
  auto eng = rng.engine();
  return std::uniform_real_distribution<double>(lo, hi)(eng);
}

nlohmann::json complex_to_json(cdouble z) { return nlohmann::json::array({z.real(), z.imag()}); }

cdouble complex_from_json(const nlohmann::json& j) {
  if (!j.is_array() || j.size() != 2) throw Error("channel fixture: complex entry must be [re, im]");
  return {j[0].get<double>(), j[1].get<double>()};
}

}  // namespace

void ChannelParams::validate() const {
  if (!(rician_k_factor >= 0)) throw Error("ChannelParams: K-factor must be >= 0");
  if (!(pathloss_bs_irs.slope > 0) || !(pathloss_irs_user.slope > 0)) throw Error("ChannelParams: slopes must be > 0");
  for (auto [lo, hi] : {d_bs_irs_range, d_irs_user_range})
    if (!(lo > 0) || !(hi >= lo)) throw Error("ChannelParams: distance ranges must be positive and ordered");
}

double path_loss_linear(double offset_db, double slope, double distance) {
  if (!(distance > 0)) throw Error("path_loss_linear: distance must be > 0");
  return std::pow(10.0, -(offset_db + slope * std::log10(distance)) / 10.0);
}

CMatrix sample_rician(int rows, int cols, double k_factor, const SplitRng& rng) {
  if (!(k_factor >= 0)) throw Error("sample_rician: K-factor must be >= 0");
  const double los_gain = std::sqrt(k_factor / (1.0 + k_factor));
  const double nlos_gain = std::sqrt(1.0 / (1.0 + k_factor));
  RVector row_angle(rows), col_angle(cols);
  for (int i = 0; i < rows; ++i) row_angle(i) = uniform(rng.child("los_row", i), 0.0, kTwoPi);
  for (int j = 0; j < cols; ++j) col_angle(j) = uniform(rng.child("los_col", j), 0.0, kTwoPi);

  CMatrix out(rows, cols);
  for (int i = 0; i < rows; ++i)
    for (int j = 0; j < cols; ++j)
      out(i, j) = los_gain * std::polar(1.0, row_angle(i) + col_angle(j)) +
                  nlos_gain * standard_complex_normal(rng.child("nlos", i, j));
  return out;
}

CVector sample_rayleigh(int n, const SplitRng& rng) {
  CVector out(n);
  for (int j = 0; j < n; ++j) out(j) = standard_complex_normal(rng.child(j));
  return out;
}

ChannelSet generate_realization(const SystemConfig& config, const ChannelParams& params, const SplitRng& rng) {
  params.validate();
  const int K = config.num_users, M = config.num_bs_antennas, N = config.num_irs_elements;
  ChannelSet ch;
  ch.d_bs_irs = uniform(rng.child("d_bs_irs"), params.d_bs_irs_range.first, params.d_bs_irs_range.second);
  ch.G = std::sqrt(path_loss_linear(params.pathloss_bs_irs, ch.d_bs_irs)) *
         sample_rician(M, N, params.rician_k_factor, rng.child("G"));
  ch.h.resize(K);
  ch.d_irs_user.resize(K);
  for (int k = 0; k < K; ++k) {
    ch.d_irs_user[k] =
        uniform(rng.child("d_irs_user", k), params.d_irs_user_range.first, params.d_irs_user_range.second);
    ch.h[k] = std::sqrt(path_loss_linear(params.pathloss_irs_user, ch.d_irs_user[k])) *
              sample_rayleigh(N, rng.child("h", k));
  }
  return ch;
}

ChannelSet truncate(const ChannelSet& channels, int num_users, int num_bs_antennas, int num_irs_elements) {
  if (num_users > channels.num_users() || num_bs_antennas > channels.num_bs_antennas() ||
      num_irs_elements > channels.num_irs_elements())
    throw DimensionMismatch("truncate: requested block exceeds the realization");
  ChannelSet out;
  out.G = channels.G.topLeftCorner(num_bs_antennas, num_irs_elements);
  out.d_bs_irs = channels.d_bs_irs;
  for (int k = 0; k < num_users; ++k) {
    out.h.push_back(channels.h[k].head(num_irs_elements));
    out.d_irs_user.push_back(channels.d_irs_user[k]);
  }
  return out;
}

std::string channel_to_json(const ChannelSet& ch) {
  nlohmann::json j;
  j["format"] = "irsopt.channel_set";
  j["version"] = 1;
  j["num_bs_antennas"] = ch.num_bs_antennas();
  j["num_irs_elements"] = ch.num_irs_elements();
  j["num_users"] = ch.num_users();
  j["d_bs_irs"] = ch.d_bs_irs;
  j["d_irs_user"] = ch.d_irs_user;
  auto G = nlohmann::json::array();
  for (Eigen::Index r = 0; r < ch.G.rows(); ++r) {
    auto row = nlohmann::json::array();
    for (Eigen::Index c = 0; c < ch.G.cols(); ++c) row.push_back(complex_to_json(ch.G(r, c)));
    G.push_back(row);
  }
  j["G"] = G;
  auto H = nlohmann::json::array();
  for (const auto& hk : ch.h) {
    auto col = nlohmann::json::array();
    for (Eigen::Index n = 0; n < hk.size(); ++n) col.push_back(complex_to_json(hk(n)));
    H.push_back(col);
  }
  j["h"] = H;
  return j.dump(2);
}

ChannelSet channel_from_json(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw Error(std::string("channel fixture: ") + e.what());
  }
  if (j.value("format", "") != "irsopt.channel_set") throw Error("channel fixture: unknown format tag");
  const int M = j.at("num_bs_antennas").get<int>();
  const int N = j.at("num_irs_elements").get<int>();
  const int K = j.at("num_users").get<int>();
  ChannelSet ch;
  ch.d_bs_irs = j.at("d_bs_irs").get<double>();
  ch.d_irs_user = j.at("d_irs_user").get<std::vector<double>>();
  const auto& G = j.at("G");
  if (static_cast<int>(G.size()) != M) throw DimensionMismatch("channel fixture: G row count");
  ch.G.resize(M, N);
  for (int r = 0; r < M; ++r) {
    if (static_cast<int>(G[r].size()) != N) throw DimensionMismatch("channel fixture: G column count");
    for (int c = 0; c < N; ++c) ch.G(r, c) = complex_from_json(G[r][c]);
  }
  const auto& H = j.at("h");
  if (static_cast<int>(H.size()) != K || static_cast<int>(ch.d_irs_user.size()) != K)
    throw DimensionMismatch("channel fixture: user count");
  for (int k = 0; k < K; ++k) {
    if (static_cast<int>(H[k].size()) != N) throw DimensionMismatch("channel fixture: h length");
    CVector hk(N);
    for (int n = 0; n < N; ++n) hk(n) = complex_from_json(H[k][n]);
    ch.h.push_back(hk);
  }
  return ch;
}

void save_channel(const ChannelSet& channels, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw Error("cannot open " + path + " for writing");
  out << channel_to_json(channels) << '\n';
  if (!out) throw Error("failed writing " + path);
}

ChannelSet load_channel(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return channel_from_json(ss.str());
}

}  // namespace irsopt
