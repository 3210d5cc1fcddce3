#ifndef IRSOPT_TYPES_HPP_
#define IRSOPT_TYPES_HPP_

#include <complex>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace irsopt {

template <typename T> using Complex = std::complex<T>;
template <typename T> using CMatrixT = Eigen::Matrix<Complex<T>, Eigen::Dynamic, Eigen::Dynamic>;
template <typename T> using CVectorT = Eigen::Matrix<Complex<T>, Eigen::Dynamic, 1>;
template <typename T> using RMatrixT = Eigen::Matrix<T, Eigen::Dynamic, Eigen::Dynamic>;
template <typename T> using RVectorT = Eigen::Matrix<T, Eigen::Dynamic, 1>;

using cdouble = Complex<double>;
using CMatrix = CMatrixT<double>;
using CVector = CVectorT<double>;
using RMatrix = RMatrixT<double>;
using RVector = RVectorT<double>;

// Error hierarchy shared by all modules.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class DimensionMismatch : public Error {
 public:
  using Error::Error;
};

class Infeasible : public Error {
 public:
  using Error::Error;
};

class NotStrictlyFeasible : public Error {
 public:
  using Error::Error;
};

class MaxIterations : public Error {
 public:
  using Error::Error;
};

class NoFeasibleCandidate : public Error {
 public:
  using Error::Error;
};

class DegenerateChannel : public Error {
 public:
  using Error::Error;
};

/// Static description of one uplink scenario. All powers in watts, noise PSD in W/Hz.
struct SystemConfig {
  int num_users = 3;         // K
  int num_bs_antennas = 4;   // M
  int num_irs_elements = 4;  // N
  double bandwidth = 1e6;
  double noise_psd = 3.9810717055349565e-21;  // -174 dBm/Hz
  double circuit_power = 0.05;
  double amp_inefficiency = 0.35;
  RVector max_power;  // per user
  RVector min_sinr;   // per user, linear

  /// Total noise power N0*B seen by a unit-norm receive filter.
  double noise_power_total() const { return noise_psd * bandwidth; }

  /// Throws Error when an invariant does not hold.
  void validate() const;

  /// Equal per-user max power and min SINR for K users.
  static SystemConfig uniform(int K, int M, int N, double pmax_watt, double gamma_min);
};

struct ChannelSet {
  CMatrix G;               // M x N, IRS -> BS
  std::vector<CVector> h;  // K vectors of length N, user -> IRS
  double d_bs_irs = 0.0;
  std::vector<double> d_irs_user;

  int num_bs_antennas() const { return static_cast<int>(G.rows()); }
  int num_irs_elements() const { return static_cast<int>(G.cols()); }
  int num_users() const { return static_cast<int>(h.size()); }

  /// Throws DimensionMismatch / Error if shapes disagree with `config` or entries are non-finite.
  void validate(const SystemConfig& config) const;
};

/// IRS coefficients in vector form: w_j = conj(phi_j).
struct PhaseVector {
  CVector w;

  /// Diagonal of the reflection matrix Phi.
  CVector phi() const { return w.conjugate(); }
  bool unit_modulus(double tol = 1e-9) const;
  static PhaseVector from_angles(const RVector& theta);
  static PhaseVector identity(int n) { return {CVector::Ones(n)}; }
};

struct PowerAllocation {
  RVector P;
};

/// Column k holds the receive filter v_k.
struct BeamformerSet {
  CMatrix V;
};

struct SolutionState {
  PowerAllocation power;
  BeamformerSet beams;
  PhaseVector phases;
  RVector sinr;
  RVector rate;  // bit/s
  double ee = 0.0;  // bit/J
  bool feasible = false;
  std::vector<double> trace;
};

// Relative slack used when declaring a QoS constraint satisfied.
inline constexpr double kQosRelTol = 1e-6;

}  // namespace irsopt

#endif  // IRSOPT_TYPES_HPP_
