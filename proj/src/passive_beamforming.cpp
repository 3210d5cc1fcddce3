#include "irsopt/passive_beamforming.hpp"

#include <cmath>
#include <numbers>

#include "irsopt/convex_kernel.hpp"
#include "irsopt/system_model.hpp"

namespace irsopt {

namespace {

// Per-user aggregates: total = sum_i H_ki, interference = sum_{i!=k} H_ki.
struct Aggregates {
  std::vector<CMatrix> total;
  std::vector<CMatrix> interference;
};

Aggregates aggregate(const LiftedProblem& lp) {
  Aggregates a;
  const int K = lp.num_users(), N = lp.order();
  for (int k = 0; k < K; ++k) {
    CMatrix interf = CMatrix::Zero(N, N);
    for (int i = 0; i < K; ++i)
      if (i != k) interf += lp.H[k][i];
    a.total.push_back(interf + lp.H[k][k]);
    a.interference.push_back(interf);
  }
  return a;
}

double trace_product(const CMatrix& W, const CMatrix& A) { return (W.cwiseProduct(A.transpose())).sum().real(); }

double lifted_value(const CMatrix& W, const LiftedProblem& lp) {
  auto [f3, f4] = eval_f3_f4(W, lp);
  return f3 - f4;
}

bool lifted_feasible(const LiftedProblem& lp, const CMatrix& W) {
  for (int k = 0; k < lp.num_users(); ++k) {
    double interf = lp.sigma2(k);
    for (int i = 0; i < lp.num_users(); ++i)
      if (i != k) interf += trace_product(W, lp.H[k][i]);
    if (trace_product(W, lp.H[k][k]) < lp.gamma_min(k) * interf * (1.0 - kQosRelTol)) return false;
  }
  return true;
}

}  // namespace

LiftedProblem build_lifted(const SystemConfig& config, const ChannelSet& channels, const BeamformerSet& beams,
                           const PowerAllocation& power) {
  const int K = channels.num_users();
  if (beams.V.cols() != K || power.P.size() != K) throw DimensionMismatch("build_lifted: dimension mismatch");
  LiftedProblem lp;
  lp.H.assign(K, std::vector<CMatrix>(K));
  lp.sigma2.resize(K);
  lp.gamma_min = config.min_sinr;
  for (int k = 0; k < K; ++k) {
    const auto v = beams.V.col(k);
    lp.sigma2(k) = noise_power(config, v);
    for (int i = 0; i < K; ++i) {
      const CVector hh = hadamard_channel(v, channels.G, channels.h[i]);
      lp.H[k][i] = power.P(i) * hh * hh.adjoint();
    }
  }
  return lp;
}

std::pair<double, double> eval_f3_f4(const CMatrix& W, const LiftedProblem& lp) {
  double f3 = 0.0, f4 = 0.0;
  for (int k = 0; k < lp.num_users(); ++k) {
    double interf = lp.sigma2(k);
    for (int i = 0; i < lp.num_users(); ++i)
      if (i != k) interf += trace_product(W, lp.H[k][i]);
    const double total = interf + trace_product(W, lp.H[k][k]);
    if (!(interf > 0) || !(total > 0)) throw Error("eval_f3_f4: non-positive log argument");
    f3 += std::log2(total);
    f4 += std::log2(interf);
  }
  return {f3, f4};
}

std::pair<RMatrix, RMatrix> partials_f4(const CMatrix& W, const LiftedProblem& lp) {
  const int N = lp.order();
  RMatrix d_re = RMatrix::Zero(N, N), d_im = RMatrix::Zero(N, N);
  const Aggregates agg = aggregate(lp);
  for (int k = 0; k < lp.num_users(); ++k) {
    const CMatrix& B = agg.interference[k];
    const double denom = std::numbers::ln2 * (trace_product(W, B) + lp.sigma2(k));
    for (int n = 1; n < N; ++n)
      for (int j = 0; j < n; ++j) {
        // (B + B^H)(n,j) read element-wise: B(n,j) + conj(B(n,j)) = 2 Re B(n,j); the
        // imaginary counterpart -i (B(n,j) - conj(B(n,j))) = 2 Im B(n,j).
        d_re(n, j) += 2.0 * B(n, j).real() / denom;
        d_im(n, j) += 2.0 * B(n, j).imag() / denom;
      }
  }
  return {d_re, d_im};
}

double lifted_sum_rate(const LiftedProblem& lp, const CVector& w) {
  double s = 0.0;
  for (int k = 0; k < lp.num_users(); ++k) {
    double interf = lp.sigma2(k);
    for (int i = 0; i < lp.num_users(); ++i)
      if (i != k) interf += w.dot(lp.H[k][i] * w).real();
    s += std::log2(1.0 + w.dot(lp.H[k][k] * w).real() / interf);
  }
  return s;
}

bool lifted_qos(const LiftedProblem& lp, const CVector& w) { return lifted_feasible(lp, w * w.adjoint()); }

LiftedIterate dc_sdp_iterate(const LiftedProblem& lp, const CMatrix& W0, const CVector& wbar0,
                             const PassiveOptions& opt, std::vector<double>* value_trace) {
  const int N = lp.order(), K = lp.num_users();
  if (W0.rows() != N || wbar0.size() != N) throw DimensionMismatch("dc_sdp_iterate: start dimension");
  if (!lifted_feasible(lp, W0)) throw Infeasible("dc_sdp_iterate: start violates QoS");

  // Work with every user's terms divided by its noise power.
  std::vector<CMatrix> total(K), interf(K);
  const Aggregates agg = aggregate(lp);
  std::vector<convex::TraceInequality> qos;
  for (int k = 0; k < K; ++k) {
    total[k] = agg.total[k] / lp.sigma2(k);
    interf[k] = agg.interference[k] / lp.sigma2(k);
    if (lp.gamma_min(k) > 0)
      qos.push_back({lp.H[k][k] / lp.sigma2(k) - lp.gamma_min(k) * interf[k], lp.gamma_min(k)});
  }
  const auto center = convex::psd_interior_point(N, qos);
  if (!center) throw Infeasible("dc_sdp_iterate: relaxed QoS set has no interior");

  LiftedIterate cur{W0, wbar0};
  double value = lifted_value(W0, lp);
  if (value_trace) value_trace->push_back(value);

  for (int it = 0; it < opt.max_dc; ++it) {
    auto [d_re, d_im] = partials_f4(cur.W, lp);
    CMatrix lin = CMatrix::Zero(N, N);
    for (int n = 1; n < N; ++n)
      for (int j = 0; j < n; ++j) {
        // Re Tr(W L) contributes 2 Re L(n,j) Re W(n,j) + 2 Im L(n,j) Im W(n,j).
        lin(n, j) = -0.5 * cdouble(d_re(n, j), d_im(n, j));
        lin(j, n) = std::conj(lin(n, j));
      }
    convex::PSDConcaveProblem sub;
    sub.order = N;
    for (int k = 0; k < K; ++k) sub.log_terms.push_back({total[k], 1.0, 1.0});
    sub.linear = lin;
    sub.inequalities = qos;
    constexpr double mix = 1e-3;
    sub.W0 = (1.0 - mix) * cur.W + mix * center->first;
    sub.W0.diagonal().setOnes();
    sub.wbar0 = (1.0 - mix) * cur.wbar + mix * center->second;

    convex::PSDSolution sol;
    try {
      sol = convex::solve_psd_concave(sub, opt.sdp_tol);
    } catch (const MaxIterations&) {
      break;
    } catch (const NotStrictlyFeasible&) {
      break;
    }
    const double next = lifted_value(sol.W, lp);
    if (!(next >= value) || !lifted_feasible(lp, sol.W)) break;
    const double gain = next - value;
    cur = {sol.W, sol.wbar};
    value = next;
    if (value_trace) value_trace->push_back(value);
    if (gain <= opt.dc_rel_tol * std::max(1.0, std::abs(value))) break;
  }
  return cur;
}

PhaseVector gaussian_randomization(const LiftedProblem& lp, const LiftedIterate& iterate, int Q, const SplitRng& rng,
                                   double clip_tol) {
  if (Q < 1) throw Error("gaussian_randomization: Q must be >= 1");
  const int N = lp.order();
  const CMatrix cov = iterate.W - iterate.wbar * iterate.wbar.adjoint();
  Eigen::SelfAdjointEigenSolver<CMatrix> eig(cov);
  RVector ev = eig.eigenvalues();
  for (Eigen::Index i = 0; i < ev.size(); ++i) ev(i) = ev(i) < clip_tol ? 0.0 : std::sqrt(ev(i));
  const CMatrix factor = eig.eigenvectors() * ev.asDiagonal();

  bool found = false;
  double best = -std::numeric_limits<double>::infinity();
  CVector best_w;
  for (int q = 0; q < Q; ++q) {
    auto eng = rng.child("candidate", q).engine();
    std::normal_distribution<double> normal(0.0, std::sqrt(0.5));
    CVector z(N);
    for (int j = 0; j < N; ++j) {
      const double re = normal(eng);
      z(j) = cdouble(re, normal(eng));
    }
    const CVector e = iterate.wbar + factor * z;
    CVector w(N);
    for (int j = 0; j < N; ++j) {
      const double mag = std::abs(e(j));
      w(j) = mag < 1e-12 ? cdouble(1.0, 0.0) : e(j) / mag;
    }
    if (!lifted_qos(lp, w)) continue;
    const double r = lifted_sum_rate(lp, w);
    if (!found || r > best) {
      best = r;
      best_w = w;
      found = true;
    }
  }
  if (!found) throw NoFeasibleCandidate("gaussian_randomization: no candidate meets QoS");
  return {best_w};
}

PhaseVector optimize_phases(const SystemConfig& config, const ChannelSet& channels, const BeamformerSet& beams,
                            const PowerAllocation& power, const PhaseVector& incumbent, int Q, const SplitRng& rng,
                            const PassiveOptions& opt) {
  if (Q <= 0) return incumbent;
  const LiftedProblem lp = build_lifted(config, channels, beams, power);
  CVector w = incumbent.w;
  for (Eigen::Index j = 0; j < w.size(); ++j) w(j) /= std::abs(w(j));

  PhaseVector candidate;
  try {
    const LiftedIterate it = dc_sdp_iterate(lp, w * w.adjoint(), w, opt);
    candidate = gaussian_randomization(lp, it, Q, rng, opt.clip_tol);
  } catch (const Error&) {
    return incumbent;
  }
  const RVector s_new = compute_sinr(config, channels, candidate, power, beams);
  if (!qos_satisfied(config, s_new)) return incumbent;
  const RVector s_old = compute_sinr(config, channels, incumbent, power, beams);
  return compute_ee(config, s_new, power.P) >= compute_ee(config, s_old, power.P) ? candidate : incumbent;
}

}  // namespace irsopt
