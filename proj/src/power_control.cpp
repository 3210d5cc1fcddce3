#include "irsopt/power_control.hpp"

#include <cmath>
#include <numbers>
#include <utility>

#include "irsopt/convex_kernel.hpp"
#include "irsopt/system_model.hpp"

namespace irsopt {

namespace {

struct QosRows {
  RMatrix A;  // over normalized powers x = P / Pmax
  RVector b;
};

QosRows qos_rows(const GainTable& gains, const SystemConfig& config) {
  const int K = gains.num_users();
  std::vector<int> active;
  for (int k = 0; k < K; ++k)
    if (config.min_sinr(k) > 0) active.push_back(k);
  QosRows rows{RMatrix::Zero(active.size(), K), RVector::Zero(active.size())};
  for (std::size_t r = 0; r < active.size(); ++r) {
    const int k = active[r];
    const double gam = config.min_sinr(k);
    for (int i = 0; i < K; ++i)
      rows.A(r, i) = (i == k ? -gains.g(k, k) : gam * gains.g(k, i)) * config.max_power(i);
    rows.b(r) = -gam;
  }
  return rows;
}

double subtractive_objective(const RVector& P, const GainTable& gains, double lambda, const SystemConfig& config) {
  auto [f1, f2] = eval_f1_f2(P, gains, lambda, config);
  return f1 - f2;
}

double ratio(const RVector& P, const GainTable& gains, const SystemConfig& config) {
  return sum_log_rate(sinr_from_gains(P, gains)) /
         (config.amp_inefficiency * P.sum() + config.circuit_power);
}

}  // namespace

GainTable build_gain_table(const SystemConfig& config, const ChannelSet& channels, const PhaseVector& phases,
                           const BeamformerSet& beams) {
  const int K = channels.num_users();
  if (beams.V.cols() != K) throw DimensionMismatch("build_gain_table: beamformer count");
  std::vector<CVector> hbar(K);
  for (int i = 0; i < K; ++i) hbar[i] = effective_channel(channels, phases, i);
  GainTable t{RMatrix(K, K)};
  for (int k = 0; k < K; ++k) {
    const auto v = beams.V.col(k);
    const double sigma2 = noise_power(config, v);
    if (!(sigma2 > 0)) throw Error("build_gain_table: zero beamformer column");
    for (int i = 0; i < K; ++i) t.g(k, i) = std::norm(v.dot(hbar[i])) / sigma2;
  }
  return t;
}

RVector sinr_from_gains(const RVector& P, const GainTable& gains) {
  const int K = gains.num_users();
  RVector s(K);
  for (int k = 0; k < K; ++k) {
    const double total = gains.g.row(k).dot(P);
    const double own = gains.g(k, k) * P(k);
    s(k) = own / (total - own + 1.0);
  }
  return s;
}

bool power_feasible(const RVector& P, const GainTable& gains, const SystemConfig& config) {
  const int K = gains.num_users();
  for (int k = 0; k < K; ++k) {
    if (P(k) < 0.0 || P(k) > config.max_power(k) * (1.0 + 1e-12)) return false;
    const double interference = gains.g.row(k).dot(P) - gains.g(k, k) * P(k) + 1.0;
    if (P(k) * gains.g(k, k) < config.min_sinr(k) * interference * (1.0 - kQosRelTol)) return false;
  }
  return true;
}

std::pair<double, double> eval_f1_f2(const RVector& P, const GainTable& gains, double lambda,
                                     const SystemConfig& config) {
  const int K = gains.num_users();
  double f1 = -lambda * (config.amp_inefficiency * P.sum() + config.circuit_power);
  double f2 = 0.0;
  for (int k = 0; k < K; ++k) {
    const double total = gains.g.row(k).dot(P);
    f1 += std::log2(total + 1.0);
    f2 += std::log2(total - gains.g(k, k) * P(k) + 1.0);
  }
  return {f1, f2};
}

RVector grad_f2(const RVector& P, const GainTable& gains) {
  const int K = gains.num_users();
  RVector grad = RVector::Zero(K);
  for (int k = 0; k < K; ++k) {
    const double denom = 1.0 + gains.g.row(k).dot(P) - gains.g(k, k) * P(k);
    for (int i = 0; i < K; ++i)
      if (i != k) grad(i) += gains.g(k, i) / (std::numbers::ln2 * denom);
  }
  return grad;
}

PowerAllocation qos_feasible_init(const GainTable& gains, const SystemConfig& config) {
  const int K = gains.num_users();
  if ((config.min_sinr.array() == 0.0).all()) return {RVector::Zero(K)};
  const QosRows rows = qos_rows(gains, config);
  const RVector lo = RVector::Zero(K), hi = RVector::Ones(K);
  const auto start = convex::find_interior_point(rows.A, rows.b, lo, hi);
  if (!start) throw Infeasible("QoS constraints cannot be met within the power caps");

  const RVector cost = config.max_power / config.max_power.sum();
  convex::SmoothConcaveProblem lp;
  lp.n = K;
  lp.objective = [cost](const RVector& x, RVector* g, RMatrix* H) {
    if (g) *g = -cost;
    if (H) H->setZero(x.size(), x.size());
    return -cost.dot(x);
  };
  lp.A = rows.A;
  lp.b = rows.b;
  lp.lower = lo;
  lp.upper = hi;
  lp.x0 = *start;
  const auto r = convex::solve_concave_affine(lp, 1e-11);
  return {config.max_power.cwiseProduct(r.x.cwiseMax(0.0).cwiseMin(1.0))};
}

PowerAllocation dc_inner_solve(const GainTable& gains, double lambda, const SystemConfig& config,
                               const PowerAllocation& P0, const PowerControlOptions& opt,
                               std::vector<double>* objective_trace) {
  const int K = gains.num_users();
  if (P0.P.size() != K) throw DimensionMismatch("dc_inner_solve: P0 size");
  if (!power_feasible(P0.P, gains, config)) throw Infeasible("dc_inner_solve: start point violates constraints");

  const QosRows rows = qos_rows(gains, config);
  const RVector lo = RVector::Zero(K), hi = RVector::Ones(K);
  const auto center = convex::find_interior_point(rows.A, rows.b, lo, hi);

  RVector P = P0.P;
  double value = subtractive_objective(P, gains, lambda, config);
  if (objective_trace) objective_trace->push_back(value);
  if (!center) return P0;  // feasible set has no interior: nothing to move

  const RVector pmax = config.max_power;
  const RMatrix Gs = gains.g * pmax.asDiagonal();  // gains over normalized powers
  const double price = lambda * config.amp_inefficiency;

  for (int it = 0; it < opt.max_inner; ++it) {
    const RVector lin = grad_f2(P, gains).cwiseProduct(pmax);
    convex::SmoothConcaveProblem sub;
    sub.n = K;
    sub.objective = [&Gs, &pmax, &lin, price](const RVector& x, RVector* g, RMatrix* H) {
      const RVector total = Gs * x;
      double f = -price * pmax.dot(x) - lin.dot(x);
      if (g) *g = -price * pmax - lin;
      if (H) H->setZero(x.size(), x.size());
      for (Eigen::Index k = 0; k < total.size(); ++k) {
        const double arg = total(k) + 1.0;
        if (!(arg > 0)) return -std::numeric_limits<double>::infinity();
        f += std::log2(arg);
        const RVector row = Gs.row(k).transpose();
        if (g) *g += row / (std::numbers::ln2 * arg);
        if (H) *H -= row * row.transpose() / (std::numbers::ln2 * arg * arg);
      }
      return f;
    };
    sub.A = rows.A;
    sub.b = rows.b;
    sub.lower = lo;
    sub.upper = hi;
    const RVector xprev = P.cwiseQuotient(pmax);
    sub.x0 = (1.0 - 1e-3) * xprev + 1e-3 * (*center);

    RVector candidate;
    try {
      candidate = pmax.cwiseProduct(convex::solve_concave_affine(sub, opt.kernel_tol).x.cwiseMax(0.0).cwiseMin(1.0));
    } catch (const MaxIterations&) {
      break;
    }
    const double next = subtractive_objective(candidate, gains, lambda, config);
    if (!(next >= value) || !power_feasible(candidate, gains, config)) break;
    const double gain = next - value;
    P = candidate;
    value = next;
    if (objective_trace) objective_trace->push_back(value);
    if (gain <= opt.inner_rel_tol * std::max(1.0, std::abs(value))) break;
  }
  return {P};
}

DinkelbachResult dinkelbach_solve(const GainTable& gains, const SystemConfig& config, const PowerAllocation& P_init,
                                  const PowerControlOptions& opt) {
  if (!power_feasible(P_init.P, gains, config)) throw Infeasible("dinkelbach_solve: initial power is infeasible");
  DinkelbachResult res;
  double lambda = 0.0;
  res.lambdas.push_back(lambda);
  RVector P = P_init.P;
  RVector best = P;
  double best_ratio = ratio(P, gains, config);

  for (int l = 1; l <= opt.max_outer; ++l) {
    P = dc_inner_solve(gains, lambda, config, {P}, opt).P;
    const double rate = sum_log_rate(sinr_from_gains(P, gains));
    const double consumed = config.amp_inefficiency * P.sum() + config.circuit_power;
    const double eps = rate - lambda * consumed;
    lambda = rate / consumed;
    res.epsilons.push_back(eps);
    res.lambdas.push_back(lambda);
    res.iterations = l;
    if (lambda > best_ratio) {
      best_ratio = lambda;
      best = P;
    }
    if (std::abs(eps) < opt.outer_tol * (1.0 + std::abs(lambda) * config.circuit_power)) break;
  }
  res.power = {best};
  res.lambda = best_ratio;
  return res;
}

DinkelbachResult power_control_step(const GainTable& gains, const SystemConfig& config,
                                    const PowerAllocation& incumbent, const PowerControlOptions& opt,
                                    bool full_power_restart) {
  DinkelbachResult best = dinkelbach_solve(gains, config, incumbent, opt);
  if (full_power_restart && power_feasible(config.max_power, gains, config)) {
    DinkelbachResult alt = dinkelbach_solve(gains, config, {config.max_power}, opt);
    if (alt.lambda > best.lambda) best = std::move(alt);
  }
  return best;
}

}  // namespace irsopt
