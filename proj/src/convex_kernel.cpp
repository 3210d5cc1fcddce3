#include "irsopt/convex_kernel.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace irsopt::convex {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Barrier value -sum log(slack) - sum log det Z; nullopt outside the interior.
std::optional<double> barrier_value(const BarrierProblem& p, const RVector& x) {
  double phi = 0.0;
  if (p.A.rows() > 0) {
    const RVector s = p.b - p.A * x;
    for (Eigen::Index i = 0; i < s.size(); ++i) {
      if (!(s(i) > 0)) return std::nullopt;
      phi -= std::log(s(i));
    }
  }
  for (const auto& blk : p.lmis) {
    Eigen::LLT<RMatrix> llt(realify(blk.at(x)));
    if (llt.info() != Eigen::Success) return std::nullopt;
    // log det Z = (1/2) log det realify(Z) = sum log diag(L)
    const RVector d = llt.matrixLLT().diagonal();
    for (Eigen::Index i = 0; i < d.size(); ++i) {
      if (!(d(i) > 0)) return std::nullopt;
      phi -= std::log(d(i));
    }
  }
  return phi;
}

// Nonzeros of one LMI block's directions, flattened once per solve.
struct FlatLmi {
  std::vector<int> vars;
  std::vector<int> start{0};
  std::vector<int> rows, cols;
  std::vector<cdouble> coefs;
};

FlatLmi flatten(const LmiBlock& blk) {
  FlatLmi f;
  for (int a = 0; a < static_cast<int>(blk.directions.size()); ++a) {
    if (blk.directions[a].empty()) continue;
    f.vars.push_back(a);
    for (const auto& e : blk.directions[a]) {
      f.rows.push_back(e.row);
      f.cols.push_back(e.col);
      f.coefs.push_back(e.coef);
    }
    f.start.push_back(static_cast<int>(f.rows.size()));
  }
  return f;
}

void barrier_derivatives(const BarrierProblem& p, const std::vector<FlatLmi>& flat, const RVector& x, RVector& g,
                         RMatrix& H) {
  if (p.A.rows() > 0) {
    const RVector s = p.b - p.A * x;
    const RVector inv = s.cwiseInverse();
    g += p.A.transpose() * inv;
    H += p.A.transpose() * inv.cwiseAbs2().asDiagonal() * p.A;
  }
  for (std::size_t k = 0; k < p.lmis.size(); ++k) {
    const int m = static_cast<int>(p.lmis[k].Z0.rows());
    Eigen::LLT<RMatrix> llt(realify(p.lmis[k].at(x)));
    const CMatrix Y = complexify(llt.solve(RMatrix::Identity(2 * m, 2 * m)));
    const FlatLmi& f = flat[k];
    const int nv = static_cast<int>(f.vars.size());
    CMatrix YBY(m, m);
    for (int ia = 0; ia < nv; ++ia) {
      // Y B_a Y for B_a = sum coef e_row e_col^T
      YBY.setZero();
      cdouble tr(0.0, 0.0);
      for (int s = f.start[ia]; s < f.start[ia + 1]; ++s) {
        tr += f.coefs[s] * Y(f.cols[s], f.rows[s]);
        const cdouble* yc = Y.data() + static_cast<Eigen::Index>(f.rows[s]) * m;
        for (int c = 0; c < m; ++c) {
          const cdouble w = f.coefs[s] * Y(f.cols[s], c);
          cdouble* out = YBY.data() + static_cast<Eigen::Index>(c) * m;
          for (int r = 0; r < m; ++r) out[r] += yc[r] * w;
        }
      }
      g(f.vars[ia]) -= tr.real();
      // Tr(Y B_a Y B_c) = sum over B_c nonzeros of coef * (Y B_a Y)(col, row)
      for (int ic = ia; ic < nv; ++ic) {
        double acc = 0.0;
        for (int t = f.start[ic]; t < f.start[ic + 1]; ++t) acc += (f.coefs[t] * YBY(f.cols[t], f.rows[t])).real();
        H(f.vars[ia], f.vars[ic]) += acc;
        if (ic != ia) H(f.vars[ic], f.vars[ia]) += acc;
      }
    }
  }
}

double objective_value(const BarrierProblem& p, const RVector& x, RVector* g, RMatrix* H) {
  if (!p.objective) {
    if (g) g->setZero(p.n);
    if (H) H->setZero(p.n, p.n);
    return 0.0;
  }
  return p.objective(x, g, H);
}

RVector solve_newton_system(RMatrix H, const RVector& g) {
  const double scale = std::max(1.0, H.diagonal().cwiseAbs().maxCoeff());
  double reg = 0.0;
  for (int attempt = 0; attempt < 12; ++attempt) {
    Eigen::LLT<RMatrix> llt(H);
    if (llt.info() == Eigen::Success) {
      RVector d = -llt.solve(g);
      if (d.allFinite()) return d;
    }
    reg = reg == 0.0 ? 1e-14 * scale : reg * 100.0;
    H.diagonal().array() += reg;
  }
  throw Error("barrier_solve: Newton system is not positive definite");
}

}  // namespace

CMatrix LmiBlock::at(const RVector& x) const {
  CMatrix Z = Z0;
  for (std::size_t p = 0; p < directions.size(); ++p) {
    if (x(p) == 0.0) continue;
    for (const auto& e : directions[p]) Z(e.row, e.col) += x(p) * e.coef;
  }
  return Z;
}

SolveResult barrier_solve(const BarrierProblem& p, const BarrierOptions& opt) {
  if (p.x0.size() != p.n) throw DimensionMismatch("barrier_solve: x0 has wrong size");
  for (const auto& blk : p.lmis)
    if (static_cast<int>(blk.directions.size()) != p.n) throw DimensionMismatch("barrier_solve: LMI direction count");

  RVector x = p.x0;
  auto phi = barrier_value(p, x);
  double f = objective_value(p, x, nullptr, nullptr);
  if (!phi || !std::isfinite(f)) throw NotStrictlyFeasible("barrier_solve: start point is not strictly feasible");

  double nu = static_cast<double>(p.A.rows());
  for (const auto& blk : p.lmis) nu += static_cast<double>(blk.Z0.rows());
  nu = std::max(nu, 1.0);

  std::vector<FlatLmi> flat;
  for (const auto& blk : p.lmis) flat.push_back(flatten(blk));

  SolveResult res;
  double t = opt.t0;
  RVector g(p.n), gf(p.n);
  RMatrix H(p.n, p.n), Hf(p.n, p.n);
  double stationarity = 0.0;

  while (true) {
    double prev_lam2 = kInf;
    while (true) {
      f = objective_value(p, x, &gf, &Hf);
      g = -t * gf;
      H = -t * Hf;
      barrier_derivatives(p, flat, x, g, H);
      stationarity = g.cwiseAbs().maxCoeff() / t;
      if (p.n == 0) break;
      const RVector d = solve_newton_system(H, g);
      const double lam2 = -g.dot(d);
      if (!(lam2 / 2.0 > opt.center_tol)) break;
      // Near the center Newton converges quadratically; a stalled decrement is round-off.
      if (lam2 < 0.1 && lam2 > 0.25 * prev_lam2) break;
      prev_lam2 = lam2;
      if (res.newton_steps >= opt.max_newton) throw MaxIterations("barrier_solve: Newton step budget exhausted");

      const double psi0 = -t * f + *phi;
      double step = 1.0;
      bool accepted = false;
      while (step > 1e-14) {
        const RVector xn = x + step * d;
        const auto phin = barrier_value(p, xn);
        if (phin) {
          const double fn = objective_value(p, xn, nullptr, nullptr);
          if (std::isfinite(fn)) {
            const double psin = -t * fn + *phin;
            // Inside the quadratic-convergence region a full step is safe; round-off in
            // psi at large t would otherwise stall the Armijo test.
            if ((lam2 < 1e-2 && step == 1.0) || psin <= psi0 - 0.25 * step * lam2) {
              x = xn;
              phi = phin;
              f = fn;
              accepted = true;
              break;
            }
          }
        }
        step *= 0.5;
      }
      ++res.newton_steps;
      if (!accepted) break;  // numerically centered
      if (p.early_stop && p.early_stop(x)) {
        res.x = x;
        res.objective = objective_value(p, x, nullptr, nullptr);
        res.kkt_residual = std::max(stationarity, nu / t);
        res.stopped_early = true;
        return res;
      }
    }
    res.path_objective.push_back(f);
    if (nu / t <= opt.tol * std::max(1.0, std::abs(f))) break;
    t *= opt.mu;
  }
  res.x = x;
  res.objective = f;
  res.kkt_residual = std::max(stationarity, nu / t);
  return res;
}

SolveResult solve_concave_affine(const SmoothConcaveProblem& prob, double tol) {
  const int n = prob.n;
  if (prob.x0.size() != n || prob.lower.size() != n || prob.upper.size() != n || prob.A.cols() != n ||
      prob.A.rows() != prob.b.size())
    throw DimensionMismatch("solve_concave_affine: dimension mismatch");
  int rows = static_cast<int>(prob.A.rows());
  for (int j = 0; j < n; ++j) rows += std::isfinite(prob.lower(j)) + std::isfinite(prob.upper(j));
  BarrierProblem bp;
  bp.n = n;
  bp.objective = prob.objective;
  bp.A = RMatrix::Zero(rows, n);
  bp.b = RVector::Zero(rows);
  int r = 0;
  for (; r < prob.A.rows(); ++r) {
    bp.A.row(r) = prob.A.row(r);
    bp.b(r) = prob.b(r);
  }
  for (int j = 0; j < n; ++j) {
    if (std::isfinite(prob.lower(j))) {
      bp.A(r, j) = -1.0;
      bp.b(r++) = -prob.lower(j);
    }
    if (std::isfinite(prob.upper(j))) {
      bp.A(r, j) = 1.0;
      bp.b(r++) = prob.upper(j);
    }
  }
  bp.x0 = prob.x0;
  BarrierOptions opt;
  opt.tol = tol;
  return barrier_solve(bp, opt);
}

std::optional<RVector> find_interior_point(const RMatrix& A, const RVector& b, const RVector& lower,
                                           const RVector& upper) {
  const int n = static_cast<int>(lower.size());
  if (upper.size() != n || A.cols() != n || A.rows() != b.size())
    throw DimensionMismatch("find_interior_point: dimension mismatch");
  for (int j = 0; j < n; ++j) {
    if (!std::isfinite(lower(j)) || !std::isfinite(upper(j))) throw Error("find_interior_point: box must be finite");
    if (!(upper(j) > lower(j))) return std::nullopt;
  }
  std::vector<std::pair<RVector, double>> rows;  // normalized a^T x <= b
  for (Eigen::Index i = 0; i < A.rows(); ++i) {
    const double nrm = A.row(i).norm();
    if (nrm == 0.0) {
      if (b(i) > 0) continue;
      return std::nullopt;
    }
    rows.emplace_back(A.row(i).transpose() / nrm, b(i) / nrm);
  }
  for (int j = 0; j < n; ++j) {
    const double w = upper(j) - lower(j);
    RVector e = RVector::Zero(n);
    e(j) = -1.0 / w;
    rows.emplace_back(e, -lower(j) / w);
    e(j) = 1.0 / w;
    rows.emplace_back(e, upper(j) / w);
  }

  // Variables (x, s): a^T x - s <= b, s >= -1; maximize -s.
  BarrierProblem bp;
  bp.n = n + 1;
  const int m = static_cast<int>(rows.size());
  bp.A = RMatrix::Zero(m + 1, n + 1);
  bp.b = RVector::Zero(m + 1);
  for (int i = 0; i < m; ++i) {
    bp.A.row(i).head(n) = rows[i].first.transpose();
    bp.A(i, n) = -1.0;
    bp.b(i) = rows[i].second;
  }
  bp.A(m, n) = -1.0;
  bp.b(m) = 1.0;
  RVector x0(n + 1);
  x0.head(n) = 0.5 * (lower + upper);
  double worst = -kInf;
  for (const auto& [a, bi] : rows) worst = std::max(worst, a.dot(x0.head(n)) - bi);
  x0(n) = std::max(worst, -0.5) + 1.0;
  bp.x0 = x0;
  bp.objective = [n](const RVector& y, RVector* g, RMatrix* H) {
    if (g) {
      g->setZero(n + 1);
      (*g)(n) = -1.0;
    }
    if (H) H->setZero(n + 1, n + 1);
    return -y(n);
  };
  bp.early_stop = [n](const RVector& y) { return y(n) < -1e-2; };
  BarrierOptions opt;
  opt.tol = 1e-10;
  opt.max_newton = 400;
  const SolveResult r = barrier_solve(bp, opt);
  if (r.x(n) < -1e-12) return RVector(r.x.head(n));
  return std::nullopt;
}

// ---- lifted parametrization -------------------------------------------------------------

int lifted_dimension(int order) { return order * (order - 1) + 2 * order; }

RVector pack_lifted(const CMatrix& W, const CVector& wbar) {
  const int N = static_cast<int>(W.rows());
  RVector x(lifted_dimension(N));
  int p = 0;
  for (int n = 1; n < N; ++n)
    for (int j = 0; j < n; ++j) {
      x(p++) = W(n, j).real();
      x(p++) = W(n, j).imag();
    }
  for (int j = 0; j < N; ++j) {
    x(p++) = wbar(j).real();
    x(p++) = wbar(j).imag();
  }
  return x;
}

std::pair<CMatrix, CVector> unpack_lifted(int N, const RVector& x) {
  if (x.size() != lifted_dimension(N)) throw DimensionMismatch("unpack_lifted: wrong parameter count");
  CMatrix W = CMatrix::Identity(N, N);
  CVector wbar(N);
  int p = 0;
  for (int n = 1; n < N; ++n)
    for (int j = 0; j < n; ++j) {
      W(n, j) = cdouble(x(p), x(p + 1));
      W(j, n) = std::conj(W(n, j));
      p += 2;
    }
  for (int j = 0; j < N; ++j, p += 2) wbar(j) = cdouble(x(p), x(p + 1));
  return {W, wbar};
}

namespace {

// Re Tr(W A) = beta + a^T x for unit-diagonal Hermitian W and Hermitian A.
std::pair<RVector, double> trace_coefficients(int N, const CMatrix& A) {
  RVector a = RVector::Zero(lifted_dimension(N));
  int p = 0;
  for (int n = 1; n < N; ++n)
    for (int j = 0; j < n; ++j) {
      a(p++) = 2.0 * A(n, j).real();
      a(p++) = 2.0 * A(n, j).imag();
    }
  return {a, A.diagonal().real().sum()};
}

std::vector<LmiBlock> lifted_lmis(int N, int extra_vars) {
  const int n = lifted_dimension(N) + extra_vars;
  const cdouble one(1.0, 0.0), im(0.0, 1.0);
  LmiBlock w_blk{CMatrix::Identity(N, N), std::vector<HermitianDirection>(n)};
  LmiBlock s_blk{CMatrix::Identity(N + 1, N + 1), std::vector<HermitianDirection>(n)};
  int p = 0;
  for (int r = 1; r < N; ++r)
    for (int c = 0; c < r; ++c) {
      HermitianDirection re{{r, c, one}, {c, r, one}};
      HermitianDirection imag{{r, c, im}, {c, r, -im}};
      w_blk.directions[p] = re;
      s_blk.directions[p] = re;
      w_blk.directions[p + 1] = imag;
      s_blk.directions[p + 1] = imag;
      p += 2;
    }
  for (int j = 0; j < N; ++j, p += 2) {
    s_blk.directions[p] = {{j, N, one}, {N, j, one}};
    s_blk.directions[p + 1] = {{j, N, im}, {N, j, -im}};
  }
  return {w_blk, s_blk};
}

struct LinearRows {
  RMatrix A;
  RVector b;
};

// Tr(W A_j) >= rhs_j as normalized rows of A x <= b over the lifted variables.
std::optional<LinearRows> trace_rows(int N, const std::vector<TraceInequality>& ineqs) {
  const int n = lifted_dimension(N);
  std::vector<std::pair<RVector, double>> rows;
  for (const auto& q : ineqs) {
    auto [a, beta] = trace_coefficients(N, q.A);
    const double scale = a.norm() + std::abs(beta) + std::abs(q.rhs);
    if (a.norm() == 0.0) {
      if (beta > q.rhs) continue;
      return std::nullopt;
    }
    rows.emplace_back(-a / scale, (beta - q.rhs) / scale);
  }
  LinearRows out{RMatrix(rows.size(), n), RVector(rows.size())};
  for (std::size_t i = 0; i < rows.size(); ++i) {
    out.A.row(i) = rows[i].first.transpose();
    out.b(i) = rows[i].second;
  }
  return out;
}

}  // namespace

double psd_objective(const PSDConcaveProblem& prob, const CMatrix& W) {
  double f = 0.0;
  for (const auto& term : prob.log_terms) {
    const double arg = (W * term.A).trace().real() + term.offset;
    if (!(arg > 0)) return -kInf;
    f += term.weight * std::log2(arg);
  }
  if (prob.linear.size() > 0) f += (W * prob.linear).trace().real();
  return f;
}

std::optional<std::pair<CMatrix, CVector>> psd_interior_point(int N, const std::vector<TraceInequality>& ineqs) {
  const auto rows = trace_rows(N, ineqs);
  if (!rows) return std::nullopt;
  const int n = lifted_dimension(N);
  if (rows->A.rows() == 0) return std::make_pair(CMatrix(CMatrix::Identity(N, N)), CVector(CVector::Zero(N)));

  // Variables (x, s): rows - s <= b, s >= -1; maximize -s starting from W = I, wbar = 0.
  BarrierProblem bp;
  bp.n = n + 1;
  const Eigen::Index m = rows->A.rows();
  bp.A = RMatrix::Zero(m + 1, n + 1);
  bp.b = RVector::Zero(m + 1);
  bp.A.topLeftCorner(m, n) = rows->A;
  bp.A.col(n).head(m).setConstant(-1.0);
  bp.b.head(m) = rows->b;
  bp.A(m, n) = -1.0;
  bp.b(m) = 1.0;
  bp.lmis = lifted_lmis(N, 1);
  RVector x0 = RVector::Zero(n + 1);
  x0(n) = std::max((-rows->b).maxCoeff(), -0.5) + 1.0;
  bp.x0 = x0;
  bp.objective = [n](const RVector& y, RVector* g, RMatrix* H) {
    if (g) {
      g->setZero(n + 1);
      (*g)(n) = -1.0;
    }
    if (H) H->setZero(n + 1, n + 1);
    return -y(n);
  };
  bp.early_stop = [n](const RVector& y) { return y(n) < -1e-2; };
  BarrierOptions opt;
  opt.tol = 1e-10;
  opt.max_newton = 400;
  const SolveResult r = barrier_solve(bp, opt);
  if (!(r.x(n) < -1e-12)) return std::nullopt;
  return unpack_lifted(N, r.x.head(n));
}

PSDSolution solve_psd_concave(const PSDConcaveProblem& prob, double tol, const BarrierOptions& options) {
  const int N = prob.order;
  if (N < 1 || prob.W0.rows() != N || prob.W0.cols() != N || prob.wbar0.size() != N)
    throw DimensionMismatch("solve_psd_concave: dimension mismatch");
  const int n = lifted_dimension(N);

  struct LogTermX {
    RVector a;
    double beta;
    double weight;
  };
  std::vector<LogTermX> terms;
  for (const auto& t : prob.log_terms) {
    if (t.weight < 0) throw Error("solve_psd_concave: log-term weights must be non-negative");
    auto [a, beta] = trace_coefficients(N, t.A);
    terms.push_back({a, beta + t.offset, t.weight});
  }
  RVector lin = RVector::Zero(n);
  double lin0 = 0.0;
  if (prob.linear.size() > 0) std::tie(lin, lin0) = trace_coefficients(N, prob.linear);

  const auto rows = trace_rows(N, prob.inequalities);
  if (!rows) throw NotStrictlyFeasible("solve_psd_concave: trace inequalities cannot hold");

  BarrierProblem bp;
  bp.n = n;
  bp.A = rows->A;
  bp.b = rows->b;
  bp.lmis = lifted_lmis(N, 0);
  bp.x0 = pack_lifted(prob.W0, prob.wbar0);
  const double inv_ln2 = 1.0 / std::numbers::ln2;
  bp.objective = [terms, lin, lin0, inv_ln2](const RVector& x, RVector* g, RMatrix* H) {
    double f = lin.dot(x) + lin0;
    if (g) *g = lin;
    if (H) H->setZero(x.size(), x.size());
    for (const auto& t : terms) {
      const double arg = t.a.dot(x) + t.beta;
      if (!(arg > 0)) return -kInf;
      f += t.weight * std::log2(arg);
      if (g) *g += (t.weight * inv_ln2 / arg) * t.a;
      if (H) *H -= (t.weight * inv_ln2 / (arg * arg)) * t.a * t.a.transpose();
    }
    return f;
  };
  // Unit-diagonal deviation of W0 would be silently dropped by the parametrization.
  if ((prob.W0.diagonal().array() - cdouble(1.0, 0.0)).abs().maxCoeff() > 1e-9)
    throw NotStrictlyFeasible("solve_psd_concave: W0 must have unit diagonal");

  BarrierOptions opt = options;
  opt.tol = tol;
  const SolveResult r = barrier_solve(bp, opt);
  PSDSolution out;
  std::tie(out.W, out.wbar) = unpack_lifted(N, r.x);
  out.objective = r.objective;
  out.kkt_residual = r.kkt_residual;
  out.newton_steps = r.newton_steps;
  out.path_objective = r.path_objective;
  return out;
}

RMatrix realify(const CMatrix& H) {
  const Eigen::Index m = H.rows(), n = H.cols();
  RMatrix R(2 * m, 2 * n);
  R.topLeftCorner(m, n) = H.real();
  R.topRightCorner(m, n) = -H.imag();
  R.bottomLeftCorner(m, n) = H.imag();
  R.bottomRightCorner(m, n) = H.real();
  return R;
}

CMatrix complexify(const RMatrix& R) {
  const Eigen::Index m = R.rows() / 2, n = R.cols() / 2;
  CMatrix H(m, n);
  H.real() = R.topLeftCorner(m, n);
  H.imag() = R.bottomLeftCorner(m, n);
  return H;
}

}  // namespace irsopt::convex
