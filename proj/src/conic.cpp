#include "evadesos/conic.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <iostream>
#include <limits>
#include <sstream>


namespace evadesos {

void ConicProgram::validate() const {
  if (free_var_count < 0) throw std::invalid_argument("negative free variable count");
  if (static_cast<int>(free_cost.size()) != free_var_count) throw std::invalid_argument("free cost size mismatch");
  auto check_entry = [&](const PsdEntry& e) {
    if (e.block < 0 || e.block >= static_cast<int>(psd_blocks.size())) throw std::invalid_argument("block index out of range");
    const int n = psd_blocks[static_cast<std::size_t>(e.block)];
    if (e.i < 0 || e.j < e.i || e.j >= n) throw std::invalid_argument("PSD entry index out of range");
  };
  for (const auto& e : psd_cost) check_entry(e);
  for (const auto& r : rows) {
    if (r.free.empty() && r.psd.empty()) throw std::invalid_argument("empty equality row");
    for (const auto& [k, v] : r.free) {
      if (k < 0 || k >= free_var_count) throw std::invalid_argument("free variable index out of range");
    }
    for (const auto& e : r.psd) check_entry(e);
  }
}

ConicProgram compile(const SosProgram& prog) {
  ConicProgram cp;
  const auto& vars = prog.vars();
  std::vector<int> free_index(vars.size(), -1);
  for (std::size_t v = 0; v < vars.size(); ++v) {
    if (vars[v].free) {
      free_index[v] = cp.free_var_count++;
      cp.free_to_var.push_back(static_cast<VarId>(v));
    }
  }
  cp.free_cost.assign(static_cast<std::size_t>(cp.free_var_count), 0.0);
  for (const auto& g : prog.blocks()) {
    cp.psd_blocks.push_back(g.side());
    for (int i = 0; i < g.side(); ++i) cp.psd_cost.push_back(PsdEntry{g.matrix_id, i, i, kTracePenalty});
  }
  const auto& zeros = prog.zeros();
  for (std::size_t c = 0; c < zeros.size(); ++c) {
    const auto& e = zeros[c].expr;
    for (const auto& m : e.support()) {
      ConicRow row;
      row.rhs = -e.constant().coefficient(m);
      if (auto it = e.linear().find(m); it != e.linear().end()) {
        for (const auto& [v, a] : it->second) {
          const VarInfo& info = vars[static_cast<std::size_t>(v)];
          if (info.free) {
            row.free.emplace_back(free_index[static_cast<std::size_t>(v)], a);
          } else {
            row.psd.push_back(PsdEntry{info.block, info.i, info.j, a});
          }
        }
      }
      if (row.free.empty() && row.psd.empty()) {
        throw ProgramError("constraint '" + zeros[c].name + "' has a nonzero coefficient on " + m.to_string() +
                           " that no decision variable can cancel");
      }
      cp.rows.push_back(std::move(row));
      cp.origins.push_back(RowOrigin{static_cast<int>(c), m});
    }
  }
  return cp;
}

std::string to_string(SolveStatus s) {
  switch (s) {
    case SolveStatus::Optimal: return "Optimal";
    case SolveStatus::Infeasible: return "Infeasible";
    case SolveStatus::MaxIter: return "MaxIter";
    case SolveStatus::NumericalFailure: return "NumericalFailure";
  }
  return "?";
}

std::string Solution::summary() const {
  std::ostringstream os;
  char buf[64];
  os << "status = " << to_string(status) << "\n";
  os << "iterations = " << iterations << "\n";
  std::snprintf(buf, sizeof buf, "%.6e", primal_residual);
  os << "primal_residual = " << buf << "\n";
  std::snprintf(buf, sizeof buf, "%.6e", dual_residual);
  os << "dual_residual = " << buf << "\n";
  std::snprintf(buf, sizeof buf, "%.10e", objective);
  os << "objective = " << buf << "\n";
  double me = std::numeric_limits<double>::infinity();
  for (double v : min_eigenvalues) me = std::min(me, v);
  std::snprintf(buf, sizeof buf, "%.6e", min_eigenvalues.empty() ? 0.0 : me);
  os << "min_eigenvalue = " << buf << "\n";
  return os.str();
}

double primal_residual(const ConicProgram& cp, const std::vector<double>& free_values,
                       const std::vector<Eigen::MatrixXd>& psd) {
  double r = 0.0;
  for (const auto& row : cp.rows) {
    double s = -row.rhs;
    for (const auto& [k, a] : row.free) s += a * free_values.at(static_cast<std::size_t>(k));
    for (const auto& e : row.psd) s += e.value * psd.at(static_cast<std::size_t>(e.block))(e.i, e.j);
    r = std::max(r, std::abs(s));
  }
  return r;
}

std::vector<double> variable_values(const SosProgram& prog, const ConicProgram& cp, const Solution& sol) {
  std::vector<double> values(static_cast<std::size_t>(prog.var_count()), 0.0);
  for (std::size_t f = 0; f < cp.free_to_var.size(); ++f) {
    values[static_cast<std::size_t>(cp.free_to_var[f])] = sol.free_values.at(f);
  }
  const auto& vars = prog.vars();
  for (std::size_t v = 0; v < vars.size(); ++v) {
    if (!vars[v].free) values[v] = sol.psd_matrices.at(static_cast<std::size_t>(vars[v].block))(vars[v].i, vars[v].j);
  }
  return values;
}

// ---------------------------------------------------------------------------
// Interior point method

namespace {

using Eigen::MatrixXd;
using Eigen::VectorXd;

struct FullEntry {
  int a;
  int b;
  double u;
};

struct BlockRow {
  int row;
  std::vector<FullEntry> e;
};

struct Scaled {
  int m = 0;
  int nf = 0;
  std::vector<int> sizes;
  std::vector<std::vector<std::pair<int, double>>> free_rows;
  std::vector<std::vector<BlockRow>> block_rows;
  VectorXd b;
  VectorXd cf;
  std::vector<MatrixXd> C;
  std::vector<double> row_scale;
};

Scaled scale_program(const ConicProgram& cp) {
  Scaled s;
  s.m = static_cast<int>(cp.rows.size());
  s.nf = cp.free_var_count;
  s.sizes = cp.psd_blocks;
  s.free_rows.resize(static_cast<std::size_t>(s.m));
  s.block_rows.resize(s.sizes.size());
  s.b.resize(s.m);
  s.row_scale.resize(static_cast<std::size_t>(s.m));
  for (int i = 0; i < s.m; ++i) {
    const auto& row = cp.rows[static_cast<std::size_t>(i)];
    double mx = 0.0;
    for (const auto& [k, a] : row.free) mx = std::max(mx, std::abs(a));
    for (const auto& e : row.psd) mx = std::max(mx, std::abs(e.value));
    const double sc = mx > 0.0 ? 1.0 / mx : 1.0;
    s.row_scale[static_cast<std::size_t>(i)] = sc;
    s.b(i) = row.rhs * sc;
    for (const auto& [k, a] : row.free) s.free_rows[static_cast<std::size_t>(i)].emplace_back(k, a * sc);
    // Group this row's PSD entries by block.
    std::vector<std::pair<int, FullEntry>> ents;
    for (const auto& e : row.psd) {
      const double v = e.value * sc;
      if (e.i == e.j) {
        ents.push_back({e.block, FullEntry{e.i, e.i, v}});
      } else {
        ents.push_back({e.block, FullEntry{e.i, e.j, 0.5 * v}});
        ents.push_back({e.block, FullEntry{e.j, e.i, 0.5 * v}});
      }
    }
    std::stable_sort(ents.begin(), ents.end(), [](const auto& x, const auto& y) { return x.first < y.first; });
    for (std::size_t k = 0; k < ents.size();) {
      const int blk = ents[k].first;
      BlockRow br{i, {}};
      while (k < ents.size() && ents[k].first == blk) br.e.push_back(ents[k++].second);
      s.block_rows[static_cast<std::size_t>(blk)].push_back(std::move(br));
    }
  }
  s.cf = Eigen::Map<const VectorXd>(cp.free_cost.data(), s.nf);
  for (int n : s.sizes) s.C.push_back(MatrixXd::Zero(n, n));
  for (const auto& e : cp.psd_cost) {
    auto& C = s.C[static_cast<std::size_t>(e.block)];
    if (e.i == e.j) {
      C(e.i, e.i) += e.value;
    } else {
      C(e.i, e.j) += 0.5 * e.value;
      C(e.j, e.i) += 0.5 * e.value;
    }
  }
  return s;
}

// A(x): row values for free part xf and block matrices X (possibly nonsymmetric).
VectorXd apply_A(const Scaled& P, const VectorXd& xf, const std::vector<MatrixXd>& X) {
  VectorXd r = VectorXd::Zero(P.m);
  if (xf.size() > 0) {
    for (int i = 0; i < P.m; ++i) {
      double s = 0.0;
      for (const auto& [k, a] : P.free_rows[static_cast<std::size_t>(i)]) s += a * xf(k);
      r(i) = s;
    }
  }
  for (std::size_t j = 0; j < P.sizes.size(); ++j) {
    const MatrixXd& Xj = X[j];
    for (const auto& br : P.block_rows[j]) {
      double s = 0.0;
      for (const auto& e : br.e) s += e.u * Xj(e.a, e.b);
      r(br.row) += s;
    }
  }
  return r;
}

// A^*(y) restricted to the PSD blocks.
std::vector<MatrixXd> apply_At_psd(const Scaled& P, const VectorXd& y) {
  std::vector<MatrixXd> out;
  out.reserve(P.sizes.size());
  for (std::size_t j = 0; j < P.sizes.size(); ++j) {
    MatrixXd S = MatrixXd::Zero(P.sizes[j], P.sizes[j]);
    for (const auto& br : P.block_rows[j]) {
      const double yi = y(br.row);
      if (yi == 0.0) continue;
      for (const auto& e : br.e) S(e.a, e.b) += yi * e.u;
    }
    out.push_back(std::move(S));
  }
  return out;
}

VectorXd apply_At_free(const Scaled& P, const VectorXd& y) {
  VectorXd r = VectorXd::Zero(P.nf);
  for (int i = 0; i < P.m; ++i) {
    for (const auto& [k, a] : P.free_rows[static_cast<std::size_t>(i)]) r(k) += a * y(i);
  }
  return r;
}

double inner(const MatrixXd& A, const MatrixXd& B) { return A.cwiseProduct(B).sum(); }

MatrixXd sym(const MatrixXd& A) { return 0.5 * (A + A.transpose()); }

// Largest alpha with X + alpha dX PSD (infinity if unbounded).
double max_step(const MatrixXd& X, const MatrixXd& dX) {
  if (X.rows() == 0) return std::numeric_limits<double>::infinity();
  Eigen::LLT<MatrixXd> llt(X);
  if (llt.info() != Eigen::Success) return 0.0;
  const auto L = llt.matrixL();
  MatrixXd T = L.solve(dX);
  T = L.solve(T.transpose()).transpose();
  Eigen::SelfAdjointEigenSolver<MatrixXd> es(sym(T), Eigen::EigenvaluesOnly);
  const double lmin = es.eigenvalues()(0);
  return lmin >= 0.0 ? std::numeric_limits<double>::infinity() : -1.0 / lmin;
}

double min_eig(const MatrixXd& X) {
  if (X.rows() == 0) return 0.0;
  Eigen::SelfAdjointEigenSolver<MatrixXd> es(X, Eigen::EigenvaluesOnly);
  return es.eigenvalues()(0);
}

class SaddleSolver {
 public:
  SaddleSolver(const MatrixXd& M, const Scaled& P, double reg_y, double reg_x) : P_(P), M_(M), n_(P.m + P.nf) {
    MatrixXd K = MatrixXd::Zero(n_, n_);
    K.topLeftCorner(P.m, P.m) = M.selfadjointView<Eigen::Lower>();
    for (int i = 0; i < P.m; ++i) {
      K(i, i) += reg_y;
      for (const auto& [k, a] : P.free_rows[static_cast<std::size_t>(i)]) {
        K(P.m + k, i) += a;
        K(i, P.m + k) += a;
      }
    }
    for (int k = 0; k < P.nf; ++k) K(P.m + k, P.m + k) = -reg_x;
    lu_.compute(K);
    ok_ = K.allFinite();
  }

  bool ok() const { return ok_; }

  // Solves the unregularized system with iterative refinement.
  void solve(VectorXd& ry, VectorXd& rx) const {
    VectorXd rhs(n_);
    rhs << ry, rx;
    VectorXd sol = lu_.solve(rhs);
    for (int it = 0; it < 3; ++it) {
      const VectorXd res = rhs - multiply(sol);
      if (res.lpNorm<Eigen::Infinity>() <= 1e-15 * (1.0 + rhs.lpNorm<Eigen::Infinity>())) break;
      sol += lu_.solve(res);
    }
    ry = sol.head(P_.m);
    rx = sol.tail(P_.nf);
  }

 private:
  VectorXd multiply(const VectorXd& z) const {
    VectorXd r(n_);
    const VectorXd zy = z.head(P_.m);
    const VectorXd zx = z.tail(P_.nf);
    VectorXd top = M_.selfadjointView<Eigen::Lower>() * zy;
    VectorXd bot = VectorXd::Zero(P_.nf);
    for (int i = 0; i < P_.m; ++i) {
      for (const auto& [k, a] : P_.free_rows[static_cast<std::size_t>(i)]) {
        top(i) += a * zx(k);
        bot(k) += a * zy(i);
      }
    }
    r << top, bot;
    return r;
  }

  const Scaled& P_;
  const MatrixXd& M_;
  int n_;
  Eigen::PartialPivLU<MatrixXd> lu_;
  bool ok_ = true;
};

// Schur complement M_ik = sum_j tr(A_ij X_j A_kj Z_j); lower triangle filled.
MatrixXd schur(const Scaled& P, const std::vector<MatrixXd>& X, const std::vector<MatrixXd>& Z) {
  MatrixXd M = MatrixXd::Zero(P.m, P.m);
  for (std::size_t j = 0; j < P.sizes.size(); ++j) {
    const auto& rows = P.block_rows[j];
    const MatrixXd& Xj = X[j];
    const MatrixXd& Zj = Z[j];
    const int n = P.sizes[j];
    // W_k = X A_k Z as a dense matrix when the row is dense enough, else pairwise.
    for (std::size_t q = 0; q < rows.size(); ++q) {
      const auto& rk = rows[q];
      // T = X A_k Z restricted to what A_i needs: T(b', a') = sum X(b',c) A_k(c,d) Z(d,a').
      // Build XA = X * A_k (n x n sparse columns) then evaluate against A_i entries.
      MatrixXd XA = MatrixXd::Zero(n, n);
      for (const auto& e : rk.e) XA.col(e.b) += e.u * Xj.col(e.a);
      // Only the columns of Z touched by A_i matter; compute W = XA * Z lazily per entry.
      for (std::size_t p = q; p < rows.size(); ++p) {
        const auto& ri = rows[p];
        double s = 0.0;
        // tr(A_i XA Z) = sum_{(a,b,u) in A_i} u * (XA Z)(b, a)
        for (const auto& e : ri.e) s += e.u * XA.row(e.b).dot(Zj.col(e.a));
        const int r1 = std::max(ri.row, rk.row);
        const int r2 = std::min(ri.row, rk.row);
        M(r1, r2) += s;
        if (r1 == r2 && p != q) M(r1, r2) += s;  // never happens: rows distinct within a block
      }
    }
  }
  return M;
}

struct Iterate {
  VectorXd xf;
  std::vector<MatrixXd> X;
  VectorXd y;
  std::vector<MatrixXd> S;
  double tau = 1.0;
  double kappa = 1.0;
};

struct Direction {
  VectorXd dxf;
  std::vector<MatrixXd> dX;
  VectorXd dy;
  std::vector<MatrixXd> dS;
  double dtau = 0.0;
  double dkappa = 0.0;
};

}  // namespace

Solution solve(const ConicProgram& cp, const SolveOptions& opts) {
  cp.validate();
  const Scaled P = scale_program(cp);
  const std::size_t nb = P.sizes.size();
  int nu = 1;
  for (int n : P.sizes) nu += n;

  Iterate it;
  it.xf = VectorXd::Zero(P.nf);
  it.y = VectorXd::Zero(P.m);
  for (int n : P.sizes) {
    it.X.push_back(MatrixXd::Identity(n, n));
    it.S.push_back(MatrixXd::Identity(n, n));
  }

  double cnorm = P.cf.size() ? P.cf.lpNorm<Eigen::Infinity>() : 0.0;
  for (const auto& C : P.C) cnorm = std::max(cnorm, C.size() ? C.cwiseAbs().maxCoeff() : 0.0);

  Solution sol;
  sol.status = SolveStatus::MaxIter;
  auto finish = [&](SolveStatus st, int iters) {
    sol.status = st;
    sol.iterations = iters;
    const double t = it.tau;
    sol.free_values.resize(static_cast<std::size_t>(P.nf));
    for (int k = 0; k < P.nf; ++k) sol.free_values[static_cast<std::size_t>(k)] = it.xf(k) / t;
    sol.psd_matrices.clear();
    sol.min_eigenvalues.clear();
    for (std::size_t j = 0; j < nb; ++j) {
      sol.psd_matrices.push_back(sym(it.X[j]) / t);
      sol.min_eigenvalues.push_back(min_eig(sol.psd_matrices.back()));
    }
    sol.dual.resize(static_cast<std::size_t>(P.m));
    for (int i = 0; i < P.m; ++i) sol.dual[static_cast<std::size_t>(i)] = it.y(i) / t * P.row_scale[static_cast<std::size_t>(i)];
    sol.primal_residual = primal_residual(cp, sol.free_values, sol.psd_matrices);
    double obj = 0.0;
    for (int k = 0; k < P.nf; ++k) obj += P.cf(k) * sol.free_values[static_cast<std::size_t>(k)];
    for (std::size_t j = 0; j < nb; ++j) obj += inner(P.C[j], sol.psd_matrices[j]);
    sol.objective = obj;
    return sol;
  };

  for (int iter = 0; iter <= opts.max_iter; ++iter) {
    // Residuals of the homogeneous model.
    const VectorXd rp = P.b * it.tau - apply_A(P, it.xf, it.X);
    const VectorXd rf = apply_At_free(P, it.y) - P.cf * it.tau;
    std::vector<MatrixXd> R = apply_At_psd(P, it.y);
    for (std::size_t j = 0; j < nb; ++j) R[j] += it.S[j] - P.C[j] * it.tau;
    double cx = P.cf.dot(it.xf);
    for (std::size_t j = 0; j < nb; ++j) cx += inner(P.C[j], it.X[j]);
    const double by = P.b.dot(it.y);
    const double rg = it.kappa + cx - by;
    double xs = it.tau * it.kappa;
    for (std::size_t j = 0; j < nb; ++j) xs += inner(it.X[j], it.S[j]);
    const double mu = xs / nu;

    double dres = rf.size() ? rf.lpNorm<Eigen::Infinity>() : 0.0;
    for (const auto& Rj : R) dres = std::max(dres, Rj.size() ? Rj.cwiseAbs().maxCoeff() : 0.0);
    // Unscaled absolute primal residual: rows were divided by row_scale.
    double pres_rel = 0.0;
    for (int i = 0; i < P.m; ++i) {
      pres_rel = std::max(pres_rel, std::abs(rp(i)) / P.row_scale[static_cast<std::size_t>(i)]);
    }
    pres_rel /= it.tau;
    const double dres_rel = dres / it.tau / (1.0 + cnorm);
    const double gap_rel = std::abs(cx - by) / it.tau / (1.0 + std::abs(cx / it.tau));
    sol.dual_residual = dres / it.tau;

    if (opts.verbose) {
      std::fprintf(stderr, "%3d pres %.2e dres %.2e gap %.2e mu %.2e tau %.2e kappa %.2e\n", iter, pres_rel, dres_rel,
                   gap_rel, mu, it.tau, it.kappa);
    }
    if (!std::isfinite(mu) || !std::isfinite(it.tau)) return finish(SolveStatus::NumericalFailure, iter);
    if (pres_rel < opts.tol && dres_rel < opts.tol && gap_rel < opts.tol) return finish(SolveStatus::Optimal, iter);
    if (it.tau / it.kappa < 1e-6 && by > 0.0) {
      // Farkas certificate check for primal infeasibility: A^* y <= 0, A_f' y = 0, b'y > 0.
      double viol = rf.size() ? (rf + P.cf * it.tau).lpNorm<Eigen::Infinity>() : 0.0;
      for (std::size_t j = 0; j < nb; ++j) {
        const MatrixXd Aty = R[j] - it.S[j] + P.C[j] * it.tau;
        viol = std::max(viol, std::max(0.0, min_eig(-Aty) * -1.0));
      }
      if (viol <= 1e-6 * by || mu < 1e-10) return finish(SolveStatus::Infeasible, iter);
    }
    if (iter == opts.max_iter) break;

    // Factorization shared by predictor and corrector.
    std::vector<MatrixXd> Z(nb);
    for (std::size_t j = 0; j < nb; ++j) {
      Eigen::LLT<MatrixXd> llt(it.S[j]);
      if (llt.info() != Eigen::Success) return finish(SolveStatus::NumericalFailure, iter);
      Z[j] = llt.solve(MatrixXd::Identity(P.sizes[j], P.sizes[j]));
      Z[j] = sym(Z[j]);
    }
    const MatrixXd M = schur(P, it.X, Z);
    double mdiag = 1.0;
    for (int i = 0; i < P.m; ++i) mdiag = std::max(mdiag, M(i, i));
    const SaddleSolver K(M, P, 1e-13 * mdiag, 1e-11);
    if (!K.ok()) return finish(SolveStatus::NumericalFailure, iter);

    std::vector<MatrixXd> XCZ(nb), XRZ(nb);
    double cxcz = 0.0, cxrz = 0.0;
    for (std::size_t j = 0; j < nb; ++j) {
      XCZ[j] = it.X[j] * P.C[j] * Z[j];
      XRZ[j] = it.X[j] * R[j] * Z[j];
      cxcz += inner(P.C[j], XCZ[j]);
      cxrz += inner(P.C[j], XRZ[j]);
    }
    const VectorXd AXCZ = apply_A(P, VectorXd(), XCZ);
    const VectorXd AXRZ = apply_A(P, VectorXd(), XRZ);
    VectorXd u2 = P.b + AXCZ;
    VectorXd v2 = P.cf;
    const VectorXd p2 = u2;
    K.solve(u2, v2);

    auto direction = [&](double eta, double nu_target, const std::vector<MatrixXd>* corr, double corr_tau) {
      Direction d;
      std::vector<MatrixXd> G(nb);
      double cg = 0.0;
      for (std::size_t j = 0; j < nb; ++j) {
        G[j] = nu_target * Z[j] - it.X[j];
        if (corr) G[j] -= sym((*corr)[j]);
        cg += inner(P.C[j], G[j]);
      }
      VectorXd u1 = eta * rp - apply_A(P, VectorXd(), G) - eta * AXRZ;
      VectorXd v1 = -eta * rf;
      K.solve(u1, v1);
      const double cdx0 = P.cf.dot(v1) + cg + (p2 - P.b).dot(u1) + eta * cxrz;
      const double cdx1 = P.cf.dot(v2) + (p2 - P.b).dot(u2) - cxcz;
      const double num = nu_target - it.tau * it.kappa - corr_tau - it.tau * (-eta * rg - cdx0 + P.b.dot(u1));
      const double den = it.kappa + it.tau * (P.b.dot(u2) - cdx1);
      d.dtau = num / den;
      d.dy = u1 + d.dtau * u2;
      d.dxf = v1 + d.dtau * v2;
      d.dS = apply_At_psd(P, d.dy);
      d.dX.resize(nb);
      for (std::size_t j = 0; j < nb; ++j) {
        d.dS[j] = -d.dS[j] + P.C[j] * d.dtau - eta * R[j];
        d.dX[j] = G[j] - sym(it.X[j] * d.dS[j] * Z[j]);
      }
      d.dkappa = (nu_target - it.tau * it.kappa - corr_tau - it.kappa * d.dtau) / it.tau;
      return d;
    };

    auto step_length = [&](const Direction& d) {
      double a = std::numeric_limits<double>::infinity();
      for (std::size_t j = 0; j < nb; ++j) {
        a = std::min(a, max_step(it.X[j], d.dX[j]));
        a = std::min(a, max_step(it.S[j], d.dS[j]));
      }
      if (d.dtau < 0.0) a = std::min(a, -it.tau / d.dtau);
      if (d.dkappa < 0.0) a = std::min(a, -it.kappa / d.dkappa);
      return a;
    };

    // Predictor.
    const Direction pred = direction(1.0, 0.0, nullptr, 0.0);
    const double ap = std::min(1.0, step_length(pred));
    double xs_a = (it.tau + ap * pred.dtau) * (it.kappa + ap * pred.dkappa);
    for (std::size_t j = 0; j < nb; ++j) {
      xs_a += inner(it.X[j] + ap * pred.dX[j], it.S[j] + ap * pred.dS[j]);
    }
    const double sigma = std::clamp(std::pow(std::max(xs_a, 0.0) / xs, 3.0), 0.0, 1.0);

    // Corrector.
    std::vector<MatrixXd> corr(nb);
    for (std::size_t j = 0; j < nb; ++j) corr[j] = pred.dX[j] * pred.dS[j] * Z[j];
    const Direction d = direction(1.0 - sigma, sigma * mu, &corr, pred.dtau * pred.dkappa);
    if (!std::isfinite(d.dtau)) return finish(SolveStatus::NumericalFailure, iter);
    const double amax = step_length(d);
    const double alpha = std::min(1.0, 0.99 * amax);
    if (!(alpha > 1e-12)) return finish(SolveStatus::NumericalFailure, iter);

    it.xf += alpha * d.dxf;
    it.y += alpha * d.dy;
    for (std::size_t j = 0; j < nb; ++j) {
      it.X[j] = sym(it.X[j] + alpha * d.dX[j]);
      it.S[j] = sym(it.S[j] + alpha * d.dS[j]);
    }
    it.tau += alpha * d.dtau;
    it.kappa += alpha * d.dkappa;
    // Rescale the homogeneous iterate when tau and kappa drift large.
    const double scale = std::max(it.tau, it.kappa);
    if (scale > 1e8) {
      it.xf /= scale;
      it.y /= scale;
      for (std::size_t j = 0; j < nb; ++j) {
        it.X[j] /= scale;
        it.S[j] /= scale;
      }
      it.tau /= scale;
      it.kappa /= scale;
    }
  }
  return finish(SolveStatus::MaxIter, opts.max_iter);
}

// ---------------------------------------------------------------------------
// SDPA sparse format

namespace {

std::string fmt17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v == 0.0 ? 0.0 : v);
  return buf;
}

std::vector<std::string> tokens(std::string line) {
  for (char& c : line) {
    if (c == ',' || c == '{' || c == '}' || c == '(' || c == ')') c = ' ';
  }
  std::istringstream is(line);
  std::vector<std::string> out;
  std::string t;
  while (is >> t) out.push_back(t);
  return out;
}

double to_double(const std::string& s, int line) {
  try {
    std::size_t used = 0;
    const double v = std::stod(s, &used);
    if (used == s.size()) return v;
  } catch (const std::exception&) {
  }
  throw ParseError(line, "expected a number, got '" + s + "'");
}

int to_int(const std::string& s, int line) {
  const double v = to_double(s, line);
  if (v != std::floor(v)) throw ParseError(line, "expected an integer, got '" + s + "'");
  return static_cast<int>(v);
}

}  // namespace

std::string export_sdpa(const ConicProgram& cp) {
  cp.validate();
  std::ostringstream os;
  const int nf = cp.free_var_count;
  const int nblocks = static_cast<int>(cp.psd_blocks.size()) + (nf > 0 ? 1 : 0);
  os << cp.rows.size() << "\n" << nblocks << "\n";
  {
    std::string line;
    for (int n : cp.psd_blocks) line += (line.empty() ? "" : " ") + std::to_string(n);
    if (nf > 0) line += (line.empty() ? "" : " ") + std::to_string(-2 * nf);
    os << line << "\n";
  }
  {
    std::string line;
    for (const auto& r : cp.rows) line += (line.empty() ? "" : " ") + fmt17(r.rhs);
    os << line << "\n";
  }
  const int lp_block = static_cast<int>(cp.psd_blocks.size()) + 1;
  auto psd_line = [&](std::size_t k, const PsdEntry& e, double sign) {
    const double v = (e.i == e.j ? e.value : 0.5 * e.value) * sign;
    os << k << " " << e.block + 1 << " " << e.i + 1 << " " << e.j + 1 << " " << fmt17(v) << "\n";
  };
  auto free_lines = [&](std::size_t k, int f, double a) {
    os << k << " " << lp_block << " " << f + 1 << " " << f + 1 << " " << fmt17(a) << "\n";
    os << k << " " << lp_block << " " << nf + f + 1 << " " << nf + f + 1 << " " << fmt17(-a) << "\n";
  };
  // F0 = -objective: SDPA maximizes <F0, Y>.
  for (int f = 0; f < nf; ++f) {
    if (cp.free_cost[static_cast<std::size_t>(f)] != 0.0) free_lines(0, f, -cp.free_cost[static_cast<std::size_t>(f)]);
  }
  for (const auto& e : cp.psd_cost) psd_line(0, e, -1.0);
  for (std::size_t k = 0; k < cp.rows.size(); ++k) {
    for (const auto& e : cp.rows[k].psd) psd_line(k + 1, e, 1.0);
    for (const auto& [f, a] : cp.rows[k].free) free_lines(k + 1, f, a);
  }
  return os.str();
}

ConicProgram import_sdpa(const std::string& text) {
  std::istringstream is(text);
  std::string line;
  int lineno = 0;
  // Header values arrive one logical item per line; comment lines start with * or ".
  std::vector<std::pair<int, std::string>> header;
  std::vector<std::pair<int, std::string>> body;
  while (std::getline(is, line)) {
    ++lineno;
    if (!line.empty() && (line[0] == '*' || line[0] == '"')) continue;
    if (header.size() < 4) {
      header.emplace_back(lineno, line);
    } else if (!tokens(line).empty()) {
      body.emplace_back(lineno, line);
    }
  }
  if (header.size() < 2) throw ParseError(lineno, "truncated SDPA header");
  auto first_int = [](const std::pair<int, std::string>& h) {
    const auto t = tokens(h.second);
    if (t.empty()) throw ParseError(h.first, "missing value");
    return to_int(t[0], h.first);
  };
  const int m = first_int(header[0]);
  const int nblocks = first_int(header[1]);
  std::vector<int> sizes;
  if (nblocks > 0) {
    if (header.size() < 3) throw ParseError(lineno, "missing block structure");
    for (const auto& t : tokens(header[2].second)) sizes.push_back(to_int(t, header[2].first));
    if (static_cast<int>(sizes.size()) != nblocks) throw ParseError(header[2].first, "block count mismatch");
  }
  std::vector<double> c;
  if (m > 0) {
    if (header.size() < 4) throw ParseError(lineno, "missing objective vector");
    for (const auto& t : tokens(header[3].second)) c.push_back(to_double(t, header[3].first));
    if (static_cast<int>(c.size()) != m) throw ParseError(header[3].first, "expected " + std::to_string(m) + " values");
  }

  ConicProgram cp;
  int lp_block = -1;
  std::vector<int> psd_index(sizes.size(), -1);
  for (std::size_t b = 0; b < sizes.size(); ++b) {
    if (sizes[b] < 0) {
      if (lp_block >= 0) throw ParseError(header[2].first, "more than one diagonal block");
      if (sizes[b] % 2 != 0) throw ParseError(header[2].first, "diagonal block must hold split free variables");
      lp_block = static_cast<int>(b);
      cp.free_var_count = -sizes[b] / 2;
    } else {
      psd_index[b] = static_cast<int>(cp.psd_blocks.size());
      cp.psd_blocks.push_back(sizes[b]);
    }
  }
  cp.free_cost.assign(static_cast<std::size_t>(cp.free_var_count), 0.0);
  cp.rows.resize(static_cast<std::size_t>(m));
  for (int k = 0; k < m; ++k) cp.rows[static_cast<std::size_t>(k)].rhs = c[static_cast<std::size_t>(k)];
  const int nf = cp.free_var_count;
  for (const auto& [ln, text_line] : body) {
    const auto t = tokens(text_line);
    if (t.size() != 5) throw ParseError(ln, "expected 'k block i j value'");
    const int k = to_int(t[0], ln);
    const int blk = to_int(t[1], ln) - 1;
    int i = to_int(t[2], ln) - 1;
    int j = to_int(t[3], ln) - 1;
    const double v = to_double(t[4], ln);
    if (k < 0 || k > m) throw ParseError(ln, "constraint index out of range");
    if (blk < 0 || blk >= static_cast<int>(sizes.size())) throw ParseError(ln, "block index out of range");
    if (i > j) std::swap(i, j);
    if (blk == lp_block) {
      if (i != j || i < 0 || i >= 2 * nf) throw ParseError(ln, "bad diagonal-block entry");
      if (i >= nf) continue;  // x- mirrors x+
      if (k == 0) {
        cp.free_cost[static_cast<std::size_t>(i)] = -v;
      } else {
        cp.rows[static_cast<std::size_t>(k - 1)].free.emplace_back(i, v);
      }
      continue;
    }
    const int pb = psd_index[static_cast<std::size_t>(blk)];
    if (i < 0 || j >= sizes[static_cast<std::size_t>(blk)]) throw ParseError(ln, "matrix index out of range");
    const double coef = i == j ? v : 2.0 * v;
    if (k == 0) {
      cp.psd_cost.push_back(PsdEntry{pb, i, j, -coef});
    } else {
      cp.rows[static_cast<std::size_t>(k - 1)].psd.push_back(PsdEntry{pb, i, j, coef});
    }
  }
  return cp;
}

namespace {

// Minimal reader for brace-nested numeric lists.
class BraceReader {
 public:
  BraceReader(const std::vector<std::string>& lines, std::size_t line, std::size_t col)
      : lines_(lines), line_(line), col_(col) {}

  int line_number() const { return static_cast<int>(line_) + 1; }

  char peek() {
    skip();
    if (line_ >= lines_.size()) return '\0';
    return lines_[line_][col_];
  }
  void expect(char c) {
    if (peek() != c) throw ParseError(line_number(), std::string("expected '") + c + "'");
    ++col_;
  }
  double number() {
    skip();
    if (line_ >= lines_.size()) throw ParseError(line_number(), "unexpected end of input");
    const std::string& s = lines_[line_];
    std::size_t end = col_;
    while (end < s.size() && (std::isdigit(static_cast<unsigned char>(s[end])) || s[end] == '-' || s[end] == '+' ||
                              s[end] == '.' || s[end] == 'e' || s[end] == 'E')) {
      ++end;
    }
    if (end == col_) throw ParseError(line_number(), "expected a number");
    const double v = to_double(s.substr(col_, end - col_), line_number());
    col_ = end;
    return v;
  }
  // {a, b, c}
  std::vector<double> vector() {
    expect('{');
    std::vector<double> v;
    while (peek() != '}') {
      v.push_back(number());
      if (peek() == ',') ++col_;
    }
    expect('}');
    return v;
  }

 private:
  void skip() {
    while (line_ < lines_.size()) {
      const std::string& s = lines_[line_];
      while (col_ < s.size() && (std::isspace(static_cast<unsigned char>(s[col_])))) ++col_;
      if (col_ < s.size()) return;
      ++line_;
      col_ = 0;
    }
  }

  const std::vector<std::string>& lines_;
  std::size_t line_;
  std::size_t col_;
};

}  // namespace

Solution import_solution(const std::string& text, const ConicProgram& cp) {
  std::vector<std::string> lines;
  {
    std::istringstream is(text);
    std::string l;
    while (std::getline(is, l)) lines.push_back(l);
  }
  Solution sol;
  sol.status = SolveStatus::NumericalFailure;
  std::size_t xvec_line = lines.size(), ymat_line = lines.size();
  for (std::size_t i = 0; i < lines.size(); ++i) {
    const std::string& l = lines[i];
    if (l.rfind("phase.value", 0) == 0) {
      if (l.find("pdOPT") != std::string::npos) {
        sol.status = SolveStatus::Optimal;
      } else if (l.find("dINF") != std::string::npos || l.find("pUNBD") != std::string::npos) {
        sol.status = SolveStatus::Infeasible;
      }
    } else if (l.rfind("xVec", 0) == 0) {
      xvec_line = i;
    } else if (l.rfind("yMat", 0) == 0) {
      ymat_line = i;
    }
  }
  if (ymat_line == lines.size()) throw ParseError(static_cast<int>(lines.size()), "no yMat section");
  if (xvec_line < lines.size()) {
    BraceReader r(lines, xvec_line + 1, 0);
    sol.dual = r.vector();
    if (sol.dual.size() != cp.rows.size()) throw DimensionError("xVec length does not match the row count");
  }
  const int nf = cp.free_var_count;
  const std::size_t expected_blocks = cp.psd_blocks.size() + (nf > 0 ? 1 : 0);
  BraceReader r(lines, ymat_line + 1, 0);
  r.expect('{');
  std::size_t blk = 0;
  while (r.peek() == '{') {
    if (blk >= expected_blocks) throw DimensionError("solution has more blocks than the program");
    const bool is_lp = blk == cp.psd_blocks.size();
    // Dense block: {{..},{..}}; diagonal block: {..}.
    r.expect('{');
    if (r.peek() == '{') {
      if (is_lp) throw DimensionError("expected the diagonal block of split free variables");
      const int n = cp.psd_blocks[blk];
      Eigen::MatrixXd Q(n, n);
      int row = 0;
      while (r.peek() == '{') {
        const auto v = r.vector();
        if (static_cast<int>(v.size()) != n || row >= n) throw DimensionError("block size mismatch in yMat");
        for (int j = 0; j < n; ++j) Q(row, j) = v[static_cast<std::size_t>(j)];
        ++row;
        if (r.peek() == ',') r.expect(',');
      }
      r.expect('}');
      if (row != n) throw DimensionError("block size mismatch in yMat");
      sol.psd_matrices.push_back(0.5 * (Q + Q.transpose()));
    } else {
      std::vector<double> v;
      while (r.peek() != '}') {
        v.push_back(r.number());
        if (r.peek() == ',') r.expect(',');
      }
      r.expect('}');
      if (!is_lp) {
        // 1x1 PSD blocks may be written as a flat list.
        if (static_cast<int>(v.size()) != cp.psd_blocks[blk] || v.size() != 1) {
          throw DimensionError("block size mismatch in yMat");
        }
        sol.psd_matrices.push_back(Eigen::MatrixXd::Constant(1, 1, v[0]));
      } else {
        if (static_cast<int>(v.size()) != 2 * nf) throw DimensionError("free-variable block size mismatch");
        sol.free_values.resize(static_cast<std::size_t>(nf));
        for (int f = 0; f < nf; ++f) {
          sol.free_values[static_cast<std::size_t>(f)] = v[static_cast<std::size_t>(f)] - v[static_cast<std::size_t>(nf + f)];
        }
      }
    }
    ++blk;
    if (r.peek() == ',') r.expect(',');
  }
  r.expect('}');
  if (blk != expected_blocks) throw DimensionError("solution block count does not match the program");
  if (nf == 0) sol.free_values.clear();
  for (const auto& Q : sol.psd_matrices) sol.min_eigenvalues.push_back(min_eig(Q));
  sol.primal_residual = primal_residual(cp, sol.free_values, sol.psd_matrices);
  double obj = 0.0;
  for (int f = 0; f < nf; ++f) obj += cp.free_cost[static_cast<std::size_t>(f)] * sol.free_values[static_cast<std::size_t>(f)];
  for (const auto& e : cp.psd_cost) obj += e.value * sol.psd_matrices[static_cast<std::size_t>(e.block)](e.i, e.j);
  sol.objective = obj;
  return sol;
}

}  // namespace evadesos
