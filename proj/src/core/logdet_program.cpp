// Copyright 2026 The sinprecode Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Newton barrier method on the Lagrange dual of
//
//   max  sum_i w_i ln det(I + sum_k A_ik Q_k A_ik^H) - sum_k tr(D_k Q_k)
//   s.t. sum_k tr(G_jk Q_k) <= P_j,  Q_k >= 0,       G_jk diagonal.
//
// Dual:
//
//   min  sum_i [w_i ln det(w_i X_i^-1) - w_i N_i + tr X_i] + sum_j l_j P_j
//   s.t. F_k = sum_j l_j G_jk + D_k - sum_i A_ik^H X_i A_ik >= 0,  l >= 0.
//
// The barrier t * dual - sum_k ln det F_k - sum_j ln l_j is minimized for an
// increasing sequence of t. At its minimizer Q_k = F_k^-1 / t is primal
// feasible with constraint slack 1 / (t l_j), so each stage yields a
// feasible primal point and a certified gap.

#include <algorithm>
#include <cmath>
#include <limits>

#include "detmax_internal.hpp"

namespace sinp::detmax {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

// Real coordinates of n x n Hermitian matrices: diagonal entries, then for
// each p < q the symmetric pair E_pq + E_qp and the skew pair
// i (E_pq - E_qp).
class HermitianBasis {
 public:
  explicit HermitianBasis(Eigen::Index n) : n_(n) {
    for (Eigen::Index p = 0; p < n; ++p) entries_.push_back({p, p, 0});
    for (Eigen::Index p = 0; p < n; ++p)
      for (Eigen::Index q = p + 1; q < n; ++q) {
        entries_.push_back({p, q, 1});
        entries_.push_back({p, q, 2});
      }
  }

  int size() const { return static_cast<int>(entries_.size()); }
  Eigen::Index dim() const { return n_; }

  CMatrix element(int a) const {
    CMatrix b = CMatrix::Zero(n_, n_);
    const auto& e = entries_[a];
    if (e.kind == 0) {
      b(e.p, e.p) = 1.0;
    } else if (e.kind == 1) {
      b(e.p, e.q) = 1.0;
      b(e.q, e.p) = 1.0;
    } else {
      b(e.p, e.q) = cplx(0.0, 1.0);
      b(e.q, e.p) = cplx(0.0, -1.0);
    }
    return b;
  }

  /// Re tr(B_a x) for any square x.
  double coord(const CMatrix& x, int a) const {
    const auto& e = entries_[a];
    if (e.kind == 0) return x(e.p, e.p).real();
    if (e.kind == 1) return x(e.q, e.p).real() + x(e.p, e.q).real();
    return x(e.p, e.q).imag() - x(e.q, e.p).imag();
  }

  void decompose(const CMatrix& x, double* y) const {
    for (int a = 0; a < size(); ++a) {
      const auto& e = entries_[a];
      y[a] = e.kind == 0 ? x(e.p, e.p).real() : e.kind == 1 ? x(e.p, e.q).real() : x(e.p, e.q).imag();
    }
  }

  CMatrix compose(const double* y) const {
    CMatrix x = CMatrix::Zero(n_, n_);
    for (int a = 0; a < size(); ++a) {
      const auto& e = entries_[a];
      if (e.kind == 0) {
        x(e.p, e.p) += y[a];
      } else if (e.kind == 1) {
        x(e.p, e.q) += y[a];
        x(e.q, e.p) += y[a];
      } else {
        x(e.p, e.q) += cplx(0.0, y[a]);
        x(e.q, e.p) -= cplx(0.0, y[a]);
      }
    }
    return x;
  }

 private:
  struct Entry {
    Eigen::Index p, q;
    int kind;
  };
  Eigen::Index n_;
  std::vector<Entry> entries_;
};

struct Evaluation {
  double dual = 0.0;     // dual objective
  double barrier = 0.0;  // t * dual + barrier terms
  RVector grad;
  RMatrix hess;
  std::vector<CMatrix> finv;
};

class DualBarrier {
 public:
  explicit DualBarrier(const LogDetProgram& p) : p_(p) {
    int off = 0;
    for (int i = 0; i < p.num_receivers(); ++i) {
      if (!(p.weights(i) > 0.0)) continue;
      active_.push_back(i);
      basis_.emplace_back(p.receiver_dims[i]);
      xi_offset_.push_back(off);
      off += basis_.back().size();
    }
    lam_offset_ = off;
    for (std::size_t j = 0; j < p.constraints.size(); ++j) {
      bool used = false;
      for (const auto& t : p.constraints[j].terms) used = used || t.weights.maxCoeff() > 0.0;
      if (used) cons_.push_back(static_cast<int>(j));
    }
    dim_ = off + static_cast<int>(cons_.size());

    blocks_.resize(p.num_blocks());
    for (int k = 0; k < p.num_blocks(); ++k) {
      auto& b = blocks_[k];
      for (std::size_t u = 0; u < active_.size(); ++u) {
        const CMatrix& a = p.gains[active_[u]][k];
        if (a.size() == 0 || a.cwiseAbs().maxCoeff() == 0.0) continue;
        b.users.push_back(static_cast<int>(u));
        b.row_off.push_back(b.rows);
        b.rows += a.rows();
      }
      b.stacked.resize(b.rows, p.block_sizes[k]);
      for (std::size_t n = 0; n < b.users.size(); ++n) {
        const CMatrix& a = p.gains[active_[b.users[n]]][k];
        b.stacked.middleRows(b.row_off[n], a.rows()) = a;
      }
      for (std::size_t c = 0; c < cons_.size(); ++c)
        for (const auto& t : p.constraints[cons_[c]].terms)
          if (t.block == k && t.weights.maxCoeff() > 0.0) b.cons.push_back({static_cast<int>(c), &t.weights});
    }
  }

  int dim() const { return dim_; }
  bool empty() const { return active_.empty(); }
  double barrier_parameter() const {
    double nu = static_cast<double>(cons_.size());
    for (auto m : p_.block_sizes) nu += static_cast<double>(m);
    return nu;
  }
  double min_weight() const {
    double w = std::numeric_limits<double>::infinity();
    for (int i : active_) w = std::min(w, p_.weights(i));
    return w;
  }

  /// Dual point matched to the primal point q0: Xi_i = w_i (I + sum_k A_ik Q_k A_ik^H)^-1,
  /// with multipliers large enough for F_k > 0.
  RVector initial_point(const CovarianceSet& q0) const {
    RVector y = RVector::Zero(dim_);
    for (std::size_t u = 0; u < active_.size(); ++u) {
      const int i = active_[u];
      const auto n = basis_[u].dim();
      CMatrix x = CMatrix::Identity(n, n);
      for (int k = 0; k < p_.num_blocks(); ++k) {
        const CMatrix& a = p_.gains[i][k];
        if (a.size() != 0) x += a * q0[k] * a.adjoint();
      }
      const CMatrix xi = linalg::hermitian_part(Eigen::LLT<CMatrix>(linalg::hermitian_part(x)).solve(CMatrix::Identity(n, n)));
      basis_[u].decompose(p_.weights(i) * xi, y.data() + xi_offset_[u]);
    }
    // Smallest multipliers that make every slack matrix comfortably
    // positive definite, floored at the scale w / P.
    for (std::size_t c = 0; c < cons_.size(); ++c)
      y(lam_offset_ + c) = min_weight() / std::max(p_.constraints[cons_[c]].bound, 1e-300);
    RVector base = y;
    base.segment(lam_offset_, static_cast<Eigen::Index>(cons_.size())).setZero();
    for (int k = 0; k < p_.num_blocks(); ++k) {
      const auto& b = blocks_[k];
      if (b.cons.empty()) continue;
      const double deficit = std::max(0.0, -linalg::min_eigenvalue(slack_matrix(base, k)));
      for (const auto& [c, w] : b.cons) {
        double wmin = std::numeric_limits<double>::infinity();
        for (Eigen::Index m = 0; m < w->size(); ++m)
          if ((*w)(m) > 0.0) wmin = std::min(wmin, (*w)(m));
        y(lam_offset_ + c) = std::max(y(lam_offset_ + c), 2.0 * deficit / wmin);
      }
    }
    for (int round = 0; round < 200; ++round) {
      bool ok = true;
      for (int k = 0; k < p_.num_blocks(); ++k) {
        if (Eigen::LLT<CMatrix>(slack_matrix(y, k)).info() == Eigen::Success) continue;
        ok = false;
        for (const auto& bc : blocks_[k].cons) y(lam_offset_ + bc.first) *= 4.0;
      }
      if (ok) return y;
    }
    fail(ErrorCode::Numeric, "logdet program: no strictly feasible dual starting point");
  }

  /// order 0: values only; 1: + gradient; 2: + Hessian.
  bool evaluate(const RVector& y, double t, int order, Evaluation& e) const {
    e.dual = 0.0;
    double bar = 0.0;
    if (order >= 1) e.grad = RVector::Zero(dim_);
    if (order >= 2) e.hess = RMatrix::Zero(dim_, dim_);
    e.finv.assign(static_cast<std::size_t>(p_.num_blocks()), CMatrix());

    for (std::size_t u = 0; u < active_.size(); ++u) {
      const auto& hb = basis_[u];
      const double w = p_.weights(active_[u]);
      const auto n = hb.dim();
      const CMatrix xi = hb.compose(y.data() + xi_offset_[u]);
      Eigen::LLT<CMatrix> llt(xi);
      const auto ld = linalg::logdet_hpd(xi);
      if (llt.info() != Eigen::Success || !ld) return false;
      e.dual += w * static_cast<double>(n) * (std::log(w) - 1.0) - w * *ld + xi.trace().real();
      if (order < 1) continue;
      const CMatrix xinv = llt.solve(CMatrix::Identity(n, n));
      for (int a = 0; a < hb.size(); ++a)
        e.grad(xi_offset_[u] + a) += t * (-w * hb.coord(xinv, a) + (a < n ? 1.0 : 0.0));
      if (order < 2) continue;
      for (int b = 0; b < hb.size(); ++b) {
        const CMatrix tb = xinv * hb.element(b) * xinv;
        for (int a = 0; a < hb.size(); ++a) e.hess(xi_offset_[u] + a, xi_offset_[u] + b) += t * w * hb.coord(tb, a);
      }
    }

    for (std::size_t c = 0; c < cons_.size(); ++c) {
      const double lam = y(lam_offset_ + c);
      if (!(lam > 0.0)) return false;
      e.dual += lam * p_.constraints[cons_[c]].bound;
      bar -= std::log(lam);
      if (order >= 1) e.grad(lam_offset_ + c) += t * p_.constraints[cons_[c]].bound - 1.0 / lam;
      if (order >= 2) e.hess(lam_offset_ + c, lam_offset_ + c) += 1.0 / (lam * lam);
    }

    for (int k = 0; k < p_.num_blocks(); ++k) {
      const auto& b = blocks_[k];
      const CMatrix f = slack_matrix(y, k);
      Eigen::LLT<CMatrix> llt(f);
      const auto ld = linalg::logdet_hpd(f);
      if (llt.info() != Eigen::Success || !ld) return false;
      bar -= *ld;
      if (order < 1) continue;
      const auto m = f.rows();
      CMatrix finv = linalg::hermitian_part(llt.solve(CMatrix::Identity(m, m)));
      const CMatrix v = finv * b.stacked.adjoint();  // m x rows
      const CMatrix mm = b.stacked * v;              // rows x rows
      const RVector fdiag = finv.diagonal().real();
      for (std::size_t n = 0; n < b.users.size(); ++n) {
        const int u = b.users[n];
        const auto& hb = basis_[u];
        const CMatrix muu = mm.block(b.row_off[n], b.row_off[n], hb.dim(), hb.dim());
        for (int a = 0; a < hb.size(); ++a) e.grad(xi_offset_[u] + a) += hb.coord(muu, a);
      }
      for (const auto& [c, w] : b.cons) e.grad(lam_offset_ + c) -= w->dot(fdiag);

      if (order >= 2) {
        for (std::size_t n1 = 0; n1 < b.users.size(); ++n1) {
          const int u1 = b.users[n1];
          const auto& h1 = basis_[u1];
          for (std::size_t n2 = 0; n2 < b.users.size(); ++n2) {
            const int u2 = b.users[n2];
            const auto& h2 = basis_[u2];
            if (h1.dim() == 1 && h2.dim() == 1) {
              e.hess(xi_offset_[u1], xi_offset_[u2]) += std::norm(mm(b.row_off[n1], b.row_off[n2]));
              continue;
            }
            const CMatrix m12 = mm.block(b.row_off[n1], b.row_off[n2], h1.dim(), h2.dim());
            const CMatrix m21 = mm.block(b.row_off[n2], b.row_off[n1], h2.dim(), h1.dim());
            for (int bb = 0; bb < h2.size(); ++bb) {
              const CMatrix tb = m12 * h2.element(bb) * m21;
              for (int a = 0; a < h1.size(); ++a) e.hess(xi_offset_[u1] + a, xi_offset_[u2] + bb) += h1.coord(tb, a);
            }
          }
          const auto vu = v.middleCols(b.row_off[n1], h1.dim());
          for (const auto& [c, w] : b.cons) {
            const CMatrix wv = vu.adjoint() * w->cast<cplx>().asDiagonal() * vu;
            for (int a = 0; a < h1.size(); ++a) {
              const double h = -h1.coord(wv, a);
              e.hess(xi_offset_[u1] + a, lam_offset_ + c) += h;
              e.hess(lam_offset_ + c, xi_offset_[u1] + a) += h;
            }
          }
        }
        const RMatrix f2 = finv.cwiseAbs2();
        for (const auto& [c1, w1] : b.cons)
          for (const auto& [c2, w2] : b.cons) e.hess(lam_offset_ + c1, lam_offset_ + c2) += w1->dot(f2 * *w2);
      }
      e.finv[k] = std::move(finv);
    }
    e.barrier = t * e.dual + bar;
    return true;
  }

  bool in_domain(const RVector& y) const {
    for (std::size_t u = 0; u < active_.size(); ++u)
      if (Eigen::LLT<CMatrix>(basis_[u].compose(y.data() + xi_offset_[u])).info() != Eigen::Success) return false;
    for (std::size_t c = 0; c < cons_.size(); ++c)
      if (!(y(lam_offset_ + c) > 0.0)) return false;
    for (int k = 0; k < p_.num_blocks(); ++k)
      if (Eigen::LLT<CMatrix>(slack_matrix(y, k)).info() != Eigen::Success) return false;
    return true;
  }

  /// Multiplier of original constraint j (zero for unused constraints).
  RVector multipliers(const RVector& y) const {
    RVector lam = RVector::Zero(static_cast<Eigen::Index>(p_.constraints.size()));
    for (std::size_t c = 0; c < cons_.size(); ++c) lam(cons_[c]) = y(lam_offset_ + c);
    return lam;
  }

 private:
  struct BlockInfo {
    std::vector<int> users;  // positions in active_
    std::vector<Eigen::Index> row_off;
    Eigen::Index rows = 0;
    CMatrix stacked;
    std::vector<std::pair<int, const RVector*>> cons;  // positions in cons_
  };

  CMatrix slack_matrix(const RVector& y, int k) const {
    const auto& b = blocks_[k];
    const auto m = p_.block_sizes[k];
    CMatrix f = CMatrix::Zero(m, m);
    if (!p_.linear_cost.empty() && p_.linear_cost[k].size() != 0) f = p_.linear_cost[k];
    for (const auto& [c, w] : b.cons) f.diagonal() += (y(lam_offset_ + c) * *w).cast<cplx>();
    if (b.rows > 0) {
      CMatrix xr(b.rows, m);
      for (std::size_t n = 0; n < b.users.size(); ++n) {
        const int u = b.users[n];
        const auto nd = basis_[u].dim();
        xr.middleRows(b.row_off[n], nd) =
            basis_[u].compose(y.data() + xi_offset_[u]) * b.stacked.middleRows(b.row_off[n], nd);
      }
      f.noalias() -= b.stacked.adjoint() * xr;
    }
    return linalg::hermitian_part(f);
  }

  const LogDetProgram& p_;
  std::vector<int> active_;
  std::vector<HermitianBasis> basis_;
  std::vector<int> xi_offset_;
  std::vector<int> cons_;
  int lam_offset_ = 0;
  int dim_ = 0;
  std::vector<BlockInfo> blocks_;
};

// Newton direction with symmetric diagonal scaling; falls back to a
// lightly regularized system if the Hessian is numerically indefinite.
RVector newton_direction(const RMatrix& h, const RVector& g) {
  RVector d = h.diagonal().cwiseMax(1e-300).cwiseSqrt().cwiseInverse();
  RMatrix hs = d.asDiagonal() * h * d.asDiagonal();
  hs = 0.5 * (hs + hs.transpose());
  const RVector gs = d.cwiseProduct(g);
  double reg = 0.0;
  for (int attempt = 0; attempt < 12; ++attempt) {
    Eigen::LLT<RMatrix> llt(hs + reg * RMatrix::Identity(hs.rows(), hs.cols()));
    if (llt.info() == Eigen::Success) return -d.cwiseProduct(llt.solve(gs));
    reg = reg == 0.0 ? 1e-14 : reg * 100.0;
  }
  fail(ErrorCode::Numeric, "logdet program: Newton system is singular");
}

}  // namespace

void LogDetProgram::validate() const {
  const int nr = num_receivers();
  const int nb = num_blocks();
  require(weights.size() == nr, "logdet program: weight count does not match receivers");
  for (int i = 0; i < nr; ++i) {
    require(weights(i) >= 0.0 && std::isfinite(weights(i)), "logdet program: weights must be nonnegative");
    require(receiver_dims[i] > 0, "logdet program: receiver dimension must be positive");
  }
  for (auto m : block_sizes) require(m > 0, "logdet program: block size must be positive");
  require(static_cast<int>(gains.size()) == nr, "logdet program: gain rows do not match receivers");
  for (int i = 0; i < nr; ++i) {
    require(static_cast<int>(gains[i].size()) == nb, "logdet program: gain columns do not match blocks");
    for (int k = 0; k < nb; ++k)
      require(gains[i][k].size() == 0 ||
                  (gains[i][k].rows() == receiver_dims[i] && gains[i][k].cols() == block_sizes[k]),
              "logdet program: gain matrix has the wrong shape");
  }
  require(linear_cost.empty() || static_cast<int>(linear_cost.size()) == nb,
          "logdet program: linear cost count does not match blocks");
  for (std::size_t k = 0; k < linear_cost.size(); ++k)
    require(linear_cost[k].size() == 0 ||
                (linear_cost[k].rows() == block_sizes[k] && linear_cost[k].cols() == block_sizes[k]),
            "logdet program: linear cost has the wrong shape");
  detail::validate_constraints(constraints, block_sizes);
  // Every antenna must be power limited, otherwise the program can be unbounded.
  for (int k = 0; k < nb; ++k) {
    RVector cover = RVector::Zero(block_sizes[k]);
    for (const auto& c : constraints)
      for (const auto& t : c.terms)
        if (t.block == k) cover += t.weights;
    for (Eigen::Index m = 0; m < cover.size(); ++m)
      require(cover(m) > 0.0, "logdet program: entry " + std::to_string(m + 1) + " of block " +
                                  std::to_string(k + 1) + " is not covered by any power constraint");
  }
}

double LogDetProgram::objective(const CovarianceSet& q) const {
  double f = 0.0;
  for (int i = 0; i < num_receivers(); ++i) {
    if (!(weights(i) > 0.0)) continue;
    CMatrix x = CMatrix::Identity(receiver_dims[i], receiver_dims[i]);
    for (int k = 0; k < num_blocks(); ++k)
      if (gains[i][k].size() != 0) x += gains[i][k] * q[k] * gains[i][k].adjoint();
    const auto ld = linalg::logdet_hpd(linalg::hermitian_part(x));
    if (!ld) return kNegInf;
    f += weights(i) * *ld;
  }
  for (std::size_t k = 0; k < linear_cost.size(); ++k)
    if (linear_cost[k].size() != 0) f -= linalg::real_inner(linear_cost[k], q[k]);
  return f;
}

CovarianceSet LogDetProgram::gradient(const CovarianceSet& q) const {
  CovarianceSet g = detail::zeros(block_sizes);
  for (int i = 0; i < num_receivers(); ++i) {
    if (!(weights(i) > 0.0)) continue;
    CMatrix x = CMatrix::Identity(receiver_dims[i], receiver_dims[i]);
    for (int k = 0; k < num_blocks(); ++k)
      if (gains[i][k].size() != 0) x += gains[i][k] * q[k] * gains[i][k].adjoint();
    Eigen::LLT<CMatrix> llt(linalg::hermitian_part(x));
    for (int k = 0; k < num_blocks(); ++k)
      if (gains[i][k].size() != 0) g[k] += weights(i) * gains[i][k].adjoint() * llt.solve(gains[i][k]);
  }
  for (std::size_t k = 0; k < linear_cost.size(); ++k)
    if (linear_cost[k].size() != 0) g[k] -= linear_cost[k];
  for (auto& m : g) m = linalg::hermitian_part(m);
  return g;
}

BlockProblem LogDetProgram::as_block_problem() const {
  BlockProblem bp;
  bp.block_sizes = block_sizes;
  bp.constraints = constraints;
  bp.objective = [prog = *this](const CovarianceSet& q, CovarianceSet* grad) {
    const double f = prog.objective(q);
    if (grad && f > kNegInf) *grad = prog.gradient(q);
    return f;
  };
  return bp;
}

BlockSolution solve_logdet_program(const LogDetProgram& program, const CovarianceSet& warm_start,
                                   const SolverOptions& options) {
  program.validate();
  const auto& cs = program.constraints;
  const double pmax = std::max(1.0, detail::max_bound(cs));

  CovarianceSet warm = warm_start.empty() ? detail::zeros(program.block_sizes) : warm_start;
  require(static_cast<int>(warm.size()) == program.num_blocks(),
          "solve_logdet_program: warm start has the wrong number of blocks");
  for (int k = 0; k < program.num_blocks(); ++k)
    require(warm[k].rows() == program.block_sizes[k] && warm[k].cols() == program.block_sizes[k],
            "solve_logdet_program: warm start block has the wrong size");
  warm = detail::project(warm);
  const bool warm_feasible = detail::feasibility_residual(cs, warm) <= options.feasibility_tol * pmax;
  const double f_warm = warm_feasible ? program.objective(warm) : kNegInf;

  SolverCertificate cert;
  cert.method = "dual-newton-barrier";

  DualBarrier dual(program);
  if (dual.empty()) {
    // Nothing to gain; the linear cost is nonnegative on the PSD cone.
    BlockSolution out{detail::zeros(program.block_sizes), std::move(cert)};
    out.certificate.objective = 0.0;
    out.certificate.duality_gap = 0.0;
    out.certificate.converged = true;
    return out;
  }

  // Primal reference for the dual start: the warm start if it carries
  // power, else equal power on every antenna scaled onto the constraints.
  CovarianceSet q0 = warm;
  if (detail::set_norm2(q0) == 0.0) {
    for (int k = 0; k < program.num_blocks(); ++k) q0[k] = CMatrix::Identity(program.block_sizes[k], program.block_sizes[k]);
    double ratio = 0.0;
    for (const auto& c : cs) ratio = std::max(ratio, detail::constraint_value(c, q0) / c.bound);
    for (auto& m : q0) m /= ratio;
  }
  RVector y = dual.initial_point(q0);
  Evaluation ev;
  dual.evaluate(y, 1.0, 0, ev);
  const double nu = dual.barrier_parameter();
  double t = std::max(1.0 / dual.min_weight(), nu / std::max(ev.dual, 1e-12));

  CovarianceSet best;
  double best_primal = kNegInf, best_gap = std::numeric_limits<double>::infinity();
  double min_dual = std::numeric_limits<double>::infinity();
  RVector best_lam;
  int total = 0, stalled = 0;
  const double decay = std::clamp(options.barrier_decay, 1e-6, 0.9);

  bool reached = false;
  for (int stage = 0; stage < 60; ++stage) {
    int it = 0;
    const int cap = std::min(options.max_iterations, reached ? 15 : 100);
    for (; it < cap; ++it) {
      if (!dual.evaluate(y, t, 2, ev))
        fail(ErrorCode::Numeric, "logdet program: iterate left the dual domain");
      const RVector dy = newton_direction(ev.hess, ev.grad);
      const double dec2 = -ev.grad.dot(dy);
      ++total;
      if (!(dec2 > 2e-10)) break;
      // Full steps inside the quadratic region; elsewhere Armijo
      // backtracking on the barrier value.
      const bool quadratic = dec2 <= 0.0625;
      double step = 1.0;
      bool moved = false;
      for (int bt = 0; bt < 40; ++bt, step *= 0.5) {
        if (!dual.in_domain(y + step * dy)) continue;
        Evaluation trial;
        if (quadratic || (dual.evaluate(y + step * dy, t, 0, trial) &&
                          trial.barrier <= ev.barrier - 0.25 * step * dec2)) {
          moved = true;
          break;
        }
      }
      if (!moved) break;
      y += step * dy;
    }
    if (!dual.evaluate(y, t, 1, ev)) fail(ErrorCode::Numeric, "logdet program: iterate left the dual domain");

    CovarianceSet q;
    for (int k = 0; k < program.num_blocks(); ++k) q.push_back(linalg::project_psd(ev.finv[k] / t));
    detail::scale_into_bounds(cs, q);
    const double primal = program.objective(q);
    const double gap = ev.dual - primal;
    if (options.trace)
      cert.trace.push_back({stage, it, 1.0 / t, primal, detail::feasibility_residual(cs, q), 0.0, gap});

    stalled = ev.dual - primal < 0.5 * best_gap ? 0 : stalled + 1;
    min_dual = std::min(min_dual, ev.dual);
    if (primal > best_primal || best.empty()) {
      best = q;
      best_primal = primal;
      best_lam = dual.multipliers(y);
    }
    best_gap = min_dual - best_primal;
    // Keep tightening past the requested gap until rounding stops progress.
    const double scale = std::max(1.0, std::abs(best_primal));
    if (best_gap <= 1e-3 * options.gap_tol * scale) break;
    if (stalled >= (reached ? 1 : 2)) break;
    reached = reached || best_gap <= options.gap_tol * scale;
    t /= decay;
  }

  // Lagrangian stationarity with the dual multipliers.
  CovarianceSet g = program.gradient(best);
  for (std::size_t j = 0; j < cs.size(); ++j)
    for (const auto& term : cs[j].terms) g[term.block].diagonal() -= (best_lam(j) * term.weights).cast<cplx>();
  double stat = 0.0;
  for (int k = 0; k < program.num_blocks(); ++k)
    stat += (linalg::project_psd(best[k] + g[k]) - best[k]).squaredNorm();

  cert.objective = best_primal;
  cert.feasibility_residual = std::max(0.0, detail::feasibility_residual(cs, best));
  cert.stationarity_residual = std::sqrt(stat);
  cert.duality_gap = best_gap;
  cert.iterations = total;
  cert.converged = best_gap <= options.gap_tol * std::max(1.0, std::abs(best_primal)) &&
                   cert.feasibility_residual <= options.feasibility_tol * pmax;

  if (best_primal < f_warm) {
    cert.warm_start_kept = true;
    cert.objective = f_warm;
    cert.feasibility_residual = std::max(0.0, detail::feasibility_residual(cs, warm));
    return {warm, std::move(cert)};
  }
  return {std::move(best), std::move(cert)};
}

// ----------------------------------------------------------------- ZF power

ZfPowerSolution solve_zf_power(const RMatrix& w2, const RVector& power, const RVector& weights,
                               const SolverOptions& options) {
  const auto b = w2.rows();
  const auto k = w2.cols();
  require(power.size() == b, "solve_zf_power: power vector length does not match bases");
  require(weights.size() == k, "solve_zf_power: weight vector length does not match users");
  require((w2.array() >= 0.0).all() && w2.allFinite(), "solve_zf_power: squared magnitudes must be nonnegative");

  ZfPowerSolution out;
  out.gamma = RVector::Zero(k);
  out.unbounded.assign(static_cast<std::size_t>(k), false);

  LogDetProgram prog;
  std::vector<Eigen::Index> user_of_block;
  for (Eigen::Index i = 0; i < k; ++i) {
    if (w2.col(i).maxCoeff() > 0.0) {
      user_of_block.push_back(i);
    } else {
      out.unbounded[i] = true;
      out.gamma(i) = weights(i) > 0.0 ? kUnboundedGammaCap : 0.0;
    }
  }
  const int n = static_cast<int>(user_of_block.size());
  prog.block_sizes.assign(n, 1);
  prog.receiver_dims.assign(n, 1);
  prog.weights.resize(n);
  prog.gains.assign(n, std::vector<CMatrix>(n));
  for (int u = 0; u < n; ++u) {
    prog.weights(u) = weights(user_of_block[u]);
    prog.gains[u][u] = CMatrix::Ones(1, 1);
  }
  for (Eigen::Index j = 0; j < b; ++j) {
    PowerConstraint c;
    c.bound = power(j);
    for (int u = 0; u < n; ++u)
      if (w2(j, user_of_block[u]) > 0.0) c.terms.push_back({u, RVector::Constant(1, w2(j, user_of_block[u]))});
    if (!c.terms.empty()) prog.constraints.push_back(std::move(c));
  }
  if (n > 0) {
    auto sol = solve_logdet_program(prog, {}, options);
    for (int u = 0; u < n; ++u) out.gamma(user_of_block[u]) = std::max(0.0, sol.q[u](0, 0).real());
    out.certificate = std::move(sol.certificate);
  } else {
    out.certificate.method = "dual-newton-barrier";
    out.certificate.converged = true;
    out.certificate.duality_gap = 0.0;
  }
  for (Eigen::Index i = 0; i < k; ++i) out.sum_rate_bits += weights(i) * std::log2(1.0 + out.gamma(i));
  return out;
}

}  // namespace sinp::detmax
