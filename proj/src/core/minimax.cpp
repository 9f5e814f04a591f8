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

// Saddle point of
//
//   min_q max_s  ln det(sum_i s_i h_i h_i^H + diag(q)) - sum_j ln q_j
//   s >= 0, sum_i s_i <= S;   q > 0, sum_j q_j P_j <= S;   S = sum_j P_j.
//
// f is concave in s and convex in q. Each player's constraints get a log
// barrier weighted 1/t and the saddle of the barrier function is tracked
// by Newton's method on its stationarity system as t grows.

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include <Eigen/LU>

#include "detmax_solver.hpp"
#include "linalg.hpp"

namespace sinp::detmax {

double minimax_objective(const CMatrix& h, const RVector& s, const RVector& q) {
  CMatrix m = h * s.cast<cplx>().asDiagonal() * h.adjoint();
  m.diagonal() += q.cast<cplx>();
  const auto ld = linalg::logdet_hpd(linalg::hermitian_part(m));
  if (!ld || !(q.array() > 0.0).all()) return std::numeric_limits<double>::quiet_NaN();
  return *ld - q.array().log().sum();
}

namespace {

struct SaddleState {
  RVector gs, gq;  // gradient of the barrier function
  RMatrix jac;     // full (K + B) Jacobian of the gradient
};

class SaddleBarrier {
 public:
  SaddleBarrier(const CMatrix& h, const RVector& p) : h_(h), p_(p), total_(p.sum()) {}

  bool in_domain(const RVector& s, const RVector& q) const {
    if (!(s.array() > 0.0).all() || !(q.array() > 0.0).all()) return false;
    if (!(total_ - s.sum() > 0.0) || !(total_ - q.dot(p_) > 0.0)) return false;
    CMatrix m = h_ * s.cast<cplx>().asDiagonal() * h_.adjoint();
    m.diagonal() += q.cast<cplx>();
    return Eigen::LLT<CMatrix>(linalg::hermitian_part(m)).info() == Eigen::Success;
  }

  void evaluate(const RVector& s, const RVector& q, double t, bool jacobian, SaddleState& st) const {
    const auto k = s.size();
    const auto b = q.size();
    CMatrix m = h_ * s.cast<cplx>().asDiagonal() * h_.adjoint();
    m.diagonal() += q.cast<cplx>();
    Eigen::LLT<CMatrix> llt(linalg::hermitian_part(m));
    const CMatrix minv = linalg::hermitian_part(llt.solve(CMatrix::Identity(b, b)));
    const CMatrix g = minv * h_;          // B x K
    const CMatrix c = h_.adjoint() * g;   // K x K, h_i^H M^-1 h_l
    const double ss = total_ - s.sum();
    const double qs = total_ - q.dot(p_);

    st.gs.resize(k);
    for (Eigen::Index i = 0; i < k; ++i) st.gs(i) = t * c(i, i).real() + 1.0 / s(i) - 1.0 / ss;
    st.gq.resize(b);
    for (Eigen::Index j = 0; j < b; ++j) st.gq(j) = t * (minv(j, j).real() - 1.0 / q(j)) + p_(j) / qs;
    if (!jacobian) return;

    st.jac.resize(k + b, k + b);
    st.jac.topLeftCorner(k, k) = -t * c.cwiseAbs2();
    st.jac.topLeftCorner(k, k).diagonal() -= s.cwiseAbs2().cwiseInverse();
    st.jac.topLeftCorner(k, k).array() -= 1.0 / (ss * ss);
    const RMatrix sq = -t * g.cwiseAbs2().transpose();  // K x B
    st.jac.topRightCorner(k, b) = sq;
    st.jac.bottomLeftCorner(b, k) = sq.transpose();
    RMatrix qq = -t * minv.cwiseAbs2();
    qq.diagonal() += t * q.cwiseAbs2().cwiseInverse();
    qq += p_ * p_.transpose() / (qs * qs);
    st.jac.bottomRightCorner(b, b) = qq;
  }

  // Stationarity residual in relative units.
  static double residual(const RVector& s, const RVector& q, const SaddleState& st) {
    return std::sqrt(s.cwiseProduct(st.gs).squaredNorm() + q.cwiseProduct(st.gq).squaredNorm());
  }

 private:
  const CMatrix& h_;
  const RVector& p_;
  double total_;
};

}  // namespace

MinimaxSolution solve_dpc_minimax(const MinimaxProblem& problem) {
  const CMatrix& h = problem.channel_vectors;
  const RVector& p = problem.power;
  const auto b = h.rows();
  const auto k = h.cols();
  require(b > 0 && k > 0, "dpc minimax: empty channel matrix");
  require(p.size() == b, "dpc minimax: power vector length does not match bases");
  require((p.array() > 0.0).all() && p.allFinite(), "dpc minimax: powers must be positive");
  require(h.allFinite(), "dpc minimax: channel is not finite");
  const double total = p.sum();

  MinimaxSolution out;
  if (h.cwiseAbs().maxCoeff() == 0.0) {
    out.s = RVector::Zero(k);
    out.q = RVector::Ones(b);
    out.converged = true;
    out.saddle_verified = true;
    return out;
  }

  RVector s = RVector::Constant(k, 0.5 * total / static_cast<double>(k));
  RVector q = RVector::Constant(b, 0.5);
  const SaddleBarrier bar(h, p);
  const double nu = static_cast<double>(k + 2);
  double t = 1.0;
  SaddleState st;
  int iters = 0;
  bool converged = false;

  for (int stage = 0; stage < 40; ++stage) {
    for (int it = 0; it < 100; ++it) {
      bar.evaluate(s, q, t, true, st);
      const double r0 = SaddleBarrier::residual(s, q, st);
      if (r0 <= 1e-6) break;  // centred well below the barrier gap
      RVector rhs(k + b);
      rhs << -st.gs, -st.gq;
      const RVector d = Eigen::PartialPivLU<RMatrix>(st.jac).solve(rhs);
      const RVector ds = d.head(k), dq = d.tail(b);
      ++iters;
      if (std::max(ds.cwiseQuotient(s).cwiseAbs().maxCoeff(), dq.cwiseQuotient(q).cwiseAbs().maxCoeff()) < 1e-12)
        break;
      double step = 1.0;
      bool moved = false;
      for (int bt = 0; bt < 50; ++bt, step *= 0.5) {
        const RVector s1 = s + step * ds, q1 = q + step * dq;
        if (!bar.in_domain(s1, q1)) continue;
        SaddleState trial;
        bar.evaluate(s1, q1, t, false, trial);
        if (SaddleBarrier::residual(s1, q1, trial) <= (1.0 - 1e-4 * step) * r0) {
          s = s1;
          q = q1;
          moved = true;
          break;
        }
      }
      if (!moved || step < 1e-8) break;  // residual at its rounding floor
    }
    const double f = minimax_objective(h, s, q);
    if (nu / t <= problem.tol * std::max(1.0, std::abs(f))) {
      converged = true;
      break;
    }
    t *= 10.0;
  }

  out.s = s;
  out.q = q;
  out.value_nats = minimax_objective(h, s, q);
  out.sum_rate_bits = out.value_nats / std::log(2.0);
  out.iterations = iters;
  out.converged = converged;

  // Unilateral deviations towards vertices and the centre of each player's
  // feasible set.
  const double f0 = out.value_nats;
  double worst = 0.0;
  std::vector<RVector> s_targets, q_targets;
  for (Eigen::Index i = 0; i < k; ++i) s_targets.push_back(RVector::Unit(k, i) * total);
  s_targets.push_back(RVector::Constant(k, total / static_cast<double>(k)));
  q_targets.push_back(RVector::Ones(b));
  for (Eigen::Index j = 0; j < b; ++j) {
    RVector v = RVector::Constant(b, 0.5 * total / p.sum());
    v(j) += 0.5 * total / p(j);
    q_targets.push_back(v * (1.0 - 1e-9));
  }
  for (double delta : {1e-4, 1e-2, 0.3, 1.0}) {
    for (const auto& v : s_targets)
      worst = std::max(worst, minimax_objective(h, (1.0 - delta) * s + delta * v, q) - f0);
    if (delta < 1.0)
      for (const auto& v : q_targets) {
        const double fq = minimax_objective(h, s, (1.0 - delta) * q + delta * v);
        if (std::isfinite(fq)) worst = std::max(worst, f0 - fq);
      }
  }
  out.worst_deviation = worst;
  const double allowed = std::max(1e-7 * std::max(1.0, std::abs(f0)), 10.0 * nu / t);
  out.saddle_verified = converged && worst <= allowed;
  if (!out.saddle_verified) {
    std::ostringstream os;
    os << "dpc minimax: saddle not certified (value " << f0 << ", worst unilateral gain " << worst
       << ", allowed " << allowed << ", converged " << converged << ")";
    fail(ErrorCode::NotConverged, os.str());
  }
  return out;
}

}  // namespace sinp::detmax
