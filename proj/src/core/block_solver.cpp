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

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>

#include "detmax_internal.hpp"

namespace sinp::detmax {

using detail::constraint_value;
using detail::set_inner;
using detail::set_norm2;

void write_trace_csv(std::ostream& out, const SolverCertificate& cert) {
  out << "stage,iteration,barrier_weight,objective,feasibility,stationarity,gap\n";
  const auto old = out.precision(12);
  for (const auto& r : cert.trace)
    out << r.stage << ',' << r.iteration << ',' << r.barrier_weight << ',' << r.objective << ','
        << r.feasibility << ',' << r.stationarity << ',' << r.gap << '\n';
  out.precision(old);
}

RVector constraint_usage(const std::vector<PowerConstraint>& constraints, const CovarianceSet& q) {
  RVector u(static_cast<Eigen::Index>(constraints.size()));
  for (std::size_t j = 0; j < constraints.size(); ++j) u(static_cast<Eigen::Index>(j)) = constraint_value(constraints[j], q);
  return u;
}

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

// Augmented Lagrangian of the power constraints:
//   f(Q) - 1/(2 rho) sum_j [max(0, l_j + rho (u_j - P_j))^2 - l_j^2].
class AugmentedObjective {
 public:
  explicit AugmentedObjective(const BlockProblem& p) : p_(p) {}

  double value(const CovarianceSet& q, const RVector& lam, double rho, CovarianceSet* grad) const {
    const double f = p_.objective(q, grad);
    if (std::isnan(f)) fail(ErrorCode::Numeric, "objective oracle returned NaN");
    if (f == kNegInf) return kNegInf;
    double pen = 0.0;
    for (std::size_t j = 0; j < p_.constraints.size(); ++j) {
      const double m = std::max(0.0, lam(j) + rho * (constraint_value(p_.constraints[j], q) - p_.constraints[j].bound));
      pen += m * m - lam(j) * lam(j);
      if (grad && m > 0.0)
        for (const auto& t : p_.constraints[j].terms) (*grad)[t.block].diagonal() -= (m * t.weights).cast<cplx>();
    }
    if (grad)
      for (auto& g : *grad) g = linalg::hermitian_part(g);
    return f - pen / (2.0 * rho);
  }

 private:
  const BlockProblem& p_;
};

CovarianceSet projected_step(const CovarianceSet& q, const CovarianceSet& g, double alpha) {
  CovarianceSet out;
  out.reserve(q.size());
  for (std::size_t k = 0; k < q.size(); ++k) out.push_back(linalg::project_psd(q[k] + alpha * g[k]));
  return out;
}

double natural_residual(const CovarianceSet& q, const CovarianceSet& g) {
  const auto step = projected_step(q, g, 1.0);
  double r = 0.0;
  for (std::size_t k = 0; k < q.size(); ++k) r += (step[k] - q[k]).squaredNorm();
  return std::sqrt(r);
}

// Nonmonotone spectral projected gradient on the PSD cone. Returns the
// iteration count; stops at `tol` or when no ascent is possible.
int maximize_on_cone(const AugmentedObjective& phi, const RVector& lam, double rho, double tol,
                     int max_iterations, CovarianceSet& q, CovarianceSet& g, bool& reached) {
  const std::size_t nb = q.size();
  double val = phi.value(q, lam, rho, &g);
  double alpha = 1.0 / std::max(1e-12, std::sqrt(set_norm2(g)));
  CovarianceSet q_prev, g_prev;
  std::vector<double> recent{val};
  reached = false;
  int it = 0;
  for (; it < max_iterations; ++it) {
    if (natural_residual(q, g) <= tol) {
      reached = true;
      break;
    }
    if (!q_prev.empty()) {
      CovarianceSet dq(nb), dg(nb);
      for (std::size_t k = 0; k < nb; ++k) {
        dq[k] = q[k] - q_prev[k];
        dg[k] = g[k] - g_prev[k];
      }
      const double curv = -set_inner(dq, dg);
      alpha = curv > 0.0 ? std::clamp(set_norm2(dq) / curv, 1e-14, 1e14) : alpha * 4.0;
    }
    const double ref = *std::min_element(recent.begin(), recent.end());
    bool accepted = false;
    CovarianceSet q_new, g_new;
    double val_new = kNegInf;
    for (int bt = 0; bt < 80 && !accepted; ++bt, alpha *= 0.5) {
      q_new = projected_step(q, g, alpha);
      g_new = CovarianceSet(nb);
      for (std::size_t k = 0; k < nb; ++k) g_new[k] = CMatrix::Zero(q[k].rows(), q[k].cols());
      val_new = phi.value(q_new, lam, rho, &g_new);
      if (val_new == kNegInf) continue;
      CovarianceSet d(nb);
      for (std::size_t k = 0; k < nb; ++k) d[k] = q_new[k] - q[k];
      accepted = val_new >= ref + 1e-4 * set_inner(g, d);
    }
    if (!accepted) break;  // no ascent possible at machine precision
    q_prev = std::move(q);
    g_prev = std::move(g);
    q = std::move(q_new);
    g = std::move(g_new);
    val = val_new;
    recent.push_back(val);
    if (recent.size() > 10) recent.erase(recent.begin());
  }
  return it;
}

}  // namespace

BlockSolution solve_block_concave(const BlockProblem& problem, const CovarianceSet& warm_start,
                                  const SolverOptions& options) {
  require(static_cast<bool>(problem.objective), "solve_block_concave: missing objective");
  detail::validate_constraints(problem.constraints, problem.block_sizes);
  const std::size_t nb = problem.block_sizes.size();
  const auto& cs = problem.constraints;
  CovarianceSet q = warm_start.empty() ? detail::zeros(problem.block_sizes) : warm_start;
  require(q.size() == nb, "solve_block_concave: warm start has the wrong number of blocks");
  for (std::size_t k = 0; k < nb; ++k)
    require(q[k].rows() == problem.block_sizes[k] && q[k].cols() == problem.block_sizes[k],
            "solve_block_concave: warm start block has the wrong size");
  q = detail::project(q);

  const double pmax = std::max(1.0, detail::max_bound(cs));
  const CovarianceSet warm = q;
  const bool warm_feasible = detail::feasibility_residual(cs, warm) <= options.feasibility_tol * pmax;
  const double f_warm = warm_feasible ? problem.objective(warm, nullptr) : kNegInf;

  SolverCertificate cert;
  cert.method = "projected-gradient-augmented-lagrangian";

  CovarianceSet g = detail::zeros(problem.block_sizes);
  if (problem.objective(q, &g) == kNegInf)
    fail(ErrorCode::InvalidArgument, "solve_block_concave: starting point outside the objective domain");
  const double gscale = std::max(1.0, std::sqrt(set_norm2(g)));
  const double stat_tol = options.stationarity_tol * gscale;
  const double feas_tol = options.feasibility_tol * pmax;

  AugmentedObjective phi(problem);
  RVector lam = RVector::Zero(static_cast<Eigen::Index>(cs.size()));
  double rho = gscale / pmax;
  double inner_tol = std::max(stat_tol, 1e-2 * gscale);
  double last_violation = std::numeric_limits<double>::infinity();
  int total = 0;
  bool converged = false;

  for (int outer = 0; outer < 60; ++outer) {
    bool reached = false;
    total += maximize_on_cone(phi, lam, rho, inner_tol, options.max_iterations, q, g, reached);
    RVector usage = constraint_usage(cs, q);
    double violation = 0.0;
    for (std::size_t j = 0; j < cs.size(); ++j) {
      violation = std::max(violation, usage(j) - cs[j].bound);
      lam(j) = std::max(0.0, lam(j) + rho * (usage(j) - cs[j].bound));
    }
    phi.value(q, lam, rho, &g);
    const double res = natural_residual(q, g);
    if (options.trace)
      cert.trace.push_back({outer, total, rho, problem.objective(q, nullptr), std::max(0.0, violation), res});
    if (violation <= feas_tol && res <= stat_tol && inner_tol <= stat_tol) {
      converged = true;
      break;
    }
    if (!reached && inner_tol <= stat_tol && violation <= feas_tol) break;  // stalled
    if (violation > 0.25 * last_violation && violation > feas_tol) rho *= 10.0;
    last_violation = violation;
    inner_tol = std::max(stat_tol, 0.1 * inner_tol);
  }

  detail::scale_into_bounds(cs, q);
  // Certificate for the original problem with the final multipliers.
  CovarianceSet grad = detail::zeros(problem.block_sizes);
  cert.objective = problem.objective(q, &grad);
  for (std::size_t j = 0; j < cs.size(); ++j)
    for (const auto& t : cs[j].terms) grad[t.block].diagonal() -= (lam(j) * t.weights).cast<cplx>();
  const RVector usage = constraint_usage(cs, q);
  double comp = 0.0;
  for (std::size_t j = 0; j < cs.size(); ++j) comp += lam(j) * std::abs(cs[j].bound - usage(j));
  cert.feasibility_residual = std::max(0.0, detail::feasibility_residual(cs, q));
  cert.stationarity_residual = natural_residual(q, grad);
  cert.duality_gap = comp;
  cert.iterations = total;
  cert.converged = converged;

  if (cert.objective < f_warm) {
    cert.warm_start_kept = true;
    cert.objective = f_warm;
    cert.feasibility_residual = std::max(0.0, detail::feasibility_residual(cs, warm));
    return {warm, std::move(cert)};
  }
  return {std::move(q), std::move(cert)};
}

}  // namespace sinp::detmax
