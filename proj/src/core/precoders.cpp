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

#include "precoders.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include "linalg.hpp"

namespace sinp::precoders {

using clustering::ClusterLayout;
using netgen::ChannelSet;
using rate_model::kLn2;
using rate_model::UtilitySpec;

Strategy parse_strategy(std::string_view name) {
  if (name == "sin") return Strategy::Sin;
  if (name == "zf") return Strategy::Zf;
  if (name == "dpc") return Strategy::Dpc;
  if (name == "myopic-zf") return Strategy::MyopicZf;
  if (name == "noncoop") return Strategy::Noncoop;
  fail(ErrorCode::InvalidArgument, "unknown strategy '" + std::string(name) + "'");
}

std::string_view strategy_name(Strategy s) {
  switch (s) {
    case Strategy::Sin: return "sin";
    case Strategy::Zf: return "zf";
    case Strategy::Dpc: return "dpc";
    case Strategy::MyopicZf: return "myopic-zf";
    case Strategy::Noncoop: return "noncoop";
  }
  return "unknown";
}

bool uses_clusters(Strategy s) { return s == Strategy::Sin || s == Strategy::MyopicZf; }

namespace {

void check_power(const RVector& power, int bases) {
  require(power.size() == bases, "power vector length does not match the number of bases");
  for (Eigen::Index j = 0; j < power.size(); ++j)
    require(power(j) > 0.0 && std::isfinite(power(j)), "base powers must be positive and finite");
}

void check_layout(const ChannelSet& channels, const ClusterLayout& layout) {
  require(layout.num_users() == channels.num_users(), "layout and channels disagree on user count");
  require(layout.base_antennas() == channels.base_antennas, "layout and channels disagree on base antennas");
}

bool weighted_sum(const UtilitySpec& spec) { return spec.kind == UtilitySpec::Kind::WeightedSum; }

std::string join_users(const std::vector<int>& users) {
  std::ostringstream os;
  for (std::size_t n = 0; n < users.size(); ++n) os << (n ? "," : "") << users[n] + 1;
  return os.str();
}

}  // namespace

// ------------------------------------------------------------------ SIN

SinSubproblem::SinSubproblem(const ChannelSet& channels, const ClusterLayout& layout, const RVector& power,
                             const UtilitySpec& spec, const CovarianceSet& qbar)
    : layout_(layout), power_(power), spec_(spec), k_(layout.num_users()) {
  check_layout(channels, layout);
  check_power(power, layout.num_bases());
  spec.validate(k_);
  require(static_cast<int>(qbar.size()) == k_, "linearization point has the wrong number of blocks");
  a_.assign(k_, std::vector<CMatrix>(k_));
  for (int i = 0; i < k_; ++i)
    for (int k = 0; k < k_; ++k) a_[i][k] = layout.restrict_columns(channels.aggregate[i], k);
  offset_.resize(k_);
  for (int i = 0; i < k_; ++i) {
    const auto n = channels.user_antennas[i];
    CMatrix y = CMatrix::Identity(n, n);
    for (int k = 0; k < k_; ++k)
      if (k != i) y += a_[i][k] * qbar[k] * a_[i][k].adjoint();
    y = linalg::hermitian_part(y);
    Eigen::LLT<CMatrix> llt(y);
    yinv_.push_back(linalg::hermitian_part(llt.solve(CMatrix::Identity(n, n))));
    double off = -linalg::logdet_hpd_or_throw(y, "interference covariance");
    for (int k = 0; k < k_; ++k)
      if (k != i) off += linalg::real_inner(yinv_[i], a_[i][k] * qbar[k] * a_[i][k].adjoint());
    offset_(i) = off;
  }
}

RVector SinSubproblem::surrogate_rates(const CovarianceSet& q) const {
  RVector r(k_);
  for (int i = 0; i < k_; ++i) {
    const auto n = yinv_[i].rows();
    CMatrix x = CMatrix::Identity(n, n);
    double penalty = 0.0;
    for (int k = 0; k < k_; ++k) {
      const CMatrix rx = a_[i][k] * q[k] * a_[i][k].adjoint();
      x += rx;
      if (k != i) penalty += linalg::real_inner(yinv_[i], rx);
    }
    const auto ld = linalg::logdet_hpd(linalg::hermitian_part(x));
    r(i) = ld ? (*ld - penalty + offset_(i)) / kLn2 : -std::numeric_limits<double>::infinity();
  }
  return r;
}

std::vector<detmax::PowerConstraint> SinSubproblem::constraints() const {
  std::vector<detmax::PowerConstraint> cs;
  for (int j = 0; j < layout_.num_bases(); ++j) {
    detmax::PowerConstraint c;
    c.bound = power_(j);
    for (int k : layout_.users_of(j)) {
      RVector w = RVector::Zero(layout_.cluster_antennas(k));
      w.segment(layout_.local_offset(k, j), layout_.base_antennas()[j]).setOnes();
      c.terms.push_back({k, std::move(w)});
    }
    if (!c.terms.empty()) cs.push_back(std::move(c));
  }
  return cs;
}

detmax::LogDetProgram SinSubproblem::program() const {
  require(weighted_sum(spec_), "the log-det program form needs a weighted-sum utility");
  detmax::LogDetProgram p;
  for (int k = 0; k < k_; ++k) p.block_sizes.push_back(layout_.cluster_antennas(k));
  p.weights.resize(k_);
  for (int i = 0; i < k_; ++i) {
    p.receiver_dims.push_back(yinv_[i].rows());
    p.weights(i) = spec_.weight(i);
  }
  p.gains = a_;
  for (int k = 0; k < k_; ++k) {
    CMatrix d = CMatrix::Zero(p.block_sizes[k], p.block_sizes[k]);
    for (int i = 0; i < k_; ++i)
      if (i != k && p.weights(i) > 0.0) d += p.weights(i) * a_[i][k].adjoint() * yinv_[i] * a_[i][k];
    p.linear_cost.push_back(linalg::hermitian_part(d));
  }
  p.constraints = constraints();
  return p;
}

detmax::BlockProblem SinSubproblem::block_problem() const {
  detmax::BlockProblem bp;
  for (int k = 0; k < k_; ++k) bp.block_sizes.push_back(layout_.cluster_antennas(k));
  bp.constraints = constraints();
  bp.objective = [this](const CovarianceSet& q, CovarianceSet* grad) {
    const RVector r = surrogate_rates(q);
    for (int i = 0; i < k_; ++i)
      if (spec_.kind == UtilitySpec::Kind::ProportionalFair ? !(r(i) + spec_.rate_floor > 0.0) : !std::isfinite(r(i)))
        return -std::numeric_limits<double>::infinity();
    const double u = rate_model::utility(r, spec_);
    if (grad) {
      const RVector du = rate_model::utility_gradient(r, spec_);
      for (int k = 0; k < k_; ++k) (*grad)[k] = CMatrix::Zero(q[k].rows(), q[k].cols());
      for (int i = 0; i < k_; ++i) {
        const auto n = yinv_[i].rows();
        CMatrix x = CMatrix::Identity(n, n);
        for (int k = 0; k < k_; ++k) x += a_[i][k] * q[k] * a_[i][k].adjoint();
        Eigen::LLT<CMatrix> llt(linalg::hermitian_part(x));
        const CMatrix m = llt.solve(CMatrix::Identity(n, n)) - yinv_[i];
        const double c = du(i) / kLn2;
        for (int k = 0; k < k_; ++k) {
          const CMatrix& a = a_[i][k];
          (*grad)[k] += c * (k == i ? CMatrix(a.adjoint() * llt.solve(a)) : CMatrix(a.adjoint() * m * a));
        }
      }
    }
    return u;
  };
  return bp;
}

StrategyResult sin_precode(const ChannelSet& channels, const ClusterLayout& layout, const RVector& power,
                           const UtilitySpec& spec, const SinOptions& options) {
  check_layout(channels, layout);
  check_power(power, layout.num_bases());
  spec.validate(layout.num_users());
  require(options.epsilon > 0.0, "sin: epsilon must be positive");
  require(options.max_iterations >= 1, "sin: iteration cap must be at least 1");

  const int k = layout.num_users();
  SinState st;
  st.epsilon = options.epsilon;
  for (int i = 0; i < k; ++i) st.qbar.push_back(CMatrix::Zero(layout.cluster_antennas(i), layout.cluster_antennas(i)));
  st.rbar = RVector::Zero(k);
  st.utility_trace.push_back(rate_model::utility(st.rbar, spec));

  StrategyResult out;
  out.label = "sin";
  out.converged = false;
  const int cap = options.iterations > 0 ? std::min(options.iterations, options.max_iterations) : options.max_iterations;
  for (int solve = 0; solve < options.max_iterations + 1; ++solve) {
    SinSubproblem sub(channels, layout, power, spec, st.qbar);
    detmax::BlockSolution sol = weighted_sum(spec)
                                    ? detmax::solve_logdet_program(sub.program(), st.qbar, options.solver)
                                    : detmax::solve_block_concave(sub.block_problem(), st.qbar, options.solver);
    out.certificates.push_back(sol.certificate);
    const RVector rt = sub.surrogate_rates(sol.q);
    const double u = rate_model::utility(rt, spec);
    if (u - st.utility_trace.back() < options.epsilon) {
      out.converged = true;
      break;
    }
    st.qbar = std::move(sol.q);
    st.rbar = rt;
    st.utility_trace.push_back(u);
    ++st.iteration;
    if (st.iteration >= cap) {
      out.converged = options.iterations > 0;
      break;
    }
  }
  if (!out.converged) out.flags.push_back("iteration cap reached before the utility settled");

  out.layout = layout;
  out.report = rate_model::achievable_rates(channels, layout, st.qbar, spec);
  out.q = std::move(st.qbar);
  out.iterations = st.iteration;
  out.utility_trace = std::move(st.utility_trace);
  out.surrogate_utility = out.utility_trace.back();
  out.sum_rate = out.report.rates.sum();
  for (const auto& c : out.certificates)
    if (!c.converged) {
      out.flags.push_back("a subproblem solve did not reach its tolerance");
      break;
    }
  return out;
}

// ------------------------------------------------------------ baselines

StrategyResult zf_fullnet(const ChannelSet& channels, const RVector& power, const UtilitySpec& spec) {
  require(channels.scalar(), "zf: scalar channels required");
  check_power(power, channels.num_bases());
  spec.validate(channels.num_users());
  require(weighted_sum(spec), "zf: only weighted-sum utilities are supported");
  const CMatrix h = channels.scalar_matrix();
  const int k = channels.num_users();
  const int b = channels.num_bases();

  std::vector<int> kept(k);
  std::iota(kept.begin(), kept.end(), 0);
  std::vector<int> dropped;
  auto rows_of = [&](const std::vector<int>& users) {
    CMatrix m(static_cast<Eigen::Index>(users.size()), b);
    for (std::size_t n = 0; n < users.size(); ++n) m.row(static_cast<Eigen::Index>(n)) = h.row(users[n]);
    return m;
  };
  for (;;) {
    const CMatrix hs = rows_of(kept);
    Eigen::JacobiSVD<CMatrix> svd(hs);
    const RVector sv = svd.singularValues();
    const double smax = sv.size() ? sv(0) : 0.0;
    const bool full_rank = !kept.empty() && smax > 0.0 &&
                           sv(sv.size() - 1) > 1e-10 * smax && static_cast<int>(kept.size()) <= b;
    if (full_rank || kept.empty()) break;
    // Drop the weakest remaining user, lowest index first among ties.
    auto weakest = std::min_element(kept.begin(), kept.end(), [&](int a, int c) {
      return h.row(a).squaredNorm() < h.row(c).squaredNorm();
    });
    dropped.push_back(*weakest);
    kept.erase(weakest);
  }

  StrategyResult out;
  out.label = "zf";
  out.layout = clustering::full_coordination(k, channels.base_antennas);
  for (int i = 0; i < k; ++i) out.q.push_back(CMatrix::Zero(b, b));
  if (!dropped.empty()) {
    std::sort(dropped.begin(), dropped.end());
    out.flags.push_back("rank-deficient channel: dropped users " + join_users(dropped));
  }
  if (!kept.empty()) {
    const CMatrix hs = rows_of(kept);
    const CMatrix w = hs.adjoint() * (hs * hs.adjoint()).inverse();  // B x |kept|
    const CMatrix cross = hs * w;
    double leak = 0.0;
    for (Eigen::Index r = 0; r < cross.rows(); ++r)
      for (Eigen::Index c = 0; c < cross.cols(); ++c)
        if (r != c) leak = std::max(leak, std::abs(cross(r, c)));
    if (leak > 1e-9 * cross.diagonal().cwiseAbs().maxCoeff())
      fail(ErrorCode::Numeric, "zf: residual cross-talk " + std::to_string(leak) + " exceeds tolerance");
    RVector wts(static_cast<Eigen::Index>(kept.size()));
    for (std::size_t n = 0; n < kept.size(); ++n) wts(static_cast<Eigen::Index>(n)) = spec.weight(kept[n]);
    const auto zp = detmax::solve_zf_power(w.cwiseAbs2(), power, wts);
    out.certificates.push_back(zp.certificate);
    out.converged = zp.certificate.converged;
    for (std::size_t n = 0; n < kept.size(); ++n) {
      const CVector col = w.col(static_cast<Eigen::Index>(n));
      out.q[kept[n]] = zp.gamma(static_cast<Eigen::Index>(n)) * col * col.adjoint();
    }
  }
  out.report = rate_model::achievable_rates(channels, out.layout, out.q, spec);
  out.sum_rate = out.report.rates.sum();
  return out;
}

StrategyResult dpc_bound(const ChannelSet& channels, const RVector& power) {
  require(channels.scalar(), "dpc: scalar channels required");
  check_power(power, channels.num_bases());
  const CMatrix h = channels.scalar_matrix();
  const auto sol = detmax::solve_dpc_minimax({h.transpose(), power});
  StrategyResult out;
  out.label = "dpc";
  out.iterations = sol.iterations;
  out.converged = sol.converged && sol.saddle_verified;
  out.sum_rate = sol.sum_rate_bits;
  out.report.utility = sol.sum_rate_bits;
  out.report.base_power = power;
  return out;
}

StrategyResult noncoop(const ChannelSet& channels, const std::vector<int>& serving, const RVector& power,
                       const UtilitySpec& spec) {
  check_power(power, channels.num_bases());
  require(static_cast<int>(serving.size()) == channels.num_users(), "noncoop: one serving base per user required");
  spec.validate(channels.num_users());
  StrategyResult out;
  out.label = "noncoop";
  out.layout = clustering::single_base(serving, channels.base_antennas);
  for (int i = 0; i < channels.num_users(); ++i) {
    const int j = serving[i];
    const auto m = channels.base_antennas[j];
    const double share = power(j) / static_cast<double>(out.layout.users_of(j).size());
    out.q.push_back(CMatrix::Identity(m, m) * (share / static_cast<double>(m)));
  }
  out.report = rate_model::achievable_rates(channels, out.layout, out.q, spec);
  out.sum_rate = out.report.rates.sum();
  return out;
}

StrategyResult myopic_zf(const ChannelSet& channels, const ClusterLayout& layout, const std::vector<int>& serving,
                         const RVector& power, double outage, const UtilitySpec& spec) {
  require(channels.scalar(), "myopic-zf: scalar channels required");
  check_layout(channels, layout);
  check_power(power, layout.num_bases());
  require(outage >= 0.0 && outage < 1.0, "myopic-zf: outage fraction must lie in [0, 1)");
  spec.validate(layout.num_users());
  const int k = layout.num_users();

  // Outage: the lowest non-cooperative rates are not served.
  const RVector nc = noncoop(channels, serving, power).report.rates;
  std::vector<int> order(k);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) { return nc(a) < nc(b); });
  const int n_out = static_cast<int>(std::floor(outage * k + 1e-9));
  std::vector<bool> served(k, true);
  std::vector<int> outaged(order.begin(), order.begin() + n_out);
  for (int i : outaged) served[i] = false;

  std::vector<std::vector<int>> active_of(layout.num_bases());
  for (int j = 0; j < layout.num_bases(); ++j)
    for (int i : layout.users_of(j))
      if (served[i]) active_of[j].push_back(i);

  StrategyResult out;
  out.label = "myopic-zf";
  out.layout = layout;
  std::vector<int> mrt;
  for (int i = 0; i < k; ++i) {
    const auto m = layout.cluster_antennas(i);
    out.q.push_back(CMatrix::Zero(m, m));
    if (!served[i]) continue;
    const CMatrix a = layout.restrict_columns(channels.aggregate[i], i);  // 1 x M_i

    std::vector<int> candidates;
    for (int j : layout.cluster(i))
      for (int u : active_of[j])
        if (u != i && std::find(candidates.begin(), candidates.end(), u) == candidates.end()) candidates.push_back(u);
    std::sort(candidates.begin(), candidates.end());
    std::vector<double> strength;
    for (int u : candidates) strength.push_back(layout.restrict_columns(channels.aggregate[u], i).squaredNorm());
    std::vector<int> idx(candidates.size());
    std::iota(idx.begin(), idx.end(), 0);
    std::stable_sort(idx.begin(), idx.end(), [&](int x, int y) { return strength[x] > strength[y]; });
    const std::size_t n_null = std::min(candidates.size(), layout.cluster(i).size() - 1);

    CVector v = a.adjoint();
    if (n_null > 0) {
      CMatrix x(static_cast<Eigen::Index>(n_null), m);
      for (std::size_t n = 0; n < n_null; ++n)
        x.row(static_cast<Eigen::Index>(n)) = layout.restrict_columns(channels.aggregate[candidates[idx[n]]], i);
      const CMatrix proj = CMatrix::Identity(m, m) - x.completeOrthogonalDecomposition().pseudoInverse() * x;
      const CVector vn = proj * a.adjoint();
      if (vn.norm() > 1e-9 * a.norm()) v = vn;
      else mrt.push_back(i);
    }
    if (v.norm() == 0.0) continue;
    double p = std::numeric_limits<double>::infinity();
    for (int j : layout.cluster(i)) {
      const double e = v.segment(layout.local_offset(i, j), layout.base_antennas()[j]).squaredNorm();
      if (e > 0.0) p = std::min(p, power(j) / static_cast<double>(active_of[j].size()) / e);
    }
    if (std::isfinite(p)) out.q.back() = p * v * v.adjoint();
  }
  if (!outaged.empty()) {
    std::sort(outaged.begin(), outaged.end());
    out.flags.push_back("outage: users " + join_users(outaged));
  }
  if (!mrt.empty()) out.flags.push_back("no null space, matched filter used: users " + join_users(mrt));
  out.report = rate_model::achievable_rates(channels, layout, out.q, spec);
  out.sum_rate = out.report.rates.sum();
  return out;
}

// ------------------------------------------------------------- dispatch

StrategyResult evaluate(Strategy strategy, const StrategyInput& in) {
  require(in.channels != nullptr, "evaluate: channels missing");
  switch (strategy) {
    case Strategy::Sin:
      require(in.layout != nullptr, "evaluate: sin needs a cluster layout");
      return sin_precode(*in.channels, *in.layout, in.power, in.spec, in.sin);
    case Strategy::Zf:
      return zf_fullnet(*in.channels, in.power, in.spec);
    case Strategy::Dpc:
      return dpc_bound(*in.channels, in.power);
    case Strategy::MyopicZf:
      require(in.layout != nullptr, "evaluate: myopic-zf needs a cluster layout");
      return myopic_zf(*in.channels, *in.layout, in.serving, in.power, in.outage, in.spec);
    case Strategy::Noncoop:
      return noncoop(*in.channels, in.serving, in.power, in.spec);
  }
  fail(ErrorCode::InvalidArgument, "evaluate: unknown strategy");
}

}  // namespace sinp::precoders
