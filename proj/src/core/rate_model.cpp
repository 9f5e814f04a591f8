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

#include "rate_model.hpp"

#include <cmath>
#include <sstream>

#include "linalg.hpp"

namespace sinp::rate_model {

using clustering::ClusterLayout;
using netgen::ChannelSet;

void UtilitySpec::validate(int users) const {
  if (!weights.empty())
    require(static_cast<int>(weights.size()) == users,
            "utility: weight vector length " + std::to_string(weights.size()) +
                " does not match " + std::to_string(users) + " users");
  for (double w : weights) require(w >= 0.0 && std::isfinite(w), "utility: negative weight");
  if (kind == Kind::ProportionalFair) require(rate_floor > 0.0, "utility: rate floor must be positive");
}

std::string UtilitySpec::describe() const {
  std::ostringstream os;
  if (kind == Kind::ProportionalFair) {
    os << "pf:" << rate_floor;
  } else if (weights.empty()) {
    os << "sum";
  } else {
    os << "weighted:";
    for (std::size_t i = 0; i < weights.size(); ++i) os << (i ? "," : "") << weights[i];
  }
  return os.str();
}

UtilitySpec UtilitySpec::parse(const std::string& text) {
  if (text == "sum") return sum_rate();
  if (text == "pf") return proportional_fair();
  auto rest = [&](std::size_t n) { return text.substr(n); };
  try {
    if (text.rfind("pf:", 0) == 0) return proportional_fair(std::stod(rest(3)));
    if (text.rfind("weighted:", 0) == 0) {
      std::vector<double> w;
      std::istringstream is(rest(9));
      std::string item;
      while (std::getline(is, item, ',')) w.push_back(std::stod(item));
      return weighted(std::move(w));
    }
  } catch (const std::exception&) {
    fail(ErrorCode::Parse, "utility: malformed number in '" + text + "'");
  }
  fail(ErrorCode::Parse, "utility: unknown descriptor '" + text + "'");
}

double utility(const RVector& r, const UtilitySpec& spec) {
  spec.validate(static_cast<int>(r.size()));
  double u = 0.0;
  for (Eigen::Index i = 0; i < r.size(); ++i) {
    if (spec.kind == UtilitySpec::Kind::WeightedSum)
      u += spec.weight(static_cast<int>(i)) * r(i);
    else
      u += std::log(r(i) + spec.rate_floor);
  }
  return u;
}

RVector utility_gradient(const RVector& r, const UtilitySpec& spec) {
  RVector g(r.size());
  for (Eigen::Index i = 0; i < r.size(); ++i)
    g(i) = spec.kind == UtilitySpec::Kind::WeightedSum ? spec.weight(static_cast<int>(i))
                                                        : 1.0 / (r(i) + spec.rate_floor);
  return g;
}

CovarianceSet sanitize(const CovarianceSet& q, const ClusterLayout& layout) {
  require(static_cast<int>(q.size()) == layout.num_users(), "covariance count does not match users");
  CovarianceSet out;
  out.reserve(q.size());
  for (int i = 0; i < layout.num_users(); ++i) {
    const CMatrix& qi = q[i];
    require(qi.rows() == layout.cluster_antennas(i) && qi.cols() == qi.rows(),
            "covariance of user " + std::to_string(i + 1) + " has the wrong size");
    if (qi.size() == 0) {
      out.push_back(qi);
      continue;
    }
    if (!qi.allFinite()) fail(ErrorCode::Numeric, "covariance of user " + std::to_string(i + 1) + " is not finite");
    const double scale = std::max(1.0, qi.cwiseAbs().maxCoeff());
    if ((qi - qi.adjoint()).cwiseAbs().maxCoeff() > 1e-12 * scale)
      fail(ErrorCode::Numeric, "covariance of user " + std::to_string(i + 1) + " is not Hermitian");
    Eigen::SelfAdjointEigenSolver<CMatrix> es(linalg::hermitian_part(qi));
    const RVector& ev = es.eigenvalues();
    if (ev(0) < -1e-9 * std::max(1.0, ev(ev.size() - 1)))
      fail(ErrorCode::Numeric, "covariance of user " + std::to_string(i + 1) + " is not positive semidefinite");
    if (ev(0) < 0.0)
      out.push_back(es.eigenvectors() * ev.cwiseMax(0.0).asDiagonal() * es.eigenvectors().adjoint());
    else
      out.push_back(linalg::hermitian_part(qi));
  }
  return out;
}

RVector total_base_power(const ClusterLayout& layout, const CovarianceSet& q) {
  RVector p = RVector::Zero(layout.num_bases());
  for (int i = 0; i < layout.num_users(); ++i) p += layout.base_power(i, q[i]);
  return p;
}

namespace {

void check_shapes(const ChannelSet& channels, const ClusterLayout& layout, std::size_t blocks) {
  require(channels.num_users() == layout.num_users(), "channels and layout disagree on user count");
  require(channels.base_antennas == layout.base_antennas(), "channels and layout disagree on antennas");
  require(blocks == static_cast<std::size_t>(layout.num_users()), "covariance count does not match users");
}

// H_i C_k Q_k C_k^T H_i^H for every k, for a fixed receiver i.
std::vector<CMatrix> received(const ChannelSet& channels, const ClusterLayout& layout,
                              const CovarianceSet& q, int i) {
  std::vector<CMatrix> out;
  out.reserve(q.size());
  for (int k = 0; k < layout.num_users(); ++k) {
    const CMatrix a = layout.restrict_columns(channels.aggregate[i], k);
    out.push_back(a * q[k] * a.adjoint());
  }
  return out;
}

}  // namespace

RVector rates(const ChannelSet& channels, const ClusterLayout& layout, const CovarianceSet& q) {
  check_shapes(channels, layout, q.size());
  const CovarianceSet qs = sanitize(q, layout);
  const int k = layout.num_users();
  RVector r(k);
  for (int i = 0; i < k; ++i) {
    const auto n = channels.user_antennas[i];
    const auto rx = received(channels, layout, qs, i);
    CMatrix interference = CMatrix::Identity(n, n);
    for (int m = 0; m < k; ++m)
      if (m != i) interference += rx[m];
    const CMatrix total = interference + rx[i];
    const double num = linalg::logdet_hpd_or_throw(linalg::hermitian_part(total), "rates");
    const double den = linalg::logdet_hpd_or_throw(linalg::hermitian_part(interference), "rates");
    r(i) = std::max(0.0, (num - den) / kLn2);
  }
  return r;
}

RateReport make_report(RVector r, const UtilitySpec& spec, RVector base_power) {
  RateReport rep;
  rep.utility = utility(r, spec);
  rep.active.resize(static_cast<std::size_t>(r.size()));
  for (Eigen::Index i = 0; i < r.size(); ++i) rep.active[i] = r(i) > kActiveRateFloor;
  rep.rates = std::move(r);
  rep.base_power = std::move(base_power);
  return rep;
}

RateReport achievable_rates(const ChannelSet& channels, const ClusterLayout& layout,
                            const CovarianceSet& q, const UtilitySpec& spec) {
  RVector r = rates(channels, layout, q);
  return make_report(std::move(r), spec, total_base_power(layout, q));
}

CMatrix interference_covariance(const ChannelSet& channels, const ClusterLayout& layout,
                                const CovarianceSet& qbar, int user) {
  check_shapes(channels, layout, qbar.size());
  require(user >= 0 && user < layout.num_users(), "interference_covariance: user out of range");
  const auto n = channels.user_antennas[user];
  CMatrix y = CMatrix::Identity(n, n);
  for (int k = 0; k < layout.num_users(); ++k) {
    if (k == user) continue;
    const CMatrix a = layout.restrict_columns(channels.aggregate[user], k);
    y += a * qbar[k] * a.adjoint();
  }
  return linalg::hermitian_part(y);
}

double taylor_rate(const ChannelSet& channels, const ClusterLayout& layout, const CovarianceSet& q,
                   const CovarianceSet& qbar, int user) {
  check_shapes(channels, layout, q.size());
  const CMatrix y = interference_covariance(channels, layout, qbar, user);
  Eigen::LLT<CMatrix> ychol(y);
  const auto rx = received(channels, layout, q, user);
  const auto rxbar = received(channels, layout, qbar, user);
  const auto n = channels.user_antennas[user];
  CMatrix total = CMatrix::Identity(n, n);
  double penalty = 0.0;
  for (int k = 0; k < layout.num_users(); ++k) {
    total += rx[k];
    if (k == user) continue;
    penalty += ychol.solve(rx[k]).trace().real();
    penalty -= ychol.solve(rxbar[k]).trace().real();
  }
  const double logdet_total = linalg::logdet_hpd_or_throw(linalg::hermitian_part(total), "taylor_rate");
  const double logdet_y = linalg::logdet_hpd_or_throw(y, "taylor_rate");
  return (logdet_total - logdet_y - penalty) / kLn2;
}

PrecoderSet recover_precoders(const CovarianceSet& q, const ClusterLayout& layout) {
  const CovarianceSet qs = sanitize(q, layout);
  PrecoderSet out;
  for (int i = 0; i < layout.num_users(); ++i) {
    const CMatrix& qi = qs[i];
    const auto m = qi.rows();
    CMatrix g = CMatrix::Zero(m, m);
    int streams = 0;
    if (m > 0) {
      Eigen::SelfAdjointEigenSolver<CMatrix> es(qi);
      // Eigen returns ascending eigenvalues; reorder to descending.
      const RVector ev = es.eigenvalues().reverse();
      const CMatrix v = es.eigenvectors().rowwise().reverse();
      const double top = std::max(ev(0), 0.0);
      for (Eigen::Index c = 0; c < m; ++c) {
        const double d = std::max(ev(c), 0.0);
        g.col(c) = v.col(c) * std::sqrt(d);
        if (top > 0.0 && d > kRankFloor * top) ++streams;
      }
    }
    std::vector<CMatrix> slices;
    Eigen::Index off = 0;
    for (int j : layout.cluster(i)) {
      const int mj = layout.base_antennas()[j];
      slices.push_back(g.middleRows(off, mj));
      off += mj;
    }
    out.g.push_back(std::move(g));
    out.per_base.push_back(std::move(slices));
    out.streams.push_back(streams);
  }
  return out;
}

}  // namespace sinp::rate_model
