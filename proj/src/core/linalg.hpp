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

#pragma once

#include <cmath>
#include <optional>

#include "types.hpp"

namespace sinp::linalg {

inline CMatrix hermitian_part(const CMatrix& a) {
  return (a + a.adjoint()) * 0.5;
}

/// Natural log-determinant of a Hermitian positive-definite matrix.
/// Returns nullopt when the Cholesky factorization fails.
inline std::optional<double> logdet_hpd(const CMatrix& a) {
  if (a.rows() == 0) return 0.0;
  Eigen::LLT<CMatrix> llt(a);
  if (llt.info() != Eigen::Success) return std::nullopt;
  const auto& l = llt.matrixLLT();
  double acc = 0.0;
  for (Eigen::Index k = 0; k < l.rows(); ++k) {
    const double d = l(k, k).real();
    if (!(d > 0.0)) return std::nullopt;
    acc += 2.0 * std::log(d);
  }
  return acc;
}

inline double logdet_hpd_or_throw(const CMatrix& a, const char* what) {
  auto v = logdet_hpd(a);
  if (!v) fail(ErrorCode::Numeric, std::string(what) + ": matrix not positive definite");
  return *v;
}

/// Projection onto the PSD cone in Frobenius norm (eigenvalue clipping).
inline CMatrix project_psd(const CMatrix& a) {
  if (a.rows() == 0) return a;
  Eigen::SelfAdjointEigenSolver<CMatrix> es(hermitian_part(a));
  RVector ev = es.eigenvalues().cwiseMax(0.0);
  return es.eigenvectors() * ev.asDiagonal() * es.eigenvectors().adjoint();
}

inline double min_eigenvalue(const CMatrix& a) {
  if (a.rows() == 0) return 0.0;
  Eigen::SelfAdjointEigenSolver<CMatrix> es(hermitian_part(a), Eigen::EigenvaluesOnly);
  return es.eigenvalues()(0);
}

inline double real_inner(const CMatrix& a, const CMatrix& b) {
  return (a.array().conjugate() * b.array()).real().sum();
}

}  // namespace sinp::linalg
