#pragma once

// Reference implementations used as oracles. They are deliberately naive
// (explicit loops, dense SVD/eigen solvers) and share no code with the
// library beyond the SensingMatrix container.

#include <cmath>
#include <complex>
#include <numbers>
#include <vector>

#include <Eigen/Dense>
#include <gtest/gtest.h>

#include "striplab/errors.hpp"
#include "striplab/frame.hpp"

namespace striplab::testing {

template <typename Fn>
void ExpectCode(ErrorCode expected, Fn&& fn) {
  try {
    fn();
    ADD_FAILURE() << "expected " << to_string(expected);
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), expected) << e.what();
  }
}

inline Eigen::MatrixXcd chirp_formula(int m) {
  Eigen::MatrixXcd f(m, m * m);
  for (int a = 1; a <= m; ++a) {
    for (int b = 1; b <= m; ++b) {
      for (int t = 1; t <= m; ++t) {
        const double phase = 2.0 * std::numbers::pi * ((b * t * t + a * t) % m) / m;
        f(t - 1, (a - 1) * m + (b - 1)) = std::polar(1.0 / std::sqrt(double(m)), phase);
      }
    }
  }
  return f;
}

inline SensingMatrix identity_frame(Index n) {
  return SensingMatrix(Eigen::MatrixXcd::Identity(n, n), ScalarKind::kReal);
}

// Random orthonormal real basis, built from a fixed-seed QR.
inline SensingMatrix orthonormal_frame(Index n, unsigned seed) {
  std::srand(seed);
  const Eigen::MatrixXd a = Eigen::MatrixXd::Random(n, n);
  const Eigen::MatrixXd q = Eigen::HouseholderQR<Eigen::MatrixXd>(a).householderQ();
  return SensingMatrix(q.cast<Complex>(), ScalarKind::kReal);
}

inline Eigen::MatrixXcd naive_gram(const Eigen::MatrixXcd& f) {
  const Index n = f.cols();
  Eigen::MatrixXcd g(n, n);
  for (Index i = 0; i < n; ++i) {
    for (Index j = 0; j < n; ++j) {
      Complex s = 0.0;
      for (Index t = 0; t < f.rows(); ++t) s += std::conj(f(t, i)) * f(t, j);
      g(i, j) = s;
    }
  }
  return g;
}

inline double svd_norm(const Eigen::MatrixXcd& a) {
  return Eigen::JacobiSVD<Eigen::MatrixXcd>(a).singularValues()(0);
}

// ‖Φ_I^*Φ_I - Id‖₂ from a Hermitian eigendecomposition.
inline double eigen_delta(const Eigen::MatrixXcd& f, const std::vector<Index>& support) {
  const auto k = static_cast<Index>(support.size());
  Eigen::MatrixXcd sub(f.rows(), k);
  for (Index j = 0; j < k; ++j) sub.col(j) = f.col(support[static_cast<std::size_t>(j)]);
  Eigen::MatrixXcd h = sub.adjoint() * sub - Eigen::MatrixXcd::Identity(k, k);
  const Eigen::VectorXd ev = Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd>(h).eigenvalues();
  return std::max(std::abs(ev.minCoeff()), std::abs(ev.maxCoeff()));
}

}  // namespace striplab::testing
