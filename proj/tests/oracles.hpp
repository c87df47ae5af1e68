#pragma once

// Test-only reference computations and random generators. Nothing here calls
// the SVD/eigen paths the library uses for meets and verdicts.

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <vector>

#include "complement_lab/complement_lab.hpp"

namespace complement_lab::testing {

using Rng = std::mt19937_64;

inline Vector random_vector(Rng& rng, Eigen::Index dim) {
  std::normal_distribution<double> n(0.0, 1.0);
  Vector v(dim);
  for (Eigen::Index k = 0; k < dim; ++k) {
    v(k) = Complex(n(rng), n(rng));
  }
  return v;
}

inline Vector random_unit_vector(Rng& rng, Eigen::Index dim) {
  return random_vector(rng, dim).normalized();
}

/// Haar-ish unitary from the QR factor of a complex Gaussian matrix.
inline Matrix random_unitary(Rng& rng, Eigen::Index dim) {
  Matrix g(dim, dim);
  for (Eigen::Index c = 0; c < dim; ++c) {
    g.col(c) = random_vector(rng, dim);
  }
  Eigen::HouseholderQR<Matrix> qr(g);
  return qr.householderQ() * Matrix::Identity(dim, dim);
}

/// Projector onto the span of the first `rank` columns of a random unitary.
inline Projector random_projector(Rng& rng, Eigen::Index dim, Eigen::Index rank) {
  if (rank == 0) {
    return Projector::zero(dim);
  }
  const Matrix u = random_unitary(rng, dim);
  return Projector::from_orthonormal_basis(u.leftCols(rank));
}

/// Pair of projectors with a planted common subspace of dimension `common`
/// (plus `extra_p`, `extra_q` generic directions).
inline std::pair<Projector, Projector> planted_pair(Rng& rng, Eigen::Index dim,
                                                    Eigen::Index common, Eigen::Index extra_p,
                                                    Eigen::Index extra_q) {
  const Matrix u = random_unitary(rng, dim);
  std::vector<Vector> p_vecs;
  std::vector<Vector> q_vecs;
  for (Eigen::Index k = 0; k < common; ++k) {
    p_vecs.push_back(u.col(k));
    q_vecs.push_back(u.col(k));
  }
  for (Eigen::Index k = 0; k < extra_p; ++k) {
    p_vecs.push_back(random_vector(rng, dim));
  }
  for (Eigen::Index k = 0; k < extra_q; ++k) {
    q_vecs.push_back(random_vector(rng, dim));
  }
  auto build = [dim](const std::vector<Vector>& v) {
    return v.empty() ? Projector::zero(dim) : projector_from_span(v);
  };
  return {build(p_vecs), build(q_vecs)};
}

/// Random projector pair in dims 2..8: half generic, half with a planted
/// intersection.
inline std::pair<Projector, Projector> random_projector_pair(Rng& rng) {
  std::uniform_int_distribution<Eigen::Index> dim_dist(2, 8);
  const Eigen::Index dim = dim_dist(rng);
  std::uniform_int_distribution<Eigen::Index> rank_dist(0, dim);
  if (std::bernoulli_distribution(0.5)(rng)) {
    return {random_projector(rng, dim, rank_dist(rng)), random_projector(rng, dim, rank_dist(rng))};
  }
  std::uniform_int_distribution<Eigen::Index> common_dist(1, dim - 1);
  const Eigen::Index common = common_dist(rng);
  std::uniform_int_distribution<Eigen::Index> extra_dist(0, dim - common);
  return planted_pair(rng, dim, common, extra_dist(rng), extra_dist(rng));
}

/// Random multiplicity pattern summing to `dim`.
inline std::vector<Eigen::Index> random_multiplicities(Rng& rng, Eigen::Index dim) {
  std::vector<Eigen::Index> m;
  Eigen::Index left = dim;
  while (left > 0) {
    std::uniform_int_distribution<Eigen::Index> take(1, left);
    // Bias towards small blocks so nondegenerate spectra are common.
    Eigen::Index k = std::min(take(rng), take(rng));
    m.push_back(k);
    left -= k;
  }
  return m;
}

/// Hermitian matrix U diag(λ) U† with well-separated eigenvalues repeated
/// according to `multiplicities`.
inline Matrix random_hermitian(Rng& rng, Eigen::Index dim,
                               const std::vector<Eigen::Index>& multiplicities) {
  std::uniform_real_distribution<double> gap(0.5, 2.0);
  std::uniform_real_distribution<double> start(-3.0, 0.0);
  Eigen::VectorXd values(dim);
  double v = start(rng);
  Eigen::Index at = 0;
  for (Eigen::Index m : multiplicities) {
    for (Eigen::Index k = 0; k < m; ++k) {
      values(at++) = v;
    }
    v += gap(rng);
  }
  const Matrix u = random_unitary(rng, dim);
  Matrix h = u * values.cast<Complex>().asDiagonal() * u.adjoint();
  return 0.5 * (h + h.adjoint());
}

inline Matrix random_hermitian(Rng& rng, Eigen::Index dim) {
  return random_hermitian(rng, dim, random_multiplicities(rng, dim));
}

/// lim (PQP)^n by repeated squaring; n is capped at 2^max_doublings (~1e5).
/// Squaring doubles the round-off on unit eigenvalues, so the stop test is an
/// idempotency defect of 1e-10 rather than machine precision.
/// Converges to the projector onto range P ∩ range Q.
struct IteratedMeet {
  Matrix limit;
  bool converged;
  std::size_t power;
};

inline IteratedMeet von_neumann_meet(const Matrix& p, const Matrix& q, int max_doublings = 17) {
  Matrix m = p * q * p;
  std::size_t power = 1;
  for (int k = 0; k < max_doublings; ++k) {
    Matrix next = m * m;
    next = 0.5 * (next + next.adjoint());
    power *= 2;
    const double change = (next - m).cwiseAbs().maxCoeff();
    m = std::move(next);
    if (change < 1e-10) {
      return {m, true, power};
    }
  }
  return {m, false, power};
}

/// Column rank by Gaussian elimination with partial pivoting.
inline Eigen::Index elimination_rank(Matrix a, double tol = 1e-9) {
  Eigen::Index rank = 0;
  for (Eigen::Index c = 0; c < a.cols() && rank < a.rows(); ++c) {
    Eigen::Index pivot = rank;
    for (Eigen::Index r = rank; r < a.rows(); ++r) {
      if (std::abs(a(r, c)) > std::abs(a(pivot, c))) {
        pivot = r;
      }
    }
    if (std::abs(a(pivot, c)) <= tol) {
      continue;
    }
    a.row(pivot).swap(a.row(rank));
    for (Eigen::Index r = rank + 1; r < a.rows(); ++r) {
      a.row(r) -= (a(r, c) / a(rank, c)) * a.row(rank);
    }
    ++rank;
  }
  return rank;
}

inline Matrix diag(std::initializer_list<double> values) {
  const auto n = static_cast<Eigen::Index>(values.size());
  Matrix m = Matrix::Zero(n, n);
  Eigen::Index k = 0;
  for (double v : values) {
    m(k, k) = v;
    ++k;
  }
  return m;
}

inline double max_abs(const Matrix& m) {
  return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff();
}

}  // namespace complement_lab::testing
