#pragma once

// Dense complex linear algebra on small finite-dimensional Hilbert spaces and
// the lattice of orthogonal projectors: construction, complement, meet, join,
// commutation and expectation values.

#include <algorithm>
#include <cmath>
#include <complex>
#include <span>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include <Eigen/Dense>

#include "complement_lab/errors.hpp"
#include "complement_lab/tolerances.hpp"

namespace complement_lab {

using Complex = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;

/// Largest absolute entry.
inline double max_norm(const Matrix& m) {
  return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff();
}

inline bool all_finite(const Matrix& m) {
  return m.allFinite();
}

inline bool is_hermitian(const Matrix& m, double tol) {
  return m.rows() == m.cols() && max_norm(m - m.adjoint()) <= tol;
}

/// Orthonormal basis (as columns) of the column span of `columns`, rank
/// decided relative to the largest singular value.
inline Matrix orthonormal_span(const Matrix& columns, double relative_tol) {
  if (columns.cols() == 0) {
    return Matrix(columns.rows(), 0);
  }
  Eigen::JacobiSVD<Matrix> svd(columns, Eigen::ComputeThinU);
  const auto& sigma = svd.singularValues();
  const double largest = sigma.size() > 0 ? sigma(0) : 0.0;
  if (!(largest > 0.0)) {
    return Matrix(columns.rows(), 0);
  }
  Eigen::Index rank = 0;
  while (rank < sigma.size() && sigma(rank) > relative_tol * largest) {
    ++rank;
  }
  return svd.matrixU().leftCols(rank);
}

/// Hermitian idempotent matrix, validated on construction. Carries an
/// orthonormal basis of its range so lattice operations never re-diagonalize.
class Projector {
 public:
  /// Validates `m` (finite, Hermitian, idempotent, spectrum in {0, 1}).
  static Projector from_matrix(Matrix m, const Tolerances& tol = {}) {
    if (m.rows() != m.cols() || m.rows() < 1) {
      throw InvariantViolation("projector matrix must be square with dimension >= 1");
    }
    if (!all_finite(m)) {
      throw InvariantViolation("projector matrix has non-finite entries");
    }
    if (!is_hermitian(m, tol.hermitian)) {
      throw InvariantViolation("projector matrix is not Hermitian");
    }
    if (max_norm(m * m - m) > tol.idempotent) {
      throw InvariantViolation("projector matrix is not idempotent");
    }
    const Matrix symmetric = 0.5 * (m + m.adjoint());
    Eigen::SelfAdjointEigenSolver<Matrix> eig(symmetric);
    const auto& values = eig.eigenvalues();
    std::vector<Eigen::Index> ones;
    for (Eigen::Index i = 0; i < values.size(); ++i) {
      const double v = values(i);
      if (std::abs(v - 1.0) <= tol.eigenvalue) {
        ones.push_back(i);
      } else if (std::abs(v) > tol.eigenvalue) {
        throw InvariantViolation("projector eigenvalue " + std::to_string(v) +
                                 " is neither 0 nor 1");
      }
    }
    Matrix basis(m.rows(), static_cast<Eigen::Index>(ones.size()));
    for (std::size_t k = 0; k < ones.size(); ++k) {
      basis.col(static_cast<Eigen::Index>(k)) = eig.eigenvectors().col(ones[k]);
    }
    return Projector(std::move(m), std::move(basis));
  }

  /// Projector onto the span of orthonormal columns. The caller guarantees
  /// orthonormality; this is the internal fast path for lattice results.
  static Projector from_orthonormal_basis(Matrix basis) {
    Matrix m = basis * basis.adjoint();
    return Projector(std::move(m), std::move(basis));
  }

  static Projector zero(Eigen::Index dim) {
    return Projector(Matrix::Zero(dim, dim), Matrix(dim, 0));
  }

  static Projector identity(Eigen::Index dim) {
    return Projector(Matrix::Identity(dim, dim), Matrix::Identity(dim, dim));
  }

  [[nodiscard]] const Matrix& matrix() const noexcept { return matrix_; }
  [[nodiscard]] const Matrix& basis() const noexcept { return basis_; }
  [[nodiscard]] Eigen::Index dim() const noexcept { return matrix_.rows(); }
  [[nodiscard]] Eigen::Index rank() const noexcept { return basis_.cols(); }
  [[nodiscard]] bool is_zero() const noexcept { return rank() == 0; }
  [[nodiscard]] bool is_identity() const noexcept { return rank() == dim(); }
  /// Neither zero nor identity.
  [[nodiscard]] bool is_proper() const noexcept { return !is_zero() && !is_identity(); }

  /// I - P, keeping the matrix exact and completing the range basis to a
  /// unitary for the complement's basis.
  [[nodiscard]] Projector complement() const {
    const Eigen::Index n = dim();
    Matrix m = Matrix::Identity(n, n) - matrix_;
    if (is_zero()) {
      return Projector(std::move(m), Matrix::Identity(n, n));
    }
    if (is_identity()) {
      return Projector(std::move(m), Matrix(n, 0));
    }
    Eigen::HouseholderQR<Matrix> qr(basis_);
    Matrix q = qr.householderQ() * Matrix::Identity(n, n);
    return Projector(std::move(m), q.rightCols(n - rank()));
  }

 private:
  Projector(Matrix m, Matrix basis) : matrix_(std::move(m)), basis_(std::move(basis)) {}

  Matrix matrix_;
  Matrix basis_;
};

/// Orthogonal projector onto span{vectors}. An all-zero input yields the
/// zero projector.
inline Projector projector_from_span(std::span<const Vector> vectors, const Tolerances& tol = {}) {
  if (vectors.empty()) {
    throw std::invalid_argument("projector_from_span needs at least one vector");
  }
  const Eigen::Index dim = vectors.front().size();
  if (dim < 1) {
    throw InvariantViolation("vectors must have dimension >= 1");
  }
  Matrix columns(dim, static_cast<Eigen::Index>(vectors.size()));
  for (std::size_t k = 0; k < vectors.size(); ++k) {
    require_same_dimension("projector_from_span", dim, vectors[k].size());
    if (!vectors[k].allFinite()) {
      throw InvariantViolation("projector_from_span: non-finite vector entry");
    }
    columns.col(static_cast<Eigen::Index>(k)) = vectors[k];
  }
  return Projector::from_orthonormal_basis(orthonormal_span(columns, tol.rank));
}

inline Projector projector_from_span(std::initializer_list<Vector> vectors,
                                     const Tolerances& tol = {}) {
  return projector_from_span(std::span<const Vector>(vectors.begin(), vectors.size()), tol);
}

/// I - P.
inline Projector orthocomplement(const Projector& p) {
  return p.complement();
}

/// Cosines of the principal angles between range(P) and range(Q), largest
/// first, with the matching unit vectors in each range.
struct PrincipalAngles {
  Eigen::VectorXd cosines;
  Matrix p_vectors;  ///< column k lies in range(P)
  Matrix q_vectors;  ///< column k lies in range(Q)
};

inline PrincipalAngles principal_angles(const Projector& p, const Projector& q) {
  require_same_dimension("principal_angles", p.dim(), q.dim());
  PrincipalAngles out;
  if (p.is_zero() || q.is_zero()) {
    out.cosines.resize(0);
    out.p_vectors = Matrix(p.dim(), 0);
    out.q_vectors = Matrix(q.dim(), 0);
    return out;
  }
  const Matrix overlap = p.basis().adjoint() * q.basis();
  Eigen::JacobiSVD<Matrix> svd(overlap, Eigen::ComputeThinU | Eigen::ComputeThinV);
  out.cosines = svd.singularValues().cwiseMin(1.0);
  out.p_vectors = p.basis() * svd.matrixU();
  out.q_vectors = q.basis() * svd.matrixV();
  return out;
}

/// Projector onto range(P) ∩ range(Q): the directions whose principal angle
/// is zero up to `tol.angle` on the cosine.
inline Projector meet(const Projector& p, const Projector& q, const Tolerances& tol = {}) {
  require_same_dimension("meet", p.dim(), q.dim());
  const PrincipalAngles angles = principal_angles(p, q);
  Eigen::Index k = 0;
  while (k < angles.cosines.size() && angles.cosines(k) >= 1.0 - tol.angle) {
    ++k;
  }
  if (k == 0) {
    return Projector::zero(p.dim());
  }
  // Re-orthonormalize; the vectors are already orthonormal to round-off.
  Eigen::HouseholderQR<Matrix> qr(angles.p_vectors.leftCols(k));
  Matrix basis = qr.householderQ() * Matrix::Identity(p.dim(), k);
  return Projector::from_orthonormal_basis(std::move(basis));
}

/// Projector onto range(P) + range(Q).
inline Projector join(const Projector& p, const Projector& q, const Tolerances& tol = {}) {
  require_same_dimension("join", p.dim(), q.dim());
  Matrix stacked(p.dim(), p.rank() + q.rank());
  stacked << p.basis(), q.basis();
  return Projector::from_orthonormal_basis(orthonormal_span(stacked, tol.rank));
}

/// P <= Q in the Löwner order, i.e. range(P) ⊆ range(Q).
inline bool loewner_leq(const Projector& p, const Projector& q, const Tolerances& tol = {}) {
  require_same_dimension("loewner_leq", p.dim(), q.dim());
  return max_norm(q.matrix() * p.matrix() - p.matrix()) <= tol.idempotent;
}

inline double commutator_max_norm(const Matrix& a, const Matrix& b) {
  require_same_dimension("commutator", a.rows(), b.rows());
  require_same_dimension("commutator", a.cols(), b.cols());
  return max_norm(a * b - b * a);
}

inline bool commutes(const Matrix& a, const Matrix& b, const Tolerances& tol = {}) {
  return commutator_max_norm(a, b) <= tol.commutator;
}

inline bool commutes(const Projector& p, const Projector& q, const Tolerances& tol = {}) {
  return commutes(p.matrix(), q.matrix(), tol);
}

/// Pure vector or density operator with unit trace.
class QuantumState {
 public:
  static QuantumState pure(Vector psi, const Tolerances& tol = {}) {
    if (psi.size() < 1 || !psi.allFinite()) {
      throw InvariantViolation("pure state must be a finite vector of dimension >= 1");
    }
    if (std::abs(psi.norm() - 1.0) > tol.norm) {
      throw InvariantViolation("pure state is not normalized (norm " +
                               std::to_string(psi.norm()) + ")");
    }
    return QuantumState(std::move(psi));
  }

  /// Normalizes `psi` first; throws on the zero vector.
  static QuantumState pure_normalized(Vector psi) {
    const double n = psi.norm();
    if (!(n > 0.0) || !psi.allFinite()) {
      throw InvariantViolation("cannot normalize a zero or non-finite vector");
    }
    return QuantumState(Vector(psi / n));
  }

  static QuantumState mixed(Matrix rho, const Tolerances& tol = {}) {
    if (rho.rows() != rho.cols() || rho.rows() < 1 || !all_finite(rho)) {
      throw InvariantViolation("density matrix must be square, finite, dimension >= 1");
    }
    if (!is_hermitian(rho, tol.hermitian)) {
      throw InvariantViolation("density matrix is not Hermitian");
    }
    if (std::abs(rho.trace().real() - 1.0) > tol.norm) {
      throw InvariantViolation("density matrix trace is not one");
    }
    Eigen::SelfAdjointEigenSolver<Matrix> eig(0.5 * (rho + rho.adjoint()), Eigen::EigenvaluesOnly);
    if (eig.eigenvalues().minCoeff() < -tol.psd) {
      throw InvariantViolation("density matrix is not positive semidefinite");
    }
    return QuantumState(std::move(rho));
  }

  [[nodiscard]] bool is_pure() const noexcept { return std::holds_alternative<Vector>(form_); }
  [[nodiscard]] Eigen::Index dim() const noexcept {
    return is_pure() ? std::get<Vector>(form_).size() : std::get<Matrix>(form_).rows();
  }
  [[nodiscard]] const Vector& vector() const { return std::get<Vector>(form_); }
  [[nodiscard]] const Matrix& density_matrix() const { return std::get<Matrix>(form_); }

  /// Density operator in either form.
  [[nodiscard]] Matrix density() const {
    if (is_pure()) {
      const Vector& v = vector();
      return v * v.adjoint();
    }
    return density_matrix();
  }

  /// U T U^dagger (or U psi).
  [[nodiscard]] QuantumState evolved(const Matrix& unitary) const {
    require_same_dimension("evolve", dim(), unitary.rows());
    if (is_pure()) {
      return QuantumState(Vector(unitary * vector()));
    }
    return QuantumState(Matrix(unitary * density_matrix() * unitary.adjoint()));
  }

  [[nodiscard]] double trace() const {
    return is_pure() ? vector().squaredNorm() : density_matrix().trace().real();
  }

 private:
  explicit QuantumState(Vector v) : form_(std::move(v)) {}
  explicit QuantumState(Matrix m) : form_(std::move(m)) {}

  std::variant<Vector, Matrix> form_;
};

/// tr(T A) for Hermitian A.
inline double expectation(const QuantumState& state, const Matrix& observable,
                          const Tolerances& tol = {}) {
  require_same_dimension("expectation", state.dim(), observable.rows());
  if (!is_hermitian(observable, tol.hermitian)) {
    throw InvariantViolation("expectation: operator is not Hermitian");
  }
  if (state.is_pure()) {
    const Vector& psi = state.vector();
    return psi.dot(observable * psi).real();
  }
  return (state.density_matrix() * observable).trace().real();
}

inline double expectation(const QuantumState& state, const Projector& p,
                          const Tolerances& tol = {}) {
  return expectation(state, p.matrix(), tol);
}

/// Expectation of a projector clamped to [0, 1] for reporting.
inline double probability(const QuantumState& state, const Projector& p,
                          const Tolerances& tol = {}) {
  return std::clamp(expectation(state, p, tol), 0.0, 1.0);
}

inline Vector basis_vector(Eigen::Index dim, Eigen::Index index) {
  Vector v = Vector::Zero(dim);
  v(index) = 1.0;
  return v;
}

}  // namespace complement_lab
