#pragma once

// Complementarity of sharp observables. Two observables are complementary
// when every pair of nontrivial spectral projectors P_A(X), P_B(Y) has zero
// meet (condition i), equivalently when no state certain for P_A(X) is also
// certain for P_B(Y) (condition ii). Both conditions are decided by
// enumerating the spectral subsets of each observable.

#include <cstdint>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "complement_lab/hilbert.hpp"
#include "complement_lab/spectral.hpp"

namespace complement_lab {

enum class Relation { Complementary, Noncomplementary };

enum class Commutation { Commuting, PartiallyCommuting, TotallyNoncommuting, DegenerateIdentity };

enum class WitnessKind { NonzeroMeet, CommonEigenvector, ProbabilityOne, AllMeetsZero };

inline const char* to_string(Relation r) {
  return r == Relation::Complementary ? "Complementary" : "Noncomplementary";
}

inline const char* to_string(Commutation c) {
  switch (c) {
    case Commutation::Commuting:
      return "Commuting";
    case Commutation::PartiallyCommuting:
      return "PartiallyCommuting";
    case Commutation::TotallyNoncommuting:
      return "TotallyNoncommuting";
    case Commutation::DegenerateIdentity:
      return "DegenerateIdentity";
  }
  return "?";
}

inline const char* to_string(WitnessKind k) {
  switch (k) {
    case WitnessKind::NonzeroMeet:
      return "NonzeroMeet";
    case WitnessKind::CommonEigenvector:
      return "CommonEigenvector";
    case WitnessKind::ProbabilityOne:
      return "ProbabilityOne";
    case WitnessKind::AllMeetsZero:
      return "AllMeetsZero";
  }
  return "?";
}

/// Re-checkable evidence behind a verdict.
///   NonzeroMeet:       evidence is meet(P_A(X), P_B(Y)); magnitude is the
///                      largest principal cosine (≈ 1).
///   CommonEigenvector: evidence is a common eigenspace projector.
///   ProbabilityOne:    evidence is a unit vector Ψ in range P_A(X) with
///                      ⟨Ψ|P_B(Y)|Ψ⟩ = magnitude ≈ 1.
///   AllMeetsZero:      evidence is the vector of range P_A(X) closest to
///                      range P_B(Y) over all pairs; magnitude is the
///                      largest cosine (or the largest sup probability for
///                      the probabilistic engine), < 1.
struct WitnessRecord {
  WitnessKind kind;
  ValueSet value_set_a;
  ValueSet value_set_b;
  std::variant<Projector, Vector> evidence;
  double magnitude;
};

struct PairCounts {
  std::size_t total = 0;
  std::size_t zero_meet = 0;
  std::size_t nonzero_meet = 0;
};

struct Verdict {
  Relation relation = Relation::Noncomplementary;
  Commutation commutation = Commutation::DegenerateIdentity;
  std::vector<WitnessRecord> witnesses;
  PairCounts counts;
  double commutator_norm = 0.0;  ///< max-norm of [A, B]
  std::vector<std::string> notes;
};

/// Subset enumeration is exponential; observables with more spectral points
/// are rejected.
inline constexpr std::size_t max_spectral_points = 12;

struct PairResult {
  bool complementary;
  WitnessRecord witness;
  std::optional<std::string> note;  ///< set when P or Q is trivial
};

/// Condition (i) on a single projector pair: range(P) ∩ range(Q) = {0}.
inline PairResult complementary_pair(const Projector& p, const Projector& q,
                                     const Tolerances& tol = {}) {
  require_same_dimension("complementary_pair", p.dim(), q.dim());
  if (!p.is_proper() || !q.is_proper()) {
    // Trivial propositions are never complementary; the witness is the
    // meet itself (zero when one side is zero).
    Projector m = meet(p, q, tol);
    const double mag = m.is_zero() ? 0.0 : 1.0;
    return {false,
            {WitnessKind::NonzeroMeet, {}, {}, std::move(m), mag},
            std::string("trivial projector (zero or identity) in pair")};
  }
  const PrincipalAngles angles = principal_angles(p, q);
  Projector m = meet(p, q, tol);
  const double top = angles.cosines.size() > 0 ? angles.cosines(0) : 0.0;
  if (!m.is_zero()) {
    return {false, {WitnessKind::NonzeroMeet, {}, {}, std::move(m), top}, std::nullopt};
  }
  Vector closest = angles.p_vectors.col(0);
  return {true, {WitnessKind::AllMeetsZero, {}, {}, std::move(closest), top}, std::nullopt};
}

namespace detail {

inline void require_enumerable(const Observable& a, const Observable& b) {
  require_same_dimension("observable pair", a.dim(), b.dim());
  if (a.size() > max_spectral_points || b.size() > max_spectral_points) {
    throw TooManySpectralPoints("observable has more than " +
                                std::to_string(max_spectral_points) +
                                " spectral points; subset enumeration refused");
  }
}

inline std::uint64_t proper_subset_end(const Observable& a) {
  return (std::uint64_t{1} << a.size()) - 1;  // exclusive; excludes the full set
}

/// Verdict for pairs where either observable is a multiple of the identity.
inline Verdict degenerate_verdict(const Observable& a, const Observable& b) {
  Verdict v;
  v.relation = Relation::Noncomplementary;
  v.commutation = Commutation::DegenerateIdentity;
  v.commutator_norm = commutator_max_norm(a.matrix(), b.matrix());
  const Observable& other = a.is_scalar() ? b : a;
  const bool a_scalar = a.is_scalar();
  // Every vector is an eigenvector of a scalar observable, so any
  // eigenprojector of the other one is a common eigenspace.
  const auto& pt = other.spectrum().front();
  const ValueSet own = ValueSet::points({pt.value});
  const ValueSet scalar_set = ValueSet::points({(a_scalar ? a : b).spectrum().front().value});
  v.witnesses.push_back({WitnessKind::CommonEigenvector, a_scalar ? scalar_set : own,
                         a_scalar ? own : scalar_set, pt.projector, 1.0});
  v.notes.emplace_back(
      "observable is a multiple of the identity: no proper spectral projector exists and every "
      "vector is an eigenvector");
  return v;
}

}  // namespace detail

/// Commutation taxonomy: Commuting iff [A, B] = 0; TotallyNoncommuting iff no
/// common eigenvector; PartiallyCommuting otherwise.
inline Commutation commutation_class(const Observable& a, const Observable& b,
                                     const Tolerances& tol = {}) {
  require_same_dimension("commutation_class", a.dim(), b.dim());
  if (a.is_scalar() || b.is_scalar()) {
    return Commutation::DegenerateIdentity;
  }
  if (commutes(a.matrix(), b.matrix(), tol)) {
    return Commutation::Commuting;
  }
  return common_eigenvectors(a, b, tol).empty() ? Commutation::TotallyNoncommuting
                                                : Commutation::PartiallyCommuting;
}

/// Condition (i) over all pairs of nonempty proper spectral subsets, in
/// ascending mask order (bit k ↔ k-th smallest eigenvalue). The first
/// nonzero meet is recorded; enumeration always runs to completion so the
/// pair counts are exact.
inline Verdict complementary_observables(const Observable& a, const Observable& b,
                                         const Tolerances& tol = {}) {
  detail::require_enumerable(a, b);
  if (a.is_scalar() || b.is_scalar()) {
    return detail::degenerate_verdict(a, b);
  }
  Verdict v;
  v.commutation = commutation_class(a, b, tol);
  v.commutator_norm = commutator_max_norm(a.matrix(), b.matrix());

  std::optional<WitnessRecord> first_nonzero;
  std::optional<WitnessRecord> closest;
  const std::uint64_t end_a = detail::proper_subset_end(a);
  const std::uint64_t end_b = detail::proper_subset_end(b);
  for (std::uint64_t ma = 1; ma < end_a; ++ma) {
    const Projector pa = a.subset_projector(ma);
    for (std::uint64_t mb = 1; mb < end_b; ++mb) {
      const Projector pb = b.subset_projector(mb);
      PairResult r = complementary_pair(pa, pb, tol);
      ++v.counts.total;
      if (r.complementary) {
        ++v.counts.zero_meet;
        if (!closest || r.witness.magnitude > closest->magnitude) {
          r.witness.value_set_a = a.subset_values(ma);
          r.witness.value_set_b = b.subset_values(mb);
          closest = std::move(r.witness);
        }
      } else {
        ++v.counts.nonzero_meet;
        if (!first_nonzero) {
          r.witness.value_set_a = a.subset_values(ma);
          r.witness.value_set_b = b.subset_values(mb);
          first_nonzero = std::move(r.witness);
        }
      }
    }
  }
  if (first_nonzero) {
    v.relation = Relation::Noncomplementary;
    v.witnesses.push_back(std::move(*first_nonzero));
  } else {
    v.relation = Relation::Complementary;
    v.witnesses.push_back(std::move(*closest));
  }
  return v;
}

/// sup over unit Ψ ∈ range(P) of ⟨Ψ|Q|Ψ⟩, computed as the top eigenvalue of
/// the compression U†QU (U an orthonormal basis of range P), with the
/// maximizing Ψ.
struct CertaintyOverlap {
  double sup;
  Vector maximizer;
};

inline CertaintyOverlap max_certainty_overlap(const Projector& p, const Projector& q) {
  require_same_dimension("max_certainty_overlap", p.dim(), q.dim());
  if (p.is_zero()) {
    return {0.0, Vector::Zero(p.dim())};
  }
  const Matrix compressed = p.basis().adjoint() * q.matrix() * p.basis();
  Eigen::SelfAdjointEigenSolver<Matrix> eig(0.5 * (compressed + compressed.adjoint()));
  const Eigen::Index top = eig.eigenvalues().size() - 1;
  Vector psi = p.basis() * eig.eigenvectors().col(top);
  return {std::clamp(eig.eigenvalues()(top), 0.0, 1.0), psi.normalized()};
}

/// Condition (ii): no state certain for some P_A(X) is certain for a
/// P_B(Y). A pair fails when the sup certainty reaches (1 - tol.angle)^2,
/// the squared cosine threshold used by meet(), so both engines draw the
/// boundary at the same principal angle.
inline Verdict probabilistic_check(const Observable& a, const Observable& b,
                                   const Tolerances& tol = {}) {
  detail::require_enumerable(a, b);
  if (a.is_scalar() || b.is_scalar()) {
    return detail::degenerate_verdict(a, b);
  }
  Verdict v;
  v.commutation = commutation_class(a, b, tol);
  v.commutator_norm = commutator_max_norm(a.matrix(), b.matrix());
  const double threshold = (1.0 - tol.angle) * (1.0 - tol.angle);

  std::optional<WitnessRecord> first_failure;
  std::optional<WitnessRecord> closest;
  const std::uint64_t end_a = detail::proper_subset_end(a);
  const std::uint64_t end_b = detail::proper_subset_end(b);
  for (std::uint64_t ma = 1; ma < end_a; ++ma) {
    const Projector pa = a.subset_projector(ma);
    for (std::uint64_t mb = 1; mb < end_b; ++mb) {
      const Projector pb = b.subset_projector(mb);
      CertaintyOverlap o = max_certainty_overlap(pa, pb);
      ++v.counts.total;
      if (o.sup >= threshold) {
        ++v.counts.nonzero_meet;
        if (!first_failure) {
          first_failure = WitnessRecord{WitnessKind::ProbabilityOne, a.subset_values(ma),
                                        b.subset_values(mb), std::move(o.maximizer), o.sup};
        }
      } else {
        ++v.counts.zero_meet;
        if (!closest || o.sup > closest->magnitude) {
          closest = WitnessRecord{WitnessKind::AllMeetsZero, a.subset_values(ma),
                                  b.subset_values(mb), std::move(o.maximizer), o.sup};
        }
      }
    }
  }
  if (first_failure) {
    v.relation = Relation::Noncomplementary;
    v.witnesses.push_back(std::move(*first_failure));
  } else {
    v.relation = Relation::Complementary;
    v.witnesses.push_back(std::move(*closest));
  }
  return v;
}

/// For sharp observables conditions (i) and (ii) coincide.
inline bool conditions_agree(const Observable& a, const Observable& b, const Tolerances& tol = {}) {
  return complementary_observables(a, b, tol).relation == probabilistic_check(a, b, tol).relation;
}

/// Full classification: condition (i) verdict plus the commutation class and
/// a CommonEigenvector witness per common eigenspace. Throws std::logic_error
/// if a Complementary pair is found to share an eigenvector.
inline Verdict classify(const Observable& a, const Observable& b, const Tolerances& tol = {}) {
  Verdict v = complementary_observables(a, b, tol);
  if (v.commutation == Commutation::DegenerateIdentity) {
    return v;
  }
  for (auto& common : common_eigenvectors(a, b, tol)) {
    v.witnesses.push_back({WitnessKind::CommonEigenvector, ValueSet::points({common.a_value}),
                           ValueSet::points({common.b_value}), std::move(common.projector), 1.0});
  }
  if (v.relation == Relation::Complementary && v.commutation != Commutation::TotallyNoncommuting) {
    throw std::logic_error("complementary verdict on observables sharing an eigenvector");
  }
  return v;
}

/// Re-verifies a witness against the two observables it was issued for.
inline bool witness_holds(const WitnessRecord& w, const Observable& a, const Observable& b,
                          double tol = 1e-8) {
  const Projector pa = spectral_projector(a, w.value_set_a);
  const Projector pb = spectral_projector(b, w.value_set_b);
  switch (w.kind) {
    case WitnessKind::NonzeroMeet:
    case WitnessKind::CommonEigenvector: {
      const auto* wp = std::get_if<Projector>(&w.evidence);
      if (wp == nullptr || wp->is_zero()) {
        return false;
      }
      const Matrix& m = wp->matrix();
      return max_norm(pa.matrix() * m - m) <= tol && max_norm(pb.matrix() * m - m) <= tol;
    }
    case WitnessKind::ProbabilityOne: {
      const auto* psi = std::get_if<Vector>(&w.evidence);
      if (psi == nullptr) {
        return false;
      }
      const double in_a = psi->dot(pa.matrix() * *psi).real();
      const double in_b = psi->dot(pb.matrix() * *psi).real();
      return in_a >= 1.0 - tol && in_b >= 1.0 - tol;
    }
    case WitnessKind::AllMeetsZero: {
      const auto* psi = std::get_if<Vector>(&w.evidence);
      if (psi == nullptr) {
        return false;
      }
      return meet(pa, pb).is_zero() && psi->dot(pa.matrix() * *psi).real() >= 1.0 - tol;
    }
  }
  return false;
}

}  // namespace complement_lab
