#include <catch_amalgamated.hpp>

#include <numbers>

#include "oracles.hpp"

using namespace complement_lab;
using namespace complement_lab::testing;
using Catch::Matchers::WithinAbs;

namespace {
const double s2 = std::numbers::sqrt2 / 2.0;

Matrix pauli_x() {
  Matrix x = Matrix::Zero(2, 2);
  x(0, 1) = x(1, 0) = 1.0;
  return x;
}

Observable two_valued(const Projector& p) {
  return observable_from_projector(p);
}
}  // namespace

TEST_CASE("complementary_pair examples") {
  const Projector p = Projector::from_matrix(diag({1, 0}));
  const PairResult same = complementary_pair(p, p);
  CHECK_FALSE(same.complementary);
  CHECK(same.witness.kind == WitnessKind::NonzeroMeet);
  const auto& ev = std::get<Projector>(same.witness.evidence);
  CHECK(max_abs(ev.matrix() - diag({1, 0})) <= 1e-12);

  const Projector line = projector_from_span({Vector(s2 * (basis_vector(2, 0) + basis_vector(2, 1)))});
  const PairResult distinct = complementary_pair(p, line);
  CHECK(distinct.complementary);
  CHECK(distinct.witness.kind == WitnessKind::AllMeetsZero);
  CHECK_THAT(distinct.witness.magnitude, WithinAbs(s2, 1e-12));

  const PairResult trivial = complementary_pair(Projector::identity(2), p);
  CHECK_FALSE(trivial.complementary);
  CHECK(trivial.note.has_value());

  CHECK_THROWS_AS(complementary_pair(p, Projector::zero(3)), DimensionMismatch);
}

TEST_CASE("two planes in three dimensions always meet", "[property]") {
  Rng rng(8);
  for (int trial = 0; trial < 100; ++trial) {
    const Projector p = random_projector(rng, 3, 2);
    const Projector q = random_projector(rng, 3, 2);
    // Rank bound 2 + 2 - 3 = 1.
    const PairResult r = complementary_pair(p, q);
    CHECK_FALSE(r.complementary);
    CHECK(std::get<Projector>(r.witness.evidence).rank() == 1);
  }
}

TEST_CASE("qubit Z vs X by brute force") {
  const Observable z = decompose(diag({1, -1}));
  const Observable x = decompose(pauli_x());

  // Oracle: two lines in C^2 meet only if the 2x2 determinant of their
  // spanning vectors vanishes.
  int zero_meets = 0;
  for (const auto& pz : z.spectrum()) {
    for (const auto& px : x.spectrum()) {
      Matrix m(2, 2);
      m << pz.projector.basis().col(0), px.projector.basis().col(0);
      if (std::abs(m.determinant()) > 1e-6) {
        ++zero_meets;
      }
    }
  }
  REQUIRE(zero_meets == 4);

  const Verdict v = classify(z, x);
  CHECK(v.relation == Relation::Complementary);
  CHECK(v.commutation == Commutation::TotallyNoncommuting);
  CHECK(v.counts.total == 4);
  CHECK(v.counts.zero_meet == 4);
  REQUIRE_FALSE(v.witnesses.empty());
  CHECK(conditions_agree(z, x));
}

TEST_CASE("three-path observables are noncomplementary") {
  const Observable path = rangwala_roy_path_observable();
  const Observable interf = rangwala_roy_interference_observable();
  const Verdict v = classify(path, interf);
  CHECK(v.relation == Relation::Noncomplementary);
  CHECK(v.commutation == Commutation::Commuting);
  CHECK(v.commutator_norm <= 1e-12);
  CHECK(v.counts.nonzero_meet > 0);

  bool has_meet = false;
  bool has_psi_r = false;
  const Vector psi_r = basis_vector(3, rr_mode::r);
  for (const auto& w : v.witnesses) {
    CHECK(witness_holds(w, path, interf));
    has_meet = has_meet || w.kind == WitnessKind::NonzeroMeet;
    if (w.kind == WitnessKind::CommonEigenvector) {
      const Matrix& m = std::get<Projector>(w.evidence).matrix();
      has_psi_r = has_psi_r || (m * psi_r - psi_r).norm() <= 1e-10;
    }
  }
  CHECK(has_meet);
  CHECK(has_psi_r);
  CHECK(conditions_agree(path, interf));
}

TEST_CASE("classify examples") {
  const Verdict v = classify(decompose(diag({1, 2})), decompose(diag({3, 4})));
  CHECK(v.commutation == Commutation::Commuting);
  CHECK(v.relation == Relation::Noncomplementary);

  const Verdict d = classify(decompose(Matrix::Identity(2, 2)), decompose(pauli_x()));
  CHECK(d.commutation == Commutation::DegenerateIdentity);
  CHECK(d.relation == Relation::Noncomplementary);

  CHECK_THROWS_AS(classify(decompose(diag({1, 2})), decompose(diag({1, 2, 3}))), DimensionMismatch);
}

TEST_CASE("partially commuting observables") {
  // Common eigenvector e3, noncommuting on the first two coordinates.
  Matrix b = Matrix::Zero(3, 3);
  b(0, 1) = b(1, 0) = 1.0;
  b(2, 2) = 5.0;
  const Verdict v = classify(decompose(diag({1, -1, 3})), decompose(b));
  CHECK(v.commutation == Commutation::PartiallyCommuting);
  CHECK(v.relation == Relation::Noncomplementary);
}

TEST_CASE("probabilistic_check examples") {
  const Projector p = projector_from_span({basis_vector(2, 0)});
  CHECK_THAT(max_certainty_overlap(p, p).sup, WithinAbs(1.0, 1e-14));

  // |<z±|x±>|^2 = 1/2 by direct computation.
  const Projector x_plus =
      projector_from_span({Vector(s2 * (basis_vector(2, 0) + basis_vector(2, 1)))});
  CHECK_THAT(max_certainty_overlap(p, x_plus).sup, WithinAbs(0.5, 1e-14));

  const Projector pr = Projector::from_matrix(diag({1, 0, 0}));
  const Projector pt = Projector::from_matrix(diag({0, 1, 1}));
  CHECK_THAT(max_certainty_overlap(pr, pt).sup, WithinAbs(0.0, 1e-14));

  const Verdict zx = probabilistic_check(decompose(diag({1, -1})), decompose(pauli_x()));
  CHECK(zx.relation == Relation::Complementary);
  CHECK_THAT(zx.witnesses.front().magnitude, WithinAbs(0.5, 1e-12));

  const Observable a = decompose(diag({0, 1, 2}));
  const Verdict same = probabilistic_check(a, a);
  CHECK(same.relation == Relation::Noncomplementary);
  REQUIRE(same.witnesses.front().kind == WitnessKind::ProbabilityOne);
  CHECK(witness_holds(same.witnesses.front(), a, a));
}

TEST_CASE("conditions agree on random Hermitian pairs", "[property]") {
  Rng rng(6006);
  int complementary = 0;
  for (int trial = 0; trial < 200; ++trial) {
    std::uniform_int_distribution<Eigen::Index> dim_dist(2, 6);
    const Eigen::Index dim = dim_dist(rng);
    const Observable a = decompose(random_hermitian(rng, dim));
    const Observable b = decompose(random_hermitian(rng, dim));
    const Verdict vi = complementary_observables(a, b);
    const Verdict vii = probabilistic_check(a, b);
    CHECK(vi.relation == vii.relation);
    complementary += vi.relation == Relation::Complementary ? 1 : 0;
    for (const auto& w : vi.witnesses) {
      CHECK(witness_holds(w, a, b));
    }
    for (const auto& w : vii.witnesses) {
      CHECK(witness_holds(w, a, b));
    }
    // Necessary condition.
    if (vi.relation == Relation::Complementary) {
      CHECK(common_eigenvectors(a, b).empty());
      CHECK_NOTHROW(classify(a, b));
    }
  }
  // The sample must exercise both verdicts.
  CHECK(complementary > 0);
  CHECK(complementary < 200);
}

TEST_CASE("nondegenerate observables in dimension >= 3 are never complementary", "[property]") {
  Rng rng(1234);
  for (Eigen::Index d = 3; d <= 6; ++d) {
    for (int trial = 0; trial < 10; ++trial) {
      const std::vector<Eigen::Index> ones(static_cast<std::size_t>(d), 1);
      const Observable a = decompose(random_hermitian(rng, d, ones));
      const Observable b = decompose(random_hermitian(rng, d, ones));
      REQUIRE(a.is_nondegenerate());
      REQUIRE(b.is_nondegenerate());
      CHECK(complementary_observables(a, b).relation == Relation::Noncomplementary);
    }
  }
}

TEST_CASE("orthogonal spectral projectors give commuting, noncomplementary pairs", "[property]") {
  Rng rng(77);
  for (int trial = 0; trial < 100; ++trial) {
    std::uniform_int_distribution<Eigen::Index> dim_dist(2, 7);
    const Eigen::Index dim = dim_dist(rng);
    const Matrix u = random_unitary(rng, dim);
    std::uniform_int_distribution<Eigen::Index> k_dist(1, dim - 1);
    const Eigen::Index k = k_dist(rng);
    std::uniform_int_distribution<Eigen::Index> l_dist(1, dim - k);
    const Eigen::Index l = l_dist(rng);
    const Projector p = Projector::from_orthonormal_basis(u.leftCols(k));
    const Projector q = Projector::from_orthonormal_basis(u.middleCols(k, l));
    REQUIRE(max_abs(p.matrix() * q.matrix()) <= 1e-12);
    const Verdict v = classify(two_valued(p), two_valued(q));
    CHECK(v.commutation == Commutation::Commuting);
    CHECK(v.relation == Relation::Noncomplementary);
  }
}

TEST_CASE("subset enumeration is capped") {
  Eigen::VectorXd values = Eigen::VectorXd::LinSpaced(13, 0.0, 12.0);
  const Matrix big = values.cast<Complex>().asDiagonal();
  const Observable a = decompose(big);
  REQUIRE(a.size() == 13);
  CHECK_THROWS_AS(complementary_observables(a, a), TooManySpectralPoints);
  CHECK_THROWS_AS(probabilistic_check(a, a), TooManySpectralPoints);
}

TEST_CASE("verdicts are deterministic") {
  Rng rng(55);
  const Observable a = decompose(random_hermitian(rng, 4));
  const Observable b = decompose(random_hermitian(rng, 4));
  const Verdict v1 = classify(a, b);
  const Verdict v2 = classify(a, b);
  CHECK(v1.relation == v2.relation);
  CHECK(v1.counts.total == v2.counts.total);
  REQUIRE(v1.witnesses.size() == v2.witnesses.size());
  CHECK(v1.witnesses.front().value_set_a == v2.witnesses.front().value_set_a);
  CHECK(v1.witnesses.front().value_set_b == v2.witnesses.front().value_set_b);
}
