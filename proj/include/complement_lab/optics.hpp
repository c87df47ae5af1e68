#pragma once

// Single-photon mode optics. A state is a vector over path modes; optical
// elements act as unitaries on that space.
//
// Conventions (fixed once, used everywhere):
//   beam splitter with reflectivity r on modes (a, b):
//       a' = sqrt(1-r) a + i sqrt(r) b
//       b' = i sqrt(r) a + sqrt(1-r) b
//   phase shifter: mode amplitude times e^{i phi}
//   mirror:        mode amplitude times i

#include <cmath>
#include <map>
#include <numbers>
#include <optional>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "complement_lab/hilbert.hpp"
#include "complement_lab/spectral.hpp"

namespace complement_lab {

struct BeamSplitter {
  double reflectivity;
  std::size_t mode_a;
  std::size_t mode_b;
};

struct PhaseShifter {
  double phase;
  std::size_t mode;
};

struct Mirror {
  std::size_t mode;
};

struct CustomUnitary {
  Matrix matrix;
};

struct Element {
  std::string label;
  std::variant<BeamSplitter, PhaseShifter, Mirror, CustomUnitary> kind;
};

/// Embeds an element as a dim × dim unitary.
inline Matrix element_unitary(const Element& e, std::size_t dim, const Tolerances& tol = {}) {
  const auto n = static_cast<Eigen::Index>(dim);
  Matrix u = Matrix::Identity(n, n);
  auto check_mode = [&](std::size_t m) {
    if (m >= dim) {
      throw InvariantViolation("element '" + e.label + "': mode " + std::to_string(m) +
                               " out of range for " + std::to_string(dim) + " modes");
    }
  };
  const Complex i_unit{0.0, 1.0};
  if (const auto* bs = std::get_if<BeamSplitter>(&e.kind)) {
    if (!(bs->reflectivity >= 0.0 && bs->reflectivity <= 1.0)) {
      throw InvariantViolation("element '" + e.label + "': reflectivity outside [0, 1]");
    }
    check_mode(bs->mode_a);
    check_mode(bs->mode_b);
    if (bs->mode_a == bs->mode_b) {
      throw InvariantViolation("element '" + e.label + "': beam splitter modes must differ");
    }
    const double t = std::sqrt(1.0 - bs->reflectivity);
    const Complex r = i_unit * std::sqrt(bs->reflectivity);
    const auto a = static_cast<Eigen::Index>(bs->mode_a);
    const auto b = static_cast<Eigen::Index>(bs->mode_b);
    u(a, a) = t;
    u(a, b) = r;
    u(b, a) = r;
    u(b, b) = t;
  } else if (const auto* ps = std::get_if<PhaseShifter>(&e.kind)) {
    check_mode(ps->mode);
    const auto m = static_cast<Eigen::Index>(ps->mode);
    u(m, m) = std::polar(1.0, ps->phase);
  } else if (const auto* mirror = std::get_if<Mirror>(&e.kind)) {
    check_mode(mirror->mode);
    const auto m = static_cast<Eigen::Index>(mirror->mode);
    u(m, m) = i_unit;
  } else {
    const auto& custom = std::get<CustomUnitary>(e.kind).matrix;
    if (custom.rows() != n || custom.cols() != n) {
      throw DimensionMismatch("element '" + e.label + "': custom unitary", n, custom.rows());
    }
    u = custom;
  }
  if (max_norm(u.adjoint() * u - Matrix::Identity(n, n)) > tol.hermitian) {
    throw InvariantViolation("element '" + e.label + "' is not unitary");
  }
  return u;
}

struct NamedProjector {
  std::string name;
  Projector projector;
};

/// Modes, an ordered element list, an input state, detectors and any extra
/// named projectors. Detectors must resolve the identity unless `lossy` is
/// set, in which case the deficit is reported as "loss".
struct OpticalScene {
  std::vector<std::string> mode_labels;
  std::vector<Element> elements;
  QuantumState input_state;
  std::vector<NamedProjector> named_projectors;
  std::vector<NamedProjector> detectors;
  bool lossy = false;

  [[nodiscard]] std::size_t dim() const noexcept { return mode_labels.size(); }

  [[nodiscard]] const Projector& projector(const std::string& name) const {
    for (const auto& np : named_projectors) {
      if (np.name == name) {
        return np.projector;
      }
    }
    throw std::out_of_range("no named projector '" + name + "'");
  }

  [[nodiscard]] const Projector& detector(const std::string& name) const {
    for (const auto& d : detectors) {
      if (d.name == name) {
        return d.projector;
      }
    }
    throw std::out_of_range("no detector '" + name + "'");
  }
};

/// Checks the scene invariants; throws on the first violation.
inline void validate(const OpticalScene& scene, const Tolerances& tol = {}) {
  const auto n = static_cast<Eigen::Index>(scene.dim());
  if (n < 1) {
    throw InvariantViolation("scene has no modes");
  }
  require_same_dimension("scene input state", n, scene.input_state.dim());
  for (const auto& e : scene.elements) {
    (void)element_unitary(e, scene.dim(), tol);
  }
  Matrix total = Matrix::Zero(n, n);
  for (const auto& d : scene.detectors) {
    require_same_dimension("detector '" + d.name + "'", n, d.projector.dim());
    total += d.projector.matrix();
  }
  for (const auto& p : scene.named_projectors) {
    require_same_dimension("projector '" + p.name + "'", n, p.projector.dim());
  }
  if (!scene.detectors.empty() && !scene.lossy &&
      max_norm(total - Matrix::Identity(n, n)) > tol.idempotent) {
    throw InvariantViolation("detectors do not sum to the identity and the scene is not lossy");
  }
}

/// Product of all element unitaries, last element leftmost.
inline Matrix network_unitary(const OpticalScene& scene, const Tolerances& tol = {}) {
  const auto n = static_cast<Eigen::Index>(scene.dim());
  Matrix u = Matrix::Identity(n, n);
  for (const auto& e : scene.elements) {
    u = element_unitary(e, scene.dim(), tol) * u;
  }
  return u;
}

inline QuantumState propagate(const OpticalScene& scene, const Tolerances& tol = {}) {
  require_same_dimension("propagate", static_cast<Eigen::Index>(scene.dim()),
                         scene.input_state.dim());
  QuantumState out = scene.input_state;
  for (const auto& e : scene.elements) {
    out = out.evolved(element_unitary(e, scene.dim(), tol));
  }
  return out;
}

/// Probability per detector in declaration order; lossy scenes get a
/// trailing "loss" entry.
inline std::vector<std::pair<std::string, double>> detection_probabilities(
    const OpticalScene& scene, const Tolerances& tol = {}) {
  validate(scene, tol);
  const QuantumState out = propagate(scene, tol);
  std::vector<std::pair<std::string, double>> probs;
  double sum = 0.0;
  for (const auto& d : scene.detectors) {
    const double p = probability(out, d.projector, tol);
    probs.emplace_back(d.name, p);
    sum += p;
  }
  if (scene.lossy) {
    probs.emplace_back("loss", std::max(0.0, 1.0 - sum));
  }
  return probs;
}

/// Joint click probability of two detectors for the single-photon output:
/// the expectation of meet(d1, d2). Distinct detectors must be orthogonal.
inline double anticoincidence(const OpticalScene& scene, const std::string& d1,
                              const std::string& d2, const Tolerances& tol = {}) {
  const Projector& p1 = scene.detector(d1);
  const Projector& p2 = scene.detector(d2);
  if (d1 != d2 && max_norm(p1.matrix() * p2.matrix()) > tol.idempotent) {
    throw InvariantViolation("detectors '" + d1 + "' and '" + d2 + "' are not orthogonal");
  }
  const QuantumState out = propagate(scene, tol);
  return probability(out, meet(p1, p2, tol), tol);
}

/// Replaces the phase of every phase shifter labelled `label`. Returns the
/// number of elements changed.
inline std::size_t set_phase(OpticalScene& scene, const std::string& label, double phase) {
  std::size_t changed = 0;
  for (auto& e : scene.elements) {
    if (auto* ps = std::get_if<PhaseShifter>(&e.kind); ps != nullptr && e.label == label) {
      ps->phase = phase;
      ++changed;
    }
  }
  return changed;
}

/// Mode indices of the three-path interferometer.
namespace rr_mode {
inline constexpr std::size_t r = 0;   ///< reflected at BS1, towards D_r
inline constexpr std::size_t tr = 1;  ///< transmitted at BS1, reflected at BS2 (via M1)
inline constexpr std::size_t tt = 2;  ///< transmitted at BS1 and BS2 (via M2)
}  // namespace rr_mode

/// Three-mode interferometer: BS1 splits the photon into the reflected path
/// (to D_r) and the transmitted path; BS2 splits the latter, mirrors M1/M2
/// fold both arms onto BS3, whose two outputs feed D_t1 and D_t2. The
/// incident photon travels along the mode slot that continues as the tt arm.
/// A phase shifter labelled "phi" sits on the tr arm.
///
/// Named projectors: path_r = P[r], path_t1t2 = P[tr] + P[tt],
/// interf_plus = P[(tt + tr)/√2], interf_minus = P[(tt - tr)/√2].
inline OpticalScene build_rangwala_roy(double phi) {
  using namespace rr_mode;
  const Eigen::Index n = 3;
  const Vector e_r = basis_vector(n, r);
  const Vector e_tr = basis_vector(n, tr);
  const Vector e_tt = basis_vector(n, tt);
  const double h = std::numbers::sqrt2 / 2.0;

  auto diag_projector = [n](std::initializer_list<Eigen::Index> modes) {
    Matrix m = Matrix::Zero(n, n);
    for (auto k : modes) {
      m(k, k) = 1.0;
    }
    return Projector::from_matrix(std::move(m));
  };

  OpticalScene scene{
      .mode_labels = {"psi_r", "psi_tr", "psi_tt"},
      .elements =
          {
              {"BS1", BeamSplitter{0.5, tt, r}},
              {"BS2", BeamSplitter{0.5, tt, tr}},
              {"M1", Mirror{tr}},
              {"M2", Mirror{tt}},
              {"phi", PhaseShifter{phi, tr}},
              {"BS3", BeamSplitter{0.5, tr, tt}},
          },
      .input_state = QuantumState::pure(e_tt),
      .named_projectors =
          {
              {"path_r", diag_projector({r})},
              {"path_t1t2", diag_projector({tr, tt})},
              {"interf_plus", projector_from_span({Vector(h * (e_tt + e_tr))})},
              {"interf_minus", projector_from_span({Vector(h * (e_tt - e_tr))})},
          },
      .detectors =
          {
              {"D_r", diag_projector({r})},
              {"D_t1", diag_projector({tr})},
              {"D_t2", diag_projector({tt})},
          },
      .lossy = false,
  };
  return scene;
}

/// Path observable of the three-path interferometer: 0 on Ψ_r, 1 on the
/// transmitted subspace.
inline Observable rangwala_roy_path_observable() {
  const OpticalScene s = build_rangwala_roy(0.0);
  return observable_from_spectrum({{0.0, s.projector("path_r")}, {1.0, s.projector("path_t1t2")}});
}

/// Interference observable: -1 on interf_minus, 0 on Ψ_r, +1 on interf_plus.
inline Observable rangwala_roy_interference_observable() {
  const OpticalScene s = build_rangwala_roy(0.0);
  return observable_from_spectrum({{-1.0, s.projector("interf_minus")},
                                   {0.0, s.projector("path_r")},
                                   {1.0, s.projector("interf_plus")}});
}

/// H = H_r ⊕ H_t with H_r the first dim_r coordinates. P_wave projects onto
/// the first wave_rank coordinates of H_t.
struct BiprismScene {
  std::size_t dim_r;
  std::size_t dim_t;
  std::size_t wave_rank;
  Complex alpha;
  Complex beta;
  Projector p_r;
  Projector p_t;
  Projector p_wave;
  QuantumState state;  ///< alpha·e_0 + beta·e_{dim_r}

  [[nodiscard]] std::size_t dim() const noexcept { return dim_r + dim_t; }
};

inline BiprismScene build_biprism(std::size_t dim_r, std::size_t dim_t, std::size_t wave_rank,
                                  Complex alpha, Complex beta, const Tolerances& tol = {}) {
  if (dim_r < 1 || dim_t < 1) {
    throw InvariantViolation("biprism blocks need dim_r, dim_t >= 1");
  }
  if (wave_rank < 1 || wave_rank > dim_t) {
    throw InvariantViolation("biprism wave_rank must lie in [1, dim_t]");
  }
  if (std::abs(std::norm(alpha) + std::norm(beta) - 1.0) > tol.norm) {
    throw InvariantViolation("biprism amplitudes must satisfy |alpha|^2 + |beta|^2 = 1");
  }
  const auto n = static_cast<Eigen::Index>(dim_r + dim_t);
  const auto r = static_cast<Eigen::Index>(dim_r);
  Matrix pr = Matrix::Zero(n, n);
  Matrix pt = Matrix::Zero(n, n);
  Matrix pw = Matrix::Zero(n, n);
  for (Eigen::Index k = 0; k < n; ++k) {
    (k < r ? pr : pt)(k, k) = 1.0;
    if (k >= r && k < r + static_cast<Eigen::Index>(wave_rank)) {
      pw(k, k) = 1.0;
    }
  }
  Vector psi = alpha * basis_vector(n, 0) + beta * basis_vector(n, r);
  return BiprismScene{dim_r,
                      dim_t,
                      wave_rank,
                      alpha,
                      beta,
                      Projector::from_matrix(std::move(pr), tol),
                      Projector::from_matrix(std::move(pt), tol),
                      Projector::from_matrix(std::move(pw), tol),
                      QuantumState::pure(std::move(psi), tol)};
}

/// alpha·e_0 + beta·(first coordinate of H_t outside range P_wave). Needs
/// wave_rank < dim_t.
inline QuantumState biprism_state_outside_wave(const BiprismScene& scene, Complex alpha,
                                               Complex beta, const Tolerances& tol = {}) {
  if (scene.wave_rank >= scene.dim_t) {
    throw InvariantViolation("P_t - P_wave is zero when wave_rank = dim_t");
  }
  const auto n = static_cast<Eigen::Index>(scene.dim());
  const auto k = static_cast<Eigen::Index>(scene.dim_r + scene.wave_rank);
  return QuantumState::pure(alpha * basis_vector(n, 0) + beta * basis_vector(n, k), tol);
}

/// The biprism as an optical scene with no elements and detectors D_r = P_r,
/// D_t = P_t.
inline OpticalScene biprism_optical_scene(const BiprismScene& b) {
  std::vector<std::string> labels;
  for (std::size_t k = 0; k < b.dim_r; ++k) {
    labels.push_back("r" + std::to_string(k));
  }
  for (std::size_t k = 0; k < b.dim_t; ++k) {
    labels.push_back("t" + std::to_string(k));
  }
  return OpticalScene{
      .mode_labels = std::move(labels),
      .elements = {},
      .input_state = b.state,
      .named_projectors = {{"P_r", b.p_r}, {"P_t", b.p_t}, {"P_wave", b.p_wave}},
      .detectors = {{"D_r", b.p_r}, {"D_t", b.p_t}},
      .lossy = false,
  };
}

}  // namespace complement_lab
