#pragma once

// Which-path predictability and fringe visibility for two-path states, and
// the biprism normalization report.
//
// For a two-path state α Ψ_r + β Ψ_t with off-diagonal coherence μ:
//   P = | |α|² - |β|² |,   V = 2 μ |α| |β|,   P² + V² = P² + μ² (1 - P²) ≤ 1,
// with equality for pure states (μ = 1). V plays the role of the wave
// measure W in P² + W² = 1; other wave measures are not modelled.

#include <algorithm>
#include <cmath>
#include <numbers>
#include <optional>
#include <span>
#include <utility>

#include "complement_lab/hilbert.hpp"
#include "complement_lab/optics.hpp"

namespace complement_lab {

struct TwoPathState {
  Complex alpha;
  Complex beta;
  double coherence = 1.0;  ///< μ ∈ [0, 1]; 1 is a pure superposition

  /// |α|² = alpha2, real non-negative amplitudes.
  static TwoPathState from_alpha2(double alpha2, double coherence = 1.0) {
    if (!(alpha2 >= 0.0 && alpha2 <= 1.0)) {
      throw InvariantViolation("|alpha|^2 must lie in [0, 1]");
    }
    return {std::sqrt(alpha2), std::sqrt(1.0 - alpha2), coherence};
  }

  void validate(const Tolerances& tol = {}) const {
    if (std::abs(std::norm(alpha) + std::norm(beta) - 1.0) > tol.norm) {
      throw InvariantViolation("two-path amplitudes must satisfy |alpha|^2 + |beta|^2 = 1");
    }
    if (!(coherence >= 0.0 && coherence <= 1.0)) {
      throw InvariantViolation("coherence must lie in [0, 1]");
    }
  }
};

struct DualityReport {
  double alpha2 = 0.0;  ///< ⟨P_r⟩ (|α|²)
  double coherence = 0.0;
  double predictability = 0.0;
  double visibility = 0.0;
  double sum_of_squares = 0.0;  ///< P² + V²
  double normalization = 0.0;   ///< ⟨P_r⟩ + ⟨P_t⟩, never a duality value
  double wave_expectation = 0.0;
  double transmit_expectation = 0.0;
  /// Set when P_wave ≤ P_t: the wave expectation is also transmitted-path
  /// information, so the normalization is not a complementarity relation.
  bool normalization_not_complementarity = false;
};

inline DualityReport duality_measures(const TwoPathState& s, const Tolerances& tol = {}) {
  s.validate(tol);
  const double a2 = std::norm(s.alpha);
  const double b2 = std::norm(s.beta);
  DualityReport r;
  r.alpha2 = a2;
  r.coherence = s.coherence;
  r.predictability = std::abs(a2 - b2);
  r.visibility = std::min(1.0, 2.0 * s.coherence * std::abs(s.alpha) * std::abs(s.beta));
  r.sum_of_squares = r.predictability * r.predictability + r.visibility * r.visibility;
  r.normalization = a2 + b2;
  // Two-path idealization: the wave projector is the whole transmitted path.
  r.wave_expectation = b2;
  r.transmit_expectation = b2;
  return r;
}

/// Report for a biprism scene, evaluated on the scene's prepared state or on
/// `state` when given. P and V come from the r/t block structure of the
/// density operator: P = |⟨P_r⟩ - ⟨P_t⟩|, V = 2 ‖P_r T P_t‖₁.
inline DualityReport normalization_vs_duality(const BiprismScene& scene,
                                              const std::optional<QuantumState>& state = {},
                                              const Tolerances& tol = {}) {
  const QuantumState& psi = state ? *state : scene.state;
  require_same_dimension("biprism state", static_cast<Eigen::Index>(scene.dim()), psi.dim());
  const double pr = expectation(psi, scene.p_r, tol);
  const double pt = expectation(psi, scene.p_t, tol);
  const double pw = expectation(psi, scene.p_wave, tol);

  const Matrix rho = psi.density();
  const Matrix off_diagonal = scene.p_r.matrix() * rho * scene.p_t.matrix();
  Eigen::JacobiSVD<Matrix> svd(off_diagonal);
  const double coherence_norm = svd.singularValues().sum();

  DualityReport r;
  r.alpha2 = pr;
  r.predictability = std::abs(pr - pt);
  r.visibility = std::min(1.0, 2.0 * coherence_norm);
  r.coherence = (pr > 0.0 && pt > 0.0) ? std::min(1.0, coherence_norm / std::sqrt(pr * pt)) : 0.0;
  r.sum_of_squares = r.predictability * r.predictability + r.visibility * r.visibility;
  r.normalization = pr + pt;
  r.wave_expectation = pw;
  r.transmit_expectation = pt;
  r.normalization_not_complementarity = loewner_leq(scene.p_wave, scene.p_t, tol);
  return r;
}

/// Fringe visibility (max - min)/(max + min) from (phase, probability)
/// samples. Needs at least three samples whose phases span a full period
/// (allowing for one sample spacing). Returns nullopt when max + min = 0.
inline std::optional<double> visibility_from_counts(
    std::span<const std::pair<double, double>> counts) {
  if (counts.size() < 3) {
    throw std::invalid_argument("visibility needs at least 3 samples");
  }
  double phi_lo = counts.front().first;
  double phi_hi = phi_lo;
  double lo = counts.front().second;
  double hi = lo;
  for (const auto& [phi, p] : counts) {
    if (!std::isfinite(phi) || !std::isfinite(p) || p < 0.0) {
      throw std::invalid_argument("visibility samples must be finite and non-negative");
    }
    phi_lo = std::min(phi_lo, phi);
    phi_hi = std::max(phi_hi, phi);
    lo = std::min(lo, p);
    hi = std::max(hi, p);
  }
  const double n = static_cast<double>(counts.size());
  const double period = 2.0 * std::numbers::pi;
  if (phi_hi - phi_lo < period * (n - 1.0) / n - 1e-9) {
    throw std::invalid_argument("visibility samples do not span a full period");
  }
  if (hi + lo == 0.0) {
    return std::nullopt;
  }
  return (hi - lo) / (hi + lo);
}

}  // namespace complement_lab
