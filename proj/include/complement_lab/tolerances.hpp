#pragma once

#include <cstdlib>
#include <stdexcept>
#include <string>

namespace complement_lab {

/// Numerical thresholds shared by every module. All of them scale together
/// through `scaled()`, which is how the CLI applies COMPLEMENT_LAB_TOL.
struct Tolerances {
  double hermitian = 1e-10;    ///< max |P - P^dagger| entry
  double idempotent = 1e-10;   ///< max |P^2 - P| entry
  double commutator = 1e-10;   ///< max |PQ - QP| entry
  double angle = 1e-8;         ///< singular values >= 1 - angle count as intersecting
  double rank = 1e-10;         ///< relative to the largest singular value
  double norm = 1e-10;         ///< unit norm / unit trace
  double psd = 1e-10;          ///< smallest admissible density eigenvalue is -psd
  double eigenvalue = 1e-8;    ///< projector eigenvalues must sit this close to {0, 1}

  [[nodiscard]] Tolerances scaled(double factor) const {
    if (!(factor > 0.0)) {
      throw std::invalid_argument("tolerance scale must be positive");
    }
    Tolerances t = *this;
    t.hermitian *= factor;
    t.idempotent *= factor;
    t.commutator *= factor;
    t.angle *= factor;
    t.rank *= factor;
    t.norm *= factor;
    t.psd *= factor;
    t.eigenvalue *= factor;
    return t;
  }
};

/// Reads COMPLEMENT_LAB_TOL (a positive real, default 1.0) and returns the
/// default tolerances scaled by it.
inline Tolerances tolerances_from_environment() {
  const char* raw = std::getenv("COMPLEMENT_LAB_TOL");
  if (raw == nullptr || *raw == '\0') {
    return Tolerances{};
  }
  std::size_t consumed = 0;
  double factor = 0.0;
  try {
    factor = std::stod(raw, &consumed);
  } catch (const std::exception&) {
    throw std::invalid_argument(std::string("COMPLEMENT_LAB_TOL is not a number: ") + raw);
  }
  if (consumed != std::string(raw).size()) {
    throw std::invalid_argument(std::string("COMPLEMENT_LAB_TOL is not a number: ") + raw);
  }
  return Tolerances{}.scaled(factor);
}

}  // namespace complement_lab
