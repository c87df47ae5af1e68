#pragma once

#include <algorithm>
#include <charconv>
#include <cstdint>
#include <cmath>
#include <limits>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "complement_lab/hilbert.hpp"

namespace complement_lab {

/// Finite union of half-open intervals [lo, hi) and isolated points. Points
/// match an eigenvalue within `point_tolerance` (relative to max(1, |x|)) so
/// that {1} catches an eigenvalue computed as 0.9999999999999998.
class ValueSet {
 public:
  struct Interval {
    double lo;
    double hi;
    friend bool operator==(const Interval&, const Interval&) = default;
  };

  static constexpr double point_tolerance = 1e-9;

  ValueSet() = default;

  static ValueSet interval(double lo, double hi) {
    ValueSet s;
    s.add_interval(lo, hi);
    return s;
  }

  static ValueSet points(std::vector<double> values) {
    ValueSet s;
    for (double v : values) {
      s.add_point(v);
    }
    return s;
  }

  static ValueSet all() {
    return interval(-std::numeric_limits<double>::infinity(),
                    std::numeric_limits<double>::infinity());
  }

  ValueSet& add_interval(double lo, double hi) {
    if (std::isnan(lo) || std::isnan(hi) || !(lo < hi)) {
      throw InvariantViolation("value-set interval needs lo < hi");
    }
    intervals_.push_back({lo, hi});
    normalize();
    return *this;
  }

  ValueSet& add_point(double x) {
    if (!std::isfinite(x)) {
      throw InvariantViolation("value-set point must be finite");
    }
    points_.push_back(x);
    normalize();
    return *this;
  }

  [[nodiscard]] bool contains(double x) const {
    for (const auto& iv : intervals_) {
      if (iv.lo <= x && x < iv.hi) {
        return true;
      }
    }
    return std::any_of(points_.begin(), points_.end(), [x](double p) {
      return std::abs(x - p) <= point_tolerance * std::max(1.0, std::abs(p));
    });
  }

  [[nodiscard]] bool empty() const noexcept { return intervals_.empty() && points_.empty(); }
  [[nodiscard]] const std::vector<Interval>& intervals() const noexcept { return intervals_; }
  [[nodiscard]] const std::vector<double>& isolated_points() const noexcept { return points_; }

  friend ValueSet operator|(ValueSet a, const ValueSet& b) {
    for (const auto& iv : b.intervals_) {
      a.intervals_.push_back(iv);
    }
    for (double p : b.points_) {
      a.points_.push_back(p);
    }
    a.normalize();
    return a;
  }

  friend bool operator==(const ValueSet&, const ValueSet&) = default;

  /// "[0.5,2.5) ∪ {3}", or with `ascii` the "+" separator. Numbers use the
  /// shortest representation that reads back to the same double.
  [[nodiscard]] std::string to_string(bool ascii = false) const {
    std::string out;
    const std::string sep = ascii ? "+" : " ∪ ";
    for (const auto& iv : intervals_) {
      if (!out.empty()) {
        out += sep;
      }
      out += "[" + format_number(iv.lo) + "," + format_number(iv.hi) + ")";
    }
    if (!points_.empty()) {
      if (!out.empty()) {
        out += sep;
      }
      out += "{";
      for (std::size_t i = 0; i < points_.size(); ++i) {
        out += (i ? "," : "") + format_number(points_[i]);
      }
      out += "}";
    }
    return out.empty() ? "{}" : out;
  }

  /// Parses the textual form produced by to_string (either separator).
  /// Whitespace is ignored; "inf" and "-inf" are accepted as endpoints.
  static ValueSet parse(std::string_view text) {
    std::string compact;
    for (std::size_t i = 0; i < text.size(); ++i) {
      if (text.substr(i, 3) == "∪") {
        compact += '+';
        i += 2;
      } else if (!std::isspace(static_cast<unsigned char>(text[i]))) {
        compact += text[i];
      }
    }
    ValueSet out;
    std::size_t pos = 0;
    auto fail = [&](const std::string& why) {
      throw std::invalid_argument("bad value set '" + std::string(text) + "': " + why);
    };
    while (pos < compact.size()) {
      const char open = compact[pos];
      if (open == '[') {
        const auto comma = compact.find(',', pos);
        const auto close = compact.find(')', pos);
        if (comma == std::string::npos || close == std::string::npos || comma > close) {
          fail("expected [lo,hi)");
        }
        const double lo = parse_number(compact.substr(pos + 1, comma - pos - 1), fail);
        const double hi = parse_number(compact.substr(comma + 1, close - comma - 1), fail);
        if (!(lo < hi)) {
          fail("interval needs lo < hi");
        }
        out.add_interval(lo, hi);
        pos = close + 1;
      } else if (open == '{') {
        const auto close = compact.find('}', pos);
        if (close == std::string::npos) {
          fail("unterminated {");
        }
        std::string body = compact.substr(pos + 1, close - pos - 1);
        std::size_t start = 0;
        while (start < body.size()) {
          auto next = body.find(',', start);
          if (next == std::string::npos) {
            next = body.size();
          }
          const double v = parse_number(body.substr(start, next - start), fail);
          if (!std::isfinite(v)) {
            fail("points must be finite");
          }
          out.add_point(v);
          start = next + 1;
        }
        pos = close + 1;
      } else {
        fail("expected '[' or '{'");
      }
      if (pos < compact.size()) {
        if (compact[pos] != '+') {
          fail("expected separator");
        }
        ++pos;
        if (pos == compact.size()) {
          fail("trailing separator");
        }
      }
    }
    return out;
  }

  static std::string format_number(double v) {
    if (std::isinf(v)) {
      return v > 0 ? "inf" : "-inf";
    }
    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
  }

 private:
  template <typename Fail>
  static double parse_number(const std::string& s, Fail&& fail) {
    if (s == "inf" || s == "+inf") {
      return std::numeric_limits<double>::infinity();
    }
    if (s == "-inf") {
      return -std::numeric_limits<double>::infinity();
    }
    double v = 0.0;
    const char* first = s.data();
    if (!s.empty() && s[0] == '+') {
      ++first;
    }
    auto res = std::from_chars(first, s.data() + s.size(), v);
    if (s.empty() || res.ec != std::errc{} || res.ptr != s.data() + s.size()) {
      fail("bad number '" + s + "'");
    }
    return v;
  }

  void normalize() {
    std::sort(intervals_.begin(), intervals_.end(),
              [](const Interval& a, const Interval& b) { return a.lo < b.lo; });
    std::vector<Interval> merged;
    for (const auto& iv : intervals_) {
      if (!merged.empty() && iv.lo <= merged.back().hi) {
        merged.back().hi = std::max(merged.back().hi, iv.hi);
      } else {
        merged.push_back(iv);
      }
    }
    intervals_ = std::move(merged);
    std::sort(points_.begin(), points_.end());
    points_.erase(std::unique(points_.begin(), points_.end()), points_.end());
    std::erase_if(points_, [this](double p) {
      return std::any_of(intervals_.begin(), intervals_.end(),
                         [p](const Interval& iv) { return iv.lo <= p && p < iv.hi; });
    });
  }

  std::vector<Interval> intervals_;
  std::vector<double> points_;
};

/// One atom of a spectral measure.
struct SpectralPoint {
  double value;
  Projector projector;
};

/// Hermitian matrix together with its clustered spectral measure. Points are
/// strictly increasing; their projectors are mutually orthogonal and sum to I.
class Observable {
 public:
  [[nodiscard]] const Matrix& matrix() const noexcept { return matrix_; }
  [[nodiscard]] const std::vector<SpectralPoint>& spectrum() const noexcept { return spectrum_; }
  [[nodiscard]] Eigen::Index dim() const noexcept { return matrix_.rows(); }
  [[nodiscard]] std::size_t size() const noexcept { return spectrum_.size(); }
  /// A single spectral point: the observable is a multiple of the identity.
  [[nodiscard]] bool is_scalar() const noexcept { return spectrum_.size() == 1; }
  [[nodiscard]] bool is_nondegenerate() const noexcept {
    return static_cast<Eigen::Index>(spectrum_.size()) == dim();
  }

  /// Σ λ_k P_k.
  [[nodiscard]] Matrix reconstruct() const {
    Matrix m = Matrix::Zero(dim(), dim());
    for (const auto& pt : spectrum_) {
      m += pt.value * pt.projector.matrix();
    }
    return m;
  }

  /// Projector for the subset of spectral points selected by `mask` (bit k
  /// selects the k-th smallest eigenvalue).
  [[nodiscard]] Projector subset_projector(std::uint64_t mask) const {
    Eigen::Index cols = 0;
    for (std::size_t k = 0; k < spectrum_.size(); ++k) {
      if (mask >> k & 1U) {
        cols += spectrum_[k].projector.rank();
      }
    }
    Matrix basis(dim(), cols);
    Eigen::Index at = 0;
    for (std::size_t k = 0; k < spectrum_.size(); ++k) {
      if (mask >> k & 1U) {
        const auto& b = spectrum_[k].projector.basis();
        basis.middleCols(at, b.cols()) = b;
        at += b.cols();
      }
    }
    return Projector::from_orthonormal_basis(std::move(basis));
  }

  /// Value set {λ_k : bit k of mask set}.
  [[nodiscard]] ValueSet subset_values(std::uint64_t mask) const {
    std::vector<double> values;
    for (std::size_t k = 0; k < spectrum_.size(); ++k) {
      if (mask >> k & 1U) {
        values.push_back(spectrum_[k].value);
      }
    }
    return ValueSet::points(std::move(values));
  }

 private:
  friend Observable decompose(const Matrix&, std::optional<double>, const Tolerances&);
  friend Observable observable_from_spectrum(std::vector<SpectralPoint>, const Tolerances&);

  Matrix matrix_;
  std::vector<SpectralPoint> spectrum_;
};

/// Default clustering tolerance: 1e-8 times the spectral radius.
inline double default_cluster_tolerance(const Matrix& m) {
  Eigen::SelfAdjointEigenSolver<Matrix> eig(0.5 * (m + m.adjoint()), Eigen::EigenvaluesOnly);
  return 1e-8 * eig.eigenvalues().cwiseAbs().maxCoeff();
}

/// Spectral measure of a Hermitian matrix. Eigenvalues separated by no more
/// than `cluster_tol` from their neighbour are merged into one point whose
/// value is the cluster mean.
inline Observable decompose(const Matrix& m, std::optional<double> cluster_tol = std::nullopt,
                            const Tolerances& tol = {}) {
  if (m.rows() != m.cols() || m.rows() < 1 || !all_finite(m)) {
    throw InvariantViolation("observable matrix must be square, finite, dimension >= 1");
  }
  if (!is_hermitian(m, tol.hermitian)) {
    throw InvariantViolation("observable matrix is not Hermitian");
  }
  Eigen::SelfAdjointEigenSolver<Matrix> eig(0.5 * (m + m.adjoint()));
  const auto& values = eig.eigenvalues();
  const auto& vectors = eig.eigenvectors();
  const double gap = cluster_tol.value_or(1e-8 * values.cwiseAbs().maxCoeff());
  if (gap < 0.0) {
    throw std::invalid_argument("cluster tolerance must be non-negative");
  }

  Observable out;
  out.matrix_ = m;
  Eigen::Index start = 0;
  const Eigen::Index n = values.size();
  for (Eigen::Index k = 1; k <= n; ++k) {
    if (k == n || values(k) - values(k - 1) > gap) {
      const Eigen::Index count = k - start;
      const double mean = values.segment(start, count).mean();
      // Eigenvectors from the solver are orthonormal; re-orthonormalize the
      // cluster block so the projector is exact to round-off.
      Eigen::HouseholderQR<Matrix> qr(vectors.middleCols(start, count));
      Matrix basis = qr.householderQ() * Matrix::Identity(m.rows(), count);
      out.spectrum_.push_back({mean, Projector::from_orthonormal_basis(std::move(basis))});
      start = k;
    }
  }
  return out;
}

/// Observable Σ λ_k P_k from explicit spectral data. Values must be strictly
/// increasing; projectors mutually orthogonal and complete.
inline Observable observable_from_spectrum(std::vector<SpectralPoint> points,
                                           const Tolerances& tol = {}) {
  if (points.empty()) {
    throw InvariantViolation("observable needs at least one spectral point");
  }
  const Eigen::Index dim = points.front().projector.dim();
  Matrix sum = Matrix::Zero(dim, dim);
  for (std::size_t i = 0; i < points.size(); ++i) {
    require_same_dimension("observable_from_spectrum", dim, points[i].projector.dim());
    if (i > 0 && !(points[i].value > points[i - 1].value)) {
      throw InvariantViolation("spectral values must be strictly increasing");
    }
    if (points[i].projector.is_zero()) {
      throw InvariantViolation("spectral projector must be nonzero");
    }
    for (std::size_t j = 0; j < i; ++j) {
      if (max_norm(points[i].projector.matrix() * points[j].projector.matrix()) > tol.idempotent) {
        throw InvariantViolation("spectral projectors must be mutually orthogonal");
      }
    }
    sum += points[i].projector.matrix();
  }
  if (max_norm(sum - Matrix::Identity(dim, dim)) > tol.idempotent) {
    throw InvariantViolation("spectral projectors must sum to the identity");
  }
  Observable out;
  out.matrix_ = Matrix::Zero(dim, dim);
  for (const auto& pt : points) {
    out.matrix_ += pt.value * pt.projector.matrix();
  }
  out.spectrum_ = std::move(points);
  return out;
}

/// Two-valued observable 1·P + 0·(I − P).
inline Observable observable_from_projector(const Projector& p, const Tolerances& tol = {}) {
  if (p.is_zero()) {
    return observable_from_spectrum({{0.0, Projector::identity(p.dim())}}, tol);
  }
  if (p.is_identity()) {
    return observable_from_spectrum({{1.0, p}}, tol);
  }
  return observable_from_spectrum({{0.0, orthocomplement(p)}, {1.0, p}}, tol);
}

/// P_A(X): sum of the eigenprojectors whose eigenvalue lies in X.
inline Projector spectral_projector(const Observable& a, const ValueSet& x) {
  std::uint64_t mask = 0;
  for (std::size_t k = 0; k < a.spectrum().size(); ++k) {
    if (x.contains(a.spectrum()[k].value)) {
      mask |= std::uint64_t{1} << k;
    }
  }
  return a.subset_projector(mask);
}

/// Nonzero meet of an eigenprojector of A with one of B.
struct CommonEigenspace {
  std::size_t a_index;
  std::size_t b_index;
  double a_value;
  double b_value;
  Projector projector;
};

/// All nonzero meets between eigenprojectors of A and B; their ranges span
/// every common eigenvector. Empty iff A and B are totally noncommuting.
inline std::vector<CommonEigenspace> common_eigenvectors(const Observable& a, const Observable& b,
                                                         const Tolerances& tol = {}) {
  require_same_dimension("common_eigenvectors", a.dim(), b.dim());
  std::vector<CommonEigenspace> out;
  for (std::size_t i = 0; i < a.size(); ++i) {
    for (std::size_t j = 0; j < b.size(); ++j) {
      Projector m = meet(a.spectrum()[i].projector, b.spectrum()[j].projector, tol);
      if (!m.is_zero()) {
        out.push_back({i, j, a.spectrum()[i].value, b.spectrum()[j].value, std::move(m)});
      }
    }
  }
  return out;
}

}  // namespace complement_lab
