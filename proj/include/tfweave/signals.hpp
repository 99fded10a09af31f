#pragma once

// Discretization model and window library.
//
// Signals live on the symmetric grid t_n = (n - N/2)/sqrt(N). Time span and
// frequency span are both sqrt(N), so the DFT approximates the continuous
// Fourier transform and the closed-form Gaussian formulas can be checked on
// the grid directly. Inner products carry the Riemann weight step = 1/sqrt(N).

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

namespace tfweave {

using cplx = std::complex<double>;
using CVector = Eigen::VectorXcd;
using CMatrix = Eigen::MatrixXcd;
using RMatrix = Eigen::MatrixXd;

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct SampleGrid {
  int size = 0;
  double step = 0.0;

  double point(int n) const { return (n - size / 2) * step; }
  double span() const { return size * step; }

  friend bool operator==(const SampleGrid& a, const SampleGrid& b) {
    return a.size == b.size;
  }
};

inline SampleGrid make_grid(int n) {
  if (n < 8 || n % 2 != 0) {
    throw Error("grid size must be even and at least 8, got " + std::to_string(n));
  }
  return SampleGrid{n, 1.0 / std::sqrt(static_cast<double>(n))};
}

struct Signal {
  SampleGrid grid;
  CVector values;

  Signal() = default;
  explicit Signal(SampleGrid g) : grid(g), values(CVector::Zero(g.size)) {}
  Signal(SampleGrid g, CVector v) : grid(g), values(std::move(v)) {
    if (values.size() != grid.size) throw Error("signal length does not match grid");
  }

  int size() const { return grid.size; }
  cplx& operator[](int n) { return values[n]; }
  cplx operator[](int n) const { return values[n]; }
};

inline void require_same_grid(const Signal& a, const Signal& b) {
  if (!(a.grid == b.grid)) throw Error("signals live on different grids");
}

/// Weighted inner product <f,g> = step * sum f[n] conj(g[n]).
inline cplx inner(const Signal& f, const Signal& g) {
  require_same_grid(f, g);
  // Eigen's dot() conjugates its left operand.
  return f.grid.step * g.values.dot(f.values);
}

inline double norm(const Signal& f) {
  return std::sqrt(f.grid.step * f.values.squaredNorm());
}

inline Signal operator-(const Signal& a, const Signal& b) {
  require_same_grid(a, b);
  return Signal(a.grid, a.values - b.values);
}

inline Signal operator+(const Signal& a, const Signal& b) {
  require_same_grid(a, b);
  return Signal(a.grid, a.values + b.values);
}

inline Signal operator*(cplx s, const Signal& a) { return Signal(a.grid, s * a.values); }

inline Signal normalized(const Signal& f) {
  const double n = norm(f);
  if (n == 0.0) throw Error("cannot normalize the zero signal");
  return Signal(f.grid, f.values / n);
}

enum class WindowKind { StandardGaussian, DilatedGaussian, ChirpedGaussian, Hermite };

struct WindowSpec {
  WindowKind kind = WindowKind::StandardGaussian;
  double dilation = 1.0;
  double chirp = 0.0;
  int order = 0;

  static WindowSpec standard() { return {}; }
  static WindowSpec gaussian(double l) { return {WindowKind::DilatedGaussian, l, 0.0, 0}; }
  static WindowSpec chirped(double c, double l) { return {WindowKind::ChirpedGaussian, l, c, 0}; }
  static WindowSpec hermite(int k, double l = 1.0) { return {WindowKind::Hermite, l, 0.0, k}; }
};

inline void validate(const WindowSpec& spec) {
  if (!(spec.dilation > 0.0)) throw Error("window dilation must be positive");
  if (spec.kind == WindowKind::ChirpedGaussian && spec.chirp < 0.0) {
    throw Error("chirp parameter must be non-negative");
  }
  if (spec.kind == WindowKind::Hermite && spec.order < 0) {
    throw Error("Hermite order must be non-negative");
  }
}

/// False when the Gaussian envelope is not resolved on the grid, i.e. the
/// dilation lies outside [0.2, 5] or the grid is smaller than 128 samples.
/// Sampling still succeeds; the caller decides whether to warn.
inline bool window_tails_resolved(const SampleGrid& grid, const WindowSpec& spec) {
  return grid.size >= 128 && spec.dilation >= 0.2 && spec.dilation <= 5.0;
}

namespace detail {

// Orthonormal Hermite functions psi_k(u) in L^2(R, du) via the three-term
// recurrence; never forms H_k(u) or k! explicitly.
inline void hermite_functions(double u, int kmax, double* out) {
  const double pi = std::numbers::pi;
  out[0] = std::pow(pi, -0.25) * std::exp(-0.5 * u * u);
  if (kmax >= 1) out[1] = std::sqrt(2.0) * u * out[0];
  for (int k = 1; k < kmax; ++k) {
    out[k + 1] = std::sqrt(2.0 / (k + 1)) * u * out[k] - std::sqrt(static_cast<double>(k) / (k + 1)) * out[k - 1];
  }
}

}  // namespace detail

/// Sampled window. Gaussian kinds follow 2^{1/4} sqrt(L) e^{pi i c t^2} e^{-pi (L t)^2};
/// the Hermite kind is the L-dilated Hermite function of order k, renormalized
/// in the weighted norm.
inline Signal window(const SampleGrid& grid, const WindowSpec& spec) {
  validate(spec);
  const double pi = std::numbers::pi;
  const double l = spec.kind == WindowKind::StandardGaussian ? 1.0 : spec.dilation;
  const double c = spec.kind == WindowKind::ChirpedGaussian ? spec.chirp : 0.0;
  Signal s(grid);

  if (spec.kind != WindowKind::Hermite) {
    const double amp = std::pow(2.0, 0.25) * std::sqrt(l);
    for (int n = 0; n < grid.size; ++n) {
      const double t = grid.point(n);
      s[n] = amp * std::exp(-pi * (l * t) * (l * t)) * std::polar(1.0, pi * c * t * t);
    }
    return s;
  }

  // psi_k(u) with u = sqrt(2 pi) L t is orthonormal in du; the factor
  // (2 pi)^{1/4} sqrt(L) makes it orthonormal in dt and matches the
  // dilated Gaussian at k = 0.
  std::vector<double> buf(static_cast<std::size_t>(spec.order) + 1);
  const double scale = std::pow(2.0 * pi, 0.25) * std::sqrt(l);
  for (int n = 0; n < grid.size; ++n) {
    const double u = std::sqrt(2.0 * pi) * l * grid.point(n);
    detail::hermite_functions(u, spec.order, buf.data());
    s[n] = scale * buf[static_cast<std::size_t>(spec.order)];
  }
  return normalized(s);
}

/// ||g_{L1} - g_{L2}||_2 for unit-norm dilated Gaussians.
inline double gaussian_l2_distance(double l1, double l2) {
  if (!(l1 > 0.0) || !(l2 > 0.0)) throw Error("dilations must be positive");
  const double sq = 2.0 - 2.0 * std::sqrt(2.0 * l1 * l2) / std::sqrt(l1 * l1 + l2 * l2);
  return std::sqrt(std::max(sq, 0.0));
}

/// Open interval of ratios L2/L1 for which the Gaussian distance is below 1/2.
inline std::pair<double, double> admissible_ratio_interval() {
  const double root = std::sqrt(1695.0);
  return {(64.0 - root) / 49.0, (64.0 + root) / 49.0};
}

}  // namespace tfweave
