#pragma once

// Time-frequency localization operators H_{m,phi} = V_phi^* m V_phi and the
// tools built around them: spectral truncation, concentration, elliptic
// symbols with their closed-form spectrum, partitions of unity and the
// polynomial decay fit for analysis windows.

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <vector>

#include <Eigen/Eigenvalues>

#include "tfweave/lattice.hpp"
#include "tfweave/signals.hpp"
#include "tfweave/tfa.hpp"

namespace tfweave {

/// Eigenvalues below this (in absolute terms) are numerical noise of a positive operator.
inline constexpr double kEigenClipTol = 1e-10;

/// Non-negative real function on the phase-space grid.
struct Symbol {
  SampleGrid grid;
  RMatrix values;

  Symbol() = default;
  Symbol(SampleGrid g, RMatrix v) : grid(g), values(std::move(v)) {
    if (values.rows() != grid.size || values.cols() != grid.size) throw Error("symbol shape does not match grid");
    if ((values.array() < 0.0).any()) throw Error("symbol values must be non-negative");
  }

  static Symbol constant(SampleGrid g, double v) { return Symbol(g, RMatrix::Constant(g.size, g.size, v)); }

  double mass() const { return values.sum() / grid.size; }
  double max() const { return values.maxCoeff(); }
};

inline Symbol translate(const Symbol& m, PhaseSpacePoint p) { return Symbol(m.grid, translate(m.values, p)); }

struct SymbolFamilyMember {
  PhaseSpacePoint center;
  Symbol symbol;
};

struct SymbolFamily {
  std::vector<SymbolFamilyMember> members;
  Symbol envelope;  // centred at the origin
  bool partition_of_unity = false;

  /// Pointwise sum of all members.
  RMatrix total() const {
    RMatrix sum = RMatrix::Zero(envelope.grid.size, envelope.grid.size);
    for (const auto& m : members) sum += m.symbol.values;
    return sum;
  }

  /// Every member lies below the envelope moved to its centre.
  bool well_spread() const {
    for (const auto& m : members) {
      if ((m.symbol.values.array() > translate(envelope.values, m.center).array() + 1e-15).any()) return false;
    }
    return true;
  }
};

/// Dense localization operator with a cached eigendecomposition.
///
/// The matrix acts on sample vectors. Eigenvectors are orthonormal in the
/// weighted inner product and sorted by non-increasing eigenvalue; each is
/// phase-fixed so that its largest-magnitude entry is positive real.
class LocOperator {
 public:
  LocOperator(SampleGrid grid, CMatrix matrix) : grid_(grid), matrix_(std::move(matrix)) { decompose(); }

  const SampleGrid& grid() const { return grid_; }
  const CMatrix& matrix() const { return matrix_; }
  const Eigen::VectorXd& eigenvalues() const { return eigenvalues_; }
  /// Columns are the eigenvectors as sample arrays.
  const CMatrix& eigenvectors() const { return eigenvectors_; }
  double raw_min_eigenvalue() const { return raw_min_eigenvalue_; }
  int kept_count() const { return kept_; }

  Signal eigenvector(int k) const { return Signal(grid_, eigenvectors_.col(k)); }
  Signal apply(const Signal& f) const {
    if (!(f.grid == grid_)) throw Error("operator and signal live on different grids");
    return Signal(grid_, matrix_ * f.values);
  }

  /// Removes eigenvalues outside [0, upper] left over by roundoff.
  void clip_eigenvalues(double upper) {
    for (Eigen::Index k = 0; k < eigenvalues_.size(); ++k) {
      eigenvalues_[k] = std::clamp(eigenvalues_[k], 0.0, upper);
    }
  }

  /// Rebuild from the eigenpairs whose eigenvalue exceeds threshold.
  LocOperator truncated(double threshold) const {
    LocOperator out = *this;
    int kept = 0;
    while (kept < eigenvalues_.size() && eigenvalues_[kept] > threshold) ++kept;
    const auto v = eigenvectors_.leftCols(kept);
    out.matrix_ = grid_.step * v * eigenvalues_.head(kept).asDiagonal() * v.adjoint();
    out.eigenvalues_.tail(eigenvalues_.size() - kept).setZero();
    out.kept_ = kept;
    return out;
  }

 private:
  void decompose() {
    const CMatrix herm = 0.5 * (matrix_ + matrix_.adjoint());
    Eigen::SelfAdjointEigenSolver<CMatrix> solver(herm);
    if (solver.info() != Eigen::Success) throw Error("Hermitian eigensolver failed");
    const int n = grid_.size;
    eigenvalues_.resize(n);
    eigenvectors_.resize(n, n);
    raw_min_eigenvalue_ = solver.eigenvalues()[0];
    const double scale = 1.0 / std::sqrt(grid_.step);
    for (int k = 0; k < n; ++k) {
      const int src = n - 1 - k;
      eigenvalues_[k] = solver.eigenvalues()[src];
      CVector v = solver.eigenvectors().col(src) * scale;
      const double peak = v.cwiseAbs().maxCoeff();
      int anchor = 0;
      while (std::abs(v[anchor]) < peak * (1.0 - 1e-9)) ++anchor;
      v *= std::conj(v[anchor]) / std::abs(v[anchor]);
      eigenvectors_.col(k) = v;
    }
    kept_ = n;
  }

  SampleGrid grid_;
  CMatrix matrix_;
  Eigen::VectorXd eigenvalues_;
  CMatrix eigenvectors_;
  double raw_min_eigenvalue_ = 0.0;
  int kept_ = 0;
};

/// Assemble H_{m,phi} as a dense matrix:
///   H[n][k] = cellArea * step * sum_x phi[n-x] conj(phi[k-x]) sum_w m(x,w) e^{2 pi i w (n-k)/N}.
inline CMatrix loc_operator_matrix(const Symbol& m, const Signal& phi) {
  if (!(m.grid == phi.grid)) throw Error("symbol and window live on different grids");
  const int n = phi.size();
  const double weight = phi.grid.step / n;
  CMatrix h = CMatrix::Zero(n, n);
  Eigen::FFT<double> fft;
  std::vector<cplx> row(static_cast<std::size_t>(n));
  CVector shifted(n);
  for (int x = 0; x < n; ++x) {
    if (m.values.row(x).maxCoeff() == 0.0) continue;
    for (int w = 0; w < n; ++w) row[w] = m.values(x, w);
    const auto lag = detail::fft_backward(fft, row);  // lag[d] = sum_w m(x,w) e^{2 pi i w d / N}
    for (int k = 0; k < n; ++k) shifted[k] = phi[wrap(k - x, n)];
    for (int c = 0; c < n; ++c) {
      const cplx pc = std::conj(shifted[c]) * weight;
      if (pc == cplx{}) continue;
      for (int r = 0; r < n; ++r) h(r, c) += shifted[r] * pc * lag[wrap(r - c, n)];
    }
  }
  return h;
}

inline LocOperator loc_operator(const Symbol& m, const Signal& phi) {
  const double wn = norm(phi);
  if (wn == 0.0) throw Error("localization window must be nonzero");
  LocOperator op(phi.grid, loc_operator_matrix(m, phi));
  op.clip_eigenvalues(m.max() * wn * wn);
  return op;
}

/// Spectral truncation keeping eigenpairs with eigenvalue > eps.
inline LocOperator truncate(const LocOperator& h, double eps) {
  if (!(eps > 0.0 && eps < 1.0)) throw Error("truncation threshold must lie in (0,1)");
  return h.truncated(eps);
}

/// cellArea * sum m |V_phi f|^2.
inline double tf_concentration(const Symbol& m, const Signal& phi, const Signal& f) {
  const PhaseSpaceField v = stft(f, phi);
  return (m.values.array() * v.values.array().abs2()).sum() * v.cell_area();
}

/// (||phi1|| + ||phi2||) ||phi1 - phi2||; multiply by ||f||^2 for the concentration gap bound.
inline double concentration_gap_bound(const Signal& phi1, const Signal& phi2) {
  return (norm(phi1) + norm(phi2)) * norm(phi1 - phi2);
}

struct EllipseSpec {
  double shape = 1.0;  // L
  double radius = 1.0;  // R
};

/// Subsamples per cell axis used to average the ellipse indicator over a cell.
inline constexpr int kEllipseSubsamples = 8;

/// Indicator of {L^2 x^2 + w^2 / L^2 <= R^2}, averaged over each phase-space
/// cell so that the symbol mass tracks the ellipse area pi R^2.
inline Symbol elliptic_symbol(const SampleGrid& grid, EllipseSpec e) {
  if (!(e.shape > 0.0) || !(e.radius > 0.0)) throw Error("ellipse parameters must be positive");
  const double extent = e.radius * std::max(e.shape, 1.0 / e.shape);
  if (extent >= 0.5 * grid.span()) throw Error("ellipse does not fit inside the phase-space grid");
  RMatrix v = RMatrix::Zero(grid.size, grid.size);
  const double l2 = e.shape * e.shape;
  const double r2 = e.radius * e.radius;
  const double h = grid.step;
  const int sub = kEllipseSubsamples;
  auto inside = [&](double x, double w) { return l2 * x * x + w * w / l2 <= r2; };
  for (int x = 0; x < grid.size; ++x) {
    const double xc = phase_coordinate(x, grid);
    if (std::abs(xc) * e.shape > e.radius + h * e.shape) continue;
    for (int w = 0; w < grid.size; ++w) {
      const double wc = phase_coordinate(w, grid);
      int hits = 0;
      for (int i = 0; i < sub; ++i) {
        const double xs = xc + h * ((i + 0.5) / sub - 0.5);
        for (int j = 0; j < sub; ++j) {
          if (inside(xs, wc + h * ((j + 0.5) / sub - 0.5))) ++hits;
        }
      }
      v(x, w) = static_cast<double>(hits) / (sub * sub);
    }
  }
  return Symbol(grid, std::move(v));
}

/// 1 - e^{-pi R^2} sum_{j<=k} (pi R^2)^j / j!, i.e. P(Poisson(pi R^2) > k).
inline double daubechies_eigenvalue(int k, double radius) {
  if (k < 0) throw Error("eigenvalue index must be non-negative");
  const double a = std::numbers::pi * radius * radius;
  if (a == 0.0) return 0.0;
  // Poisson terms in log space so that large areas do not underflow e^{-a}.
  auto term = [a](int j) { return std::exp(-a + j * std::log(a) - std::lgamma(j + 1.0)); };
  if (k + 1 <= a) {
    double lower = 0.0;
    for (int j = 0; j <= k; ++j) lower += term(j);
    return std::max(0.0, 1.0 - lower);
  }
  // upper tail: terms decrease monotonically beyond the mode
  double upper = 0.0;
  for (int j = k + 1;; ++j) {
    const double t = term(j);
    upper += t;
    if (t <= 1e-18 * upper || t == 0.0) break;
  }
  return std::min(upper, 1.0);
}

enum class BumpShape { Box, Tent };

/// Translates of one bump per lattice point summing to one on the grid.
inline SymbolFamily bupu_family(const Lattice& lattice, BumpShape shape) {
  const int n = lattice.size;
  if (n < 8 || n % 2 != 0) throw Error("bupu needs a valid grid size");
  if (lattice.a * lattice.b > n) throw Error("lattice too sparse to cover the grid (need a*b <= N)");
  const SampleGrid grid = make_grid(n);

  auto profile = [n, shape](int d, int step) {
    const int c = centered_index(d, n);
    if (shape == BumpShape::Box) {
      const int lo = -(step / 2);
      return (c >= lo && c < lo + step) ? 1.0 : 0.0;
    }
    return std::max(0.0, 1.0 - std::abs(static_cast<double>(c)) / step);
  };

  RMatrix env(n, n);
  for (int x = 0; x < n; ++x) {
    for (int w = 0; w < n; ++w) env(x, w) = profile(x, lattice.a) * profile(w, lattice.b);
  }

  SymbolFamily fam;
  fam.envelope = Symbol(grid, env);
  for (const auto& p : lattice.points()) fam.members.push_back({p, Symbol(grid, translate(env, p))});
  fam.partition_of_unity = ((fam.total().array() - 1.0).abs() < 1e-12).all();
  return fam;
}

struct DecayFit {
  double constant = 0.0;  // C
  double exponent = 0.0;  // s
  bool passed = false;    // s > 1
};

/// Fits |V_{phi0} phi| * |V_{phi0} phi|(z) <= C (1 + |z|^2)^{-s} on |z| <= r2 = sqrt(N)/4.
///
/// With T(r) the supremum of the convolution over r <= |z| <= r2, s is the
/// log-log secant slope of T between r1 = r2/2 and the outer ring at r2; C is
/// then the least constant making the bound hold on the whole disc.
/// Periodization corrupts the far tails, hence the disc.
inline DecayFit decay_check(const Signal& phi) {
  const SampleGrid& grid = phi.grid;
  const int n = grid.size;
  const Signal phi0 = window(grid, WindowSpec::standard());
  const RMatrix env = modulus(stft(phi, phi0));
  const RMatrix conv = convolve(env, env, 1.0 / n);

  const double r2 = std::sqrt(static_cast<double>(n)) / 4.0;
  const double r1 = r2 / 2.0;
  const double ring = std::sqrt(2.0) * grid.step;
  double tail_inner = 0.0;
  double tail_outer = 0.0;
  for (int x = 0; x < n; ++x) {
    for (int w = 0; w < n; ++w) {
      const double r = std::hypot(phase_coordinate(x, grid), phase_coordinate(w, grid));
      if (r > r2) continue;
      if (r >= r1) tail_inner = std::max(tail_inner, conv(x, w));
      if (r > r2 - ring) tail_outer = std::max(tail_outer, conv(x, w));
    }
  }
  tail_outer = std::max(tail_outer, std::numeric_limits<double>::min());

  DecayFit fit;
  fit.exponent = std::log(tail_inner / tail_outer) / std::log((1.0 + r2 * r2) / (1.0 + r1 * r1));
  for (int x = 0; x < n; ++x) {
    for (int w = 0; w < n; ++w) {
      const double r = std::hypot(phase_coordinate(x, grid), phase_coordinate(w, grid));
      if (r <= r2) fit.constant = std::max(fit.constant, conv(x, w) * std::pow(1.0 + r * r, fit.exponent));
    }
  }
  fit.passed = fit.exponent > 1.0;
  return fit;
}

}  // namespace tfweave
