#pragma once

// Discrete time-frequency analysis on the full N x N phase-space grid.
//
// pi(x,w) f[n] = exp(2 pi i w n / N) f[(n - x) mod N]  (modulation after translation)
// V_phi f(x,w) = <f, pi(x,w) phi>, weighted inner product
//
// A phase-space cell has area 1/N, so cellArea * sum |V_phi f|^2 = ||f||^2 ||phi||^2
// holds exactly.

#include <cmath>
#include <complex>
#include <numbers>
#include <vector>

#include <unsupported/Eigen/FFT>

#include "tfweave/signals.hpp"

namespace tfweave {

struct PhaseSpacePoint {
  int x = 0;  // time shift in samples
  int w = 0;  // frequency shift in bins

  friend bool operator==(const PhaseSpacePoint&, const PhaseSpacePoint&) = default;
};

inline int wrap(int i, int n) {
  const int r = i % n;
  return r < 0 ? r + n : r;
}

/// Signed representative of a cyclic index in [-N/2, N/2).
inline int centered_index(int i, int n) {
  const int r = wrap(i, n);
  return r >= n / 2 ? r - n : r;
}

/// Continuous phase-space coordinate of grid index i.
inline double phase_coordinate(int i, const SampleGrid& grid) {
  return centered_index(i, grid.size) * grid.step;
}

struct PhaseSpaceField {
  SampleGrid grid;
  CMatrix values;  // rows: time shift x, cols: frequency shift w

  PhaseSpaceField() = default;
  explicit PhaseSpaceField(SampleGrid g) : grid(g), values(CMatrix::Zero(g.size, g.size)) {}
  PhaseSpaceField(SampleGrid g, CMatrix v) : grid(g), values(std::move(v)) {
    if (values.rows() != grid.size || values.cols() != grid.size) {
      throw Error("phase-space field shape does not match grid");
    }
  }

  double cell_area() const { return 1.0 / grid.size; }
  int size() const { return grid.size; }
  cplx operator()(int x, int w) const { return values(x, w); }
  cplx& operator()(int x, int w) { return values(x, w); }
};

inline void require_same_grid(const PhaseSpaceField& a, const PhaseSpaceField& b) {
  if (!(a.grid == b.grid)) throw Error("phase-space fields live on different grids");
}

inline RMatrix modulus(const PhaseSpaceField& f) { return f.values.cwiseAbs(); }

/// Weighted pairing cellArea * sum F conj(G).
inline cplx inner(const PhaseSpaceField& f, const PhaseSpaceField& g) {
  require_same_grid(f, g);
  return f.cell_area() * (f.values.array() * g.values.array().conjugate()).sum();
}

inline Signal tf_shift(const Signal& f, PhaseSpacePoint p) {
  const int n = f.size();
  if (p.x < 0 || p.x >= n || p.w < 0 || p.w >= n) throw Error("phase-space point outside the grid");
  Signal out(f.grid);
  for (int k = 0; k < n; ++k) {
    // reduce w*k mod N first so the phase argument stays exact
    const double turns = static_cast<double>((static_cast<long long>(p.w) * k) % n) / n;
    out[k] = std::polar(1.0, 2.0 * std::numbers::pi * turns) * f[wrap(k - p.x, n)];
  }
  return out;
}

namespace detail {

inline std::vector<cplx> fft_forward(Eigen::FFT<double>& fft, const std::vector<cplx>& in) {
  std::vector<cplx> out;
  fft.fwd(out, in);
  return out;
}

// Unscaled inverse: out[n] = sum_k in[k] exp(+2 pi i k n / N).
inline std::vector<cplx> fft_backward(Eigen::FFT<double>& fft, const std::vector<cplx>& in) {
  std::vector<cplx> out;
  fft.SetFlag(Eigen::FFT<double>::Unscaled);
  fft.inv(out, in);
  fft.ClearFlag(Eigen::FFT<double>::Unscaled);
  return out;
}

}  // namespace detail

/// STFT over all N^2 shifts: one length-N FFT of f * conj(T_x phi) per time shift.
inline PhaseSpaceField stft(const Signal& f, const Signal& phi) {
  require_same_grid(f, phi);
  const int n = f.size();
  PhaseSpaceField out(f.grid);
  Eigen::FFT<double> fft;
  std::vector<cplx> buf(static_cast<std::size_t>(n));
  for (int x = 0; x < n; ++x) {
    for (int k = 0; k < n; ++k) buf[k] = f[k] * std::conj(phi[wrap(k - x, n)]);
    const auto col = detail::fft_forward(fft, buf);
    for (int w = 0; w < n; ++w) out(x, w) = f.grid.step * col[w];
  }
  return out;
}

/// O(N^3) reference STFT straight from the definition.
inline PhaseSpaceField stft_direct(const Signal& f, const Signal& phi) {
  require_same_grid(f, phi);
  const int n = f.size();
  PhaseSpaceField out(f.grid);
  for (int x = 0; x < n; ++x) {
    for (int w = 0; w < n; ++w) out(x, w) = inner(f, tf_shift(phi, {x, w}));
  }
  return out;
}

/// cellArea * sum_{x,w} F(x,w) pi(x,w) phi.
inline Signal stft_adjoint(const PhaseSpaceField& field, const Signal& phi) {
  if (!(field.grid == phi.grid)) throw Error("field and window live on different grids");
  const int n = phi.size();
  Signal out(phi.grid);
  Eigen::FFT<double> fft;
  std::vector<cplx> row(static_cast<std::size_t>(n));
  for (int x = 0; x < n; ++x) {
    for (int w = 0; w < n; ++w) row[w] = field(x, w);
    const auto synth = detail::fft_backward(fft, row);
    for (int k = 0; k < n; ++k) out[k] += synth[k] * phi[wrap(k - x, n)];
  }
  out.values *= field.cell_area();
  return out;
}

/// Discrete twisted convolution
///   (F # G)(x,w) = cellArea * sum_{x',w'} F(x',w') G(x-x', w-w') exp(2 pi i x'(w'-w)/N).
/// With unit-norm phi0 this reproduces stft(f,phi0) # stft(phi0,phi) = stft(f,phi).
inline PhaseSpaceField twisted_convolution(const PhaseSpaceField& f, const PhaseSpaceField& g) {
  require_same_grid(f, g);
  const int n = f.size();
  std::vector<cplx> phase(static_cast<std::size_t>(n));
  for (int k = 0; k < n; ++k) phase[k] = std::polar(1.0, 2.0 * std::numbers::pi * k / n);

  PhaseSpaceField out(f.grid);
  for (int x = 0; x < n; ++x) {
    for (int w = 0; w < n; ++w) {
      cplx acc = 0.0;
      for (int xp = 0; xp < n; ++xp) {
        const int dx = wrap(x - xp, n);
        for (int wp = 0; wp < n; ++wp) {
          const cplx fv = f(xp, wp);
          if (fv == cplx{}) continue;
          const long long e = static_cast<long long>(xp) * (wp - w + n);
          acc += fv * g(dx, wrap(w - wp, n)) * phase[static_cast<std::size_t>(e % n)];
        }
      }
      out(x, w) = acc * f.cell_area();
    }
  }
  return out;
}

/// Cyclic convolution of real phase-space arrays with cellArea weighting.
inline RMatrix convolve(const RMatrix& a, const RMatrix& b, double cell_area) {
  const int n = static_cast<int>(a.rows());
  if (a.cols() != n || b.rows() != n || b.cols() != n) throw Error("convolution operands must be square and equal");
  Eigen::FFT<double> fft;
  auto fft2 = [&](const CMatrix& m, bool forward) {
    CMatrix tmp(n, n);
    std::vector<cplx> in(static_cast<std::size_t>(n)), out;
    for (int r = 0; r < n; ++r) {
      for (int c = 0; c < n; ++c) in[c] = m(r, c);
      if (forward) fft.fwd(out, in); else fft.inv(out, in);
      for (int c = 0; c < n; ++c) tmp(r, c) = out[c];
    }
    for (int c = 0; c < n; ++c) {
      for (int r = 0; r < n; ++r) in[r] = tmp(r, c);
      if (forward) fft.fwd(out, in); else fft.inv(out, in);
      for (int r = 0; r < n; ++r) tmp(r, c) = out[r];
    }
    return tmp;
  };
  const CMatrix fa = fft2(a.cast<cplx>(), true);
  const CMatrix fb = fft2(b.cast<cplx>(), true);
  const CMatrix prod = fa.cwiseProduct(fb);
  return fft2(prod, false).real() * cell_area;
}

/// Cyclic translate of a real phase-space array by p.
inline RMatrix translate(const RMatrix& m, PhaseSpacePoint p) {
  const int n = static_cast<int>(m.rows());
  RMatrix out(n, n);
  for (int x = 0; x < n; ++x) {
    for (int w = 0; w < n; ++w) out(x, w) = m(wrap(x - p.x, n), wrap(w - p.w, n));
  }
  return out;
}

}  // namespace tfweave
