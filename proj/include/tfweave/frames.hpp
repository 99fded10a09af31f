#pragma once

// Labeled vector families, frame operators and frame bounds, and the
// eigenfunction multi-window frames obtained from localization operators.

#include <algorithm>
#include <functional>
#include <vector>

#include <Eigen/Eigenvalues>

#include "tfweave/lattice.hpp"
#include "tfweave/locop.hpp"
#include "tfweave/signals.hpp"
#include "tfweave/tfa.hpp"

namespace tfweave {

/// Relative threshold: a family is a frame when A > kFrameTol * B.
inline constexpr double kFrameTol = 1e-8;

struct FrameEntry {
  PhaseSpacePoint label;
  std::vector<CVector> members;
};

/// Vectors grouped by label. `weight` is the factor in the inner product of
/// the ambient space: the grid step for sampled signals, 1 for plain C^d.
struct LabeledFrameFamily {
  int dimension = 0;
  double weight = 1.0;
  std::vector<FrameEntry> entries;

  int member_count() const {
    int c = 0;
    for (const auto& e : entries) c += static_cast<int>(e.members.size());
    return c;
  }

  int empty_labels() const {
    return static_cast<int>(std::count_if(entries.begin(), entries.end(), [](const auto& e) { return e.members.empty(); }));
  }

  std::vector<PhaseSpacePoint> labels() const {
    std::vector<PhaseSpacePoint> out;
    out.reserve(entries.size());
    for (const auto& e : entries) out.push_back(e.label);
    return out;
  }

  void validate() const {
    for (const auto& e : entries) {
      for (const auto& v : e.members) {
        if (v.size() != dimension) throw Error("frame members have inconsistent dimensions");
      }
    }
  }
};

struct FrameBounds {
  double lower = 0.0;  // A
  double upper = 0.0;  // B
  bool is_frame = false;
};

/// Multi-window Gabor system {pi(gamma) phi_k}, grouped by lattice point.
inline LabeledFrameFamily gabor_system(const std::vector<Signal>& windows, const Lattice& lattice) {
  if (windows.empty()) throw Error("Gabor system needs at least one window");
  const SampleGrid grid = windows.front().grid;
  for (const auto& w : windows) {
    if (!(w.grid == grid)) throw Error("Gabor windows live on different grids");
  }
  if (lattice.size != grid.size) throw Error("lattice does not match the window grid");

  LabeledFrameFamily fam{grid.size, grid.step, {}};
  for (const auto& p : lattice.points()) {
    FrameEntry e{p, {}};
    for (const auto& w : windows) e.members.push_back(tf_shift(w, p).values);
    fam.entries.push_back(std::move(e));
  }
  return fam;
}

/// weight * sum g g^H over the members of one entry.
inline CMatrix entry_frame_operator(const FrameEntry& entry, int dimension, double weight) {
  CMatrix s = CMatrix::Zero(dimension, dimension);
  for (const auto& g : entry.members) s.noalias() += weight * g * g.adjoint();
  return s;
}

/// S f = sum_g <f,g> g: weighted inner products, unweighted sum over members.
inline CMatrix frame_operator(const LabeledFrameFamily& family) {
  if (family.dimension <= 0) throw Error("frame family has no ambient dimension");
  family.validate();
  CMatrix s = CMatrix::Zero(family.dimension, family.dimension);
  for (const auto& e : family.entries) s += entry_frame_operator(e, family.dimension, family.weight);
  return s;
}

/// Extremal eigenvalues of a Hermitian positive semi-definite matrix.
inline FrameBounds bounds_from_operator(const CMatrix& s) {
  Eigen::SelfAdjointEigenSolver<CMatrix> solver(s, Eigen::EigenvaluesOnly);
  if (solver.info() != Eigen::Success) throw Error("Hermitian eigensolver failed");
  FrameBounds fb;
  fb.lower = std::max(0.0, solver.eigenvalues()[0]);
  fb.upper = std::max(fb.lower, solver.eigenvalues()[s.rows() - 1]);
  fb.is_frame = fb.upper > 0.0 && fb.lower > kFrameTol * fb.upper;
  return fb;
}

inline FrameBounds frame_bounds(const LabeledFrameFamily& family) { return bounds_from_operator(frame_operator(family)); }

/// One localization operator per family member, with the window chosen by window_at.
inline std::vector<LocOperator> local_operators(const SymbolFamily& symbols,
                                                const std::function<Signal(const SymbolFamilyMember&)>& window_at) {
  std::vector<LocOperator> ops;
  ops.reserve(symbols.members.size());
  for (const auto& m : symbols.members) ops.push_back(loc_operator(m.symbol, window_at(m)));
  return ops;
}

/// Eigenvectors with eigenvalue > eps of each local operator, labeled by the symbol centre.
inline LabeledFrameFamily eigenframe(const SymbolFamily& symbols, const std::vector<LocOperator>& ops, double eps) {
  if (ops.size() != symbols.members.size()) throw Error("one operator per symbol is required");
  if (ops.empty()) throw Error("empty symbol family");
  const SampleGrid grid = ops.front().grid();
  LabeledFrameFamily fam{grid.size, grid.step, {}};
  for (std::size_t i = 0; i < ops.size(); ++i) {
    FrameEntry e{symbols.members[i].center, {}};
    const auto& lambda = ops[i].eigenvalues();
    for (int k = 0; k < lambda.size() && lambda[k] > eps; ++k) e.members.push_back(ops[i].eigenvectors().col(k));
    fam.entries.push_back(std::move(e));
  }
  return fam;
}

inline LabeledFrameFamily eigenframe(const SymbolFamily& symbols,
                                     const std::function<Signal(const SymbolFamilyMember&)>& window_at, double eps) {
  if (!symbols.partition_of_unity) throw Error("eigenframe needs a partition-of-unity symbol family");
  if (!(eps > 0.0 && eps < 1.0)) throw Error("eigenvalue threshold must lie in (0,1)");
  return eigenframe(symbols, local_operators(symbols, window_at), eps);
}

struct Spectrum {
  double min = 0.0;
  double max = 0.0;
};

inline Spectrum hermitian_range(const CMatrix& m) {
  Eigen::SelfAdjointEigenSolver<CMatrix> solver(0.5 * (m + m.adjoint()), Eigen::EigenvaluesOnly);
  return {solver.eigenvalues()[0], solver.eigenvalues()[m.rows() - 1]};
}

/// Extremal eigenvalues of the three operator sums behind the truncation argument:
/// sum H, sum H^* H (quadratic form sum ||H f||^2) and sum (H^2)^* H^2
/// (quadratic form sum ||H^2 f||^2).
struct TruncationSandwich {
  Spectrum sum_h;
  Spectrum sum_h2;
  Spectrum sum_h4;

  /// min sum||H^2 f||^2 <= min sum||H f||^2 and max sum||H^2 f||^2 <= max sum||H f||^2.
  bool ordered() const { return sum_h4.min <= sum_h2.min + 1e-12 && sum_h4.max <= sum_h2.max + 1e-12; }

  /// Threshold rule eps = factor * A / B with A = min sum||H^2 f||^2, B = max sum||H f||^2.
  double eps_rule(double factor = 0.9) const { return factor * sum_h4.min / sum_h2.max; }
};

inline TruncationSandwich truncation_sandwich(const std::vector<LocOperator>& ops) {
  if (ops.empty()) throw Error("no operators");
  const int n = ops.front().grid().size;
  CMatrix h = CMatrix::Zero(n, n), h2 = CMatrix::Zero(n, n), h4 = CMatrix::Zero(n, n);
  for (const auto& op : ops) {
    const CMatrix& m = op.matrix();
    const CMatrix sq = m.adjoint() * m;
    h += m;
    h2 += sq;
    h4 += sq.adjoint() * sq;
  }
  return {hermitian_range(h), hermitian_range(h2), hermitian_range(h4)};
}

}  // namespace tfweave
