#pragma once

#include <string>
#include <vector>

#include "tfweave/tfa.hpp"

namespace tfweave {

/// Separable lattice {(j a, k b)} on the N x N phase-space grid.
struct Lattice {
  int size = 0;
  int a = 1;
  int b = 1;

  int time_count() const { return size / a; }
  int freq_count() const { return size / b; }
  int count() const { return time_count() * freq_count(); }
  double density() const { return static_cast<double>(size) / (static_cast<double>(a) * b); }

  std::vector<PhaseSpacePoint> points() const {
    std::vector<PhaseSpacePoint> pts;
    pts.reserve(static_cast<std::size_t>(count()));
    for (int j = 0; j < time_count(); ++j) {
      for (int k = 0; k < freq_count(); ++k) pts.push_back({j * a, k * b});
    }
    return pts;
  }
};

inline Lattice make_lattice(int n, int a, int b) {
  if (n <= 0 || a <= 0 || b <= 0 || n % a != 0 || n % b != 0) {
    throw Error("lattice steps must be positive divisors of N (N=" + std::to_string(n) + ", a=" +
                std::to_string(a) + ", b=" + std::to_string(b) + ")");
  }
  return Lattice{n, a, b};
}

}  // namespace tfweave
