#pragma once

// Woven frames: partition generation, brute-force weaving verification with
// incremental frame-operator updates, and the two sufficient criteria (window
// distance in L^2, pointwise closeness of ambiguity functions).

#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <map>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "tfweave/frames.hpp"
#include "tfweave/locop.hpp"
#include "tfweave/signals.hpp"
#include "tfweave/tfa.hpp"

namespace tfweave {

/// System index (0-based) chosen at each label position.
using PartitionAssignment = std::vector<int>;

/// Largest number of partitions an exhaustive sweep may visit.
inline constexpr std::uint64_t kExhaustiveBudget = std::uint64_t{1} << 20;

enum class StrategyKind { Exhaustive, Random, AdversarialGreedy };

struct Strategy {
  StrategyKind kind = StrategyKind::Exhaustive;
  std::uint64_t samples = 0;  // evaluation budget for random / greedy
  std::uint64_t seed = 0;

  static Strategy exhaustive() { return {}; }
  static Strategy random(std::uint64_t n, std::uint64_t seed) { return {StrategyKind::Random, n, seed}; }
  static Strategy greedy(std::uint64_t n, std::uint64_t seed) { return {StrategyKind::AdversarialGreedy, n, seed}; }
};

inline std::string to_string(StrategyKind k) {
  switch (k) {
    case StrategyKind::Exhaustive: return "exhaustive";
    case StrategyKind::Random: return "random";
    case StrategyKind::AdversarialGreedy: return "adversarial-greedy";
  }
  return "unknown";
}

struct WeavingReport {
  Strategy strategy;
  std::uint64_t examined = 0;
  double min_lower_bound = std::numeric_limits<double>::infinity();
  double worst_upper_bound = 0.0;
  PartitionAssignment worst_partition;
  std::uint64_t worst_index = 0;  // evaluation number (1-based) at which the minimum was first reached
  bool counterexample_found = false;
  /// Certified only by an exhaustive sweep; sampled strategies can merely
  /// report that no counterexample was found.
  bool verdict_woven = false;
  std::vector<double> trace;  // lower bound per evaluation, in evaluation order
};

enum class CriterionKind { Norm, PhaseSpace };

struct CriterionReport {
  CriterionKind kind = CriterionKind::Norm;
  bool satisfied = false;
  double guaranteed_lower_bound = 0.0;
  std::map<std::string, double> details;
};

// ---------------------------------------------------------------------------

inline void require_common_labels(const std::vector<LabeledFrameFamily>& systems) {
  if (systems.empty()) throw Error("no systems to weave");
  const auto& ref = systems.front();
  for (const auto& s : systems) {
    if (s.dimension != ref.dimension || s.weight != ref.weight) throw Error("systems live in different spaces");
    if (s.entries.size() != ref.entries.size()) throw Error("systems have different label sets");
    for (std::size_t i = 0; i < s.entries.size(); ++i) {
      if (!(s.entries[i].label == ref.entries[i].label)) throw Error("systems have different label sets");
    }
  }
}

inline void require_total(const PartitionAssignment& sigma, std::size_t labels, int systems) {
  if (sigma.size() != labels) throw Error("partition does not assign every label");
  for (int j : sigma) {
    if (j < 0 || j >= systems) throw Error("partition refers to a nonexistent system");
  }
}

/// At each label take the members of system sigma[label].
inline LabeledFrameFamily weave(const std::vector<LabeledFrameFamily>& systems, const PartitionAssignment& sigma) {
  require_common_labels(systems);
  const auto& ref = systems.front();
  require_total(sigma, ref.entries.size(), static_cast<int>(systems.size()));
  LabeledFrameFamily out{ref.dimension, ref.weight, {}};
  for (std::size_t i = 0; i < ref.entries.size(); ++i) out.entries.push_back(systems[static_cast<std::size_t>(sigma[i])].entries[i]);
  return out;
}

// ---------------------------------------------------------------------------

inline std::uint64_t partition_count(std::size_t labels, int systems) {
  std::uint64_t total = 1;
  for (std::size_t i = 0; i < labels; ++i) {
    if (total > kExhaustiveBudget) return total;
    total *= static_cast<std::uint64_t>(systems);
  }
  return total;
}

/// Deterministic partition stream for the exhaustive and random strategies.
///
/// Exhaustive enumerates mixed-radix counters in lexicographic order (the
/// last label is the fastest digit); random draws i.i.d. uniform assignments from a
/// seeded mt19937_64.
class PartitionStream {
 public:
  PartitionStream(std::size_t labels, int systems, const Strategy& strategy)
      : labels_(labels), systems_(systems), strategy_(strategy), rng_(strategy.seed) {
    if (systems < 1) throw Error("need at least one system");
    switch (strategy.kind) {
      case StrategyKind::Exhaustive:
        total_ = partition_count(labels, systems);
        if (total_ > kExhaustiveBudget) {
          throw Error("exhaustive search over " + std::to_string(systems) + "^" + std::to_string(labels) +
                      " partitions exceeds the budget of 2^20; use the random or adversarial-greedy strategy");
        }
        break;
      case StrategyKind::Random: total_ = strategy.samples; break;
      case StrategyKind::AdversarialGreedy:
        throw Error("adversarial-greedy needs evaluation feedback; use greedy_search");
    }
  }

  std::uint64_t total() const { return total_; }

  std::optional<PartitionAssignment> next() {
    if (produced_ >= total_) return std::nullopt;
    if (strategy_.kind == StrategyKind::Exhaustive) {
      if (produced_ == 0) {
        current_.assign(labels_, 0);
      } else {
        for (std::size_t i = labels_; i-- > 0;) {
          if (++current_[i] < systems_) break;
          current_[i] = 0;
        }
      }
    } else {
      current_.resize(labels_);
      for (auto& c : current_) c = static_cast<int>(rng_() % static_cast<std::uint64_t>(systems_));
    }
    ++produced_;
    return current_;
  }

 private:
  std::size_t labels_;
  int systems_;
  Strategy strategy_;
  std::mt19937_64 rng_;
  std::uint64_t total_ = 0;
  std::uint64_t produced_ = 0;
  PartitionAssignment current_;
};

/// All partitions of a strategy that does not need feedback, materialized.
inline std::vector<PartitionAssignment> partitions(std::size_t labels, int systems, const Strategy& strategy) {
  PartitionStream stream(labels, systems, strategy);
  std::vector<PartitionAssignment> out;
  while (auto p = stream.next()) out.push_back(std::move(*p));
  return out;
}

/// Frame operator of a weave, maintained by rank updates as labels switch system.
class IncrementalFrameOperator {
 public:
  explicit IncrementalFrameOperator(const std::vector<LabeledFrameFamily>& systems) {
    require_common_labels(systems);
    dim_ = systems.front().dimension;
    const auto labels = systems.front().entries.size();
    contributions_.resize(labels);
    for (std::size_t i = 0; i < labels; ++i) {
      for (const auto& s : systems) contributions_[i].push_back(entry_frame_operator(s.entries[i], dim_, s.weight));
    }
  }

  std::size_t labels() const { return contributions_.size(); }
  int systems() const { return contributions_.empty() ? 0 : static_cast<int>(contributions_.front().size()); }

  const CMatrix& set(const PartitionAssignment& sigma) {
    require_total(sigma, labels(), systems());
    if (current_.empty() || updates_ >= kResync) {
      rebuild(sigma);
      return s_;
    }
    for (std::size_t i = 0; i < sigma.size(); ++i) {
      if (sigma[i] == current_[i]) continue;
      s_ -= contributions_[i][static_cast<std::size_t>(current_[i])];
      s_ += contributions_[i][static_cast<std::size_t>(sigma[i])];
      current_[i] = sigma[i];
      ++updates_;
    }
    return s_;
  }

  const CMatrix& matrix() const { return s_; }

 private:
  // Full reassembly after this many rank updates bounds roundoff drift.
  static constexpr std::uint64_t kResync = 4096;

  void rebuild(const PartitionAssignment& sigma) {
    s_ = CMatrix::Zero(dim_, dim_);
    for (std::size_t i = 0; i < sigma.size(); ++i) s_ += contributions_[i][static_cast<std::size_t>(sigma[i])];
    current_ = sigma;
    updates_ = 0;
  }

  int dim_ = 0;
  std::vector<std::vector<CMatrix>> contributions_;
  CMatrix s_;
  PartitionAssignment current_;
  std::uint64_t updates_ = 0;
};

namespace detail {

struct Reducer {
  WeavingReport& report;

  void add(const PartitionAssignment& sigma, const FrameBounds& fb) {
    ++report.examined;
    report.trace.push_back(fb.lower);
    if (!fb.is_frame) report.counterexample_found = true;
    // strict comparison keeps the first minimizer in evaluation order
    if (fb.lower < report.min_lower_bound) {
      report.min_lower_bound = fb.lower;
      report.worst_upper_bound = fb.upper;
      report.worst_partition = sigma;
      report.worst_index = report.examined;
    }
  }
};

}  // namespace detail

/// Hill climb over single-label switches towards the smallest lower frame
/// bound, restarted from seeded random assignments until `budget`
/// evaluations are spent or a non-frame weave is found.
inline void greedy_search(std::size_t labels, int systems, std::uint64_t budget, std::uint64_t seed,
                          const std::function<FrameBounds(const PartitionAssignment&)>& evaluate,
                          const std::function<void(const PartitionAssignment&, const FrameBounds&)>& record) {
  std::mt19937_64 rng(seed);
  std::uint64_t used = 0;
  bool stop = false;
  auto eval = [&](const PartitionAssignment& s) {
    const FrameBounds fb = evaluate(s);
    ++used;
    record(s, fb);
    if (!fb.is_frame) stop = true;
    return fb;
  };

  while (used < budget && !stop) {
    PartitionAssignment cur(labels);
    for (auto& c : cur) c = static_cast<int>(rng() % static_cast<std::uint64_t>(systems));
    double cur_val = eval(cur).lower;
    bool improved = true;
    while (improved && used < budget && !stop) {
      improved = false;
      PartitionAssignment best = cur;
      double best_val = cur_val;
      for (std::size_t i = 0; i < labels && used < budget && !stop; ++i) {
        for (int j = 0; j < systems && used < budget && !stop; ++j) {
          if (j == cur[i]) continue;
          PartitionAssignment cand = cur;
          cand[i] = j;
          const double v = eval(cand).lower;
          if (v < best_val) {
            best_val = v;
            best = cand;
          }
        }
      }
      if (best_val < cur_val) {
        cur = std::move(best);
        cur_val = best_val;
        improved = true;
      }
    }
  }
}

/// Frame bounds of weave(systems, sigma) over the partitions of a strategy,
/// reduced to the smallest lower bound.
inline WeavingReport weaving_check(const std::vector<LabeledFrameFamily>& systems, const Strategy& strategy) {
  if (systems.size() < 2) throw Error("weaving needs at least two systems");
  IncrementalFrameOperator op(systems);
  WeavingReport report;
  report.strategy = strategy;
  detail::Reducer reduce{report};
  auto evaluate = [&op](const PartitionAssignment& s) { return bounds_from_operator(op.set(s)); };

  if (strategy.kind == StrategyKind::AdversarialGreedy) {
    greedy_search(op.labels(), op.systems(), strategy.samples, strategy.seed, evaluate,
                  [&](const PartitionAssignment& s, const FrameBounds& fb) { reduce.add(s, fb); });
  } else {
    PartitionStream stream(op.labels(), op.systems(), strategy);
    report.trace.reserve(stream.total());
    while (auto sigma = stream.next()) reduce.add(*sigma, evaluate(*sigma));
  }
  report.verdict_woven = strategy.kind == StrategyKind::Exhaustive && report.examined > 0 && !report.counterexample_found;
  return report;
}

// ---------------------------------------------------------------------------

/// Tolerance on ||phi_i|| = 1 for the criteria.
inline constexpr double kUnitNormTol = 1e-6;

/// Window distance criterion: ||phi1 - phi2|| < 1/2 gives the lower bound
/// A (1 - 2 ||phi1 - phi2||) for any split of the symbols between the windows.
inline CriterionReport norm_criterion(const Signal& phi1, const Signal& phi2, const SymbolFamily& symbols) {
  require_same_grid(phi1, phi2);
  if (std::abs(norm(phi1) - 1.0) > kUnitNormTol || std::abs(norm(phi2) - 1.0) > kUnitNormTol) {
    throw Error("norm criterion requires unit-norm windows");
  }
  if (symbols.members.empty()) throw Error("empty symbol family");
  const RMatrix total = symbols.total();
  const double a = total.minCoeff();
  const double d = norm(phi1 - phi2);

  CriterionReport r;
  r.kind = CriterionKind::Norm;
  r.satisfied = d < 0.5 && a > 0.0;
  r.guaranteed_lower_bound = a * (1.0 - 2.0 * d);
  r.details = {{"distance", d}, {"symbol_sum_min", a}, {"symbol_sum_max", total.maxCoeff()},
               {"partition_of_unity", symbols.partition_of_unity ? 1.0 : 0.0}};
  return r;
}

/// Only cells where |V_{phi0} phi0| exceeds this enter the ratio defining C_0.
inline constexpr double kEnvelopeCutoff = 1e-8;

/// Pointwise criterion against the standard Gaussian phi0:
///   |V00(z) - V_i(z)| <= C_0 |V00(z)|, 2 C_0 ||V00||_1 < 1, and polynomial decay of every window;
/// the bound is 1 - 2 C_0 ||V00||_1.
inline CriterionReport phase_space_criterion(const std::vector<Signal>& windows) {
  if (windows.empty()) throw Error("no windows");
  const SampleGrid grid = windows.front().grid;
  const Signal phi0 = window(grid, WindowSpec::standard());
  const PhaseSpaceField v00 = stft(phi0, phi0);
  const RMatrix env = modulus(v00);
  const double envelope_l1 = env.sum() * v00.cell_area();

  double c0 = 0.0;
  double min_decay = std::numeric_limits<double>::infinity();
  bool decay_ok = true;
  for (const auto& w : windows) {
    require_same_grid(w, phi0);
    // both orderings of the cross ambiguity function; their moduli differ in general
    const PhaseSpaceField analysed = stft(w, phi0);  // V_{phi0} phi_i
    const PhaseSpaceField reproducing = stft(phi0, w);  // V_{phi_i} phi0
    for (int x = 0; x < grid.size; ++x) {
      for (int k = 0; k < grid.size; ++k) {
        if (env(x, k) <= kEnvelopeCutoff) continue;
        const double diff = std::max(std::abs(v00(x, k) - analysed(x, k)), std::abs(v00(x, k) - reproducing(x, k)));
        c0 = std::max(c0, diff / env(x, k));
      }
    }
    const DecayFit fit = decay_check(w);
    min_decay = std::min(min_decay, fit.exponent);
    decay_ok = decay_ok && fit.passed;
  }

  CriterionReport r;
  r.kind = CriterionKind::PhaseSpace;
  r.guaranteed_lower_bound = 1.0 - 2.0 * c0 * envelope_l1;
  r.satisfied = r.guaranteed_lower_bound > 0.0 && decay_ok;
  r.details = {{"C0", c0},
               {"envelope_l1", envelope_l1},
               {"envelope_cutoff", kEnvelopeCutoff},
               {"min_decay_exponent", min_decay},
               {"decay_ok", decay_ok ? 1.0 : 0.0},
               {"statement_condition", 2.0 * c0 < envelope_l1 ? 1.0 : 0.0}};
  return r;
}

/// sum_gamma H_{eta_gamma, phi_{i(gamma)}} assembled as sum_i H_{m_i, phi_i}
/// with m_i the sum of the symbols assigned to window i.
inline CMatrix mixed_operator_sum(const SymbolFamily& symbols, const std::vector<Signal>& windows,
                                  const PartitionAssignment& assignment) {
  require_total(assignment, symbols.members.size(), static_cast<int>(windows.size()));
  const SampleGrid grid = symbols.envelope.grid;
  std::vector<RMatrix> merged(windows.size(), RMatrix::Zero(grid.size, grid.size));
  for (std::size_t g = 0; g < symbols.members.size(); ++g) {
    merged[static_cast<std::size_t>(assignment[g])] += symbols.members[g].symbol.values;
  }
  CMatrix sum = CMatrix::Zero(grid.size, grid.size);
  for (std::size_t i = 0; i < windows.size(); ++i) {
    if (merged[i].maxCoeff() > 0.0) sum += loc_operator_matrix(Symbol(grid, merged[i]), windows[i]);
  }
  return sum;
}

}  // namespace tfweave
