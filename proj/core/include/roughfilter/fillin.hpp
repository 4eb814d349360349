#pragma once

#include <cstddef>
#include <functional>
#include <string>
#include <vector>

#include "roughfilter/lift.hpp"

namespace rf {

enum class PathFunctionKind { log_linear, linear, custom_tabulated };

/// Continuous interpolation phi(a, b): [0, 1] -> G^2(R^d) used to fill a
/// jump from a = x_{t-} to b = x_t in fictitious time.
///
/// log_linear: a exp(s log(a^{-1} b)), the group geodesic (Marcus).
/// linear: the level-1 chord at constant speed, any Levy area of the jump
///   accrued quadratically in s.
/// custom_tabulated: the geodesic run at a tabulated speed profile s -> h(s)
///   given on a uniform grid of [0, 1] with h(0) = 0, h(1) = 1.
struct PathFunction {
  PathFunctionKind kind = PathFunctionKind::log_linear;
  std::vector<double> profile;  // custom_tabulated only

  static PathFunction log_linear() { return {}; }
  static PathFunction linear() { return {PathFunctionKind::linear, {}}; }
  static PathFunction tabulated(std::vector<double> profile);

  GroupElement operator()(const GroupElement& a, const GroupElement& b, double s) const;
  /// Whether (a, b) lies in the domain J of phi. Every pair is admissible
  /// for the built-in kinds; kept as the hook for restricted domains.
  bool admits(const GroupElement& a, const GroupElement& b) const;
  std::string name() const;
};

/// Positive summable sequence r_1, r_2, ...: an explicit finite prefix
/// followed by the geometric tail r_k = scale * ratio^k.
struct RSequence {
  std::vector<double> prefix;
  double scale = 1.0;
  double ratio = 0.5;

  static RSequence geometric(double ratio) { return {{}, 1.0, ratio}; }
  double operator[](std::size_t k) const;  // k >= 1
  void validate() const;
};

struct AdmissiblePair {
  RoughPath rough;
  PathFunction phi = PathFunction::log_linear();
  RSequence r_seq = RSequence::geometric(0.5);
  double delta = 1.0;
  /// Sample points placed inside each filled slot (>= 1).
  int slot_substeps = 8;

  void validate() const;
};

/// The fictitious-time interval [start, end) filling one jump.
struct JumpSlot {
  std::size_t sample = 0;  // index of the jump in the rough path
  double time = 0.0;       // t_k
  std::size_t rank = 0;    // 1-based position in the size ordering
  double width = 0.0;      // delta * r_rank
  double start = 0.0;      // tau(t_k-)
  double end = 0.0;        // tau(t_k)
};

/// tau(t) = t + sum_k delta r_k 1{t_k <= t}, with slots in time order.
struct TimeExtension {
  double horizon = 0.0;  // T
  double total = 0.0;    // delta * r (sum over actual jumps)
  std::vector<JumpSlot> slots;

  double operator()(double t) const;
  double left(double t) const;  // tau(t-)
};

/// Jumps ordered by decreasing size; equal sizes keep time order.
std::vector<std::size_t> jump_ranking(const RoughPath& x);

TimeExtension time_extension(const AdmissiblePair& pair);

/// tau_x = tau_r^{-1} o tau: [0, T] -> [0, T].
struct TimeChange {
  TimeExtension ext;
  double operator()(double t) const;
  double left(double t) const;
};

struct ContinuousRepresentative {
  RoughPath path;  // x^phi on [0, T], no jump flags
  TimeExtension ext;
  /// Index into path.times() of tau_x(t_i) for every original sample i.
  std::vector<std::size_t> original_index;
  /// For each slot, the index in path of tau_x(t_k-) (the slot start).
  std::vector<std::size_t> slot_begin;
  /// Per segment i of path (between samples i and i+1): whether it lies
  /// inside a filled slot.
  std::vector<bool> in_slot;
};

ContinuousRepresentative continuous_representative(const AdmissiblePair& pair);

TimeChange time_change_back(const AdmissiblePair& pair);

/// x^phi o tau_x sampled back at the original times.
RoughPath restrict_to_original(const ContinuousRepresentative& rep, const RoughPath& original);

struct DeltaValue {
  double delta = 0.0;
  double value = 0.0;
};

struct DeltaLimit {
  double estimate = 0.0;  // value at the smallest delta
  std::vector<DeltaValue> per_delta;
  bool stagnated = false;  // last two values within 5% (or both ~0)
  bool padded = false;     // jump counts differed (slots matched by rank,
                           // the missing ones taken as zero width)
  int warp_grid = 0;       // alpha_p only
};

inline const std::vector<double> kDefaultDeltaSeq{1.0, 0.5, 0.25, 0.125};

DeltaLimit beta_p(const AdmissiblePair& x, const AdmissiblePair& y, double p,
                  const std::vector<double>& delta_seq = kDefaultDeltaSeq);
DeltaLimit alpha_p(const AdmissiblePair& x, const AdmissiblePair& y, double p, int warp_grid,
                   const std::vector<double>& delta_seq = kDefaultDeltaSeq);

}  // namespace rf
