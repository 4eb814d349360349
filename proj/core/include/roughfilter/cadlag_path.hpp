#pragma once

#include <cmath>
#include <cstddef>
#include <limits>
#include <span>
#include <vector>

#include "roughfilter/tensor_group.hpp"
#include "roughfilter/warp.hpp"

namespace rf {

/// How a sampled path is read between its sample times.
enum class Interpolation { piecewise_constant, piecewise_linear };

/// Finite sample of a cadlag path x: [0, T] -> R^d.
///
/// `values.row(i)` is x at times[i] (the right limit). `pre_values.row(i)`
/// is the left limit x_{t-}; a sample is a jump exactly when the two rows
/// differ. For piecewise-constant paths the left limit at times[i] is the
/// previous sample, so every change of value is a jump.
class CadlagPath {
 public:
  CadlagPath() = default;
  CadlagPath(std::vector<double> times, Mat values,
             Interpolation interp = Interpolation::piecewise_linear);
  CadlagPath(std::vector<double> times, Mat values, Mat pre_values,
             Interpolation interp = Interpolation::piecewise_linear);

  std::size_t size() const noexcept { return times_.size(); }
  Eigen::Index dim() const noexcept { return values_.cols(); }
  double horizon() const { return times_.back(); }
  Interpolation interpolation() const noexcept { return interp_; }

  const std::vector<double>& times() const noexcept { return times_; }
  const Mat& values() const noexcept { return values_; }
  const Mat& pre_values() const noexcept { return pre_values_; }
  Vec value(std::size_t i) const { return values_.row(static_cast<Eigen::Index>(i)).transpose(); }
  Vec pre_value(std::size_t i) const { return pre_values_.row(static_cast<Eigen::Index>(i)).transpose(); }

  bool is_jump(std::size_t i) const;
  bool has_jumps() const;
  std::vector<std::size_t> jump_indices() const;
  std::vector<double> jump_times() const;
  /// x_t - x_{t-} at sample i.
  Vec jump_increment(std::size_t i) const;

  /// Right-continuous evaluation; clamps outside [0, T].
  Vec at(double t) const;
  /// Left limit x_{t-}; equals at(t) away from jumps.
  Vec left_limit(double t) const;

  /// Points visited in order, with the left limit inserted before each jump.
  /// The p-variation of the path is attained on this sequence.
  Mat point_sequence() const;

  CadlagPath with_interpolation(Interpolation interp) const;

 private:
  std::size_t segment_of(double t) const;

  std::vector<double> times_;
  Mat values_;
  Mat pre_values_;
  Interpolation interp_ = Interpolation::piecewise_linear;
};

/// Index set of a partition of a path's sample grid.
struct Partition {
  std::vector<std::size_t> indices;
};

/// Continuous piecewise-linear interpolant of samples (no jumps).
CadlagPath linear_interpolant(std::vector<double> times, Mat values);
/// Rectangular (sample-and-hold) interpolant: constant between samples,
/// jumps at every sample time after the first.
CadlagPath rectangular_interpolant(std::vector<double> times, Mat values);
/// Samples of x at the given indices, keeping x's interpolation mode.
CadlagPath subsample(const CadlagPath& x, std::span<const std::size_t> indices);

/// x - y on the union of both sample grids.
CadlagPath difference(const CadlagPath& x, const CadlagPath& y);

/// Sorted union of two time grids (exact duplicates merged).
std::vector<double> merge_times(const std::vector<double>& a, const std::vector<double>& b);

namespace detail {

// Exact p-variation of a finite point sequence by the O(n^2) recursion
// V(j) = max_{i<j} V(i) + cost(i, j), where cost(i, j) = |x_j - x_i|^p.
// Returns V(n-1) (the 1/p root is taken by the caller). `best_prev`, when
// non-null, receives the argmax chain.
template <class Cost>
double max_partition_sum(std::size_t n, Cost&& cost, std::vector<std::size_t>* best_prev = nullptr) {
  if (n < 2) return 0.0;
  std::vector<double> v(n, 0.0);
  if (best_prev) best_prev->assign(n, 0);
  for (std::size_t j = 1; j < n; ++j) {
    double best = -std::numeric_limits<double>::infinity();
    std::size_t arg = 0;
    for (std::size_t i = 0; i < j; ++i) {
      const double cand = v[i] + cost(i, j);
      if (cand > best) {
        best = cand;
        arg = i;
      }
    }
    v[j] = best;
    if (best_prev) (*best_prev)[j] = arg;
  }
  return v[n - 1];
}

}  // namespace detail

/// p-variation of the rows of `points` (in order) for p >= 1.
double p_variation(const Mat& points, double p);
/// p-variation of a sampled cadlag path, exact over its sample grid.
double p_variation(const CadlagPath& x, double p);
/// Same, also returning a maximising partition of point_sequence().
double p_variation(const CadlagPath& x, double p, Partition& argmax);

/// p-variation distance |x - y|_{p-var}.
double d_p(const CadlagPath& x, const CadlagPath& y, double p);

/// x o lambda. Sample times of the result that fall within `snap_tol` of a
/// time in `snap_to` are moved onto it.
CadlagPath compose(const CadlagPath& x, const Warp& w,
                   const std::vector<double>& snap_to = {}, double snap_tol = 0.0);

/// Skorokhod-type distance inf_lambda max(|lambda|, d_p(x o lambda, y)),
/// searched over piecewise-linear warps with `warp_grid` uniform intervals.
/// The value is an upper bound of the infimum over all warps.
WarpSearchResult skorokhod_sigma_p(const CadlagPath& x, const CadlagPath& y, double p,
                                   int warp_grid);

}  // namespace rf
