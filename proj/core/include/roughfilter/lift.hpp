#pragma once

#include <cstddef>
#include <vector>

#include "roughfilter/cadlag_path.hpp"
#include "roughfilter/tensor_group.hpp"
#include "roughfilter/warp.hpp"

namespace rf {

/// A G^2(R^d)-valued path sampled on a grid. `points[i]` is the running
/// signature from time 0 up to and including times[i]; `pre_points[i]` is
/// its left limit. Between samples the path follows the geodesic
/// s -> points[i] exp(s log(points[i]^{-1} pre_points[i+1])).
class RoughPath {
 public:
  RoughPath() = default;
  RoughPath(std::vector<double> times, std::vector<GroupElement> points,
            std::vector<GroupElement> pre_points);
  RoughPath(std::vector<double> times, std::vector<GroupElement> points,
            std::vector<GroupElement> pre_points, std::vector<bool> jump_flags);

  std::size_t size() const noexcept { return times_.size(); }
  Eigen::Index dim() const { return points_.front().dim(); }
  double horizon() const { return times_.back(); }

  const std::vector<double>& times() const noexcept { return times_; }
  const std::vector<GroupElement>& points() const noexcept { return points_; }
  const std::vector<GroupElement>& pre_points() const noexcept { return pre_points_; }
  const std::vector<bool>& jump_flags() const noexcept { return jump_flags_; }
  bool is_jump(std::size_t i) const { return jump_flags_[i]; }
  bool has_jumps() const;
  std::vector<std::size_t> jump_indices() const;
  std::vector<double> jump_times() const;

  /// points[i]^{-1} points[j].
  GroupElement increment(std::size_t i, std::size_t j) const;
  /// pre_points[i]^{-1} points[i]: the jump at sample i.
  GroupElement jump(std::size_t i) const;
  /// Increment over the continuous stretch (times[i], times[i+1]).
  GroupElement segment(std::size_t i) const;

  GroupElement at(double t) const;
  GroupElement left_limit(double t) const;

  /// Level-1 trace as an R^d path (piecewise linear, jumps kept).
  CadlagPath trace() const;

 private:
  std::size_t segment_of(double t) const;

  std::vector<double> times_;
  std::vector<GroupElement> points_;
  std::vector<GroupElement> pre_points_;
  std::vector<bool> jump_flags_;
};

/// Level-2 lift of a continuous sampled path read as piecewise linear.
/// Throws ValidationError if the path has jumps.
RoughPath stratonovich_lift(const CadlagPath& x);

/// Marcus lift: continuous stretches as in stratonovich_lift, each jump
/// traversed along the log-linear chord exp(x_t - x_{t-}).
RoughPath marcus_lift(const CadlagPath& x);

/// Rough p-variation distance, p in [2, 3): the larger of the level-1
/// p-variation and the level-2 p/2-variation of the increment differences,
/// computed exactly over the merged sample grid.
double rho_p(const RoughPath& x, const RoughPath& y, double p);

/// Inhomogeneous alpha-Holder rough path distance
/// sum_{k=1,2} sup_{s<t} |x^k_{s,t} - y^k_{s,t}| / (t-s)^{k alpha}
/// over the merged grid. Infinite when either path jumps.
double rho_alpha_holder(const RoughPath& x, const RoughPath& y, double alpha);

/// x o lambda for rough paths (same contract as the CadlagPath overload).
RoughPath compose(const RoughPath& x, const Warp& w, const std::vector<double>& snap_to = {},
                  double snap_tol = 0.0);

/// Skorokhod-type distance with rho_p in place of d_p.
WarpSearchResult skorokhod_sigma_rough(const RoughPath& x, const RoughPath& y, double p,
                                       int warp_grid);

/// Largest violation of Chen's relation over all i < j < k triples sampled
/// along the grid, and of the shuffle identity at every point.
double chen_defect(const RoughPath& x);
double max_geometric_defect(const RoughPath& x);

}  // namespace rf
