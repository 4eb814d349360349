#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <map>
#include <vector>

#include "roughfilter/errors.hpp"

namespace rf {

/// Strictly increasing piecewise-linear bijection of [0, T] with knots on a
/// uniform grid u_k = k T / m.
struct Warp {
  double horizon = 1.0;
  std::vector<double> lambda;  // lambda[k] = warp(u_k); lambda[0] = 0, lambda[m] = T

  static Warp identity(double horizon, int grid) {
    require(grid >= 1, "warp grid must be >= 1");
    Warp w{horizon, std::vector<double>(static_cast<std::size_t>(grid) + 1)};
    for (int k = 0; k <= grid; ++k) w.lambda[static_cast<std::size_t>(k)] = w.knot(k);
    w.lambda.back() = horizon;
    return w;
  }

  int grid() const { return static_cast<int>(lambda.size()) - 1; }
  double knot(int k) const { return k == grid() ? horizon : horizon * k / grid(); }

  double operator()(double u) const {
    const int m = grid();
    if (u <= 0.0) return 0.0;
    if (u >= horizon) return horizon;
    int k = std::min(m - 1, static_cast<int>(u / horizon * m));
    while (k > 0 && u < knot(k)) --k;
    while (k < m - 1 && u >= knot(k + 1)) ++k;
    const double a = knot(k), b = knot(k + 1);
    const auto kk = static_cast<std::size_t>(k);
    return lambda[kk] + (lambda[kk + 1] - lambda[kk]) * (u - a) / (b - a);
  }

  double inverse(double t) const {
    if (t <= 0.0) return 0.0;
    if (t >= horizon) return horizon;
    auto it = std::upper_bound(lambda.begin(), lambda.end(), t);
    const auto k = static_cast<int>(std::distance(lambda.begin(), it)) - 1;
    const auto kk = static_cast<std::size_t>(k);
    if (t == lambda[kk]) return knot(k);
    return knot(k) + (knot(k + 1) - knot(k)) * (t - lambda[kk]) / (lambda[kk + 1] - lambda[kk]);
  }

  /// sup_u |lambda(u) - u|, attained at a knot.
  double displacement() const {
    double d = 0.0;
    for (int k = 0; k <= grid(); ++k)
      d = std::max(d, std::abs(lambda[static_cast<std::size_t>(k)] - knot(k)));
    return d;
  }

  bool is_increasing() const {
    for (std::size_t k = 1; k < lambda.size(); ++k)
      if (!(lambda[k] > lambda[k - 1])) return false;
    return true;
  }

  /// The same map expressed on a grid with `fine` intervals (grid() | fine).
  Warp refined(int fine) const {
    require(fine % grid() == 0, "refined warp grid must be a multiple of the current grid");
    Warp w{horizon, std::vector<double>(static_cast<std::size_t>(fine) + 1)};
    const int ratio = fine / grid();
    for (int k = 0; k <= fine; ++k) {
      const int coarse = k / ratio;
      const int rem = k % ratio;
      const auto c = static_cast<std::size_t>(coarse);
      w.lambda[static_cast<std::size_t>(k)] =
          rem == 0 ? lambda[c]
                   : lambda[c] + (lambda[c + 1] - lambda[c]) * static_cast<double>(rem) / ratio;
    }
    return w;
  }
};

struct WarpSearchResult {
  double value = 0.0;         // max(displacement, distance)
  double displacement = 0.0;  // |lambda|
  double distance = 0.0;      // distance of the warped path to the target
  int warp_grid = 1;
  Warp warp;
  int evaluations = 0;
};

namespace detail {

struct WarpSearchOptions {
  int uniform_candidates = 8;
  int max_sweeps = 30;
};

// Coordinate descent over interior knots. Candidate moves: a uniform scan of
// each knot's feasible interval, a shrinking local pattern step, moves that
// map a jump of the target onto a jump of the source, and joint shifts of
// the two knots around a target jump.
template <class Dist>
WarpSearchResult descend_warp(WarpSearchResult start, const std::vector<double>& src_jumps,
                              const std::vector<double>& dst_jumps, Dist& dist,
                              const WarpSearchOptions& opt) {
  WarpSearchResult best = std::move(start);
  const int m = best.warp.grid();
  if (m < 2) return best;

  auto consider = [&](Warp w) {
    if (!w.is_increasing()) return false;
    const double disp = w.displacement();
    if (disp >= best.value) return false;
    const double d = dist(w);
    ++best.evaluations;
    const double v = std::max(disp, d);
    if (v < best.value) {
      best.value = v;
      best.displacement = disp;
      best.distance = d;
      best.warp = std::move(w);
      return true;
    }
    return false;
  };

  for (int sweep = 0; sweep < opt.max_sweeps; ++sweep) {
    bool improved = false;
    for (int k = 1; k < m; ++k) {
      const auto kk = static_cast<std::size_t>(k);
      const double lo = best.warp.lambda[kk - 1];
      const double hi = best.warp.lambda[kk + 1];
      std::vector<double> cands;
      for (int j = 1; j <= opt.uniform_candidates; ++j)
        cands.push_back(lo + (hi - lo) * j / (opt.uniform_candidates + 1));
      const double step = (hi - lo) / 4.0 / std::ldexp(1.0, sweep);
      cands.push_back(best.warp.lambda[kk] - step);
      cands.push_back(best.warp.lambda[kk] + step);
      cands.push_back(best.warp.knot(k));
      const double ul = best.warp.knot(k - 1), uk = best.warp.knot(k), ur = best.warp.knot(k + 1);
      for (double t : dst_jumps) {
        if (t <= ul || t >= ur) continue;
        for (double s : src_jumps) {
          if (s <= lo || s >= hi || std::abs(s - t) >= best.value) continue;
          if (t <= uk) {
            cands.push_back(lo + (s - lo) * (uk - ul) / (t - ul));
          } else {
            const double w = (t - uk) / (ur - uk);
            cands.push_back((s - w * hi) / (1.0 - w));
          }
        }
      }
      for (double c : cands) {
        if (!(c > lo && c < hi)) continue;
        Warp w = best.warp;
        w.lambda[kk] = c;
        improved |= consider(std::move(w));
      }
    }
    // joint shifts: constant displacement s - t across the interval holding t
    for (double t : dst_jumps) {
      for (double s : src_jumps) {
        const double shift = s - t;
        if (std::abs(shift) >= best.value) continue;
        int k = std::min(m - 1, static_cast<int>(t / best.warp.horizon * m));
        while (k > 0 && t < best.warp.knot(k)) --k;
        while (k < m - 1 && t >= best.warp.knot(k + 1)) ++k;
        Warp w = best.warp;
        if (k > 0) w.lambda[static_cast<std::size_t>(k)] = w.knot(k) + shift;
        if (k + 1 < m) w.lambda[static_cast<std::size_t>(k + 1)] = w.knot(k + 1) + shift;
        improved |= consider(std::move(w));
      }
    }
    if (!improved) break;
  }
  return best;
}

}  // namespace detail

/// Minimises max(|lambda|, dist(lambda)) over warps on a uniform grid of
/// `warp_grid` intervals. Every divisor grid is solved first and its optimum
/// used as a starting point, so the result is non-increasing along nested
/// grids. `dist(w)` is the distance between the source composed with w and
/// the target.
template <class Dist>
WarpSearchResult search_warp(double horizon, int warp_grid, const std::vector<double>& src_jumps,
                             const std::vector<double>& dst_jumps, Dist&& dist) {
  require(warp_grid >= 1, "warp_grid must be >= 1");
  detail::WarpSearchOptions opt;
  std::map<int, WarpSearchResult> memo;
  std::function<WarpSearchResult(int)> solve = [&](int g) -> WarpSearchResult {
    if (auto it = memo.find(g); it != memo.end()) return it->second;
    WarpSearchResult start;
    start.warp = Warp::identity(horizon, g);
    start.warp_grid = g;
    start.distance = dist(start.warp);
    start.displacement = 0.0;
    start.value = start.distance;
    start.evaluations = 1;
    for (int q = 1; q < g; ++q) {
      if (g % q != 0) continue;
      WarpSearchResult coarse = solve(q);
      if (coarse.value < start.value) {
        start.value = coarse.value;
        start.displacement = coarse.displacement;
        start.distance = coarse.distance;
        start.warp = coarse.warp.refined(g);
      }
    }
    WarpSearchResult res = detail::descend_warp(start, src_jumps, dst_jumps, dist, opt);
    res.warp_grid = g;
    memo.emplace(g, res);
    return res;
  };
  return solve(warp_grid);
}

}  // namespace rf
