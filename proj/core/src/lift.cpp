#include "roughfilter/lift.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "roughfilter/errors.hpp"

namespace rf {

namespace {

GroupElement geodesic(const GroupElement& from, const GroupElement& to, double s) {
  if (s <= 0.0) return from;
  if (s >= 1.0) return to;
  TensorElement lie = group_log(increment(from, to));
  lie.level1 *= s;
  lie.level2 *= s;
  return group_mul(from, group_exp(lie));
}

bool same(const GroupElement& a, const GroupElement& b) {
  return (a.level1.array() == b.level1.array()).all() &&
         (a.level2.array() == b.level2.array()).all();
}

RoughPath lift_impl(const CadlagPath& x) {
  const auto d = x.dim();
  std::vector<GroupElement> pts, pre;
  pts.reserve(x.size());
  pre.reserve(x.size());
  std::vector<bool> flags(x.size(), false);
  pts.push_back(GroupElement::identity(d));
  pre.push_back(pts.back());
  for (std::size_t i = 1; i < x.size(); ++i) {
    const Vec chord = x.pre_value(i) - x.value(i - 1);
    GroupElement left = chord.isZero(0.0) ? pts.back() : group_mul(pts.back(), group_exp(chord));
    if (x.is_jump(i)) {
      flags[i] = true;
      pts.push_back(group_mul(left, group_exp(x.jump_increment(i))));
    } else {
      pts.push_back(left);
    }
    pre.push_back(std::move(left));
  }
  return RoughPath(x.times(), std::move(pts), std::move(pre), std::move(flags));
}

// Flattened level-1/level-2 coordinates of a sequence of group elements.
struct Coords {
  std::size_t n = 0;
  Eigen::Index d = 0;
  std::vector<double> l1;  // n * d
  std::vector<double> l2;  // n * d * d

  void push(const GroupElement& g) {
    for (Eigen::Index a = 0; a < d; ++a) l1.push_back(g.level1(a));
    for (Eigen::Index a = 0; a < d; ++a)
      for (Eigen::Index b = 0; b < d; ++b) l2.push_back(g.level2(a, b));
    ++n;
  }
};

struct PairSequence {
  Coords x, y;
  std::vector<double> t;
};

PairSequence merged_sequence(const RoughPath& x, const RoughPath& y) {
  require(x.dim() == y.dim(), "rough distance: paths of different dimension");
  require(std::abs(x.horizon() - y.horizon()) <= 1e-12 * std::max(1.0, x.horizon()),
          "rough distance: paths on different intervals");
  const std::vector<double> t = merge_times(x.times(), y.times());
  PairSequence seq;
  seq.x.d = seq.y.d = x.dim();
  auto flagged = [](const RoughPath& p, double s) {
    auto it = std::lower_bound(p.times().begin(), p.times().end(), s);
    if (it == p.times().end() || *it != s) return false;
    return p.is_jump(static_cast<std::size_t>(std::distance(p.times().begin(), it)));
  };
  for (double s : t) {
    if (flagged(x, s) || flagged(y, s)) {
      seq.x.push(x.left_limit(s));
      seq.y.push(y.left_limit(s));
      seq.t.push_back(s);
    }
    seq.x.push(x.at(s));
    seq.y.push(y.at(s));
    seq.t.push_back(s);
  }
  return seq;
}

// |x_{i,j} - y_{i,j}| at level 1 and level 2 (Euclidean / Frobenius).
struct IncrementDiff {
  const PairSequence& s;
  mutable std::vector<double> dx, dy;

  explicit IncrementDiff(const PairSequence& seq)
      : s(seq), dx(static_cast<std::size_t>(seq.x.d)), dy(static_cast<std::size_t>(seq.x.d)) {}

  double level1(std::size_t i, std::size_t j) const {
    const auto d = static_cast<std::size_t>(s.x.d);
    double acc = 0.0;
    for (std::size_t a = 0; a < d; ++a) {
      const double v = (s.x.l1[j * d + a] - s.x.l1[i * d + a]) - (s.y.l1[j * d + a] - s.y.l1[i * d + a]);
      acc += v * v;
    }
    return std::sqrt(acc);
  }

  double level2(std::size_t i, std::size_t j) const {
    const auto d = static_cast<std::size_t>(s.x.d);
    for (std::size_t a = 0; a < d; ++a) {
      dx[a] = s.x.l1[j * d + a] - s.x.l1[i * d + a];
      dy[a] = s.y.l1[j * d + a] - s.y.l1[i * d + a];
    }
    double acc = 0.0;
    for (std::size_t a = 0; a < d; ++a) {
      for (std::size_t b = 0; b < d; ++b) {
        const std::size_t ij = a * d + b;
        const double xv = s.x.l2[j * d * d + ij] - s.x.l2[i * d * d + ij] - s.x.l1[i * d + a] * dx[b];
        const double yv = s.y.l2[j * d * d + ij] - s.y.l2[i * d * d + ij] - s.y.l1[i * d + a] * dy[b];
        acc += (xv - yv) * (xv - yv);
      }
    }
    return std::sqrt(acc);
  }
};

}  // namespace

RoughPath::RoughPath(std::vector<double> times, std::vector<GroupElement> points,
                     std::vector<GroupElement> pre_points)
    : RoughPath(std::move(times), std::move(points), std::move(pre_points), {}) {}

RoughPath::RoughPath(std::vector<double> times, std::vector<GroupElement> points,
                     std::vector<GroupElement> pre_points, std::vector<bool> jump_flags)
    : times_(std::move(times)),
      points_(std::move(points)),
      pre_points_(std::move(pre_points)),
      jump_flags_(std::move(jump_flags)) {
  require(!times_.empty(), "rough path needs at least one sample");
  require(times_.front() == 0.0, "rough path times must start at 0");
  for (std::size_t i = 1; i < times_.size(); ++i)
    require(times_[i] > times_[i - 1], "rough path times must be strictly increasing");
  require(points_.size() == times_.size() && pre_points_.size() == times_.size(),
          "rough path needs one point and one left limit per time");
  const auto d = points_.front().dim();
  require(d >= 1, "rough path dimension must be >= 1");
  for (std::size_t i = 0; i < points_.size(); ++i) {
    require(points_[i].dim() == d && pre_points_[i].dim() == d,
            "rough path points of mixed dimension");
    require(points_[i].level2.rows() == d && points_[i].level2.cols() == d &&
                pre_points_[i].level2.rows() == d && pre_points_[i].level2.cols() == d,
            "rough path level2 of wrong shape");
  }
  pre_points_.front() = points_.front();
  if (jump_flags_.empty()) {
    jump_flags_.assign(times_.size(), false);
    for (std::size_t i = 1; i < times_.size(); ++i)
      jump_flags_[i] = !same(points_[i], pre_points_[i]);
  }
  require(jump_flags_.size() == times_.size(), "rough path needs one jump flag per time");
  jump_flags_.front() = false;
}

bool RoughPath::has_jumps() const {
  return std::any_of(jump_flags_.begin(), jump_flags_.end(), [](bool b) { return b; });
}

std::vector<std::size_t> RoughPath::jump_indices() const {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < size(); ++i)
    if (jump_flags_[i]) out.push_back(i);
  return out;
}

std::vector<double> RoughPath::jump_times() const {
  std::vector<double> out;
  for (auto i : jump_indices()) out.push_back(times_[i]);
  return out;
}

GroupElement RoughPath::increment(std::size_t i, std::size_t j) const {
  return rf::increment(points_.at(i), points_.at(j));
}

GroupElement RoughPath::jump(std::size_t i) const {
  return rf::increment(pre_points_.at(i), points_.at(i));
}

GroupElement RoughPath::segment(std::size_t i) const {
  return rf::increment(points_.at(i), pre_points_.at(i + 1));
}

std::size_t RoughPath::segment_of(double t) const {
  auto it = std::upper_bound(times_.begin(), times_.end(), t);
  if (it == times_.begin()) return 0;
  return static_cast<std::size_t>(std::distance(times_.begin(), it)) - 1;
}

GroupElement RoughPath::at(double t) const {
  if (t <= times_.front()) return points_.front();
  if (t >= times_.back()) return points_.back();
  const std::size_t i = segment_of(t);
  if (t == times_[i]) return points_[i];
  const double s = (t - times_[i]) / (times_[i + 1] - times_[i]);
  return geodesic(points_[i], pre_points_[i + 1], s);
}

GroupElement RoughPath::left_limit(double t) const {
  if (t <= times_.front()) return points_.front();
  if (t > times_.back()) return points_.back();
  const std::size_t i = segment_of(t);
  if (t == times_[i]) return pre_points_[i];
  return at(t);
}

CadlagPath RoughPath::trace() const {
  const auto n = static_cast<Eigen::Index>(size());
  Mat v(n, dim()), pre(n, dim());
  for (Eigen::Index i = 0; i < n; ++i) {
    v.row(i) = points_[static_cast<std::size_t>(i)].level1.transpose();
    pre.row(i) = pre_points_[static_cast<std::size_t>(i)].level1.transpose();
  }
  return CadlagPath(times_, std::move(v), std::move(pre), Interpolation::piecewise_linear);
}

RoughPath stratonovich_lift(const CadlagPath& x) {
  if (x.has_jumps())
    throw ValidationError("stratonovich_lift: path has jumps; use marcus_lift");
  return lift_impl(x);
}

RoughPath marcus_lift(const CadlagPath& x) { return lift_impl(x); }

double rho_p(const RoughPath& x, const RoughPath& y, double p) {
  require(p >= 2.0 && p < 3.0, "rho_p needs p in [2, 3)");
  const PairSequence seq = merged_sequence(x, y);
  const IncrementDiff diff(seq);
  const std::size_t n = seq.x.n;
  const double v1 = detail::max_partition_sum(
      n, [&](std::size_t i, std::size_t j) { return std::pow(diff.level1(i, j), p); });
  const double v2 = detail::max_partition_sum(
      n, [&](std::size_t i, std::size_t j) { return std::pow(diff.level2(i, j), p / 2.0); });
  return std::max(std::pow(v1, 1.0 / p), std::pow(v2, 2.0 / p));
}

double rho_alpha_holder(const RoughPath& x, const RoughPath& y, double alpha) {
  require(alpha > 0.0 && alpha <= 1.0, "rho_alpha needs alpha in (0, 1]");
  if (x.has_jumps() || y.has_jumps()) return std::numeric_limits<double>::infinity();
  const PairSequence seq = merged_sequence(x, y);
  const IncrementDiff diff(seq);
  double s1 = 0.0, s2 = 0.0;
  for (std::size_t i = 0; i < seq.x.n; ++i) {
    for (std::size_t j = i + 1; j < seq.x.n; ++j) {
      const double h = seq.t[j] - seq.t[i];
      s1 = std::max(s1, diff.level1(i, j) / std::pow(h, alpha));
      s2 = std::max(s2, diff.level2(i, j) / std::pow(h, 2.0 * alpha));
    }
  }
  return s1 + s2;
}

RoughPath compose(const RoughPath& x, const Warp& w, const std::vector<double>& snap_to,
                  double snap_tol) {
  require(std::abs(w.horizon - x.horizon()) <= 1e-12 * std::max(1.0, x.horizon()),
          "warp horizon differs from path horizon");
  struct Node {
    double u;
    long src;
  };
  std::vector<Node> nodes;
  for (std::size_t i = 0; i < x.size(); ++i) {
    double u = i == 0 ? 0.0 : (i + 1 == x.size() ? x.horizon() : w.inverse(x.times()[i]));
    if (snap_tol > 0.0 && !snap_to.empty()) {
      auto it = std::lower_bound(snap_to.begin(), snap_to.end(), u);
      if (it != snap_to.end() && std::abs(*it - u) <= snap_tol) u = *it;
      else if (it != snap_to.begin() && std::abs(*(it - 1) - u) <= snap_tol) u = *(it - 1);
    }
    nodes.push_back({u, static_cast<long>(i)});
  }
  for (int k = 1; k < w.grid(); ++k) nodes.push_back({w.knot(k), -1});
  std::stable_sort(nodes.begin(), nodes.end(), [](const Node& a, const Node& b) {
    return a.u < b.u || (a.u == b.u && a.src > b.src);
  });
  std::vector<double> t;
  std::vector<GroupElement> pts, pre;
  std::vector<bool> flags;
  for (const auto& n : nodes) {
    if (!t.empty() && t.back() == n.u) continue;
    t.push_back(n.u);
    if (n.src >= 0) {
      const auto i = static_cast<std::size_t>(n.src);
      pts.push_back(x.points()[i]);
      pre.push_back(x.pre_points()[i]);
      flags.push_back(x.is_jump(i));
    } else {
      const double s = w(n.u);
      pts.push_back(x.at(s));
      pre.push_back(x.left_limit(s));
      flags.push_back(false);
    }
  }
  return RoughPath(std::move(t), std::move(pts), std::move(pre), std::move(flags));
}

WarpSearchResult skorokhod_sigma_rough(const RoughPath& x, const RoughPath& y, double p,
                                       int warp_grid) {
  require(warp_grid >= 1, "warp_grid must be >= 1");
  const double tol = 1e-11 * std::max(1.0, x.horizon());
  const auto& targets = y.times();
  return search_warp(x.horizon(), warp_grid, x.jump_times(), y.jump_times(),
                     [&](const Warp& w) { return rho_p(compose(x, w, targets, tol), y, p); });
}

double chen_defect(const RoughPath& x) {
  double worst = 0.0;
  const std::size_t n = x.size();
  if (n < 3) return 0.0;
  const std::size_t stride = std::max<std::size_t>(1, n / 16);
  for (std::size_t i = 0; i < n; i += stride) {
    for (std::size_t j = i + 1; j < n; j += stride) {
      for (std::size_t k = j + 1; k < n; k += stride) {
        const GroupElement direct = x.increment(i, k);
        const GroupElement chained = group_mul(x.increment(i, j), x.increment(j, k));
        worst = std::max({worst, (direct.level1 - chained.level1).cwiseAbs().maxCoeff(),
                          (direct.level2 - chained.level2).cwiseAbs().maxCoeff()});
      }
    }
  }
  return worst;
}

double max_geometric_defect(const RoughPath& x) {
  double worst = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i)
    worst = std::max({worst, geometric_defect(x.points()[i]), geometric_defect(x.pre_points()[i])});
  return worst;
}

}  // namespace rf
