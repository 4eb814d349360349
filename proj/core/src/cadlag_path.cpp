#include "roughfilter/cadlag_path.hpp"

#include <algorithm>
#include <cmath>

#include "roughfilter/errors.hpp"

namespace rf {

namespace {

void validate_times(const std::vector<double>& times) {
  require(!times.empty(), "path needs at least one sample");
  require(times.front() == 0.0, "path times must start at 0");
  for (std::size_t i = 0; i < times.size(); ++i) {
    require(std::isfinite(times[i]), "path times must be finite");
    if (i > 0) require(times[i] > times[i - 1], "path times must be strictly increasing");
  }
}

}  // namespace

CadlagPath::CadlagPath(std::vector<double> times, Mat values, Interpolation interp)
    : CadlagPath(std::move(times), values, values, interp) {}

CadlagPath::CadlagPath(std::vector<double> times, Mat values, Mat pre_values, Interpolation interp)
    : times_(std::move(times)),
      values_(std::move(values)),
      pre_values_(std::move(pre_values)),
      interp_(interp) {
  validate_times(times_);
  require(values_.rows() == static_cast<Eigen::Index>(times_.size()),
          "path values must have one row per time");
  require(values_.cols() >= 1, "path dimension must be >= 1");
  require(pre_values_.rows() == values_.rows() && pre_values_.cols() == values_.cols(),
          "pre_values must have the same shape as values");
  require(values_.allFinite() && pre_values_.allFinite(), "path values must be finite");
  pre_values_.row(0) = values_.row(0);
  if (interp_ == Interpolation::piecewise_constant) {
    for (Eigen::Index i = 1; i < values_.rows(); ++i) pre_values_.row(i) = values_.row(i - 1);
  }
}

bool CadlagPath::is_jump(std::size_t i) const {
  const auto r = static_cast<Eigen::Index>(i);
  return (values_.row(r).array() != pre_values_.row(r).array()).any();
}

bool CadlagPath::has_jumps() const {
  for (std::size_t i = 1; i < size(); ++i)
    if (is_jump(i)) return true;
  return false;
}

std::vector<std::size_t> CadlagPath::jump_indices() const {
  std::vector<std::size_t> out;
  for (std::size_t i = 1; i < size(); ++i)
    if (is_jump(i)) out.push_back(i);
  return out;
}

std::vector<double> CadlagPath::jump_times() const {
  std::vector<double> out;
  for (auto i : jump_indices()) out.push_back(times_[i]);
  return out;
}

Vec CadlagPath::jump_increment(std::size_t i) const { return value(i) - pre_value(i); }

std::size_t CadlagPath::segment_of(double t) const {
  auto it = std::upper_bound(times_.begin(), times_.end(), t);
  if (it == times_.begin()) return 0;
  return static_cast<std::size_t>(std::distance(times_.begin(), it)) - 1;
}

Vec CadlagPath::at(double t) const {
  if (t <= times_.front()) return value(0);
  if (t >= times_.back()) return value(size() - 1);
  const std::size_t i = segment_of(t);
  if (t == times_[i] || interp_ == Interpolation::piecewise_constant) return value(i);
  const double w = (t - times_[i]) / (times_[i + 1] - times_[i]);
  return value(i) + w * (pre_value(i + 1) - value(i));
}

Vec CadlagPath::left_limit(double t) const {
  if (t <= times_.front()) return value(0);
  if (t > times_.back()) return value(size() - 1);
  const std::size_t i = segment_of(t);
  if (t == times_[i]) return pre_value(i);
  return at(t);
}

Mat CadlagPath::point_sequence() const {
  const auto n = static_cast<Eigen::Index>(size());
  Eigen::Index count = n;
  for (std::size_t i = 1; i < size(); ++i) count += is_jump(i) ? 1 : 0;
  Mat pts(count, dim());
  Eigen::Index r = 0;
  for (Eigen::Index i = 0; i < n; ++i) {
    if (i > 0 && is_jump(static_cast<std::size_t>(i))) pts.row(r++) = pre_values_.row(i);
    pts.row(r++) = values_.row(i);
  }
  return pts;
}

CadlagPath CadlagPath::with_interpolation(Interpolation interp) const {
  return CadlagPath(times_, values_, pre_values_, interp);
}

CadlagPath linear_interpolant(std::vector<double> times, Mat values) {
  return CadlagPath(std::move(times), std::move(values), Interpolation::piecewise_linear);
}

CadlagPath rectangular_interpolant(std::vector<double> times, Mat values) {
  return CadlagPath(std::move(times), std::move(values), Interpolation::piecewise_constant);
}

CadlagPath subsample(const CadlagPath& x, std::span<const std::size_t> indices) {
  require(!indices.empty() && indices.front() == 0, "subsample must start at index 0");
  std::vector<double> t;
  Mat v(static_cast<Eigen::Index>(indices.size()), x.dim());
  Mat pre(v.rows(), v.cols());
  for (std::size_t k = 0; k < indices.size(); ++k) {
    require(indices[k] < x.size(), "subsample index out of range");
    t.push_back(x.times()[indices[k]]);
    v.row(static_cast<Eigen::Index>(k)) = x.values().row(static_cast<Eigen::Index>(indices[k]));
    pre.row(static_cast<Eigen::Index>(k)) =
        x.pre_values().row(static_cast<Eigen::Index>(indices[k]));
  }
  return CadlagPath(std::move(t), std::move(v), std::move(pre), x.interpolation());
}

std::vector<double> merge_times(const std::vector<double>& a, const std::vector<double>& b) {
  std::vector<double> out;
  out.reserve(a.size() + b.size());
  std::merge(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

CadlagPath difference(const CadlagPath& x, const CadlagPath& y) {
  require(x.dim() == y.dim(), "d_p: paths of different dimension");
  std::vector<double> t = merge_times(x.times(), y.times());
  Mat v(static_cast<Eigen::Index>(t.size()), x.dim());
  Mat pre(v.rows(), v.cols());
  for (std::size_t i = 0; i < t.size(); ++i) {
    const auto r = static_cast<Eigen::Index>(i);
    v.row(r) = (x.at(t[i]) - y.at(t[i])).transpose();
    pre.row(r) = (x.left_limit(t[i]) - y.left_limit(t[i])).transpose();
  }
  // Left limits are explicit, so the linear reading is exact on the merged
  // grid whatever the interpolation of x and y.
  return CadlagPath(std::move(t), std::move(v), std::move(pre), Interpolation::piecewise_linear);
}

double p_variation(const Mat& points, double p) {
  require(p >= 1.0, "p-variation needs p >= 1");
  const auto n = static_cast<std::size_t>(points.rows());
  const double s = detail::max_partition_sum(n, [&](std::size_t i, std::size_t j) {
    return std::pow((points.row(static_cast<Eigen::Index>(j)) -
                     points.row(static_cast<Eigen::Index>(i)))
                        .norm(),
                    p);
  });
  return std::pow(s, 1.0 / p);
}

double p_variation(const CadlagPath& x, double p) { return p_variation(x.point_sequence(), p); }

double p_variation(const CadlagPath& x, double p, Partition& argmax) {
  require(p >= 1.0, "p-variation needs p >= 1");
  const Mat pts = x.point_sequence();
  const auto n = static_cast<std::size_t>(pts.rows());
  std::vector<std::size_t> prev;
  const double s = detail::max_partition_sum(
      n,
      [&](std::size_t i, std::size_t j) {
        return std::pow(
            (pts.row(static_cast<Eigen::Index>(j)) - pts.row(static_cast<Eigen::Index>(i))).norm(),
            p);
      },
      &prev);
  argmax.indices.clear();
  if (n > 0) {
    for (std::size_t j = n - 1; j > 0; j = prev[j]) argmax.indices.push_back(j);
    argmax.indices.push_back(0);
    std::reverse(argmax.indices.begin(), argmax.indices.end());
  }
  return std::pow(s, 1.0 / p);
}

double d_p(const CadlagPath& x, const CadlagPath& y, double p) {
  return p_variation(difference(x, y), p);
}

CadlagPath compose(const CadlagPath& x, const Warp& w, const std::vector<double>& snap_to,
                   double snap_tol) {
  require(std::abs(w.horizon - x.horizon()) <= 1e-12 * std::max(1.0, x.horizon()),
          "warp horizon differs from path horizon");
  struct Node {
    double u;
    long src;  // sample index of x, or -1 for a warp knot
  };
  std::vector<Node> nodes;
  nodes.reserve(x.size() + static_cast<std::size_t>(w.grid()) + 1);
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
  std::vector<Node> uniq;
  for (const auto& n : nodes) {
    if (!uniq.empty() && uniq.back().u == n.u) {
      if (uniq.back().src < 0) uniq.back() = n;
      continue;
    }
    uniq.push_back(n);
  }
  std::vector<double> t;
  Mat v(static_cast<Eigen::Index>(uniq.size()), x.dim());
  Mat pre(v.rows(), v.cols());
  for (std::size_t k = 0; k < uniq.size(); ++k) {
    const auto r = static_cast<Eigen::Index>(k);
    t.push_back(uniq[k].u);
    if (uniq[k].src >= 0) {
      v.row(r) = x.values().row(uniq[k].src);
      pre.row(r) = x.pre_values().row(uniq[k].src);
    } else {
      const double s = w(uniq[k].u);
      v.row(r) = x.at(s).transpose();
      pre.row(r) = x.left_limit(s).transpose();
    }
  }
  return CadlagPath(std::move(t), std::move(v), std::move(pre), x.interpolation());
}

WarpSearchResult skorokhod_sigma_p(const CadlagPath& x, const CadlagPath& y, double p,
                                   int warp_grid) {
  require(warp_grid >= 1, "warp_grid must be >= 1");
  require(x.dim() == y.dim(), "sigma_p: paths of different dimension");
  require(std::abs(x.horizon() - y.horizon()) <= 1e-12 * std::max(1.0, x.horizon()),
          "sigma_p: paths on different intervals");
  const double tol = 1e-11 * std::max(1.0, x.horizon());
  const auto& targets = y.times();
  return search_warp(x.horizon(), warp_grid, x.jump_times(), y.jump_times(),
                     [&](const Warp& w) { return d_p(compose(x, w, targets, tol), y, p); });
}

}  // namespace rf
