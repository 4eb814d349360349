#pragma once

// Independent reference computations for the tests. Nothing here calls the
// library's algorithms; they are brute-force or closed-form versions of the
// quantities under test.

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <random>
#include <vector>

namespace oracle {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

/// max over all partitions containing both endpoints of sum cost(i, j),
/// by enumerating every subset of interior points.
template <class Cost>
double brute_partition_sum(std::size_t n, Cost&& cost) {
  if (n < 2) return 0.0;
  const std::size_t interior = n - 2;
  double best = 0.0;
  for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << interior); ++mask) {
    double s = 0.0;
    std::size_t prev = 0;
    for (std::size_t k = 0; k < interior; ++k) {
      if ((mask >> k) & 1u) {
        s += cost(prev, k + 1);
        prev = k + 1;
      }
    }
    s += cost(prev, n - 1);
    best = std::max(best, s);
  }
  return best;
}

/// p-variation of the rows of `pts` by partition enumeration.
inline double brute_pvar(const Mat& pts, double p) {
  const auto n = static_cast<std::size_t>(pts.rows());
  const double s = brute_partition_sum(n, [&](std::size_t i, std::size_t j) {
    return std::pow((pts.row(static_cast<Eigen::Index>(j)) - pts.row(static_cast<Eigen::Index>(i))).norm(), p);
  });
  return std::pow(s, 1.0 / p);
}

/// Level-2 signature of the piecewise-linear path through the rows of pts:
/// sum_{i<j} d_i d_j^T + 1/2 sum_i d_i d_i^T.
inline Mat signature_level2(const Mat& pts) {
  const auto d = pts.cols();
  Mat s = Mat::Zero(d, d);
  Vec run = Vec::Zero(d);
  for (Eigen::Index i = 1; i < pts.rows(); ++i) {
    const Vec di = (pts.row(i) - pts.row(i - 1)).transpose();
    s += run * di.transpose() + 0.5 * di * di.transpose();
    run += di;
  }
  return s;
}

inline Mat random_walk(std::mt19937_64& gen, Eigen::Index n, Eigen::Index d, double scale = 1.0) {
  std::normal_distribution<double> g(0.0, scale);
  Mat x = Mat::Zero(n, d);
  for (Eigen::Index i = 1; i < n; ++i)
    for (Eigen::Index j = 0; j < d; ++j) x(i, j) = x(i - 1, j) + g(gen);
  return x;
}

inline std::vector<double> uniform_times(std::size_t n, double horizon = 1.0) {
  std::vector<double> t(n);
  for (std::size_t i = 0; i < n; ++i) t[i] = horizon * static_cast<double>(i) / static_cast<double>(n - 1);
  t.back() = horizon;
  return t;
}

/// Median of a copy.
inline double median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

}  // namespace oracle
