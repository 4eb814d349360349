#pragma once

#include <algorithm>

#include "roughfilter/filter.hpp"

namespace oracle {

struct Gauss {
  double mean, var;
};

// Kalman-Bucy with correlated noise by explicit Euler on a much finer grid,
// Y read piecewise linearly between record nodes.
inline Gauss kalman_bucy(const rf::ModelSpec& m, const rf::ObservationRecord& rec, double t, int sub = 400) {
  const double a = m.params.at("a"), c = m.params.at("c"), s0 = m.params.at("s0");
  const double s1 = m.params.at("s1"), s2 = m.params.at("s2");
  double mean = m.params.at("m0"), var = m.params.at("p0");
  const auto& tt = rec.y.times();
  const rf::Mat yv = rec.y.values();
  for (std::size_t k = 0; k + 1 < tt.size() && tt[k] < t; ++k) {
    const auto i = static_cast<Eigen::Index>(k);
    const double slope = (yv(i + 1, 0) - yv(i, 0)) / (tt[k + 1] - tt[k]);
    const double h = (std::min(tt[k + 1], t) - tt[k]) / sub;
    for (int j = 0; j < sub; ++j) {
      const double gain = (var * c + s1 * s2) / (s2 * s2);
      const double dm = a * mean + gain * (slope - c * mean);
      const double dp = 2.0 * a * var + s0 * s0 + s1 * s1 - gain * gain * s2 * s2;
      mean += h * dm;
      var += h * dp;
    }
  }
  return {mean, var};
}

}  // namespace oracle
