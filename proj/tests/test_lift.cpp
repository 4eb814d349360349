#include "doctest.h"

#include <random>

#include "oracles.hpp"
#include "roughfilter/errors.hpp"
#include "roughfilter/lift.hpp"

using namespace rf;

namespace {

// |X_{s,t} - Y_{s,t}| at both levels, written out from the group law.
struct LevelDiffs {
  Mat l1, l2;
};

LevelDiffs level_diffs(const RoughPath& x, const RoughPath& y) {
  const auto n = static_cast<Eigen::Index>(x.size());
  LevelDiffs out{Mat::Zero(n, n), Mat::Zero(n, n)};
  auto inc2 = [](const GroupElement& s, const GroupElement& t) {
    return Mat(t.level2 - s.level2 - s.level1 * (t.level1 - s.level1).transpose());
  };
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = i + 1; j < n; ++j) {
      const auto& xs = x.points()[static_cast<std::size_t>(i)];
      const auto& xt = x.points()[static_cast<std::size_t>(j)];
      const auto& ys = y.points()[static_cast<std::size_t>(i)];
      const auto& yt = y.points()[static_cast<std::size_t>(j)];
      out.l1(i, j) = ((xt.level1 - xs.level1) - (yt.level1 - ys.level1)).norm();
      out.l2(i, j) = (inc2(xs, xt) - inc2(ys, yt)).norm();
    }
  return out;
}

double brute_rho(const RoughPath& x, const RoughPath& y, double p) {
  const LevelDiffs d = level_diffs(x, y);
  const auto n = x.size();
  const double v1 = oracle::brute_partition_sum(n, [&](std::size_t i, std::size_t j) {
    return std::pow(d.l1(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)), p);
  });
  const double v2 = oracle::brute_partition_sum(n, [&](std::size_t i, std::size_t j) {
    return std::pow(d.l2(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)), p / 2);
  });
  return std::max(std::pow(v1, 1 / p), std::pow(v2, 2 / p));
}

// Adds a pure area a_i to every point of x.
RoughPath with_area(const RoughPath& x, const std::vector<double>& a) {
  std::vector<GroupElement> pts = x.points();
  for (std::size_t i = 0; i < pts.size(); ++i) {
    pts[i].level2(0, 1) += a[i];
    pts[i].level2(1, 0) -= a[i];
  }
  return RoughPath(x.times(), pts, pts);
}

}  // namespace

TEST_CASE("Stratonovich lift equals the iterated-sum signature") {
  std::mt19937_64 gen(31);
  for (int rep = 0; rep < 50; ++rep) {
    const Eigen::Index d = 1 + rep % 3;
    const Mat pts = oracle::random_walk(gen, 20, d);
    const RoughPath x = stratonovich_lift(CadlagPath(oracle::uniform_times(20), pts));
    const Mat s2 = oracle::signature_level2(pts);
    CHECK((x.points().back().level2 - s2).cwiseAbs().maxCoeff() <= 1e-12 * (1.0 + s2.norm()));
    for (std::size_t i = 0; i < x.size(); ++i) {
      const Mat prefix = oracle::signature_level2(pts.topRows(static_cast<Eigen::Index>(i) + 1));
      CHECK((x.points()[i].level2 - prefix).cwiseAbs().maxCoeff() <= 1e-12 * (1.0 + prefix.norm()));
    }
    CHECK(chen_defect(x) <= 1e-10);
    CHECK(max_geometric_defect(x) <= 1e-10);
  }
}

TEST_CASE("lift by hand") {
  SUBCASE("single segment") {
    Mat pts(2, 2);
    pts << 0.0, 0.0, 0.6, -0.2;
    const RoughPath x = stratonovich_lift(CadlagPath({0.0, 2.0}, pts));
    const GroupElement e = group_exp(Vec(pts.row(1).transpose()));
    CHECK((x.points().back().level2 - e.level2).norm() < 1e-15);
  }
  SUBCASE("e1 then e2") {
    Mat pts(3, 2);
    pts << 0, 0, 1, 0, 1, 1;
    const RoughPath x = stratonovich_lift(CadlagPath({0.0, 0.5, 1.0}, pts));
    const GroupElement g = x.points().back();
    CHECK(g.level2(0, 1) == doctest::Approx(1.0));
    CHECK(g.level2(1, 0) == doctest::Approx(0.0));
    CHECK(area(g)(0, 1) == doctest::Approx(0.5));
    CHECK(area(g)(1, 0) == doctest::Approx(-0.5));
  }
  SUBCASE("collinear midpoint changes nothing") {
    Mat a(2, 2), b(3, 2);
    a << 0, 0, 1, 2;
    b << 0, 0, 0.5, 1, 1, 2;
    const GroupElement ga = stratonovich_lift(CadlagPath({0.0, 1.0}, a)).points().back();
    const GroupElement gb = stratonovich_lift(CadlagPath({0.0, 0.4, 1.0}, b)).points().back();
    CHECK((ga.level2 - gb.level2).norm() < 1e-15);
  }
}

TEST_CASE("Marcus lift") {
  std::mt19937_64 gen(32);
  SUBCASE("equals the Stratonovich lift without jumps") {
    const CadlagPath x(oracle::uniform_times(25), oracle::random_walk(gen, 25, 2));
    const RoughPath a = stratonovich_lift(x), b = marcus_lift(x);
    for (std::size_t i = 0; i < a.size(); ++i) {
      CHECK(a.points()[i].level1 == b.points()[i].level1);
      CHECK(a.points()[i].level2 == b.points()[i].level2);
    }
  }
  SUBCASE("pure jump path") {
    Mat v(3, 2);
    v << 0, 0, 0.7, -1.1, 0.7, -1.1;
    const CadlagPath x({0.0, 0.3, 1.0}, v, Interpolation::piecewise_constant);
    const RoughPath r = marcus_lift(x);
    CHECK(r.jump_indices() == std::vector<std::size_t>{1});
    const GroupElement e = group_exp(Vec(v.row(1).transpose()));
    CHECK((r.points().back().level2 - e.level2).norm() < 1e-15);
    const TensorElement lj = group_log(r.jump(1));
    CHECK(lj.level2.cwiseAbs().maxCoeff() < 1e-15);
    CHECK_THROWS_AS(stratonovich_lift(x), ValidationError);
  }
  SUBCASE("jump logs have no area on random cadlag paths") {
    for (int rep = 0; rep < 20; ++rep) {
      const Mat v = oracle::random_walk(gen, 12, 3);
      const CadlagPath x = rectangular_interpolant(oracle::uniform_times(12), v);
      const RoughPath r = marcus_lift(x);
      for (std::size_t i : r.jump_indices())
        CHECK(group_log(r.jump(i)).level2.cwiseAbs().maxCoeff() < 1e-12);
      CHECK(chen_defect(r) <= 1e-10);
      CHECK(max_geometric_defect(r) <= 1e-10);
    }
  }
}

TEST_CASE("rho_p") {
  std::mt19937_64 gen(33);
  const auto t = oracle::uniform_times(8);
  const RoughPath x = stratonovich_lift(CadlagPath(t, oracle::random_walk(gen, 8, 2)));
  CHECK(rho_p(x, x, 2.5) == 0.0);
  SUBCASE("pure area perturbation") {
    std::vector<double> a(8);
    for (std::size_t i = 0; i < 8; ++i) a[i] = 0.1 * static_cast<double>(i * i) / 49.0;
    const RoughPath y = with_area(x, a);
    // level 1 agrees, so only the area p/2-variation counts
    const double v2 = oracle::brute_partition_sum(8, [&](std::size_t i, std::size_t j) {
      return std::pow(std::sqrt(2.0) * std::abs(a[j] - a[i]), 1.25);
    });
    CHECK(rho_p(x, y, 2.5) == doctest::Approx(std::pow(v2, 0.8)).epsilon(1e-12));
  }
  SUBCASE("matches enumeration on small grids") {
    for (int rep = 0; rep < 20; ++rep) {
      const auto n = static_cast<Eigen::Index>(3 + rep % 8);
      const auto tt = oracle::uniform_times(static_cast<std::size_t>(n));
      const RoughPath a = stratonovich_lift(CadlagPath(tt, oracle::random_walk(gen, n, 2)));
      const RoughPath b = stratonovich_lift(CadlagPath(tt, oracle::random_walk(gen, n, 2)));
      for (double p : {2.0, 2.5, 2.9})
        CHECK(rho_p(a, b, p) == doctest::Approx(brute_rho(a, b, p)).epsilon(1e-12));
    }
  }
  SUBCASE("Holder distance is infinite across jumps") {
    Mat v(3, 2);
    v << 0, 0, 1, 1, 1, 1;
    const RoughPath j = marcus_lift(CadlagPath({0.0, 0.5, 1.0}, v, Interpolation::piecewise_constant));
    const RoughPath c = stratonovich_lift(linear_interpolant({0.0, 0.5, 1.0}, v));
    CHECK(std::isinf(rho_alpha_holder(j, c, 0.3)));
    CHECK(rho_alpha_holder(c, c, 0.3) == 0.0);
  }
  CHECK_THROWS_AS(rho_p(x, x, 3.0), ValidationError);
}

TEST_CASE("Wong-Zakai shape: dyadic lifts approach the finest one") {
  std::mt19937_64 gen(34);
  std::normal_distribution<double> g;
  const int fine = 9;
  const auto n = static_cast<std::size_t>(1) << fine;
  Mat w = Mat::Zero(static_cast<Eigen::Index>(n) + 1, 2);
  for (Eigen::Index i = 1; i <= static_cast<Eigen::Index>(n); ++i)
    for (int j = 0; j < 2; ++j) w(i, j) = w(i - 1, j) + g(gen) / std::sqrt(static_cast<double>(n));
  auto level = [&](int k) {
    const std::size_t stride = n >> k;
    std::vector<double> t;
    Mat v(static_cast<Eigen::Index>((std::size_t{1} << k) + 1), 2);
    for (std::size_t i = 0; i <= (std::size_t{1} << k); ++i) {
      t.push_back(static_cast<double>(i) / static_cast<double>(std::size_t{1} << k));
      v.row(static_cast<Eigen::Index>(i)) = w.row(static_cast<Eigen::Index>(i * stride));
    }
    return stratonovich_lift(CadlagPath(t, v));
  };
  const RoughPath finest = level(fine);
  double prev = std::numeric_limits<double>::infinity();
  for (int k = 2; k < fine; ++k) {
    const double d = rho_p(level(k), finest, 2.5);
    CHECK(d < prev);
    prev = d;
  }
}
