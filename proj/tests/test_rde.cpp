#include "doctest.h"

#include <unsupported/Eigen/MatrixFunctions>
#include <random>

#include "oracles.hpp"
#include "roughfilter/errors.hpp"
#include "roughfilter/rde.hpp"

using namespace rf;

namespace {

RoughPath smooth_driver(std::size_t n, Eigen::Index d) {
  const auto t = oracle::uniform_times(n);
  Mat v(static_cast<Eigen::Index>(n), d);
  for (std::size_t i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < d; ++j)
      v(static_cast<Eigen::Index>(i), j) = std::sin(2.0 * M_PI * (j + 1) * t[i]) + 0.5 * t[i] * (j + 1);
  return stratonovich_lift(CadlagPath(t, v));
}

// y(t) = exp(t A) in level 2 only: a pure-area rough path.
RoughPath pure_area(double a, std::size_t n) {
  const auto t = oracle::uniform_times(n);
  std::vector<GroupElement> pts;
  for (double s : t) {
    GroupElement g = GroupElement::identity(2);
    g.level2(0, 1) = a * s;
    g.level2(1, 0) = -a * s;
    pts.push_back(g);
  }
  return RoughPath(t, pts, pts);
}

VectorField scalar_linear() { return linear_field({Mat::Identity(1, 1)}); }

std::vector<Mat> two_by_two() {
  Mat a0(2, 2), a1(2, 2);
  a0 << 0.2, -0.5, 0.7, 0.1;
  a1 << -0.3, 0.4, 0.0, 0.6;
  return {a0, a1};
}

// Scalar step path with jumps of the given sizes at the given times, with a
// smooth drift added on top.
// Jump times must be grid nodes k / 32.
AdmissiblePair jumpy(const std::vector<double>& times, const std::vector<double>& sizes, double drift) {
  std::vector<double> t = oracle::uniform_times(33);
  Mat v(33, 1), pre(33, 1);
  for (std::size_t i = 0; i < t.size(); ++i) {
    double before = 0.0, at = 0.0;
    for (std::size_t k = 0; k < times.size(); ++k) {
      if (times[k] < t[i]) before += sizes[k];
      if (times[k] <= t[i]) at += sizes[k];
    }
    const double s = drift * std::sin(5.0 * t[i]);
    v(static_cast<Eigen::Index>(i), 0) = at + s;
    pre(static_cast<Eigen::Index>(i), 0) = before + s;
  }
  AdmissiblePair p;
  p.rough = marcus_lift(CadlagPath(t, v, pre));
  return p;
}

}  // namespace

TEST_CASE("trivial fields") {
  const RoughPath x = smooth_driver(50, 2);
  const RdeSolution s = solve_continuous_rde(constant_field(Mat::Zero(3, 2)), x, Vec::Constant(3, 1.5), 100);
  CHECK((s.states.rowwise() - Eigen::RowVector3d::Constant(1.5)).cwiseAbs().maxCoeff() == 0.0);
  // V = const: y_T = y_0 + C x_T exactly
  Mat c(1, 2);
  c << 2.0, -1.0;
  const RdeSolution t = solve_continuous_rde(constant_field(c), x, Vec::Zero(1), 10);
  CHECK(t.final_state()(0) == doctest::Approx((c * x.points().back().level1)(0)).epsilon(1e-13));
}

TEST_CASE("V(y) = y follows exp of the driver") {
  const RoughPath x = smooth_driver(1001, 1);
  const RdeSolution s = solve_continuous_rde(scalar_linear(), x, Vec::Constant(1, 2.0), 10000);
  for (std::size_t i = 0; i < x.size(); i += 100) {
    const double exact = 2.0 * std::exp(x.points()[i].level1(0));
    CHECK(std::abs(s.state(i)(0) - exact) <= 1e-6 * std::abs(exact));
  }
}

TEST_CASE("pure area driver against the matrix exponential") {
  const auto a = two_by_two();
  const double area = 0.8;
  // sum_ij A_ij (D V_j) V_i with V_i = a_i y
  const Mat m = area * (a[1] * a[0] - a[0] * a[1]);
  Vec y0(2);
  y0 << 1.0, -0.5;
  const Vec exact = (m * 1.0).exp() * y0;
  double prev = std::numeric_limits<double>::infinity();
  for (std::size_t steps : {100, 1000, 10000}) {
    const RdeSolution s = solve_continuous_rde(linear_field(a), pure_area(area, 11), y0, steps);
    const double err = (s.final_state() - exact).norm() / exact.norm();
    CHECK(err < prev / 5.0);
    prev = err;
  }
  CHECK(prev < 1e-4);
}

TEST_CASE("step halving converges with order >= 1") {
  VectorField v;
  v.state_dim = 2;
  v.driver_dim = 2;
  v.eval = [](double, const Vec& y) {
    Mat f(2, 2);
    f << std::sin(y(1)), 0.3 * y(0), std::cos(y(0)), 1.0 / (1.0 + y(1) * y(1));
    return f;
  };
  const RoughPath x = smooth_driver(17, 2);
  const Vec y0 = Vec::Constant(2, 0.3);
  const Vec ref = solve_continuous_rde(v, x, y0, 4096).final_state();
  std::vector<double> err;
  for (std::size_t n : {64, 128, 256}) err.push_back((solve_continuous_rde(v, x, y0, n).final_state() - ref).norm());
  CHECK(std::log2(err[0] / err[1]) >= 1.0);
  CHECK(std::log2(err[1] / err[2]) >= 1.0);
}

TEST_CASE("flow property: [0, t] then [t, T]") {
  const RoughPath x = smooth_driver(65, 2);
  const auto v = linear_field(two_by_two());
  const Vec y0 = Vec::Constant(2, 1.0);
  const std::size_t split = 32;
  const RdeSolution whole = solve_continuous_rde(v, x, y0, 640);
  std::vector<double> t;
  std::vector<GroupElement> pts;
  for (std::size_t j = split; j < x.size(); ++j) {
    t.push_back(x.times()[j] - x.times()[split]);
    pts.push_back(x.increment(split, j));
  }
  t.front() = 0.0;
  const RoughPath second(t, pts, pts);
  const RdeSolution first = solve_continuous_rde(v, x, y0, 640);
  const RdeSolution rest = solve_continuous_rde(v, second, first.state(split), 320);
  CHECK((rest.final_state() - whole.final_state()).norm() <= 1e-10 * whole.final_state().norm());
}

TEST_CASE("canonical solver") {
  SUBCASE("jumpless driver matches the continuous solver") {
    AdmissiblePair p;
    p.rough = smooth_driver(40, 2);
    const auto v = linear_field(two_by_two());
    const Vec y0 = Vec::Constant(2, 1.0);
    const RdeSolution a = solve_canonical_rde(v, p, y0, 200);
    const RdeSolution b = solve_continuous_rde(v, p.rough, y0, 200);
    CHECK((a.states - b.states).cwiseAbs().maxCoeff() == 0.0);
  }
  SUBCASE("single jump of V(y) = y multiplies by e^Delta") {
    // the jump flow is RK4 with 64 substeps
    const AdmissiblePair p = jumpy({0.40625}, {0.7}, 0.0);
    const RdeSolution s = solve_canonical_rde(scalar_linear(), p, Vec::Constant(1, 1.5), 64);
    const std::size_t j = p.rough.jump_indices().at(0);
    CHECK(s.states(static_cast<Eigen::Index>(j), 0) / s.pre_states(static_cast<Eigen::Index>(j), 0) ==
          doctest::Approx(std::exp(0.7)).epsilon(1e-9));
    CHECK(s.final_state()(0) == doctest::Approx(1.5 * std::exp(0.7)).epsilon(1e-9));
  }
  SUBCASE("2-D linear jump is the matrix exponential") {
    const auto a = two_by_two();
    std::vector<double> t{0.0, 0.5, 1.0};
    Mat v(3, 2), pre(3, 2);
    v << 0, 0, 0.9, -0.6, 0.9, -0.6;
    pre << 0, 0, 0, 0, 0.9, -0.6;
    AdmissiblePair p;
    p.rough = marcus_lift(CadlagPath(t, v, pre));
    Vec y0(2);
    y0 << 1.0, 2.0;
    const RdeSolution s = solve_canonical_rde(linear_field(a), p, y0, 16);
    const Vec exact = (0.9 * a[0] - 0.6 * a[1]).exp() * y0;
    CHECK((s.final_state() - exact).norm() <= 1e-8 * exact.norm());
  }
  SUBCASE("r_seq and delta do not change the solution") {
    const AdmissiblePair base = jumpy({0.1875, 0.5, 0.78125}, {0.8, -0.4, 0.3}, 0.5);
    VectorField v;
    v.state_dim = 1;
    v.driver_dim = 1;
    v.eval = [](double, const Vec& y) { return Mat::Constant(1, 1, std::sin(y(0)) + 0.5); };
    const Vec y0 = Vec::Constant(1, 0.2);
    const double tol = canonical_error_estimate(v, base, y0, 256);
    const RdeSolution ref = solve_canonical_rde(v, base, y0, 256);
    for (double ratio : {0.5, 1.0 / 3.0})
      for (double delta : {1.0, 0.25}) {
        AdmissiblePair p = base;
        p.r_seq = RSequence::geometric(ratio);
        p.delta = delta;
        const RdeSolution s = solve_canonical_rde(v, p, y0, 256);
        CHECK((s.states - ref.states).cwiseAbs().maxCoeff() <= 10.0 * tol + 1e-14);
      }
  }
}

TEST_CASE("inverse flow") {
  SUBCASE("constant driver") {
    std::vector<GroupElement> pts(5, GroupElement::identity(1));
    const RoughPath x(oracle::uniform_times(5), pts, pts);
    const FlowCheck f = flow_and_inverse(scalar_linear(), x, {Vec::Constant(1, 0.3)}, 100);
    CHECK(f.max_residual == 0.0);
    CHECK(f.phi[0](0) == 0.3);
  }
  SUBCASE("translation") {
    const RoughPath x = smooth_driver(30, 1);
    const FlowCheck f = flow_and_inverse(constant_field(Mat::Ones(1, 1)), x, {Vec::Constant(1, 0.3)}, 100);
    CHECK(f.phi[0](0) == doctest::Approx(0.3 + x.points().back().level1(0)).epsilon(1e-14));
    CHECK(f.max_residual < 1e-14);
  }
  SUBCASE("V(y) = y") {
    const RoughPath x = smooth_driver(1001, 1);
    std::vector<Vec> grid;
    for (double v : {-2.0, -0.5, 0.1, 1.0, 3.0}) grid.push_back(Vec::Constant(1, v));
    const FlowCheck f = flow_and_inverse(scalar_linear(), x, grid, 10000);
    CHECK(f.max_residual <= 1e-6);
  }
}

TEST_CASE("stability probe") {
  const AdmissiblePair x = jumpy({0.3125}, {0.5}, 0.4);
  const auto v = scalar_linear();
  const Vec y0 = Vec::Constant(1, 1.0);
  const StabilityProbe same = stability_probe(v, x, x, y0, 128);
  CHECK(same.sol_dist == 0.0);
  CHECK(same.driver_dist == 0.0);
  CHECK(std::isnan(same.ratio));
  std::vector<double> ratios;
  for (double eps : {1e-1, 1e-2, 1e-3}) {
    const CadlagPath tr = x.rough.trace();
    AdmissiblePair y = x;
    y.rough = marcus_lift(CadlagPath(tr.times(), tr.values() * (1.0 + eps), tr.pre_values() * (1.0 + eps)));
    const StabilityProbe pr = stability_probe(v, x, y, y0, 128);
    CHECK(pr.driver_dist > 0.0);
    ratios.push_back(pr.ratio);
    const StabilityProbe zero = stability_probe(constant_field(Mat::Zero(1, 1)), x, y, y0, 128);
    CHECK(zero.sol_dist == 0.0);
  }
  const auto [lo, hi] = std::minmax_element(ratios.begin(), ratios.end());
  CHECK(*hi / *lo < 10.0);
}

TEST_CASE("errors") {
  const RoughPath x = smooth_driver(10, 1);
  VectorField blow;
  blow.state_dim = 1;
  blow.driver_dim = 1;
  blow.eval = [](double, const Vec& y) { return Mat::Constant(1, 1, y(0) * y(0)); };
  std::vector<double> t{0.0, 1.0};
  Mat big(2, 1);
  big << 0.0, 500.0;
  CHECK_THROWS_AS(solve_continuous_rde(blow, stratonovich_lift(CadlagPath(t, big)), Vec::Constant(1, 1.0), 20),
                  NumericalError);
  CHECK_THROWS_AS(solve_continuous_rde(scalar_linear(), x, Vec::Constant(2, 1.0), 10), ValidationError);
  CHECK_THROWS_AS(solve_continuous_rde(linear_field(two_by_two()), x, Vec::Constant(2, 1.0), 10), ValidationError);
  CHECK(jacobian_mismatch(linear_field(two_by_two()), {Vec::Constant(2, 0.7)}) < 1e-8);
}
