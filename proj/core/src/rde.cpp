#include "roughfilter/rde.hpp"

#include <algorithm>
#include <cmath>

#include "roughfilter/errors.hpp"

namespace rf {

namespace {

std::size_t substeps_for(double dt, double horizon, std::size_t steps) {
  const double share = static_cast<double>(steps) * dt / horizon;
  return std::max<std::size_t>(1, static_cast<std::size_t>(std::ceil(share - 1e-9)));
}

// exp(lie / k): one of k equal pieces of a geodesic segment.
GroupElement piece(const TensorElement& lie, std::size_t k) {
  const double s = 1.0 / static_cast<double>(k);
  GroupElement g;
  g.level1 = lie.level1 * s;
  g.level2 = 0.5 * g.level1 * g.level1.transpose() + lie.level2 * s;
  return g;
}

void check_finite(const Vec& y, std::size_t step) {
  if (!y.allFinite()) throw NumericalError("RDE state became non-finite", step);
}

}  // namespace

Mat VectorField::operator()(double t, const Vec& y) const { return eval(t, y); }

std::vector<Mat> VectorField::finite_difference(double t, const Vec& y) const {
  std::vector<Mat> out(static_cast<std::size_t>(driver_dim), Mat::Zero(state_dim, state_dim));
  Vec probe = y;
  for (Eigen::Index k = 0; k < state_dim; ++k) {
    const double h = 1e-6 * std::max(1.0, std::abs(y(k)));
    probe(k) = y(k) + h;
    const Mat up = eval(t, probe);
    probe(k) = y(k) - h;
    const Mat down = eval(t, probe);
    probe(k) = y(k);
    for (Eigen::Index i = 0; i < driver_dim; ++i)
      out[static_cast<std::size_t>(i)].col(k) = (up.col(i) - down.col(i)) / (2.0 * h);
  }
  return out;
}

std::vector<Mat> VectorField::derivative(double t, const Vec& y) const {
  return jacobian ? jacobian(t, y) : finite_difference(t, y);
}

void VectorField::validate() const {
  require(state_dim >= 1 && driver_dim >= 1, "vector field dimensions must be >= 1");
  require(static_cast<bool>(eval), "vector field has no evaluator");
}

double jacobian_mismatch(const VectorField& v, const std::vector<Vec>& probes, double t) {
  if (!v.jacobian) return 0.0;
  double worst = 0.0;
  for (const auto& y : probes) {
    const auto exact = v.jacobian(t, y);
    const auto fd = v.finite_difference(t, y);
    for (std::size_t i = 0; i < fd.size(); ++i) {
      const double scale = std::max(1.0, exact[i].cwiseAbs().maxCoeff());
      worst = std::max(worst, (exact[i] - fd[i]).cwiseAbs().maxCoeff() / scale);
    }
  }
  return worst;
}

VectorField linear_field(std::vector<Mat> a) {
  require(!a.empty(), "linear_field needs at least one matrix");
  const auto e = a.front().rows();
  for (const auto& m : a) require(m.rows() == e && m.cols() == e, "linear_field matrices must be square and equal size");
  VectorField v;
  v.state_dim = e;
  v.driver_dim = static_cast<Eigen::Index>(a.size());
  v.eval = [a](double, const Vec& y) {
    Mat out(y.size(), static_cast<Eigen::Index>(a.size()));
    for (std::size_t i = 0; i < a.size(); ++i) out.col(static_cast<Eigen::Index>(i)) = a[i] * y;
    return out;
  };
  v.jacobian = [a](double, const Vec&) { return a; };
  return v;
}

VectorField constant_field(Mat c) {
  VectorField v;
  v.state_dim = c.rows();
  v.driver_dim = c.cols();
  v.eval = [c](double, const Vec&) { return c; };
  v.jacobian = [e = c.rows(), d = c.cols()](double, const Vec&) {
    return std::vector<Mat>(static_cast<std::size_t>(d), Mat::Zero(e, e));
  };
  return v;
}

CadlagPath RdeSolution::as_path() const {
  return CadlagPath(times, states, pre_states, Interpolation::piecewise_linear);
}

Vec davie_step(const VectorField& v, double t, const Vec& y, const Vec& x1, const Mat& x2) {
  const Mat f = v(t, y);
  Vec out = y + f * x1;
  const auto dv = v.derivative(t, y);
  for (Eigen::Index j = 0; j < x2.cols(); ++j) {
    Vec w = Vec::Zero(y.size());
    for (Eigen::Index i = 0; i < x2.rows(); ++i)
      if (x2(i, j) != 0.0) w += x2(i, j) * f.col(i);
    if (!w.isZero(0.0)) out += dv[static_cast<std::size_t>(j)] * w;
  }
  return out;
}

Vec log_ode_flow(const VectorField& v, double t, const Vec& y, const GroupElement& g,
                 int substeps) {
  require(substeps >= 1, "log_ode_flow needs at least one step");
  const TensorElement lie = group_log(g);
  const bool has_area = !lie.level2.isZero(0.0);
  auto field = [&](const Vec& z) -> Vec {
    const Mat f = v(t, z);
    Vec out = f * lie.level1;
    if (has_area) {
      const auto dv = v.derivative(t, z);
      for (Eigen::Index j = 0; j < lie.level2.cols(); ++j)
        for (Eigen::Index i = 0; i < lie.level2.rows(); ++i)
          if (lie.level2(i, j) != 0.0) out += lie.level2(i, j) * (dv[static_cast<std::size_t>(j)] * f.col(i));
    }
    return out;
  };
  const double h = 1.0 / substeps;
  Vec z = y;
  for (int k = 0; k < substeps; ++k) {
    const Vec k1 = field(z);
    const Vec k2 = field(z + 0.5 * h * k1);
    const Vec k3 = field(z + 0.5 * h * k2);
    const Vec k4 = field(z + h * k3);
    z += h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
  }
  return z;
}

RdeSolution solve_continuous_rde(const VectorField& v, const RoughPath& x, const Vec& y0,
                                 std::size_t steps) {
  v.validate();
  require(!x.has_jumps(), "solve_continuous_rde: driver has jumps; use solve_canonical_rde");
  require(x.dim() == v.driver_dim, "driver dimension does not match the vector field");
  require(y0.size() == v.state_dim, "initial condition has the wrong dimension");
  require(steps >= 1, "steps must be >= 1");

  const std::size_t n = x.size();
  RdeSolution sol;
  sol.times = x.times();
  sol.states.resize(static_cast<Eigen::Index>(n), v.state_dim);
  sol.states.row(0) = y0.transpose();
  Vec y = y0;
  for (std::size_t i = 0; i + 1 < n; ++i) {
    const double t0 = x.times()[i];
    const double dt = x.times()[i + 1] - t0;
    const std::size_t k = substeps_for(dt, x.horizon(), steps);
    const GroupElement g = piece(group_log(x.segment(i)), k);
    for (std::size_t s = 0; s < k; ++s) {
      y = davie_step(v, t0 + dt * static_cast<double>(s) / static_cast<double>(k), y, g.level1, g.level2);
      check_finite(y, sol.stats.steps);
      ++sol.stats.steps;
    }
    sol.states.row(static_cast<Eigen::Index>(i + 1)) = y.transpose();
  }
  sol.pre_states = sol.states;
  return sol;
}

RdeSolution solve_canonical_rde(const VectorField& v, const AdmissiblePair& pair, const Vec& y0,
                                std::size_t steps, const CanonicalOptions& opt) {
  v.validate();
  require(pair.rough.dim() == v.driver_dim, "driver dimension does not match the vector field");
  require(y0.size() == v.state_dim, "initial condition has the wrong dimension");
  require(steps >= 1, "steps must be >= 1");
  require(opt.jump_substeps >= 1, "jump_substeps must be >= 1");

  const RoughPath& x = pair.rough;
  const ContinuousRepresentative rep = continuous_representative(pair);
  const RoughPath& z = rep.path;

  // Original clock at every sample of the representative: frozen at t_k
  // inside the slot filling the jump at t_k.
  std::vector<double> clock(z.size(), 0.0);
  std::size_t slot = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const std::size_t end = rep.original_index[i];
    const std::size_t begin = x.is_jump(i) ? rep.slot_begin[slot++] : end;
    for (std::size_t j = begin; j <= end; ++j) clock[j] = x.times()[i];
  }

  const auto per_segment = static_cast<int>(
      std::ceil(static_cast<double>(opt.jump_substeps) / static_cast<double>(pair.slot_substeps)));
  std::vector<Vec> ybar(z.size());
  ybar[0] = y0;
  SchemeStats stats;
  stats.scheme = "davie-level2+log-ode-rk4";
  for (std::size_t j = 0; j + 1 < z.size(); ++j) {
    Vec y = ybar[j];
    const GroupElement seg = z.segment(j);
    if (rep.in_slot[j]) {
      y = log_ode_flow(v, clock[j], y, seg, per_segment);
      stats.flow_steps += static_cast<std::size_t>(per_segment);
    } else {
      const double dt = clock[j + 1] - clock[j];
      const std::size_t k = substeps_for(dt, x.horizon(), steps);
      const GroupElement g = piece(group_log(seg), k);
      for (std::size_t s = 0; s < k; ++s) {
        y = davie_step(v, clock[j] + dt * static_cast<double>(s) / static_cast<double>(k), y,
                       g.level1, g.level2);
        ++stats.steps;
      }
    }
    check_finite(y, stats.steps + stats.flow_steps);
    ybar[j + 1] = std::move(y);
  }

  RdeSolution sol;
  sol.times = x.times();
  sol.stats = stats;
  const auto n = static_cast<Eigen::Index>(x.size());
  sol.states.resize(n, v.state_dim);
  sol.pre_states.resize(n, v.state_dim);
  slot = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const auto r = static_cast<Eigen::Index>(i);
    sol.states.row(r) = ybar[rep.original_index[i]].transpose();
    const std::size_t left = x.is_jump(i) ? rep.slot_begin[slot++] : rep.original_index[i];
    sol.pre_states.row(r) = ybar[left].transpose();
  }
  return sol;
}

double canonical_error_estimate(const VectorField& v, const AdmissiblePair& pair, const Vec& y0,
                                std::size_t steps) {
  const RdeSolution coarse = solve_canonical_rde(v, pair, y0, steps);
  CanonicalOptions fine_opt;
  fine_opt.jump_substeps *= 2;
  const RdeSolution fine = solve_canonical_rde(v, pair, y0, 2 * steps, fine_opt);
  return std::max((coarse.states - fine.states).cwiseAbs().maxCoeff(),
                  (coarse.pre_states - fine.pre_states).cwiseAbs().maxCoeff());
}

RoughPath reverse(const RoughPath& x) {
  require(!x.has_jumps(), "reverse: only continuous drivers can be reversed");
  const std::size_t n = x.size();
  const double T = x.horizon();
  const GroupElement end_inv = group_inverse(x.points().back());
  std::vector<double> t(n);
  std::vector<GroupElement> pts(n);
  for (std::size_t j = 0; j < n; ++j) {
    t[j] = j == 0 ? 0.0 : (j + 1 == n ? T : T - x.times()[n - 1 - j]);
    pts[j] = j == 0 ? GroupElement::identity(x.dim()) : group_mul(end_inv, x.points()[n - 1 - j]);
  }
  std::vector<GroupElement> pre = pts;
  return RoughPath(std::move(t), std::move(pts), std::move(pre), std::vector<bool>(n, false));
}

FlowCheck flow_and_inverse(const VectorField& v, const RoughPath& x, const std::vector<Vec>& x_grid,
                           std::size_t steps) {
  const RoughPath back = reverse(x);
  VectorField reversed = v;
  reversed.eval = [f = v.eval, T = x.horizon()](double u, const Vec& y) { return f(T - u, y); };
  if (v.jacobian)
    reversed.jacobian = [j = v.jacobian, T = x.horizon()](double u, const Vec& y) { return j(T - u, y); };
  FlowCheck out;
  for (const auto& x0 : x_grid) {
    const Vec phi = solve_continuous_rde(v, x, x0, steps).final_state();
    const Vec psi = solve_continuous_rde(reversed, back, phi, steps).final_state();
    out.phi.push_back(phi);
    out.residual.push_back((psi - x0).norm());
    out.max_residual = std::max(out.max_residual, out.residual.back());
  }
  return out;
}

StabilityProbe stability_probe(const VectorField& v, const AdmissiblePair& x,
                               const AdmissiblePair& y, const Vec& y0, std::size_t steps, double p) {
  StabilityProbe out;
  const RdeSolution sx = solve_canonical_rde(v, x, y0, steps);
  const RdeSolution sy = solve_canonical_rde(v, y, y0, steps);
  out.sol_dist = d_p(sx.as_path(), sy.as_path(), p);
  out.driver_dist = beta_p(x, y, p).estimate;
  if (out.driver_dist > 0.0) out.ratio = out.sol_dist / out.driver_dist;
  return out;
}

}  // namespace rf
