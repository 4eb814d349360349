#include "roughfilter/filter.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "roughfilter/errors.hpp"
#include "roughfilter/lift.hpp"
#include "roughfilter/rng.hpp"

namespace rf {

namespace {

double sum(const std::vector<double>& v) { return pairwise_sum(v.data(), v.size()); }

std::size_t find_time(const std::vector<double>& times, double t, double tol) {
  auto it = std::lower_bound(times.begin(), times.end(), t - tol);
  require(it != times.end() && std::abs(*it - t) <= tol, "time not found on the record grid");
  return static_cast<std::size_t>(it - times.begin());
}

std::vector<double> base_grid(double horizon, std::size_t steps) {
  std::vector<double> out(steps + 1);
  const double dt = horizon / static_cast<double>(steps);
  for (std::size_t k = 0; k <= steps; ++k) out[k] = k == steps ? horizon : dt * static_cast<double>(k);
  return out;
}

// Normalized weights w_i = p_i exp(I_i - max I).
struct Weights {
  std::vector<double> w;
  double shift = 0.0;
  double total = 0.0;
};

Weights normalized(const ParticleCloud& c) {
  const auto n = static_cast<std::size_t>(c.log_weight.size());
  require(n >= 1, "empty particle cloud");
  Weights out;
  out.shift = c.log_weight.maxCoeff();
  if (!std::isfinite(out.shift)) throw NumericalError("non-finite log weight", 0);
  out.w.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    const auto k = static_cast<Eigen::Index>(i);
    out.w[i] = std::exp(c.log_weight(k) - out.shift) * (c.probability.size() > 0 ? c.probability(k) : 1.0);
  }
  out.total = sum(out.w);
  if (!(out.total > 0.0))
    throw NumericalError("degenerate weights: g^1 <= 0 (max log weight " + std::to_string(out.shift) +
                             ", min log weight " + std::to_string(c.log_weight.minCoeff()) + ")",
                         0);
  return out;
}

std::vector<double> f_values(const ParticleCloud& c, const TestFunction& f) {
  std::vector<double> v(static_cast<std::size_t>(c.x.rows()));
  for (Eigen::Index i = 0; i < c.x.rows(); ++i) v[static_cast<std::size_t>(i)] = f(c.x.row(i).transpose(), c.y);
  return v;
}

McEstimate mc_mean(const std::vector<double>& f, const Weights& w, bool exact) {
  const std::size_t n = f.size();
  std::vector<double> s(n);
  for (std::size_t i = 0; i < n; ++i) s[i] = f[i] * w.w[i];
  const double scale = std::exp(w.shift);
  McEstimate e;
  e.n = n;
  if (exact) {
    e.value = scale * sum(s);
    return e;
  }
  const double mean = sum(s) / static_cast<double>(n);
  std::vector<double> sq(n);
  for (std::size_t i = 0; i < n; ++i) sq[i] = (s[i] - mean) * (s[i] - mean);
  e.value = scale * mean;
  e.se = n > 1 ? scale * std::sqrt(sum(sq) / static_cast<double>(n - 1) / static_cast<double>(n)) : 0.0;
  return e;
}

}  // namespace

McEstimate estimate_g(const ParticleCloud& cloud, const TestFunction& f) {
  const Weights w = normalized(cloud);
  return mc_mean(f_values(cloud, f), w, cloud.probability.size() > 0);
}

FilterResult estimate(const ParticleCloud& cloud, const TestFunction& f) {
  const Weights w = normalized(cloud);
  const std::vector<double> fv = f_values(cloud, f);
  const bool exact = cloud.probability.size() > 0;
  const std::vector<double> ones(fv.size(), 1.0);
  FilterResult r;
  r.g_f = mc_mean(fv, w, exact);
  r.g_1 = mc_mean(ones, w, exact);
  const std::size_t n = fv.size();
  std::vector<double> fw(n), dev(n), w2(n);
  for (std::size_t i = 0; i < n; ++i) fw[i] = fv[i] * w.w[i];
  r.theta = sum(fw) / w.total;
  for (std::size_t i = 0; i < n; ++i) {
    const double d = w.w[i] * (fv[i] - r.theta);
    dev[i] = d * d;
    w2[i] = w.w[i] * w.w[i];
  }
  r.theta_se = exact ? 0.0 : std::sqrt(sum(dev)) / w.total;
  r.ess = w.total * w.total / sum(w2);
  r.particles = n;
  r.seed_base = cloud.seed_base;
  r.max_log_weight = w.shift;
  r.f_name = f.name;
  return r;
}

ObservationRecord observation_record(const ModelSpec& m, const SimulationResult& sim) {
  require(sim.steps >= 1 && sim.horizon > 0.0, "simulation result carries no grid");
  ObservationRecord rec;
  rec.model_id = m.id;
  rec.horizon = sim.horizon;
  rec.steps = sim.steps;
  rec.atoms = sim.observed_jumps;
  rec.epsilon = sim.epsilon;
  const double tol = 1e-12 * sim.horizon;
  const std::vector<double> base = base_grid(sim.horizon, sim.steps);

  std::vector<std::size_t> idx;
  for (double s : base) idx.push_back(find_time(sim.times, s, tol));
  Mat w(static_cast<Eigen::Index>(idx.size()), m.dy);
  for (std::size_t k = 0; k < idx.size(); ++k) w.row(static_cast<Eigen::Index>(k)) = sim.w_tilde.value(idx[k]).transpose();
  rec.w_tilde = CadlagPath(base, w);

  // Y on the base grid and at the observation atoms.
  std::vector<std::size_t> yidx = idx;
  for (const auto& a : sim.observed_jumps) yidx.push_back(find_time(sim.times, a.time, tol));
  std::sort(yidx.begin(), yidx.end());
  yidx.erase(std::unique(yidx.begin(), yidx.end()), yidx.end());
  std::vector<double> yt;
  Mat yv(static_cast<Eigen::Index>(yidx.size()), m.dy), yp(static_cast<Eigen::Index>(yidx.size()), m.dy);
  for (std::size_t k = 0; k < yidx.size(); ++k) {
    yt.push_back(sim.times[yidx[k]]);
    yv.row(static_cast<Eigen::Index>(k)) = sim.y.value(yidx[k]).transpose();
    yp.row(static_cast<Eigen::Index>(k)) = sim.y.pre_value(yidx[k]).transpose();
  }
  rec.y = CadlagPath(yt, yv, yp);

  if (m.regime == Regime::infinite_jumps) {
    require(m.nu2.kind == LevyMeasure::Kind::stable, "infinite regime needs a stable-like nu2");
    const double drift = m.nu2.kind == LevyMeasure::Kind::stable && sim.epsilon > 0.0
                             ? -m.nu2.stable.first_moment_above(sim.epsilon)
                             : 0.0;
    std::vector<double> xt = base;
    for (const auto& a : sim.observed_jumps) xt.push_back(a.time);
    std::sort(xt.begin(), xt.end());
    xt.erase(std::unique(xt.begin(), xt.end()), xt.end());
    Mat xv(static_cast<Eigen::Index>(xt.size()), 1), xp(static_cast<Eigen::Index>(xt.size()), 1);
    double level = 0.0;
    std::size_t next = 0;
    for (std::size_t k = 0; k < xt.size(); ++k) {
      const auto r = static_cast<Eigen::Index>(k);
      xp(r, 0) = level + drift * xt[k];
      while (next < sim.observed_jumps.size() && sim.observed_jumps[next].time <= xt[k])
        level += sim.observed_jumps[next++].mark(0);
      xv(r, 0) = level + drift * xt[k];
    }
    rec.xi2 = CadlagPath(xt, xv, xp);
  }
  return rec;
}

namespace {

AdmissiblePair levy_driver(const CadlagPath& w_tilde, const CadlagPath& xi) {
  const auto& times = xi.times();
  const auto n = static_cast<Eigen::Index>(times.size());
  const Eigen::Index dy = w_tilde.dim();
  Mat v(n, dy + 1), p(n, dy + 1);
  for (Eigen::Index k = 0; k < n; ++k) {
    const Vec w = w_tilde.at(times[static_cast<std::size_t>(k)]);
    v.row(k).head(dy) = w.transpose();
    p.row(k).head(dy) = w.transpose();
    v(k, dy) = xi.values()(k, 0);
    p(k, dy) = xi.pre_values()(k, 0);
  }
  AdmissiblePair pair;
  pair.rough = marcus_lift(CadlagPath(times, v, p));
  return pair;
}

}  // namespace

AdmissiblePair observation_driver(const ModelSpec& m, const ObservationRecord& rec) {
  if (m.regime == Regime::infinite_jumps) return levy_driver(rec.w_tilde, rec.xi2);
  AdmissiblePair pair;
  pair.rough = stratonovich_lift(rec.w_tilde);
  return pair;
}

std::vector<JumpAtom> jump_record(const ModelSpec& m, const ObservationRecord& rec) {
  if (m.regime == Regime::infinite_jumps) return {};
  return rec.atoms;
}

McEstimate g_functional(const ModelSpec& m, const TestFunction& f, const AdmissiblePair& driver,
                        const std::vector<JumpAtom>& jumps, double t, std::size_t particles,
                        std::uint64_t seed_base, const EngineOptions& opt) {
  if (opt.mode == AuxMode::monte_carlo) require(particles >= 1, "particles must be >= 1");
  const DriverTable tab = make_driver_table(m, driver, jumps, t, opt);
  return estimate_g(run_particles(m, tab, particles, seed_base, opt), f);
}

FilterResult theta(const ModelSpec& m, const TestFunction& f, const AdmissiblePair& driver,
                   const std::vector<JumpAtom>& jumps, double t, std::size_t particles,
                   std::uint64_t seed_base, const EngineOptions& opt) {
  if (opt.mode == AuxMode::monte_carlo) require(particles >= 1, "particles must be >= 1");
  const DriverTable tab = make_driver_table(m, driver, jumps, t, opt);
  FilterResult r = estimate(run_particles(m, tab, particles, seed_base, opt), f);
  r.t = t;
  r.model_id = m.id;
  r.driver_meta["driver_samples"] = static_cast<double>(driver.rough.size());
  r.driver_meta["driver_jumps"] = static_cast<double>(driver.rough.jump_indices().size());
  r.driver_meta["observed_atoms"] = static_cast<double>(jumps.size());
  r.driver_meta["grid_intervals"] = static_cast<double>(tab.times.size() - 1);
  r.driver_meta["aux_steps"] = static_cast<double>(tab.aux_steps);
  return r;
}

FilterResult direct_filter(const ModelSpec& m, const TestFunction& f, const ObservationRecord& rec,
                           double t, std::size_t particles, std::uint64_t seed_base) {
  require(particles >= 1, "particles must be >= 1");
  require(t > 0.0 && t <= rec.horizon, "evaluation time outside the record");
  const Mat& w = rec.w_tilde.values();
  const Mat dW = w.bottomRows(w.rows() - 1) - w.topRows(w.rows() - 1);
  std::vector<CandidateAtom> cands;
  for (const auto& a : rec.atoms) cands.push_back({a.time, a.mark, 0.0});
  ParticleCloud cloud;
  cloud.seed_base = seed_base;
  cloud.x.resize(static_cast<Eigen::Index>(particles), m.dx);
  cloud.log_weight.resize(static_cast<Eigen::Index>(particles));
  std::vector<Vec> ys(particles);
  const NoiseOptions nopt{rec.epsilon > 0.0 ? rec.epsilon : 0.05, 0.1};
  parallel_for(particles, 0, [&](std::size_t i) {
    NoiseBundle nb = make_auxiliary_noise(m, seed_base + i, rec.horizon, rec.steps, nopt);
    nb.dW = dW;
    nb.observation_candidates = cands;
    nb.epsilon = rec.epsilon;
    const SimulationResult s = simulate_pair(m, nb, Measure::reference);
    cloud.x.row(static_cast<Eigen::Index>(i)) = s.x.at(t).transpose();
    cloud.log_weight(static_cast<Eigen::Index>(i)) = s.log_weight.at(t)(0);
    ys[i] = s.y.at(t);
  });
  cloud.y = ys.front();
  FilterResult r = estimate(cloud, f);
  r.t = t;
  r.model_id = m.id;
  return r;
}

namespace {

// Flow of the scalar common-noise field z' = sigma1(z), run for time w.
struct ScalarFlow {
  const ModelSpec& m;
  bool linear = false;
  double slope = 0.0;

  double sigma(double x) const {
    SMat s = SMat::Zero(1, 1);
    SVec xv = SVec::Constant(1, x), yv = SVec::Zero(1);
    m.sigma1(0.0, xv, yv, s);
    return s(0, 0);
  }
  double phi(double w, double x) const {
    if (linear) return x * std::exp(slope * w);
    SVec z = SVec::Constant(1, x);
    z = marcus_flow(z, w, [&](const SVec& v) { return SVec::Constant(1, sigma(v(0))); }, 32);
    return z(0);
  }
  double psi(double w, double x) const { return phi(-w, x); }
  double dpsi(double w, double x) const {
    if (linear) return std::exp(-slope * w);
    const double e = 1e-5 * std::max(1.0, std::abs(x));
    return (psi(w, x + e) - psi(w, x - e)) / (2.0 * e);
  }
};

}  // namespace

FilterResult scalar_flow_filter(const ModelSpec& m, const TestFunction& f, const ObservationRecord& rec,
                                double t, std::size_t particles, std::uint64_t seed_base) {
  require(m.regime == Regime::scalar, "scalar_flow_filter needs a scalar-regime model");
  require(m.dx == 1 && m.dy == 1, "scalar_flow_filter needs one-dimensional signal and observation");
  require(particles >= 1, "particles must be >= 1");
  require(t > 0.0 && t <= rec.horizon, "evaluation time outside the record");
  require(static_cast<bool>(m.sigma1), "model has no common-noise field");

  // The flow formula needs sigma1 to depend on x alone.
  ScalarFlow flow{m};
  {
    const double probes[] = {-2.0, -0.5, 0.3, 1.7};
    bool linear = true;
    flow.slope = flow.sigma(1.0);
    for (double x : probes) {
      for (double y : {-1.0, 0.8}) {
        for (double s : {0.0, 0.5 * rec.horizon, rec.horizon}) {
          SMat v = SMat::Zero(1, 1);
          m.sigma1(s, SVec::Constant(1, x), SVec::Constant(1, y), v);
          if (std::abs(v(0, 0) - flow.sigma(x)) > 1e-12 * (1.0 + std::abs(v(0, 0))))
            throw ValidationError("sigma1 depends on t or y: the flow decomposition does not apply");
        }
      }
      if (std::abs(flow.sigma(x) - flow.slope * x) > 1e-12 * (1.0 + std::abs(x))) linear = false;
    }
    flow.linear = linear;
  }

  const double tol = 1e-12 * rec.horizon;
  const double dt_base = rec.horizon / static_cast<double>(rec.steps);
  const NoiseOptions nopt{0.05, 0.1};
  ParticleCloud cloud;
  cloud.seed_base = seed_base;
  cloud.x.resize(static_cast<Eigen::Index>(particles), 1);
  cloud.log_weight.resize(static_cast<Eigen::Index>(particles));
  cloud.y = rec.y.at(t);
  static const Vec one = Vec::Ones(1);

  auto comp = [&](double s, double x, const SVec& y) {
    SVec xv = SVec::Constant(1, x), out = SVec::Zero(1);
    double c = 0.0;
    if (m.f1 && m.nu1.kind == LevyMeasure::Kind::discrete) {
      const auto& a = m.nu1.atoms;
      for (Eigen::Index k = 0; k < a.size(); ++k) {
        out.setZero();
        m.f1(s, xv, y, a.marks.row(k).transpose(), out);
        c += a.weights(k) * out(0);
      }
    }
    if (m.f3 && m.nu2.kind == LevyMeasure::Kind::discrete) {
      const auto& a = m.nu2.atoms;
      for (Eigen::Index k = 0; k < a.size(); ++k) {
        out.setZero();
        m.f3(s, xv, y, a.marks.row(k).transpose(), out);
        c += a.weights(k) * out(0);
      }
    }
    return c;
  };
  // d X~ over [s, s + dt] with the common noise removed.
  auto stage = [&](double s, double xt, double w, const SVec& y, double dt, double db) {
    const double x = flow.phi(w, xt);
    const SVec xv = SVec::Constant(1, x);
    SVec b = SVec::Zero(1), h(1);
    if (m.b1) m.b1(s, xv, y, b);
    h_function_into(m, s, xv, y, h);
    double drift = b(0) - flow.sigma(x) * h(0) - comp(s, x, y);
    double noise = 0.0;
    if (m.sigma0 && m.db > 0) {
      SMat s0 = SMat::Zero(1, m.db);
      m.sigma0(s, xv, y, s0);
      noise = s0(0, 0) * db;
    }
    return flow.dpsi(w, x) * (drift * dt + noise);
  };

  parallel_for(particles, 0, [&](std::size_t i) {
    const NoiseBundle aux = make_auxiliary_noise(m, seed_base + i, rec.horizon, rec.steps, nopt);
    std::vector<double> times = rec.w_tilde.times();
    for (const auto& a : rec.atoms) times.push_back(a.time);
    for (const auto& j : aux.signal_jumps) times.push_back(j.time);
    std::sort(times.begin(), times.end());
    std::vector<double> grid;
    for (double s : times) {
      if (s > t + tol) break;
      if (grid.empty() || s - grid.back() > tol) grid.push_back(s);
    }
    if (t - grid.back() > tol) grid.push_back(t);

    double xt = draw_initial(m, seed_base + i, stream::kInitial)(0);  // W~_0 = 0, so X~_0 = X_0
    double I = 0.0;
    std::size_t next_atom = 0, next_jump = 0;
    for (std::size_t k = 0; k + 1 < grid.size(); ++k) {
      const double s0 = grid[k], s1 = grid[k + 1], dt = s1 - s0;
      const double w0 = rec.w_tilde.at(s0)(0), w1 = rec.w_tilde.at(s1)(0);
      const SVec y0 = rec.y.at(s0), y1 = rec.y.left_limit(s1);
      const auto step = std::min<std::size_t>(rec.steps - 1, static_cast<std::size_t>(s0 / dt_base + 1e-9));
      const double db = m.db > 0 ? aux.dB(static_cast<Eigen::Index>(step), 0) * dt / dt_base : 0.0;

      // Left-point Girsanov sums on the signal X = phi(W~, X~).
      const double x0 = flow.phi(w0, xt);
      SVec h(1);
      h_function_into(m, s0, SVec::Constant(1, x0), y0, h);
      I += h(0) * (w1 - w0) - 0.5 * h(0) * h(0) * dt - compensator_lambda(m, s0, Vec::Constant(1, x0)) * dt;

      const double k1 = stage(s0, xt, w0, y0, dt, db);
      const double k2 = stage(s1, xt + k1, w1, y1, dt, db);
      xt += 0.5 * (k1 + k2);

      double x = flow.phi(w1, xt);
      SVec y = y1;
      while (next_atom < rec.atoms.size() && rec.atoms[next_atom].time <= s1 + tol) {
        const auto& a = rec.atoms[next_atom++];
        if (a.time < s1 - tol) continue;
        const SVec xv = SVec::Constant(1, x);
        const double lam = m.lambda ? m.lambda(s1, xv, a.mark) : 1.0;
        if (!(lam > 0.0)) throw NumericalError("lambda <= 0 at an observed atom", k + 1);
        I += std::log(lam);
        if (m.f3) {
          SVec j = SVec::Zero(1);
          m.f3(s1, xv, y, a.mark, j);
          x += j(0);
        }
      }
      y = rec.y.at(s1);
      while (next_jump < aux.signal_jumps.size() && aux.signal_jumps[next_jump].time <= s1 + tol) {
        const auto& j = aux.signal_jumps[next_jump++];
        if (j.time < s1 - tol) continue;
        SVec d = SVec::Zero(1);
        m.f1(s1, SVec::Constant(1, x), y, j.mark, d);
        x += d(0);
      }
      xt = flow.psi(w1, x);
      if (!std::isfinite(xt) || !std::isfinite(I)) throw NumericalError("scalar flow filter blew up", k + 1);
    }
    cloud.x(static_cast<Eigen::Index>(i), 0) = flow.phi(rec.w_tilde.at(t)(0), xt);
    cloud.log_weight(static_cast<Eigen::Index>(i)) = I;
  });
  FilterResult r = estimate(cloud, f);
  r.t = t;
  r.model_id = m.id;
  return r;
}

KalmanState kalman_bucy(const ModelSpec& m, const ObservationRecord& rec, double t) {
  require(m.id == "linear_gaussian", "kalman_bucy needs the linear_gaussian model");
  const double a = m.params.at("a"), c = m.params.at("c"), s0 = m.params.at("s0");
  const double s1 = m.params.at("s1"), s2 = m.params.at("s2");
  const double q = s0 * s0 + s1 * s1, cross = s1 * s2, r = s2 * s2;
  // State (m, P); Y piecewise linear with slope v on each record step.
  auto rhs = [&](double mean, double var, double v, double& dm, double& dp) {
    const double gain = (var * c + cross) / r;
    dm = a * mean + gain * (v - c * mean);
    dp = 2.0 * a * var + q - (var * c + cross) * (var * c + cross) / r;
  };
  KalmanState st{m.params.at("m0"), m.params.at("p0")};
  const auto& times = rec.y.times();
  for (std::size_t k = 0; k + 1 < times.size() && times[k] < t; ++k) {
    const double s_end = std::min(times[k + 1], t);
    const double h_total = s_end - times[k];
    const double v = (rec.y.left_limit(times[k + 1])(0) - rec.y.value(k)(0)) / (times[k + 1] - times[k]);
    const int sub = 4;
    const double h = h_total / sub;
    for (int j = 0; j < sub; ++j) {
      double m1, p1, m2, p2, m3, p3, m4, p4;
      rhs(st.mean, st.var, v, m1, p1);
      rhs(st.mean + 0.5 * h * m1, st.var + 0.5 * h * p1, v, m2, p2);
      rhs(st.mean + 0.5 * h * m2, st.var + 0.5 * h * p2, v, m3, p3);
      rhs(st.mean + h * m3, st.var + h * p3, v, m4, p4);
      st.mean += h / 6.0 * (m1 + 2 * m2 + 2 * m3 + m4);
      st.var += h / 6.0 * (p1 + 2 * p2 + 2 * p3 + p4);
    }
  }
  return st;
}

ConsistencyReport robust_consistency_check(const ModelSpec& m, const TestFunction& f, double t,
                                           std::size_t particles,
                                           const std::vector<std::uint64_t>& seeds,
                                           std::size_t steps, const EngineOptions& opt) {
  require(!seeds.empty(), "at least one seed is needed");
  ConsistencyReport rep;
  rep.model_id = m.id;
  rep.f_name = f.name;
  rep.particles = particles;
  rep.steps = steps;
  std::size_t passed = 0;
  for (std::uint64_t seed : seeds) {
    NoiseOptions nopt{opt.epsilon, opt.band_anchor};
    const NoiseBundle nb = make_noise_bundle(m, seed, t, steps, nopt);
    const SimulationResult sim = simulate_pair(m, nb, Measure::physical);
    const ObservationRecord rec = observation_record(m, sim);
    const AdmissiblePair driver = observation_driver(m, rec);
    EngineOptions eo = opt;
    if (eo.aux_steps == 0) eo.aux_steps = steps;
    const std::uint64_t base = (seed + 1) << 24;
    const FilterResult th = theta(m, f, driver, jump_record(m, rec), t, particles, base, eo);
    const FilterResult dr = direct_filter(m, f, rec, t, particles, base + (std::uint64_t{1} << 23));
    ConsistencyRow row;
    row.seed = seed;
    row.x_true = f(sim.x.at(t), sim.y.at(t));
    row.theta = th.theta;
    row.theta_se = th.theta_se;
    row.direct = dr.theta;
    row.direct_se = dr.theta_se;
    row.gap = std::abs(th.theta - dr.theta);
    row.combined_se = std::hypot(th.theta_se, dr.theta_se);
    row.pass = row.gap <= 3.0 * row.combined_se;
    passed += row.pass ? 1 : 0;
    rep.rows.push_back(row);
  }
  rep.pass_rate = static_cast<double>(passed) / static_cast<double>(seeds.size());
  return rep;
}

RobustnessTable robustness_experiment(const ModelSpec& m, const TestFunction& f, double t,
                                      const ObservationRecord& rec,
                                      const std::vector<std::size_t>& meshes, std::size_t particles,
                                      std::uint64_t seed_base, double alpha, const EngineOptions& opt) {
  require(m.regime != Regime::infinite_jumps, "robustness_experiment covers finite activity");
  require(!meshes.empty(), "at least one mesh is needed");
  require(alpha > 0.0 && alpha < 0.5, "alpha must lie in (0, 1/2)");
  RobustnessTable table;
  table.model_id = m.id;
  table.f_name = f.name;
  table.seed_base = seed_base;
  table.particles = particles;
  table.alpha = alpha;
  const auto& fine = rec.w_tilde.times();
  const std::size_t steps = fine.size() - 1;
  const auto jumps = jump_record(m, rec);
  EngineOptions eo = opt;
  if (eo.aux_steps == 0) eo.aux_steps = steps;

  for (std::size_t mesh : meshes) {
    require(mesh >= 1 && mesh <= steps, "mesh must lie in [1, record steps]");
    std::vector<double> st;
    Mat sv(static_cast<Eigen::Index>(mesh + 1), rec.w_tilde.dim());
    for (std::size_t k = 0; k <= mesh; ++k) {
      const std::size_t idx = (k * steps + mesh / 2) / mesh;
      st.push_back(fine[idx]);
      sv.row(static_cast<Eigen::Index>(k)) = rec.w_tilde.value(idx).transpose();
    }
    const CadlagPath lin = linear_interpolant(st, sv);
    const CadlagPath rect = rectangular_interpolant(st, sv);
    Mat lv(static_cast<Eigen::Index>(fine.size()), rec.w_tilde.dim()), rv = lv;
    for (std::size_t k = 0; k < fine.size(); ++k) {
      lv.row(static_cast<Eigen::Index>(k)) = lin.at(fine[k]).transpose();
      rv.row(static_cast<Eigen::Index>(k)) = rect.at(fine[k]).transpose();
    }
    AdmissiblePair dl, dr;
    dl.rough = stratonovich_lift(CadlagPath(fine, lv));
    dr.rough = stratonovich_lift(CadlagPath(fine, rv));

    const DriverTable tl = make_driver_table(m, dl, jumps, t, eo);
    const DriverTable tr = make_driver_table(m, dr, jumps, t, eo);
    const ParticleCloud cl = run_particles(m, tl, particles, seed_base, eo);
    const ParticleCloud cr = run_particles(m, tr, particles, seed_base, eo);
    const FilterResult el = estimate(cl, f), er = estimate(cr, f);

    // Paired standard error of theta_lin - theta_rect.
    const Weights wl = normalized(cl), wr = normalized(cr);
    const std::vector<double> fl = f_values(cl, f), fr = f_values(cr, f);
    std::vector<double> d2(fl.size());
    for (std::size_t i = 0; i < fl.size(); ++i) {
      const double d = wl.w[i] * (fl[i] - el.theta) / wl.total - wr.w[i] * (fr[i] - er.theta) / wr.total;
      d2[i] = d * d;
    }

    RobustnessRow row;
    row.mesh = mesh;
    row.theta_lin = el.theta;
    row.se_lin = el.theta_se;
    row.theta_rect = er.theta;
    row.se_rect = er.theta_se;
    row.gap = std::abs(el.theta - er.theta);
    row.gap_se = std::sqrt(sum(d2));
    row.rho_alpha = rho_alpha_holder(dl.rough, dr.rough, alpha);
    row.ratio = row.rho_alpha > 0.0 ? row.gap / row.rho_alpha : std::numeric_limits<double>::quiet_NaN();
    table.rows.push_back(row);
  }
  table.non_increasing = true;
  for (std::size_t k = 1; k < table.rows.size(); ++k)
    if (table.rows[k].gap > table.rows[k - 1].gap + 2.0 * std::hypot(table.rows[k].gap_se, table.rows[k - 1].gap_se))
      table.non_increasing = false;
  return table;
}

std::vector<EpsilonRow> epsilon_sweep(const ModelSpec& m, const TestFunction& f, double horizon,
                                      std::size_t steps, const std::vector<double>& epsilons,
                                      std::size_t particles, std::uint64_t seed,
                                      std::uint64_t seed_base, double p, const EngineOptions& opt) {
  require(m.regime == Regime::infinite_jumps, "epsilon_sweep needs the infinite-activity regime");
  require(m.nu2.kind == LevyMeasure::Kind::stable, "epsilon_sweep needs a stable-like nu2");
  require(!epsilons.empty(), "at least one epsilon is needed");
  for (std::size_t k = 1; k < epsilons.size(); ++k)
    require(epsilons[k] < epsilons[k - 1], "epsilons must be decreasing");

  // W~ is a Brownian motion under the reference measure.
  const NoiseBundle nb = make_noise_bundle(m, seed, horizon, steps, {epsilons.front(), opt.band_anchor});
  const std::vector<double> base = base_grid(horizon, steps);
  Mat w = Mat::Zero(static_cast<Eigen::Index>(steps + 1), m.dy);
  for (std::size_t k = 0; k < steps; ++k)
    w.row(static_cast<Eigen::Index>(k + 1)) = w.row(static_cast<Eigen::Index>(k)) + nb.dW.row(static_cast<Eigen::Index>(k));
  const CadlagPath w_tilde(base, w);

  std::vector<EpsilonRow> rows;
  std::vector<AdmissiblePair> drivers;
  for (double eps : epsilons) {
    const ShotNoise xi = shot_noise(m.nu2.stable, eps, seed, horizon, kObservationBandOffset, opt.band_anchor);
    // xi on the base grid merged with its jump times.
    std::vector<double> times = base;
    for (const auto& j : xi.jumps) times.push_back(j.time);
    std::sort(times.begin(), times.end());
    times.erase(std::unique(times.begin(), times.end()), times.end());
    Mat v(static_cast<Eigen::Index>(times.size()), 1), pv = v;
    for (std::size_t k = 0; k < times.size(); ++k) {
      v(static_cast<Eigen::Index>(k), 0) = xi.path.at(times[k])(0);
      pv(static_cast<Eigen::Index>(k), 0) = xi.path.left_limit(times[k])(0);
    }
    drivers.push_back(levy_driver(w_tilde, CadlagPath(times, v, pv)));
    EngineOptions eo = opt;
    eo.epsilon = eps;
    if (eo.aux_steps == 0) eo.aux_steps = steps;
    const FilterResult r = theta(m, f, drivers.back(), {}, horizon, particles, seed_base, eo);
    EpsilonRow row;
    row.epsilon = eps;
    row.observed_jumps = xi.jumps.size();
    row.theta = r.theta;
    row.theta_se = r.theta_se;
    row.beta_to_next = std::numeric_limits<double>::quiet_NaN();
    row.theta_gap_to_next = std::numeric_limits<double>::quiet_NaN();
    rows.push_back(row);
  }
  for (std::size_t k = 0; k + 1 < rows.size(); ++k) {
    rows[k].beta_to_next = beta_p(drivers[k], drivers[k + 1], p).estimate;
    rows[k].theta_gap_to_next = std::abs(rows[k].theta - rows[k + 1].theta);
  }
  return rows;
}

}  // namespace rf
