#include "roughfilter/sim.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "roughfilter/errors.hpp"
#include "roughfilter/rng.hpp"

namespace rf {

namespace {

Vec draw_mark(const DiscreteMeasure& a, double u) {
  double target = u * a.total();
  for (Eigen::Index k = 0; k < a.size(); ++k) {
    target -= a.weights(k);
    if (target < 0.0) return a.marks.row(k).transpose();
  }
  return a.marks.row(a.size() - 1).transpose();
}

std::vector<JumpAtom> poisson_atoms(const DiscreteMeasure& a, double rate_factor, double horizon,
                                    CounterRng& rng, std::vector<double>* uniforms) {
  std::poisson_distribution<long> count(rate_factor * a.total() * horizon);
  const long n = count(rng);
  std::vector<JumpAtom> out;
  for (long i = 0; i < n; ++i) {
    JumpAtom atom;
    atom.time = horizon * rng.uniform();
    atom.mark = draw_mark(a, rng.uniform());
    if (uniforms) uniforms->push_back(rng.uniform());
    out.push_back(std::move(atom));
  }
  return out;
}

template <class Atom>
void sort_by_time(std::vector<Atom>& v) {
  std::stable_sort(v.begin(), v.end(), [](const Atom& a, const Atom& b) { return a.time < b.time; });
}

SMat eval_mat(const ModelSpec::Diffusion& f, Eigen::Index rows, Eigen::Index cols, double t,
              const SVec& x, const SVec& y) {
  SMat out = SMat::Zero(rows, cols);
  if (f) f(t, x, y, out);
  return out;
}

}  // namespace

Vec draw_initial(const ModelSpec& m, std::uint64_t seed, std::uint64_t stream) {
  CounterRng rng(seed, stream);
  std::normal_distribution<double> normal;
  Vec z(m.dx);
  for (Eigen::Index i = 0; i < m.dx; ++i) z(i) = normal(rng);
  Eigen::SelfAdjointEigenSolver<Mat> eig(m.init.x_cov);
  const Mat root = eig.eigenvectors() * eig.eigenvalues().cwiseMax(0.0).cwiseSqrt().asDiagonal() *
                   eig.eigenvectors().transpose();
  return m.init.x_mean + root * z;
}

ShotNoise shot_noise(const StableLevy& levy, double epsilon, std::uint64_t seed, double horizon,
                     std::uint64_t stream_base, double band_anchor) {
  require(epsilon > 0.0 && epsilon < 1.0, "shot noise truncation must lie in (0, 1)");
  require(band_anchor > 0.0 && band_anchor < 1.0, "band anchor must lie in (0, 1)");
  require(horizon > 0.0, "horizon must be positive");
  require(levy.index > 0.0 && levy.index < 2.0 && levy.scale > 0.0, "invalid stable-like measure");
  ShotNoise out;
  out.epsilon = epsilon;
  out.drift = -levy.first_moment_above(epsilon);
  const double a = levy.index;
  for (int k = 0;; ++k) {
    const double hi = k == 0 ? 1.0 : band_anchor * std::pow(2.0, 1 - k);
    const double lo = band_anchor * std::pow(2.0, -k);
    if (hi <= epsilon) break;
    CounterRng rng(seed, stream::kShotNoiseBase + stream_base + static_cast<std::uint64_t>(k));
    const double one_side = levy.mass_between(lo, hi) / (levy.symmetric ? 2.0 : 1.0);
    std::poisson_distribution<long> count((levy.symmetric ? 2.0 : 1.0) * one_side * horizon);
    const long n = count(rng);
    const double top = std::pow(lo, -a), bottom = std::pow(hi, -a);
    for (long i = 0; i < n; ++i) {
      const double t = horizon * rng.uniform();
      const double size = std::pow(top - rng.uniform() * (top - bottom), -1.0 / a);
      const double sign = levy.symmetric && rng.uniform() < 0.5 ? -1.0 : 1.0;
      if (size > epsilon) out.jumps.push_back({t, Vec::Constant(1, sign * size)});
    }
  }
  sort_by_time(out.jumps);

  std::vector<double> times{0.0};
  for (const auto& j : out.jumps) times.push_back(j.time);
  if (times.back() < horizon) times.push_back(horizon);
  const auto n = static_cast<Eigen::Index>(times.size());
  Mat values(n, 1), pre(n, 1);
  double level = 0.0;
  std::size_t next = 0;
  for (Eigen::Index i = 0; i < n; ++i) {
    const double t = times[static_cast<std::size_t>(i)];
    pre(i, 0) = level + out.drift * t;
    while (next < out.jumps.size() && out.jumps[next].time == t && i > 0) level += out.jumps[next++].mark(0);
    values(i, 0) = level + out.drift * t;
  }
  out.path = CadlagPath(std::move(times), std::move(values), std::move(pre), Interpolation::piecewise_linear);
  return out;
}

NoiseBundle make_auxiliary_noise(const ModelSpec& m, std::uint64_t seed, double horizon,
                                 std::size_t steps, const NoiseOptions& opt) {
  require(horizon > 0.0, "horizon must be positive");
  require(steps >= 1, "steps must be >= 1");
  NoiseBundle nb;
  nb.seed = seed;
  nb.horizon = horizon;
  nb.steps = steps;
  nb.lambda_sup = m.lambda ? m.lambda_sup : 1.0;
  require(nb.lambda_sup >= 1.0, "lambda_sup must be >= 1");
  const double sq = std::sqrt(nb.dt());
  const auto n = static_cast<Eigen::Index>(steps);
  CounterRng rng(seed, stream::kBrownianB);
  std::normal_distribution<double> normal;
  nb.dB.resize(n, m.db);
  for (Eigen::Index k = 0; k < n; ++k)
    for (Eigen::Index j = 0; j < m.db; ++j) nb.dB(k, j) = sq * normal(rng);

  if (m.nu1.kind == LevyMeasure::Kind::discrete && m.f1) {
    CounterRng signal(seed, stream::kSignalJumps);
    nb.signal_jumps = poisson_atoms(m.nu1.atoms, 1.0, horizon, signal, nullptr);
  } else if (m.nu1.kind == LevyMeasure::Kind::stable && m.f1) {
    require(opt.epsilon > 0.0 && opt.epsilon < 1.0, "epsilon must lie in (0, 1)");
    nb.epsilon = opt.epsilon;
    nb.signal_jumps = shot_noise(m.nu1.stable, opt.epsilon, seed, horizon, 0, opt.band_anchor).jumps;
  }
  sort_by_time(nb.signal_jumps);
  return nb;
}

NoiseBundle make_noise_bundle(const ModelSpec& m, std::uint64_t seed, double horizon,
                              std::size_t steps, const NoiseOptions& opt) {
  NoiseBundle nb = make_auxiliary_noise(m, seed, horizon, steps, opt);
  {
    const double sq = std::sqrt(nb.dt());
    CounterRng rng(seed, stream::kBrownianW);
    std::normal_distribution<double> normal;
    nb.dW.resize(static_cast<Eigen::Index>(steps), m.dy);
    for (Eigen::Index k = 0; k < nb.dW.rows(); ++k)
      for (Eigen::Index j = 0; j < m.dy; ++j) nb.dW(k, j) = sq * normal(rng);
  }
  if (m.nu2.kind == LevyMeasure::Kind::discrete && m.f2) {
    CounterRng rng(seed, stream::kObservationJumps);
    std::vector<double> uniforms;
    auto atoms = poisson_atoms(m.nu2.atoms, nb.lambda_sup, horizon, rng, &uniforms);
    for (std::size_t i = 0; i < atoms.size(); ++i)
      nb.observation_candidates.push_back({atoms[i].time, atoms[i].mark, uniforms[i]});
  } else if (m.nu2.kind == LevyMeasure::Kind::stable && m.f2) {
    require(opt.epsilon > 0.0 && opt.epsilon < 1.0, "epsilon must lie in (0, 1)");
    nb.epsilon = opt.epsilon;
    for (auto& j : shot_noise(m.nu2.stable, opt.epsilon, seed, horizon, kObservationBandOffset,
                              opt.band_anchor).jumps)
      nb.observation_candidates.push_back({j.time, j.mark, 0.0});
  }

  // The two measures must not jump together; redraw colliding signal times
  // from a separate stream so the uncolliding draws are unaffected.
  const double tol = 1e-12 * horizon;
  CounterRng redraw(seed, stream::kSignalJumps + 100);
  for (auto& s : nb.signal_jumps) {
    for (int guard = 0; guard < 1000; ++guard) {
      const bool clash = std::any_of(nb.observation_candidates.begin(), nb.observation_candidates.end(),
                                     [&](const CandidateAtom& o) { return std::abs(o.time - s.time) <= tol; });
      if (!clash) break;
      s.time = horizon * redraw.uniform();
      ++nb.collisions_redrawn;
    }
  }
  sort_by_time(nb.signal_jumps);
  sort_by_time(nb.observation_candidates);
  return nb;
}

SimulationResult simulate_pair(const ModelSpec& m, const NoiseBundle& noise, Measure measure) {
  return simulate_pair(m, noise, draw_initial(m, noise.seed, stream::kInitial), measure);
}

SimulationResult simulate_pair(const ModelSpec& m, const NoiseBundle& noise, const Vec& x0,
                               Measure measure) {
  require(x0.size() == m.dx, "x0 has the wrong dimension");
  require(noise.dB.cols() == m.db && noise.dW.cols() == m.dy, "noise bundle does not match the model");
  const double T = noise.horizon;
  const double dt = noise.dt();
  const bool infinite = m.regime == Regime::infinite_jumps;
  const bool physical = measure == Measure::physical;

  // Event-driven grid: base nodes plus every jump time.
  enum class Kind { node, signal, observation };
  struct Node {
    double t;
    Kind kind;
    std::size_t index;
  };
  std::vector<Node> nodes;
  for (std::size_t k = 0; k <= noise.steps; ++k)
    nodes.push_back({k == noise.steps ? T : dt * static_cast<double>(k), Kind::node, k});
  for (std::size_t i = 0; i < noise.signal_jumps.size(); ++i)
    nodes.push_back({noise.signal_jumps[i].time, Kind::signal, i});
  for (std::size_t i = 0; i < noise.observation_candidates.size(); ++i)
    nodes.push_back({noise.observation_candidates[i].time, Kind::observation, i});
  std::stable_sort(nodes.begin(), nodes.end(), [](const Node& a, const Node& b) { return a.t < b.t; });

  double drift1 = 0.0, drift2 = 0.0;  // shot-noise compensators (infinite regime)
  if (infinite) {
    if (m.nu1.kind == LevyMeasure::Kind::stable) drift1 = -m.nu1.stable.first_moment_above(noise.epsilon);
    if (m.nu2.kind == LevyMeasure::Kind::stable) drift2 = -m.nu2.stable.first_moment_above(noise.epsilon);
  }
  const Vec one = Vec::Ones(1);

  struct Increment {
    SVec x, y, h;
  };
  // Continuous part of the increment over [t, t + ds] from state (x, y).
  auto field = [&](double t, const SVec& x, const SVec& y, double ds, const SVec& db,
                   const SVec& dw) -> Increment {
    Increment inc{SVec::Zero(m.dx), SVec::Zero(m.dy), SVec::Zero(m.dy)};
    SVec ax = SVec::Zero(m.dx), ay = SVec::Zero(m.dy);
    if (m.b1) m.b1(t, x, y, ax);
    if (physical && m.b2) m.b2(t, x, y, ay);
    const SMat s1 = eval_mat(m.sigma1, m.dx, m.dy, t, x, y);
    h_function_into(m, t, x, y, inc.h);
    if (!physical) ax -= s1 * inc.h;
    if (!infinite) {
      const Vec xv = x, yv = y;
      ax -= compensator_f1(m, t, xv, yv) + compensator_f3(m, t, xv, yv, physical);
      ay -= compensator_f2(m, t, xv, yv, physical);
    } else {
      SVec n(m.dx);
      if (m.f1 && drift1 != 0.0) { n.setZero(); m.f1(t, x, y, one, n); ax += drift1 * n; }
      if (m.f3 && drift2 != 0.0) { n.setZero(); m.f3(t, x, y, one, n); ax += drift2 * n; }
      if (m.f2 && drift2 != 0.0) { SVec k = SVec::Zero(m.dy); m.f2(t, y, one, k); ay += drift2 * k; }
    }
    SMat s0 = eval_mat(m.sigma0, m.dx, m.db, t, x, y);
    SMat s2 = SMat::Zero(m.dy, m.dy);
    m.sigma2(t, y, s2);
    inc.x = ax * ds + s1 * dw;
    if (m.db > 0) inc.x += s0 * db;
    inc.y = ay * ds + s2 * dw;
    return inc;
  };

  const std::size_t n = nodes.size();
  std::vector<double> times;
  times.reserve(n);
  Mat xs(static_cast<Eigen::Index>(n), m.dx), xpre(static_cast<Eigen::Index>(n), m.dx);
  Mat ys(static_cast<Eigen::Index>(n), m.dy), ypre(static_cast<Eigen::Index>(n), m.dy);
  Mat ws(static_cast<Eigen::Index>(n), m.dy), wts(static_cast<Eigen::Index>(n), m.dy);

  SimulationResult res;
  res.measure = measure;
  res.seed = noise.seed;
  res.x0 = x0;
  res.horizon = noise.horizon;
  res.steps = noise.steps;
  res.epsilon = noise.epsilon;
  res.signal_jumps = noise.signal_jumps;
  SVec x = x0, y = m.init.y0;
  SVec w = SVec::Zero(m.dy), wt = SVec::Zero(m.dy);
  std::size_t row = 0;
  auto record = [&](double t, const SVec& xp, const SVec& yp) {
    const auto r = static_cast<Eigen::Index>(row);
    if (row > 0 && t == times.back()) {
      // Several events at one time: keep the first left limit.
      xs.row(r - 1) = x.transpose();
      ys.row(r - 1) = y.transpose();
      return;
    }
    times.push_back(t);
    xpre.row(r) = xp.transpose();
    ypre.row(r) = yp.transpose();
    xs.row(r) = x.transpose();
    ys.row(r) = y.transpose();
    ws.row(r) = w.transpose();
    wts.row(r) = wt.transpose();
    ++row;
  };

  record(0.0, x, y);
  double t = 0.0;
  for (std::size_t i = 1; i < n; ++i) {
    const Node& node = nodes[i];
    const double ds = node.t - t;
    if (ds > 0.0) {
      const auto k = std::min<std::size_t>(noise.steps - 1, static_cast<std::size_t>(t / dt + 1e-9));
      const double frac = ds / dt;
      const SVec db = noise.dB.row(static_cast<Eigen::Index>(k)).transpose() * frac;
      const SVec dw = noise.dW.row(static_cast<Eigen::Index>(k)).transpose() * frac;
      const Increment k1 = field(t, x, y, ds, db, dw);
      const SVec xp = x + k1.x, yp = y + k1.y;
      const Increment k2 = field(node.t, xp, yp, ds, db, dw);
      x += 0.5 * (k1.x + k2.x);
      y += 0.5 * (k1.y + k2.y);
      w += dw;
      wt += physical ? SVec(dw + 0.5 * (k1.h + k2.h) * ds) : dw;
      t = node.t;
      if (!x.allFinite() || !y.allFinite() || !wt.allFinite()) throw NumericalError("simulation blew up", i);
    }
    const SVec xl = x, yl = y;
    if (node.kind == Kind::signal) {
      const auto& atom = noise.signal_jumps[node.index];
      if (!infinite) {
        SVec jump = SVec::Zero(m.dx);
        m.f1(t, x, y, atom.mark, jump);
        x += jump;
      } else {
        x = marcus_flow(x, atom.mark(0), [&](const SVec& z) {
          SVec g = SVec::Zero(m.dx);
          m.f1(t, z, y, one, g);
          return g;
        });
      }
    } else if (node.kind == Kind::observation) {
      const auto& cand = noise.observation_candidates[node.index];
      bool accept = true;
      if (!infinite) {
        const double lam = physical ? m.eval_lambda(t, Vec(x), cand.mark) : 1.0;
        if (lam > noise.lambda_sup * (1.0 + 1e-12) || !(lam > 0.0))
          throw NumericalError("lambda outside (0, lambda_sup] during thinning", i);
        accept = cand.uniform < lam / noise.lambda_sup;
      }
      if (accept) {
        res.observed_jumps.push_back({t, cand.mark});
        if (!infinite) {
          SVec jx = SVec::Zero(m.dx), jy = SVec::Zero(m.dy);
          if (m.f3) m.f3(t, x, y, cand.mark, jx);
          m.f2(t, y, cand.mark, jy);
          x += jx;
          y += jy;
        } else {
          SVec z(m.dx + m.dy);
          z << x, y;
          z = marcus_flow(z, cand.mark(0), [&](const SVec& s) {
            SVec g = SVec::Zero(m.dx + m.dy);
            const SVec sx = s.head(m.dx), sy = s.tail(m.dy);
            SVec gx = SVec::Zero(m.dx), gy = SVec::Zero(m.dy);
            if (m.f3) m.f3(t, sx, sy, one, gx);
            m.f2(t, sy, one, gy);
            g << gx, gy;
            return g;
          });
          x = z.head(m.dx);
          y = z.tail(m.dy);
        }
      }
    }
    record(t, xl, yl);
  }

  const auto rows = static_cast<Eigen::Index>(row);
  res.times = times;
  res.x = CadlagPath(times, xs.topRows(rows), xpre.topRows(rows));
  res.y = CadlagPath(times, ys.topRows(rows), ypre.topRows(rows));
  res.w = CadlagPath(times, ws.topRows(rows));
  res.w_tilde = CadlagPath(times, wts.topRows(rows));
  res.log_weight = girsanov_exponent(m, res.x, res.y, res.w_tilde, res.observed_jumps);
  return res;
}

CadlagPath girsanov_exponent(const ModelSpec& m, const CadlagPath& x, const CadlagPath& y,
                             const CadlagPath& w_tilde, const std::vector<JumpAtom>& observed) {
  require(x.times() == y.times() && x.times() == w_tilde.times(),
          "girsanov_exponent needs paths on one grid");
  const auto& times = x.times();
  const auto n = static_cast<Eigen::Index>(times.size());
  Mat vals(n, 1), pre(n, 1);
  vals(0, 0) = pre(0, 0) = 0.0;
  double I = 0.0;
  std::size_t next = 0;
  Vec h(m.dy);
  for (Eigen::Index i = 1; i < n; ++i) {
    const auto ii = static_cast<std::size_t>(i);
    const double t0 = times[ii - 1], dt = times[ii] - t0;
    const Vec x0 = x.value(ii - 1), y0 = y.value(ii - 1);
    h_function_into(m, t0, x0, y0, h);
    const Vec dw = w_tilde.value(ii) - w_tilde.value(ii - 1);
    I += h.dot(dw) - 0.5 * h.squaredNorm() * dt - compensator_lambda(m, t0, x0) * dt;
    if (!std::isfinite(I)) throw NumericalError("non-finite Girsanov exponent", ii);
    pre(i, 0) = I;
    while (next < observed.size() && observed[next].time <= times[ii]) {
      if (observed[next].time == times[ii]) {
        const double lam = m.eval_lambda(times[ii], x.pre_value(ii), observed[next].mark);
        if (!(lam > 0.0)) throw ValidationError("lambda <= 0 encountered in the Girsanov exponent");
        I += std::log(lam);
      }
      ++next;
    }
    vals(i, 0) = I;
  }
  return CadlagPath(times, std::move(vals), std::move(pre));
}

}  // namespace rf
