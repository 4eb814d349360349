#include "roughfilter/particles.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <mutex>
#include <string>
#include <thread>

#include "roughfilter/errors.hpp"
#include "roughfilter/rng.hpp"

namespace rf {

void parallel_for(std::size_t n, unsigned threads, const std::function<void(std::size_t)>& body) {
  if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
  threads = static_cast<unsigned>(std::min<std::size_t>(threads, std::max<std::size_t>(n, 1)));
  if (threads <= 1) {
    for (std::size_t i = 0; i < n; ++i) body(i);
    return;
  }
  std::mutex mu;
  std::size_t failed_at = n;
  std::exception_ptr failure;
  std::vector<std::thread> pool;
  for (unsigned w = 0; w < threads; ++w) {
    pool.emplace_back([&, w] {
      for (std::size_t i = w; i < n; i += threads) {
        try {
          body(i);
        } catch (...) {
          std::lock_guard<std::mutex> lock(mu);
          // Report the lowest failing index so errors do not depend on scheduling.
          if (i < failed_at) {
            failed_at = i;
            failure = std::current_exception();
          }
          return;
        }
      }
    });
  }
  for (auto& t : pool) t.join();
  if (failure) std::rethrow_exception(failure);
}

double pairwise_sum(const double* v, std::size_t n) {
  if (n <= 8) {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) s += v[i];
    return s;
  }
  const std::size_t half = n / 2;
  return pairwise_sum(v, half) + pairwise_sum(v + half, n - half);
}

namespace {

bool infinite(const ModelSpec& m) { return m.regime == Regime::infinite_jumps; }

// Column i of the driver vector fields on the joint state (x, y, I).
struct Column {
  SVec x, y;
  double i = 0.0;
};

Column column(const ModelSpec& m, double t, const SVec& x, const SVec& y, Eigen::Index i) {
  Column c{SVec::Zero(m.dx), SVec::Zero(m.dy), 0.0};
  static const Vec one = Vec::Ones(1);
  if (i < m.dy) {
    SMat s1 = SMat::Zero(m.dx, m.dy), s2 = SMat::Zero(m.dy, m.dy);
    if (m.sigma1) m.sigma1(t, x, y, s1);
    m.sigma2(t, y, s2);
    SVec h(m.dy);
    h_function_into(m, t, x, y, h);
    c.x = s1.col(i);
    c.y = s2.col(i);
    c.i = h(i);
  } else {
    if (m.f3) m.f3(t, x, y, one, c.x);
    if (m.f2) m.f2(t, y, one, c.y);
  }
  return c;
}

// sum_ij A_ij (D col_j . col_i), by central differences along col_i.
Column bracket_term(const ModelSpec& m, double t, const SVec& x, const SVec& y, const Mat& a,
                    Eigen::Index q) {
  Column out{SVec::Zero(m.dx), SVec::Zero(m.dy), 0.0};
  std::vector<Column> cols;
  for (Eigen::Index i = 0; i < q; ++i) cols.push_back(column(m, t, x, y, i));
  const double eps = 1e-6 * std::max(1.0, x.norm() + y.norm());
  for (Eigen::Index i = 0; i < q; ++i) {
    const SVec xp = x + eps * cols[i].x, xm = x - eps * cols[i].x;
    const SVec yp = y + eps * cols[i].y, ym = y - eps * cols[i].y;
    for (Eigen::Index j = 0; j < q; ++j) {
      if (a(i, j) == 0.0) continue;
      const Column p = column(m, t, xp, yp, j), n = column(m, t, xm, ym, j);
      const double w = a(i, j) / (2.0 * eps);
      out.x += w * (p.x - n.x);
      out.y += w * (p.y - n.y);
      out.i += w * (p.i - n.i);
    }
  }
  return out;
}

// Time-1 flow of the log-ODE of exp(l1 + A) on (x, y, I).
void jump_flow(const ModelSpec& m, double t, const Vec& l1, const Mat& a, SVec& x, SVec& y,
               double& I, int substeps) {
  const auto q = l1.size();
  auto field = [&](const SVec& zx, const SVec& zy) {
    Column d{SVec::Zero(m.dx), SVec::Zero(m.dy), 0.0};
    for (Eigen::Index i = 0; i < q; ++i) {
      if (l1(i) == 0.0) continue;
      const Column c = column(m, t, zx, zy, i);
      d.x += l1(i) * c.x;
      d.y += l1(i) * c.y;
      d.i += l1(i) * c.i;
    }
    if (a.size() > 0) {
      const Column b = bracket_term(m, t, zx, zy, a, q);
      d.x += b.x;
      d.y += b.y;
      d.i += b.i;
    }
    return d;
  };
  const double h = 1.0 / substeps;
  for (int k = 0; k < substeps; ++k) {
    const Column k1 = field(x, y);
    const Column k2 = field(SVec(x + 0.5 * h * k1.x), SVec(y + 0.5 * h * k1.y));
    const Column k3 = field(SVec(x + 0.5 * h * k2.x), SVec(y + 0.5 * h * k2.y));
    const Column k4 = field(SVec(x + h * k3.x), SVec(y + h * k3.y));
    x += h / 6.0 * (k1.x + 2.0 * k2.x + 2.0 * k3.x + k4.x);
    y += h / 6.0 * (k1.y + 2.0 * k2.y + 2.0 * k3.y + k4.y);
    I += h / 6.0 * (k1.i + 2.0 * k2.i + 2.0 * k3.i + k4.i);
  }
}

// Continuous increment of Y over one interval under the reference measure.
SVec y_stage(const ModelSpec& m, double t, const SVec& y, double dt, const Eigen::Ref<const Vec>& x1) {
  SMat s2 = SMat::Zero(m.dy, m.dy);
  m.sigma2(t, y, s2);
  SVec out = s2 * x1.head(m.dy);
  if (infinite(m)) {
    if (m.f2) {
      static const Vec one = Vec::Ones(1);
      SVec n = SVec::Zero(m.dy);
      m.f2(t, y, one, n);
      out += x1(m.dy) * n;
    }
  } else if (m.f2 && m.nu2.kind == LevyMeasure::Kind::discrete) {
    const auto& a = m.nu2.atoms;
    SVec u(a.mark_dim()), j(m.dy);
    for (Eigen::Index k = 0; k < a.size(); ++k) {
      u = a.marks.row(k).transpose();
      j.setZero();
      m.f2(t, y, u, j);
      out -= a.weights(k) * dt * j;
    }
  }
  return out;
}

std::size_t find_node(const std::vector<double>& times, double t, double tol) {
  auto it = std::lower_bound(times.begin(), times.end(), t - tol);
  if (it == times.end() || std::abs(*it - t) > tol) return times.size();
  return static_cast<std::size_t>(it - times.begin());
}

}  // namespace

DriverTable make_driver_table(const ModelSpec& m, const AdmissiblePair& driver,
                              const std::vector<JumpAtom>& jump_record, double t,
                              const EngineOptions& opt) {
  driver.validate();
  const RoughPath& rp = driver.rough;
  const Eigen::Index q = m.dy + (infinite(m) ? 1 : 0);
  require(rp.dim() == q, "driver dimension must be d_Y" + std::string(infinite(m) ? " + 1" : ""));
  const double T = rp.horizon();
  require(t > 0.0 && t <= T * (1.0 + 1e-12), "evaluation time must lie in (0, driver horizon]");
  require(!infinite(m) || jump_record.empty(),
          "infinite-activity observations carry their jumps in the driver");
  const double tol = 1e-12 * T;

  DriverTable tab;
  tab.q = q;
  tab.horizon = t;
  const std::size_t n_aux =
      opt.aux_steps > 0 ? opt.aux_steps : std::max<std::size_t>(64, rp.size() - 1);
  const double dt_aux = T / static_cast<double>(n_aux);
  tab.aux_steps = n_aux;
  tab.aux_dt = dt_aux;
  for (std::size_t k = 0; k <= n_aux; ++k) {
    const double s = k == n_aux ? T : dt_aux * static_cast<double>(k);
    if (s <= t + tol) tab.base_times.push_back(std::min(s, t));
  }

  std::vector<double> all(rp.times().begin(), rp.times().end());
  all.insert(all.end(), tab.base_times.begin(), tab.base_times.end());
  for (const auto& a : jump_record) {
    require(a.time > 0.0 && a.time <= T, "observed atom outside (0, T]");
    require(a.mark.size() == m.nu2.mark_dim(), "observed atom has the wrong mark dimension");
    all.push_back(a.time);
  }
  all.push_back(t);
  std::sort(all.begin(), all.end());
  for (double s : all) {
    if (s > t + tol) break;
    if (tab.times.empty() || s - tab.times.back() > tol) tab.times.push_back(s);
  }
  tab.times.back() = t;
  const std::size_t nodes = tab.times.size();
  require(nodes >= 2, "driver grid is empty");
  const std::size_t intervals = nodes - 1;

  // Level-1 / area logs of each driver segment, scaled onto sub-intervals.
  std::vector<TensorElement> seg_log(rp.size() > 0 ? rp.size() - 1 : 0);
  for (std::size_t i = 0; i + 1 < rp.size(); ++i) seg_log[i] = group_log(rp.segment(i));
  tab.x1 = Mat::Zero(static_cast<Eigen::Index>(intervals), q);
  tab.area.assign(intervals, Mat());
  tab.base_step.resize(intervals);
  tab.base_frac.resize(intervals);
  const auto& dtimes = rp.times();
  for (std::size_t k = 0; k < intervals; ++k) {
    const double a = tab.times[k], b = tab.times[k + 1];
    auto it = std::upper_bound(dtimes.begin(), dtimes.end(), a + tol);
    const auto seg = static_cast<std::size_t>(std::max<std::ptrdiff_t>(0, it - dtimes.begin() - 1));
    if (seg + 1 < rp.size()) {
      const double frac = (b - a) / (dtimes[seg + 1] - dtimes[seg]);
      tab.x1.row(static_cast<Eigen::Index>(k)) = frac * seg_log[seg].level1.transpose();
      const Mat anti = 0.5 * (seg_log[seg].level2 - seg_log[seg].level2.transpose());
      if (anti.cwiseAbs().maxCoeff() > 0.0) tab.area[k] = frac * anti;
    }
    auto bt = std::upper_bound(tab.base_times.begin(), tab.base_times.end(), a + tol);
    tab.base_step[k] = std::min<std::size_t>(n_aux - 1, static_cast<std::size_t>(bt - tab.base_times.begin() - 1));
    tab.base_frac[k] = (b - a) / dt_aux;
  }

  tab.jump_log1.assign(nodes, Vec());
  tab.jump_area.assign(nodes, Mat());
  for (std::size_t i : rp.jump_indices()) {
    const std::size_t k = find_node(tab.times, dtimes[i], tol);
    if (k >= nodes) continue;
    const TensorElement lg = group_log(rp.jump(i));
    tab.jump_log1[k] = lg.level1;
    const Mat anti = 0.5 * (lg.level2 - lg.level2.transpose());
    if (anti.cwiseAbs().maxCoeff() > 0.0) tab.jump_area[k] = anti;
  }
  tab.atoms.assign(nodes, {});
  for (const auto& a : jump_record) {
    const std::size_t k = find_node(tab.times, a.time, tol);
    if (k < nodes) tab.atoms[k].push_back(a);
  }

  // Observation path under the reference measure.
  tab.y_pre.resize(static_cast<Eigen::Index>(nodes), m.dy);
  tab.y_post.resize(static_cast<Eigen::Index>(nodes), m.dy);
  tab.y_pred.resize(static_cast<Eigen::Index>(intervals), m.dy);
  require(m.init.y0.size() == m.dy, "initial observation has the wrong dimension");
  SVec y = m.init.y0;
  tab.y_pre.row(0) = tab.y_post.row(0) = y.transpose();
  SVec dummy_x = SVec::Zero(m.dx);
  for (std::size_t k = 0; k < intervals; ++k) {
    const auto r = static_cast<Eigen::Index>(k);
    const double dt = tab.times[k + 1] - tab.times[k];
    const Vec x1 = tab.x1.row(r).transpose();
    const SVec k1 = y_stage(m, tab.times[k], y, dt, x1);
    const SVec pred = y + k1;
    const SVec k2 = y_stage(m, tab.times[k + 1], pred, dt, x1);
    SVec next = y + 0.5 * (k1 + k2);
    if (tab.area[k].size() > 0) next += bracket_term(m, tab.times[k], dummy_x, y, tab.area[k], q).y;
    tab.y_pred.row(r) = pred.transpose();
    y = next;
    const double tn = tab.times[k + 1];
    tab.y_pre.row(r + 1) = y.transpose();
    if (tab.jump_log1[k + 1].size() > 0) {
      double unused = 0.0;
      jump_flow(m, tn, tab.jump_log1[k + 1], tab.jump_area[k + 1], dummy_x, y, unused, opt.jump_substeps);
    }
    for (const auto& a : tab.atoms[k + 1]) {
      SVec j = SVec::Zero(m.dy);
      m.f2(tn, y, a.mark, j);
      y += j;
    }
    if (!y.allFinite()) throw NumericalError("observation path blew up", k + 1);
    tab.y_post.row(r + 1) = y.transpose();
  }
  return tab;
}

namespace {

struct Aux {
  SVec x0;
  Mat dB;  // aux steps x d_B
  std::vector<std::pair<std::size_t, Vec>> jumps;  // (node, mark), node order
};

struct Engine {
  const ModelSpec& m;
  const DriverTable& tab;
  const EngineOptions& opt;
  double drift1 = 0.0;  // signal shot-noise compensator per unit time

  struct Stage {
    SVec dx;
    double dI;
  };

  Stage stage(double t, const SVec& x, const SVec& y, double dt, const SVec& db,
              const Eigen::Ref<const Vec>& x1) const {
    static const Vec one = Vec::Ones(1);
    SVec drift = SVec::Zero(m.dx);
    if (m.b1) m.b1(t, x, y, drift);
    SMat s1 = SMat::Zero(m.dx, m.dy);
    if (m.sigma1) m.sigma1(t, x, y, s1);
    SVec h(m.dy);
    h_function_into(m, t, x, y, h);
    drift -= s1 * h;
    double comp_lambda = 0.0;
    if (!infinite(m)) {
      if (m.f1 && m.nu1.kind == LevyMeasure::Kind::discrete) {
        const auto& a = m.nu1.atoms;
        SVec u(a.mark_dim()), j(m.dx);
        for (Eigen::Index k = 0; k < a.size(); ++k) {
          u = a.marks.row(k).transpose();
          j.setZero();
          m.f1(t, x, y, u, j);
          drift -= a.weights(k) * j;
        }
      }
      if (m.nu2.kind == LevyMeasure::Kind::discrete && (m.f3 || m.lambda)) {
        const auto& a = m.nu2.atoms;
        SVec u(a.mark_dim()), j(m.dx);
        for (Eigen::Index k = 0; k < a.size(); ++k) {
          u = a.marks.row(k).transpose();
          if (m.f3) {
            j.setZero();
            m.f3(t, x, y, u, j);
            drift -= a.weights(k) * j;
          }
          if (m.lambda) comp_lambda += a.weights(k) * (m.lambda(t, x, u) - 1.0);
        }
      }
    }
    Stage s{drift * dt + s1 * x1.head(m.dy), 0.0};
    if (m.db > 0 && m.sigma0) {
      SMat s0 = SMat::Zero(m.dx, m.db);
      m.sigma0(t, x, y, s0);
      s.dx += s0 * db;
    }
    if (infinite(m)) {
      SVec n = SVec::Zero(m.dx);
      if (m.f3) {
        m.f3(t, x, y, one, n);
        s.dx += x1(m.dy) * n;
      }
      if (m.f1 && drift1 != 0.0) {
        n.setZero();
        m.f1(t, x, y, one, n);
        s.dx += drift1 * dt * n;
      }
    }
    const double c = m.ito_correction ? m.ito_correction(t, x, y) : ito_correction(m, t, Vec(x), Vec(y));
    s.dI = h.dot(x1.head(m.dy)) - (c + 0.5 * h.squaredNorm() + comp_lambda) * dt;
    return s;
  }

  // Runs one particle; throws NumericalError on blow-up.
  void run(const Aux& aux, std::size_t particle, SVec& x_out, double& I_out) const {
    static const Vec one = Vec::Ones(1);
    SVec x = aux.x0;
    double I = 0.0;
    std::size_t next_jump = 0;
    const std::size_t intervals = tab.times.size() - 1;
    for (std::size_t k = 0; k < intervals; ++k) {
      const auto r = static_cast<Eigen::Index>(k);
      const double t0 = tab.times[k], t1 = tab.times[k + 1], dt = t1 - t0;
      const SVec y0 = tab.y_post.row(r).transpose();
      const SVec yp = tab.y_pred.row(r).transpose();
      const SVec db = aux.dB.row(static_cast<Eigen::Index>(tab.base_step[k])).transpose() * tab.base_frac[k];
      const auto x1 = tab.x1.row(r).transpose();
      const Stage a = stage(t0, x, y0, dt, db, x1);
      const SVec xp = x + a.dx;
      const Stage b = stage(t1, xp, yp, dt, db, x1);
      SVec xn = x + 0.5 * (a.dx + b.dx);
      I += 0.5 * (a.dI + b.dI);
      if (tab.area[k].size() > 0) {
        const Column c = bracket_term(m, t0, x, y0, tab.area[k], tab.q);
        xn += c.x;
        I += c.i;
      }
      x = xn;

      SVec y = tab.y_pre.row(r + 1).transpose();
      if (tab.jump_log1[k + 1].size() > 0)
        jump_flow(m, t1, tab.jump_log1[k + 1], tab.jump_area[k + 1], x, y, I, opt.jump_substeps);
      for (const auto& atom : tab.atoms[k + 1]) {
        const double lam = m.lambda ? m.lambda(t1, x, atom.mark) : 1.0;
        if (!(lam > 0.0)) throw NumericalError("lambda <= 0 at an observed atom (particle " + std::to_string(particle) + ")", k + 1);
        I += std::log(lam);
        SVec jx = SVec::Zero(m.dx), jy = SVec::Zero(m.dy);
        if (m.f3) m.f3(t1, x, y, atom.mark, jx);
        m.f2(t1, y, atom.mark, jy);
        x += jx;
        y += jy;
      }
      y = tab.y_post.row(r + 1).transpose();
      while (next_jump < aux.jumps.size() && aux.jumps[next_jump].first == k + 1) {
        const Vec& u = aux.jumps[next_jump].second;
        if (!infinite(m)) {
          SVec j = SVec::Zero(m.dx);
          m.f1(t1, x, y, u, j);
          x += j;
        } else {
          x = marcus_flow(x, u(0), [&](const SVec& z) {
            SVec g = SVec::Zero(m.dx);
            m.f1(t1, z, y, one, g);
            return g;
          }, opt.jump_substeps);
        }
        ++next_jump;
      }
      if (!x.allFinite() || !std::isfinite(I))
        throw NumericalError("particle " + std::to_string(particle) + " blew up", k + 1);
      if (I > opt.log_weight_abort)
        throw NumericalError("particle " + std::to_string(particle) + " log weight exceeds the abort threshold", k + 1);
    }
    x_out = x;
    I_out = I;
  }
};

std::size_t snap(const std::vector<double>& times, double s) {
  // First node at or after s (node 0 is never a jump node).
  auto it = std::lower_bound(times.begin() + 1, times.end(), s - 1e-12 * times.back());
  return static_cast<std::size_t>(it - times.begin());
}

}  // namespace

ParticleCloud run_particles(const ModelSpec& m, const DriverTable& tab, std::size_t particles,
                            std::uint64_t seed_base, const EngineOptions& opt) {
  require(tab.times.size() >= 2, "driver table is empty");
  require(opt.jump_substeps >= 1, "jump_substeps must be >= 1");
  const double dt_aux = tab.aux_dt;

  Engine eng{m, tab, opt};
  if (infinite(m) && m.nu1.kind == LevyMeasure::Kind::stable)
    eng.drift1 = -m.nu1.stable.first_moment_above(opt.epsilon);

  ParticleCloud cloud;
  cloud.seed_base = seed_base;
  cloud.steps = tab.times.size() - 1;
  cloud.y = tab.y_post.row(tab.y_post.rows() - 1).transpose();

  if (opt.mode == AuxMode::monte_carlo) {
    require(particles >= 1, "particles must be >= 1");
    cloud.x.resize(static_cast<Eigen::Index>(particles), m.dx);
    cloud.log_weight.resize(static_cast<Eigen::Index>(particles));
    // Auxiliary noise covers the full aux grid, so draws do not depend on t.
    const std::size_t total_steps = tab.aux_steps;
    NoiseOptions nopt{opt.epsilon, opt.band_anchor};
    parallel_for(particles, opt.threads, [&](std::size_t i) {
      const std::uint64_t seed = seed_base + i;
      Aux aux;
      const NoiseBundle nb = make_auxiliary_noise(m, seed, dt_aux * static_cast<double>(total_steps), total_steps, nopt);
      aux.dB = nb.dB;
      aux.x0 = draw_initial(m, seed, stream::kInitial);
      for (const auto& j : nb.signal_jumps) {
        if (j.time > tab.horizon) continue;
        aux.jumps.emplace_back(snap(tab.times, j.time), j.mark);
      }
      std::stable_sort(aux.jumps.begin(), aux.jumps.end(),
                       [](const auto& a, const auto& b) { return a.first < b.first; });
      SVec x;
      double I = 0.0;
      eng.run(aux, i, x, I);
      cloud.x.row(static_cast<Eigen::Index>(i)) = x.transpose();
      cloud.log_weight(static_cast<Eigen::Index>(i)) = I;
    });
    return cloud;
  }

  // Enumeration of the Bernoulli-discretized auxiliary noise on the aux
  // steps inside [0, t].
  const std::size_t n_aux = tab.base_times.size() - 1;
  require(std::abs(tab.base_times.back() - tab.horizon) <= 1e-12 * tab.horizon,
          "enumeration needs the evaluation time on the aux grid");
  require(m.init.x_cov.cwiseAbs().maxCoeff() == 0.0, "enumeration needs a deterministic X_0");
  require(m.nu1.kind != LevyMeasure::Kind::stable, "enumeration needs a discrete signal measure");
  const bool jumps = m.has_signal_jumps();
  const Eigen::Index atoms = jumps ? m.nu1.atoms.size() : 0;
  const std::size_t signs = std::size_t{1} << m.db;
  const std::size_t radix = signs * static_cast<std::size_t>(1 + atoms);
  std::size_t outcomes = 1;
  for (std::size_t k = 0; k < n_aux; ++k) {
    require(outcomes <= opt.max_outcomes / radix, "too many outcomes to enumerate");
    outcomes *= radix;
  }
  std::vector<double> p_jump(static_cast<std::size_t>(1 + atoms), 0.0);
  p_jump[0] = 1.0 - (jumps ? m.nu1.atoms.total() * dt_aux : 0.0);
  require(p_jump[0] >= 0.0, "aux step too coarse: jump probability exceeds 1");
  for (Eigen::Index a = 0; a < atoms; ++a) p_jump[static_cast<std::size_t>(a + 1)] = m.nu1.atoms.weights(a) * dt_aux;
  const double sq = std::sqrt(dt_aux);
  // Node index of the end of each aux step.
  std::vector<std::size_t> step_end(n_aux);
  for (std::size_t k = 0; k < n_aux; ++k) step_end[k] = snap(tab.times, tab.base_times[k + 1]);

  cloud.x.resize(static_cast<Eigen::Index>(outcomes), m.dx);
  cloud.log_weight.resize(static_cast<Eigen::Index>(outcomes));
  cloud.probability.resize(static_cast<Eigen::Index>(outcomes));
  parallel_for(outcomes, opt.threads, [&](std::size_t o) {
    Aux aux;
    aux.x0 = m.init.x_mean;
    aux.dB.resize(static_cast<Eigen::Index>(n_aux), m.db);
    double prob = 1.0;
    std::size_t code = o;
    for (std::size_t k = 0; k < n_aux; ++k) {
      const std::size_t digit = code % radix;
      code /= radix;
      const std::size_t sign_bits = digit % signs, jump = digit / signs;
      for (Eigen::Index j = 0; j < m.db; ++j)
        aux.dB(static_cast<Eigen::Index>(k), j) = ((sign_bits >> j) & 1u) ? -sq : sq;
      prob *= p_jump[jump] / static_cast<double>(signs);
      if (jump > 0) aux.jumps.emplace_back(step_end[k], m.nu1.atoms.marks.row(static_cast<Eigen::Index>(jump - 1)).transpose());
    }
    SVec x;
    double I = 0.0;
    eng.run(aux, o, x, I);
    cloud.x.row(static_cast<Eigen::Index>(o)) = x.transpose();
    cloud.log_weight(static_cast<Eigen::Index>(o)) = I;
    cloud.probability(static_cast<Eigen::Index>(o)) = prob;
  });
  return cloud;
}

}  // namespace rf
