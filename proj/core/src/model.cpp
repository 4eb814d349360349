#include "roughfilter/model.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "roughfilter/errors.hpp"
#include "roughfilter/rng.hpp"

namespace rf {

std::string to_string(Regime r) {
  switch (r) {
    case Regime::scalar: return "scalar";
    case Regime::finite_jumps: return "finite_jumps";
    case Regime::infinite_jumps: return "infinite_jumps";
  }
  return "unknown";
}

double StableLevy::mass_between(double lo, double hi) const {
  const double sides = symmetric ? 2.0 : 1.0;
  return sides * scale / index * (std::pow(lo, -index) - std::pow(hi, -index));
}

double StableLevy::mass_above(double eps) const { return mass_between(eps, 1.0); }

double StableLevy::first_moment_above(double eps) const {
  if (symmetric) return 0.0;
  if (index == 1.0) return -scale * std::log(eps);
  return scale / (1.0 - index) * (1.0 - std::pow(eps, 1.0 - index));
}

double StableLevy::p_moment(double p) const {
  if (p <= index) return std::numeric_limits<double>::infinity();
  const double sides = symmetric ? 2.0 : 1.0;
  return sides * scale / (p - index);
}

LevyMeasure LevyMeasure::discrete(Mat marks, Vec weights) {
  require(marks.rows() == weights.size() && weights.size() > 0,
          "discrete measure needs one weight per atom");
  for (Eigen::Index k = 0; k < weights.size(); ++k)
    require(std::isfinite(weights(k)) && weights(k) > 0.0, "atom weights must be positive");
  LevyMeasure m;
  m.kind = Kind::discrete;
  m.atoms = {std::move(marks), std::move(weights)};
  return m;
}

LevyMeasure LevyMeasure::stable_like(StableLevy s) {
  require(s.index > 0.0 && s.index < 2.0, "stable index must lie in (0, 2)");
  require(s.scale > 0.0, "stable scale must be positive");
  LevyMeasure m;
  m.kind = Kind::stable;
  m.stable = s;
  return m;
}

Eigen::Index LevyMeasure::mark_dim() const {
  switch (kind) {
    case Kind::discrete: return atoms.mark_dim();
    case Kind::stable: return 1;
    case Kind::none: return 0;
  }
  return 0;
}

Vec ModelSpec::eval_b1(double t, const Vec& x, const Vec& y) const {
  Vec out = Vec::Zero(dx);
  if (b1) b1(t, x, y, out);
  return out;
}

Vec ModelSpec::eval_b2(double t, const Vec& x, const Vec& y) const {
  Vec out = Vec::Zero(dy);
  if (b2) b2(t, x, y, out);
  return out;
}

Mat ModelSpec::eval_sigma0(double t, const Vec& x, const Vec& y) const {
  Mat out = Mat::Zero(dx, db);
  if (sigma0) sigma0(t, x, y, out);
  return out;
}

Mat ModelSpec::eval_sigma1(double t, const Vec& x, const Vec& y) const {
  Mat out = Mat::Zero(dx, dy);
  if (sigma1) sigma1(t, x, y, out);
  return out;
}

Mat ModelSpec::eval_sigma2(double t, const Vec& y) const {
  Mat out = Mat::Zero(dy, dy);
  if (sigma2) sigma2(t, y, out);
  return out;
}

Vec ModelSpec::eval_f1(double t, const Vec& x, const Vec& y, const Vec& u) const {
  Vec out = Vec::Zero(dx);
  if (f1) f1(t, x, y, u, out);
  return out;
}

Vec ModelSpec::eval_f2(double t, const Vec& y, const Vec& u) const {
  Vec out = Vec::Zero(dy);
  if (f2) f2(t, y, u, out);
  return out;
}

Vec ModelSpec::eval_f3(double t, const Vec& x, const Vec& y, const Vec& u) const {
  Vec out = Vec::Zero(dx);
  if (f3) f3(t, x, y, u, out);
  return out;
}

double ModelSpec::eval_lambda(double t, const Vec& x, const Vec& u) const {
  return lambda ? lambda(t, x, u) : 1.0;
}

void h_function_into(const ModelSpec& m, double t, CRef x, CRef y, VRef out) {
  SVec rhs = SVec::Zero(m.dy);
  if (m.b2) m.b2(t, x, y, rhs);
  if (m.lambda && m.f2 && m.nu2.kind == LevyMeasure::Kind::discrete) {
    const auto& a = m.nu2.atoms;
    SVec jump(m.dy);
    SVec u(a.mark_dim());
    for (Eigen::Index k = 0; k < a.size(); ++k) {
      u = a.marks.row(k).transpose();
      jump.setZero();
      m.f2(t, y, u, jump);
      rhs += a.weights(k) * (1.0 - m.lambda(t, x, u)) * jump;
    }
  }
  SMat s2 = SMat::Zero(m.dy, m.dy);
  m.sigma2(t, y, s2);
  if (m.dy == 1) {
    if (s2(0, 0) == 0.0) throw ValidationError("sigma2 is singular");
    out(0) = rhs(0) / s2(0, 0);
    return;
  }
  Eigen::FullPivLU<SMat> lu(s2);
  if (!lu.isInvertible()) throw ValidationError("sigma2 is singular");
  out = lu.solve(rhs);
}

Vec h_function(const ModelSpec& m, double t, const Vec& x, const Vec& y) {
  require(static_cast<bool>(m.sigma2), "model has no sigma2");
  Vec out(m.dy);
  h_function_into(m, t, x, y, out);
  return out;
}

double ito_correction(const ModelSpec& m, double t, const Vec& x, const Vec& y) {
  if (m.ito_correction) return m.ito_correction(t, x, y);
  const Mat s1 = m.eval_sigma1(t, x, y);
  const Mat s2 = m.eval_sigma2(t, y);
  // Directional derivatives of h along the columns of s1 (in x) and s2 (in y).
  double c = 0.0;
  for (Eigen::Index j = 0; j < m.dy; ++j) {
    const double hx = 1e-6 * std::max(1.0, x.norm());
    const double hy = 1e-6 * std::max(1.0, y.norm());
    const Vec dx = (h_function(m, t, x + hx * s1.col(j), y) - h_function(m, t, x - hx * s1.col(j), y)) / (2 * hx);
    const Vec dy = (h_function(m, t, x, y + hy * s2.col(j)) - h_function(m, t, x, y - hy * s2.col(j))) / (2 * hy);
    c += dx(j) + dy(j);
  }
  return 0.5 * c;
}

Vec compensator_f1(const ModelSpec& m, double t, const Vec& x, const Vec& y) {
  Vec out = Vec::Zero(m.dx);
  if (!m.f1 || m.nu1.kind != LevyMeasure::Kind::discrete) return out;
  const auto& a = m.nu1.atoms;
  for (Eigen::Index k = 0; k < a.size(); ++k)
    out += a.weights(k) * m.eval_f1(t, x, y, a.marks.row(k).transpose());
  return out;
}

Vec compensator_f2(const ModelSpec& m, double t, const Vec& x, const Vec& y, bool with_lambda) {
  Vec out = Vec::Zero(m.dy);
  if (!m.f2 || m.nu2.kind != LevyMeasure::Kind::discrete) return out;
  const auto& a = m.nu2.atoms;
  for (Eigen::Index k = 0; k < a.size(); ++k) {
    const Vec u = a.marks.row(k).transpose();
    const double w = a.weights(k) * (with_lambda ? m.eval_lambda(t, x, u) : 1.0);
    out += w * m.eval_f2(t, y, u);
  }
  return out;
}

Vec compensator_f3(const ModelSpec& m, double t, const Vec& x, const Vec& y, bool with_lambda) {
  Vec out = Vec::Zero(m.dx);
  if (!m.f3 || m.nu2.kind != LevyMeasure::Kind::discrete) return out;
  const auto& a = m.nu2.atoms;
  for (Eigen::Index k = 0; k < a.size(); ++k) {
    const Vec u = a.marks.row(k).transpose();
    const double w = a.weights(k) * (with_lambda ? m.eval_lambda(t, x, u) : 1.0);
    out += w * m.eval_f3(t, x, y, u);
  }
  return out;
}

double compensator_lambda(const ModelSpec& m, double t, const Vec& x) {
  if (!m.lambda || m.nu2.kind != LevyMeasure::Kind::discrete) return 0.0;
  const auto& a = m.nu2.atoms;
  double s = 0.0;
  for (Eigen::Index k = 0; k < a.size(); ++k)
    s += a.weights(k) * (m.eval_lambda(t, x, a.marks.row(k).transpose()) - 1.0);
  return s;
}

AssumptionReport validate_model(const ModelSpec& m, int probes, double radius, std::uint64_t seed,
                                double p) {
  require(m.dx >= 1 && m.dy >= 1 && m.db >= 0, "model dimensions must be positive");
  require(m.dx <= kMaxSmallDim && m.dy <= kMaxSmallDim && m.db <= kMaxSmallDim,
          "model dimensions exceed the supported maximum");
  require(static_cast<bool>(m.sigma2), "model needs sigma2");
  require(m.init.x_mean.size() == m.dx && m.init.x_cov.rows() == m.dx && m.init.x_cov.cols() == m.dx,
          "initial law has the wrong dimension");
  require(m.init.y0.size() == m.dy, "y0 has the wrong dimension");
  require(probes >= 1, "need at least one probe");
  if (m.nu1.kind == LevyMeasure::Kind::discrete)
    require(m.nu1.atoms.mark_dim() >= 1, "nu1 atoms need marks");
  if (m.nu2.kind == LevyMeasure::Kind::discrete)
    require(m.nu2.atoms.mark_dim() >= 1, "nu2 atoms need marks");

  const bool infinite = m.regime == Regime::infinite_jumps;
  if (infinite) {
    require(m.nu1.kind != LevyMeasure::Kind::discrete && m.nu2.kind != LevyMeasure::Kind::discrete,
            "infinite-activity models take stable-like measures");
    require(!m.lambda, "infinite-activity models need lambda == 1");
  } else {
    require(m.nu1.kind != LevyMeasure::Kind::stable && m.nu2.kind != LevyMeasure::Kind::stable,
            "stable-like measures need the infinite_jumps regime");
  }

  AssumptionReport rep;
  rep.probes = probes;
  rep.probe_radius = radius;
  rep.lambda_min = std::numeric_limits<double>::infinity();
  rep.lambda_max = 0.0;
  CounterRng rng(seed, 0xA55);
  auto draw = [&](Eigen::Index n) {
    Vec v(n);
    for (Eigen::Index i = 0; i < n; ++i) v(i) = radius * (2.0 * rng.uniform() - 1.0);
    return v;
  };
  auto l2 = [](const DiscreteMeasure& a, auto&& f) {
    double s = 0.0;
    for (Eigen::Index k = 0; k < a.size(); ++k) s += a.weights(k) * f(Vec(a.marks.row(k).transpose())).squaredNorm();
    return std::sqrt(s);
  };

  for (int i = 0; i < probes; ++i) {
    const double t = rng.uniform();
    const Vec x = i == 0 ? Vec::Zero(m.dx) : draw(m.dx);
    const Vec y = i == 0 ? Vec::Zero(m.dy) : draw(m.dy);
    double size = m.eval_b1(t, x, y).norm() + m.eval_b2(t, x, y).norm() +
                  m.eval_sigma0(t, x, y).norm() + m.eval_sigma1(t, x, y).norm() +
                  m.eval_sigma2(t, y).norm();
    if (m.nu1.kind == LevyMeasure::Kind::discrete && m.f1)
      size += l2(m.nu1.atoms, [&](const Vec& u) { return m.eval_f1(t, x, y, u); });
    if (m.nu2.kind == LevyMeasure::Kind::discrete) {
      if (m.f2) size += l2(m.nu2.atoms, [&](const Vec& u) { return m.eval_f2(t, y, u); });
      if (m.f3) size += l2(m.nu2.atoms, [&](const Vec& u) { return m.eval_f3(t, x, y, u); });
    }
    if (!std::isfinite(size)) throw ValidationError("model coefficients are not finite at a probe point");
    rep.growth_ratio = std::max(rep.growth_ratio, size / (1.0 + x.norm() + y.norm()));

    const Mat s2 = m.eval_sigma2(t, y);
    Eigen::FullPivLU<Mat> lu(s2);
    if (!lu.isInvertible()) throw ValidationError("sigma2 is not invertible at a probe point");
    const Mat inv = lu.inverse();
    const double cond = inv.norm() * s2.norm();
    if (!std::isfinite(cond) || cond > 1e12) throw ValidationError("sigma2 is numerically singular at a probe point");
    rep.sigma2_inv_bound = std::max(rep.sigma2_inv_bound, inv.norm());

    if (m.nu2.kind == LevyMeasure::Kind::discrete) {
      const auto& a = m.nu2.atoms;
      double integral = 0.0;
      for (Eigen::Index k = 0; k < a.size(); ++k) {
        const double lam = m.eval_lambda(t, x, a.marks.row(k).transpose());
        if (!std::isfinite(lam) || lam <= 0.0) throw ValidationError("lambda must be positive and finite");
        rep.lambda_min = std::min(rep.lambda_min, lam);
        rep.lambda_max = std::max(rep.lambda_max, lam);
        integral += a.weights(k) * (1.0 - lam) * (1.0 - lam) / lam;
      }
      rep.lambda_integrability = std::max(rep.lambda_integrability, integral);
    }

    if (infinite) {
      const Vec one = Vec::Ones(1), two = Vec::Constant(1, 2.0);
      double defect = 0.0;
      if (m.f1) defect = std::max(defect, (m.eval_f1(t, x, y, two) - 2.0 * m.eval_f1(t, x, y, one)).norm());
      if (m.f2) defect = std::max(defect, (m.eval_f2(t, y, two) - 2.0 * m.eval_f2(t, y, one)).norm());
      if (m.f3) defect = std::max(defect, (m.eval_f3(t, x, y, two) - 2.0 * m.eval_f3(t, x, y, one)).norm());
      rep.product_form_defect = std::max(rep.product_form_defect, defect);
    }
  }
  if (rep.lambda_max == 0.0) rep.lambda_min = rep.lambda_max = 1.0;
  if (rep.lambda_max > m.lambda_sup * (1.0 + 1e-12))
    throw ValidationError("lambda exceeds the declared lambda_sup at a probe point");
  if (rep.growth_ratio > m.growth_bound * (1.0 + 1e-9))
    throw ValidationError("linear growth bound violated at a probe point");
  if (infinite) {
    if (rep.product_form_defect > 1e-9)
      throw ValidationError("infinite-activity jump coefficients must be linear in the mark");
    for (const auto* nu : {&m.nu1, &m.nu2})
      if (nu->kind == LevyMeasure::Kind::stable)
        rep.p_moment = std::max(rep.p_moment, nu->stable.p_moment(p));
    if (!std::isfinite(rep.p_moment))
      throw ValidationError("Levy measure has no finite p-th moment for the requested p");
  }
  return rep;
}

namespace {

using Params = std::map<std::string, double>;

Params merged(const std::string& id, Params defaults, const Params& given) {
  for (const auto& [k, v] : given) {
    if (!defaults.count(k)) throw ValidationError("model '" + id + "' has no parameter '" + k + "'");
    if (!std::isfinite(v)) throw ValidationError("parameter '" + k + "' is not finite");
    defaults[k] = v;
  }
  return defaults;
}

InitialLaw scalar_init(double mean, double var) {
  require(var >= 0.0, "initial variance must be non-negative");
  return {Vec::Constant(1, mean), Mat::Constant(1, 1, var), Vec::Zero(1)};
}

ModelSpec linear_gaussian(const Params& given) {
  const Params p = merged("linear_gaussian",
                          {{"a", -0.5}, {"c", 1.0}, {"s0", 1.0}, {"s1", 0.5}, {"s2", 1.0},
                           {"m0", 0.0}, {"p0", 1.0}},
                          given);
  const double a = p.at("a"), c = p.at("c"), s0 = p.at("s0"), s1 = p.at("s1"), s2 = p.at("s2");
  require(s2 != 0.0, "s2 must be non-zero");
  ModelSpec m;
  m.id = "linear_gaussian";
  m.regime = Regime::scalar;
  m.params = p;
  m.init = scalar_init(p.at("m0"), p.at("p0"));
  m.b1 = [a](double, CRef x, CRef, VRef out) { out(0) = a * x(0); };
  m.b2 = [c](double, CRef x, CRef, VRef out) { out(0) = c * x(0); };
  m.sigma0 = [s0](double, CRef, CRef, MRef out) { out(0, 0) = s0; };
  m.sigma1 = [s1](double, CRef, CRef, MRef out) { out(0, 0) = s1; };
  m.sigma2 = [s2](double, CRef, MRef out) { out(0, 0) = s2; };
  m.ito_correction = [k = 0.5 * c * s1 / s2](double, CRef, CRef) { return k; };
  m.growth_bound = std::abs(a) + std::abs(c) + std::abs(s0) + std::abs(s1) + std::abs(s2);
  return m;
}

ModelSpec scalar_jump_diffusion(const Params& given) {
  const Params p = merged("scalar_jump_diffusion",
                          {{"a", 1.0}, {"s0", 0.5}, {"s", 0.3}, {"c", 1.0}, {"s2", 1.0},
                           {"rate1", 1.0}, {"jump1", 0.5}, {"rate2", 2.0}, {"jump2", 0.5},
                           {"kappa", 0.5}, {"m0", 1.0}, {"p0", 0.25}},
                          given);
  const double a = p.at("a"), s0 = p.at("s0"), s = p.at("s"), c = p.at("c"), s2 = p.at("s2");
  const double kappa = p.at("kappa");
  require(s2 != 0.0, "s2 must be non-zero");
  require(kappa >= 0.0 && kappa < 1.0, "kappa must lie in [0, 1)");
  ModelSpec m;
  m.id = "scalar_jump_diffusion";
  m.regime = Regime::scalar;
  m.params = p;
  m.init = scalar_init(p.at("m0"), p.at("p0"));
  m.b1 = [a](double, CRef x, CRef, VRef out) { out(0) = -a * x(0); };
  m.b2 = [c](double, CRef x, CRef, VRef out) { out(0) = c * x(0); };
  m.sigma0 = [s0](double, CRef, CRef, MRef out) { out(0, 0) = s0; };
  m.sigma1 = [s](double, CRef x, CRef, MRef out) { out(0, 0) = s * x(0); };
  m.sigma2 = [s2](double, CRef, MRef out) { out(0, 0) = s2; };
  const double j1 = p.at("jump1"), j2 = p.at("jump2");
  m.nu1 = LevyMeasure::discrete((Mat(2, 1) << -j1, j1).finished(),
                                Vec::Constant(2, 0.5 * p.at("rate1")));
  m.nu2 = LevyMeasure::discrete((Mat(2, 1) << j2, 2.0 * j2).finished(),
                                Vec::Constant(2, 0.5 * p.at("rate2")));
  m.f1 = [](double, CRef, CRef, CRef u, VRef out) { out(0) = u(0); };
  m.f2 = [](double, CRef, CRef u, VRef out) { out(0) = u(0); };
  m.lambda = [kappa](double, CRef x, CRef) { return 1.0 + kappa * std::tanh(x(0)); };
  m.lambda_sup = 1.0 + kappa;
  // h = (c x - kappa tanh(x) M) / s2 with M = int u nu2(du).
  const double mass = 0.5 * p.at("rate2") * 3.0 * j2;
  m.ito_correction = [=](double, CRef x, CRef) {
    const double sech = 1.0 / std::cosh(x(0));
    return 0.5 * (c - kappa * mass * sech * sech) / s2 * s * x(0);
  };
  m.growth_bound = a + std::abs(c) + std::abs(s0) + std::abs(s) + std::abs(s2) +
                   std::sqrt(p.at("rate1")) * j1 + std::sqrt(p.at("rate2") * 2.5) * j2;
  return m;
}

ModelSpec correlated_jump_multidim(const Params& given) {
  const Params p = merged("correlated_jump_multidim",
                          {{"a", 1.0}, {"w", 0.3}, {"s0", 0.5}, {"s1", 0.4}, {"c", 1.0},
                           {"s2", 1.0}, {"rate1", 1.0}, {"jump1", 0.4}, {"rate2", 1.5},
                           {"jump2", 0.5}, {"g3", 0.2}, {"kappa", 0.5}},
                          given);
  const double a = p.at("a"), w = p.at("w"), s0 = p.at("s0"), s1 = p.at("s1"), c = p.at("c");
  const double s2 = p.at("s2"), g3 = p.at("g3"), kappa = p.at("kappa");
  require(s2 != 0.0, "s2 must be non-zero");
  require(kappa >= 0.0 && kappa < 1.0, "kappa must lie in [0, 1)");
  ModelSpec m;
  m.id = "correlated_jump_multidim";
  m.regime = Regime::finite_jumps;
  m.dx = m.dy = m.db = 2;
  m.params = p;
  m.init = {Vec::Zero(2), Mat::Identity(2, 2) * 0.5, Vec::Zero(2)};
  m.b1 = [a, w](double, CRef x, CRef, VRef out) {
    out(0) = -a * x(0) + w * x(1);
    out(1) = -w * x(0) - a * x(1);
  };
  m.b2 = [c](double, CRef x, CRef, VRef out) { out = c * x; };
  m.sigma0 = [s0](double, CRef, CRef, MRef out) { out.setIdentity(); out *= s0; };
  // Non-commuting common-noise fields: column 0 depends on x_2.
  m.sigma1 = [s1](double, CRef x, CRef, MRef out) {
    out(0, 0) = s1;
    out(1, 0) = 0.5 * s1 * std::tanh(x(0));
    out(0, 1) = 0.5 * s1 * std::sin(x(1));
    out(1, 1) = s1;
  };
  m.sigma2 = [s2](double, CRef, MRef out) { out.setIdentity(); out *= s2; };
  const double j1 = p.at("jump1"), j2 = p.at("jump2");
  m.nu1 = LevyMeasure::discrete((Mat(2, 2) << j1, 0.0, 0.0, -j1).finished(),
                                Vec::Constant(2, 0.5 * p.at("rate1")));
  m.nu2 = LevyMeasure::discrete((Mat(2, 2) << j2, 0.0, 0.0, j2).finished(),
                                Vec::Constant(2, 0.5 * p.at("rate2")));
  m.f1 = [](double, CRef, CRef, CRef u, VRef out) { out = u; };
  m.f2 = [](double, CRef, CRef u, VRef out) { out = u; };
  m.f3 = [g3](double, CRef, CRef, CRef u, VRef out) { out = g3 * u; };
  m.lambda = [kappa](double, CRef x, CRef u) { return 1.0 + kappa * std::tanh(x.dot(u)); };
  m.lambda_sup = 1.0 + kappa;
  m.growth_bound = 2.0 * (a + w + std::abs(c)) + 2.0 * (std::abs(s0) + 2.0 * std::abs(s1) + std::abs(s2)) +
                   (std::sqrt(p.at("rate1")) * j1 + std::sqrt(p.at("rate2")) * j2 * (1.0 + g3));
  return m;
}

ModelSpec stable_shot_noise(const Params& given) {
  const Params p = merged("stable_shot_noise",
                          {{"a", 1.0}, {"s0", 0.5}, {"s1", 0.3}, {"c", 1.0}, {"s2", 1.0},
                           {"index", 1.2}, {"scale", 0.05}, {"g1", 1.0}, {"g2", 0.2},
                           {"g3", 0.5}, {"m0", 0.0}, {"p0", 0.5}},
                          given);
  const double a = p.at("a"), s0 = p.at("s0"), s1 = p.at("s1"), c = p.at("c"), s2 = p.at("s2");
  const double g1 = p.at("g1"), g2 = p.at("g2"), g3 = p.at("g3");
  require(s2 != 0.0, "s2 must be non-zero");
  ModelSpec m;
  m.id = "stable_shot_noise";
  m.regime = Regime::infinite_jumps;
  m.params = p;
  m.init = scalar_init(p.at("m0"), p.at("p0"));
  m.b1 = [a](double, CRef x, CRef, VRef out) { out(0) = -a * x(0); };
  m.b2 = [c](double, CRef x, CRef, VRef out) { out(0) = c * x(0); };
  m.sigma0 = [s0](double, CRef, CRef, MRef out) { out(0, 0) = s0; };
  m.sigma1 = [s1](double, CRef, CRef, MRef out) { out(0, 0) = s1; };
  m.sigma2 = [s2](double, CRef, MRef out) { out(0, 0) = s2; };
  const StableLevy law{p.at("index"), p.at("scale"), true};
  m.nu1 = LevyMeasure::stable_like(law);
  m.nu2 = LevyMeasure::stable_like(law);
  m.f1 = [g1](double, CRef, CRef, CRef u, VRef out) { out(0) = g1 * u(0); };
  m.f2 = [g2](double, CRef y, CRef u, VRef out) { out(0) = u(0) * (1.0 + g2 * std::tanh(y(0))); };
  m.f3 = [g3](double, CRef, CRef, CRef u, VRef out) { out(0) = g3 * u(0); };
  m.ito_correction = [k = 0.5 * c * s1 / s2](double, CRef, CRef) { return k; };
  m.growth_bound = a + std::abs(c) + std::abs(s0) + std::abs(s1) + std::abs(s2);
  return m;
}

}  // namespace

std::vector<std::string> model_catalog() {
  return {"linear_gaussian", "scalar_jump_diffusion", "correlated_jump_multidim", "stable_shot_noise"};
}

ModelSpec make_model(const std::string& id, const std::map<std::string, double>& params) {
  if (id == "linear_gaussian") return linear_gaussian(params);
  if (id == "scalar_jump_diffusion") return scalar_jump_diffusion(params);
  if (id == "correlated_jump_multidim") return correlated_jump_multidim(params);
  if (id == "stable_shot_noise") return stable_shot_noise(params);
  throw ValidationError("unknown model id '" + id + "'");
}

TestFunction make_test_function(const std::string& name) {
  if (name == "one") return {name, [](CRef, CRef) { return 1.0; }, 1.0, 0.0};
  if (name == "identity")
    return {name, [](CRef x, CRef) { return x(0); }, std::numeric_limits<double>::infinity(), 1.0};
  if (name == "tanh") return {name, [](CRef x, CRef) { return std::tanh(x(0)); }, 1.0, 1.0};
  if (name == "cos") return {name, [](CRef x, CRef) { return std::cos(x(0)); }, 1.0, 1.0};
  if (name == "square")
    return {name, [](CRef x, CRef) { return x.squaredNorm(); }, std::numeric_limits<double>::infinity(),
            std::numeric_limits<double>::infinity()};
  throw ValidationError("unknown test function '" + name + "'");
}

TestFunction scaled(const TestFunction& f, double c) {
  return {std::to_string(c) + "*" + f.name, [g = f.eval, c](CRef x, CRef y) { return c * g(x, y); },
          std::abs(c) * f.bound, std::abs(c) * f.lipschitz};
}

}  // namespace rf
