#pragma once

#include <cmath>
#include <functional>
#include <vector>

#include "roughfilter/model.hpp"

namespace toy {

// Scalar finite-activity model small enough to enumerate by hand:
//   dX = (a X + e Y) dt + s0(X) dB + r dW + f1 dN_p~ + f3 dN_lambda~
//   dY = c X dt + dW + f2 dN_lambda~
// nu1 has atoms {0.5, -0.3} (weights 0.4, 0.6), nu2 atoms {1, 2} (weights
// 0.5, 0.25), f1 = u (1 + 0.2 x), f2 = u / 2, f3 = u / 10 and
// lambda = 1 + tanh(x) u / 8.
struct Params {
  double a = -0.4, e = 0.1, r = 0.3, c = 0.8;
  double s0(double x) const { return 0.5 + 0.1 * std::sin(x); }
  double m1[2] = {0.5, -0.3}, w1[2] = {0.4, 0.6};
  double m2[2] = {1.0, 2.0}, w2[2] = {0.5, 0.25};
  double f1(double x, double u) const { return u * (1.0 + 0.2 * x); }
  double f2(double u) const { return 0.5 * u; }
  double f3(double u) const { return 0.1 * u; }
  double lambda(double x, double u) const { return 1.0 + std::tanh(x) * u / 8.0; }
  // h = c x + sum_k w_k f2(u_k) (1 - lambda(x, u_k))
  double h(double x) const {
    double s = c * x;
    for (int k = 0; k < 2; ++k) s += w2[k] * f2(m2[k]) * (1.0 - lambda(x, m2[k]));
    return s;
  }
  double dh(double x) const {
    const double sech2 = 1.0 / (std::cosh(x) * std::cosh(x));
    double s = c;
    for (int k = 0; k < 2; ++k) s -= w2[k] * f2(m2[k]) * m2[k] / 8.0 * sech2;
    return s;
  }
};

inline rf::ModelSpec model(double x0 = 0.2) {
  using namespace rf;
  const Params p;
  ModelSpec m;
  m.id = "toy";
  m.regime = Regime::finite_jumps;
  m.init = {Vec::Constant(1, x0), Mat::Zero(1, 1), Vec::Constant(1, 0.1)};
  m.b1 = [p](double, CRef x, CRef y, VRef out) { out(0) = p.a * x(0) + p.e * y(0); };
  m.b2 = [p](double, CRef x, CRef, VRef out) { out(0) = p.c * x(0); };
  m.sigma0 = [p](double, CRef x, CRef, MRef out) { out(0, 0) = p.s0(x(0)); };
  m.sigma1 = [p](double, CRef, CRef, MRef out) { out(0, 0) = p.r; };
  m.sigma2 = [](double, CRef, MRef out) { out(0, 0) = 1.0; };
  m.nu1 = LevyMeasure::discrete((Mat(2, 1) << p.m1[0], p.m1[1]).finished(),
                                (Vec(2) << p.w1[0], p.w1[1]).finished());
  m.nu2 = LevyMeasure::discrete((Mat(2, 1) << p.m2[0], p.m2[1]).finished(),
                                (Vec(2) << p.w2[0], p.w2[1]).finished());
  m.f1 = [p](double, CRef x, CRef, CRef u, VRef out) { out(0) = p.f1(x(0), u(0)); };
  m.f2 = [p](double, CRef, CRef u, VRef out) { out(0) = p.f2(u(0)); };
  m.f3 = [p](double, CRef, CRef, CRef u, VRef out) { out(0) = p.f3(u(0)); };
  m.lambda = [p](double, CRef x, CRef u) { return p.lambda(x(0), u(0)); };
  m.lambda_sup = 1.25;
  m.ito_correction = [p](double, CRef x, CRef) { return 0.5 * p.dh(x(0)) * p.r; };
  return m;
}

// Exhaustive expectation of f(X_T) exp(I_T) over the Bernoulli outcome tree:
// per step dB = +-sqrt(dt) and no signal jump or one of the two atoms, with
// probabilities 1/2 * (1 - |nu1| dt, w_1 dt, w_2 dt). `w` holds W~ at the
// grid nodes k dt; `atom_node` / `atom_mark` place one observed atom.
// The step rule is the joint Heun scheme on (X, I) against the shared Y.
inline double tree_expectation(const std::function<double(double)>& f, double x0, double y0,
                               const std::vector<double>& w, double dt, int atom_node,
                               double atom_mark) {
  const Params p;
  const int steps = static_cast<int>(w.size()) - 1;
  const double comp_y = p.w2[0] * p.f2(p.m2[0]) + p.w2[1] * p.f2(p.m2[1]);
  // Y is the same on every branch.
  std::vector<double> y_post(static_cast<std::size_t>(steps) + 1), y_pred(static_cast<std::size_t>(steps));
  y_post[0] = y0;
  for (int k = 0; k < steps; ++k) {
    const double dw = w[static_cast<std::size_t>(k) + 1] - w[static_cast<std::size_t>(k)];
    const double inc = dw - comp_y * dt;  // constant sigma2 and f2: Heun is exact
    y_pred[static_cast<std::size_t>(k)] = y_post[static_cast<std::size_t>(k)] + inc;
    double y = y_post[static_cast<std::size_t>(k)] + inc;
    if (k + 1 == atom_node) y += p.f2(atom_mark);
    y_post[static_cast<std::size_t>(k) + 1] = y;
  }
  auto stage = [&](double x, double y, double dw, double db, double& dx, double& dI) {
    const double h = p.h(x);
    double drift = p.a * x + p.e * y - p.r * h;
    double comp_lambda = 0.0;
    for (int k = 0; k < 2; ++k) {
      drift -= p.w1[k] * p.f1(x, p.m1[k]);
      drift -= p.w2[k] * p.f3(p.m2[k]);
      comp_lambda += p.w2[k] * (p.lambda(x, p.m2[k]) - 1.0);
    }
    dx = drift * dt + p.r * dw + p.s0(x) * db;
    const double ito = 0.5 * p.dh(x) * p.r;
    dI = h * dw - (ito + 0.5 * h * h + comp_lambda) * dt;
  };
  const double total1 = p.w1[0] + p.w1[1];
  const double sq = std::sqrt(dt);
  std::function<double(int, double, double, double)> walk = [&](int k, double x, double I, double prob) {
    if (k == steps) return prob * f(x) * std::exp(I);
    const auto kk = static_cast<std::size_t>(k);
    const double dw = w[kk + 1] - w[kk];
    double sum = 0.0;
    for (double db : {sq, -sq}) {
      double ax, aI, bx, bI;
      stage(x, y_post[kk], dw, db, ax, aI);
      stage(x + ax, y_pred[kk], dw, db, bx, bI);
      double xn = x + 0.5 * (ax + bx);
      double In = I + 0.5 * (aI + bI);
      if (k + 1 == atom_node) {
        In += std::log(p.lambda(xn, atom_mark));
        xn += p.f3(atom_mark);
      }
      sum += walk(k + 1, xn, In, prob * 0.5 * (1.0 - total1 * dt));
      for (int j = 0; j < 2; ++j) sum += walk(k + 1, xn + p.f1(xn, p.m1[j]), In, prob * 0.5 * p.w1[j] * dt);
    }
    return sum;
  };
  return walk(0, x0, 0.0, 1.0);
}

}  // namespace toy
