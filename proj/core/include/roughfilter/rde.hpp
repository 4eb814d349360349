#pragma once

#include <cstddef>
#include <functional>
#include <limits>
#include <string>
#include <vector>

#include "roughfilter/fillin.hpp"

namespace rf {

/// V = (V_1, ..., V_d) on R^e. `eval(t, y)` returns the e x d matrix whose
/// columns are V_i(t, y). `jacobian(t, y)` returns d matrices, the i-th
/// being dV_i/dy (e x e); when absent, central finite differences are used.
struct VectorField {
  using Eval = std::function<Mat(double, const Vec&)>;
  using Jacobian = std::function<std::vector<Mat>(double, const Vec&)>;

  Eigen::Index state_dim = 1;
  Eigen::Index driver_dim = 1;
  Eval eval;
  Jacobian jacobian;
  /// Declared smoothness (V in Lip^gamma). Informational only.
  double lipschitz_gamma = std::numeric_limits<double>::infinity();

  Mat operator()(double t, const Vec& y) const;
  std::vector<Mat> derivative(double t, const Vec& y) const;
  std::vector<Mat> finite_difference(double t, const Vec& y) const;
  void validate() const;
};

/// Largest relative mismatch between `jacobian` and finite differences at
/// the given probe points.
double jacobian_mismatch(const VectorField& v, const std::vector<Vec>& probes, double t = 0.0);

/// Common fields: V(y) = A y per driver direction (V_i(y) = A_i y), and
/// constant fields V_i(y) = c_i.
VectorField linear_field(std::vector<Mat> a);
VectorField constant_field(Mat c);

struct SchemeStats {
  std::size_t steps = 0;       // Davie steps taken
  std::size_t flow_steps = 0;  // RK4 steps spent inside filled jumps
  std::string scheme = "davie-level2";
};

struct RdeSolution {
  std::vector<double> times;
  Mat states;      // one row per time
  Mat pre_states;  // left limits (differ from states only at jumps)
  std::string driver_id;
  SchemeStats stats;

  Vec state(std::size_t i) const { return states.row(static_cast<Eigen::Index>(i)).transpose(); }
  Vec final_state() const { return state(times.size() - 1); }
  CadlagPath as_path() const;
};

/// One level-2 step y + V(y) x1 + sum_ij (DV_j V_i)(y) x2_ij.
Vec davie_step(const VectorField& v, double t, const Vec& y, const Vec& x1, const Mat& x2);

/// Time-1 flow of y' = V(y) a + sum_ij A_ij (DV_j V_i)(y), the log-ODE of
/// the group element exp(a + A), by classical RK4 with `substeps` steps.
Vec log_ode_flow(const VectorField& v, double t, const Vec& y, const GroupElement& g,
                 int substeps);

/// Solves dy = V(y) dX for a continuous rough driver. Each driver segment
/// is split into max(1, ceil(steps * dt / T)) Davie steps along its
/// geodesic. States are reported at the driver's sample times.
RdeSolution solve_continuous_rde(const VectorField& v, const RoughPath& x, const Vec& y0,
                                 std::size_t steps);

struct CanonicalOptions {
  /// RK4 steps spent on each filled jump (spread over its sub-segments).
  int jump_substeps = 64;
};

/// Canonical (Marcus) solution y = ybar o tau_x, where ybar solves the
/// continuous RDE driven by the fill-in representative. Continuous stretches
/// use Davie steps sized on the original clock, filled jumps the log-ODE
/// flow, so the result does not depend on r_seq or delta.
RdeSolution solve_canonical_rde(const VectorField& v, const AdmissiblePair& pair, const Vec& y0,
                                std::size_t steps, const CanonicalOptions& opt = {});

/// |y(steps) - y(2 steps)| at the original sample times (sup norm): an
/// a-posteriori estimate of the solver error.
double canonical_error_estimate(const VectorField& v, const AdmissiblePair& pair, const Vec& y0,
                                std::size_t steps);

/// x with time reversed: the driver of the inverse flow.
RoughPath reverse(const RoughPath& x);

struct FlowCheck {
  std::vector<Vec> phi;       // phi(T, x) per grid point
  std::vector<double> residual;  // |psi(T, phi(T, x)) - x|
  double max_residual = 0.0;
};

FlowCheck flow_and_inverse(const VectorField& v, const RoughPath& x, const std::vector<Vec>& x_grid,
                           std::size_t steps);

struct StabilityProbe {
  double sol_dist = 0.0;     // |y(X) - y(Y)|_{p-var}
  double driver_dist = 0.0;  // beta_p(X, Y)
  double ratio = std::numeric_limits<double>::quiet_NaN();
};

StabilityProbe stability_probe(const VectorField& v, const AdmissiblePair& x,
                               const AdmissiblePair& y, const Vec& y0, std::size_t steps,
                               double p = 2.5);

}  // namespace rf
