#pragma once

#include <cstdint>
#include <functional>
#include <limits>
#include <map>
#include <string>
#include <vector>

#include "roughfilter/tensor_group.hpp"

namespace rf {

/// Small vectors and matrices with inline storage; the simulation and
/// particle loops use them to avoid heap traffic. Model dimensions are
/// limited to kMaxSmallDim.
inline constexpr int kMaxSmallDim = 8;
using SVec = Eigen::Matrix<double, Eigen::Dynamic, 1, 0, kMaxSmallDim, 1>;
using SMat = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, 0, kMaxSmallDim, kMaxSmallDim>;

using CRef = Eigen::Ref<const Vec>;
using VRef = Eigen::Ref<Vec>;
using MRef = Eigen::Ref<Mat>;

enum class Regime { scalar, finite_jumps, infinite_jumps };
std::string to_string(Regime r);

/// Finite measure given by atoms: marks.row(k) carries mass weights(k).
struct DiscreteMeasure {
  Mat marks;  // atoms x mark_dim
  Vec weights;

  Eigen::Index size() const { return weights.size(); }
  Eigen::Index mark_dim() const { return marks.cols(); }
  double total() const { return weights.sum(); }
};

/// Stable-like Levy measure on (-1, 1): nu(dx) = c |x|^{-1-index} dx, on
/// both half-lines when symmetric, on (0, 1) otherwise. Marks are scalar.
struct StableLevy {
  double index = 1.2;
  double scale = 0.05;
  bool symmetric = true;

  /// int_{eps < |x| < 1} nu(dx)
  double mass_above(double eps) const;
  /// int_{lo <= |x| < hi} nu(dx)
  double mass_between(double lo, double hi) const;
  /// int_{eps < |x| < 1} x nu(dx) (zero when symmetric)
  double first_moment_above(double eps) const;
  /// int_{|x| < 1} |x|^p nu(dx); infinite when p <= index.
  double p_moment(double p) const;
};

struct LevyMeasure {
  enum class Kind { none, discrete, stable };
  Kind kind = Kind::none;
  DiscreteMeasure atoms;
  StableLevy stable;

  static LevyMeasure none() { return {}; }
  static LevyMeasure discrete(Mat marks, Vec weights);
  static LevyMeasure stable_like(StableLevy s);
  Eigen::Index mark_dim() const;
};

/// Gaussian law of X_0; Y_0 is deterministic.
struct InitialLaw {
  Vec x_mean;
  Mat x_cov;
  Vec y0;
};

/// Signal-observation system
///   dX = b1 dt + s0 o dB + s1 o dW + f1 dN_p~ + f3 dN_lambda~
///   dY = b2 dt + s2 o dW + f2 dN_lambda~
/// with Stratonovich diffusion terms. Matrix-valued coefficients are
/// written column-major into the output (s0: d_X x d_B, s1: d_X x d_Y,
/// s2: d_Y x d_Y). In the infinite-activity regime the jump coefficients
/// must be linear in a scalar mark u (f(.., u) = u n(..)), and the jumps
/// act in the Marcus sense.
struct ModelSpec {
  using Drift = std::function<void(double t, CRef x, CRef y, VRef out)>;
  using Diffusion = std::function<void(double t, CRef x, CRef y, MRef out)>;
  using ObsDiffusion = std::function<void(double t, CRef y, MRef out)>;
  using SignalJump = std::function<void(double t, CRef x, CRef y, CRef u, VRef out)>;
  using ObsJump = std::function<void(double t, CRef y, CRef u, VRef out)>;
  using Intensity = std::function<double(double t, CRef x, CRef u)>;
  using Scalar = std::function<double(double t, CRef x, CRef y)>;

  std::string id;
  Regime regime = Regime::finite_jumps;
  Eigen::Index dx = 1, dy = 1, db = 1;
  InitialLaw init;

  Drift b1, b2;
  Diffusion sigma0, sigma1;
  ObsDiffusion sigma2;
  SignalJump f1, f3;
  ObsJump f2;
  Intensity lambda;  // empty means lambda == 1
  /// Upper bound of lambda (dominating rate for thinning).
  double lambda_sup = 1.0;
  LevyMeasure nu1, nu2;

  /// Optional closed form of the Ito-Stratonovich correction
  /// c = 1/2 sum_j (d_x h_j . s1[:, j] + d_y h_j . s2[:, j]); finite
  /// differences are used when absent.
  Scalar ito_correction;
  /// Declared linear-growth constant K (Assumption checks compare to it).
  double growth_bound = std::numeric_limits<double>::infinity();
  /// Parameters the model was built from (echoed into outputs).
  std::map<std::string, double> params;

  // Convenience evaluators returning owned values.
  Vec eval_b1(double t, const Vec& x, const Vec& y) const;
  Vec eval_b2(double t, const Vec& x, const Vec& y) const;
  Mat eval_sigma0(double t, const Vec& x, const Vec& y) const;
  Mat eval_sigma1(double t, const Vec& x, const Vec& y) const;
  Mat eval_sigma2(double t, const Vec& y) const;
  Vec eval_f1(double t, const Vec& x, const Vec& y, const Vec& u) const;
  Vec eval_f2(double t, const Vec& y, const Vec& u) const;
  Vec eval_f3(double t, const Vec& x, const Vec& y, const Vec& u) const;
  double eval_lambda(double t, const Vec& x, const Vec& u) const;

  bool has_signal_jumps() const { return nu1.kind != LevyMeasure::Kind::none && static_cast<bool>(f1); }
  bool has_observation_jumps() const { return nu2.kind != LevyMeasure::Kind::none && static_cast<bool>(f2); }
};

/// sigma2^{-1} (b2 + int f2 (1 - lambda) dnu2), the integral by summing
/// over the atoms of nu2 (zero when lambda == 1 or nu2 is not discrete).
Vec h_function(const ModelSpec& m, double t, const Vec& x, const Vec& y);
/// Same, writing into `out` without heap allocation for small dimensions.
void h_function_into(const ModelSpec& m, double t, CRef x, CRef y, VRef out);

/// Ito-Stratonovich correction c(t, x, y) (see ModelSpec::ito_correction).
double ito_correction(const ModelSpec& m, double t, const Vec& x, const Vec& y);

/// int f dnu over the atoms of a discrete measure (zero vector otherwise).
Vec compensator_f1(const ModelSpec& m, double t, const Vec& x, const Vec& y);
Vec compensator_f2(const ModelSpec& m, double t, const Vec& x, const Vec& y, bool with_lambda);
Vec compensator_f3(const ModelSpec& m, double t, const Vec& x, const Vec& y, bool with_lambda);
/// int (lambda - 1) dnu2.
double compensator_lambda(const ModelSpec& m, double t, const Vec& x);

struct AssumptionReport {
  double growth_ratio = 0.0;       // max |coeffs| / (1 + |x| + |y|) over probes
  double sigma2_inv_bound = 0.0;   // max |sigma2^{-1}| over probes
  double lambda_min = 1.0, lambda_max = 1.0;
  double lambda_integrability = 0.0;  // max_x int (1 - lambda)^2 / lambda dnu2
  double p_moment = 0.0;              // infinite regime: int |x|^p nu(dx)
  double product_form_defect = 0.0;   // infinite regime
  int probes = 0;
  double probe_radius = 0.0;
};

/// Checks the standing assumptions at `probes` random points in a ball of
/// radius `radius`; throws ValidationError on violation.
AssumptionReport validate_model(const ModelSpec& m, int probes = 64, double radius = 5.0,
                                std::uint64_t seed = 17, double p = 2.5);

/// Built-in model families. Unknown parameters are rejected.
ModelSpec make_model(const std::string& id, const std::map<std::string, double>& params = {});
std::vector<std::string> model_catalog();

/// f(x, y) with declared sup norm and Lipschitz constant.
struct TestFunction {
  std::string name;
  std::function<double(CRef x, CRef y)> eval;
  double bound = std::numeric_limits<double>::infinity();
  double lipschitz = std::numeric_limits<double>::infinity();

  double operator()(CRef x, CRef y) const { return eval(x, y); }
};

/// "one", "identity" (x_1), "tanh" (tanh x_1), "cos" (cos x_1), "square".
TestFunction make_test_function(const std::string& name);
TestFunction scaled(const TestFunction& f, double c);

}  // namespace rf
