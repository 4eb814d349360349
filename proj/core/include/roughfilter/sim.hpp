#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "roughfilter/cadlag_path.hpp"
#include "roughfilter/model.hpp"

namespace rf {

struct JumpAtom {
  double time = 0.0;
  Vec mark;
};

/// Candidate atom of the dominating Poisson measure (rate lambda_sup nu2);
/// kept when uniform < lambda / lambda_sup.
struct CandidateAtom {
  double time = 0.0;
  Vec mark;
  double uniform = 0.0;
};

/// Everything random in one run, drawn from a single seed through
/// independent counter-based streams.
struct NoiseBundle {
  std::uint64_t seed = 0;
  double horizon = 1.0;
  std::size_t steps = 0;  // uniform base grid
  Mat dB;                 // steps x d_B
  Mat dW;                 // steps x d_Y
  std::vector<JumpAtom> signal_jumps;
  std::vector<CandidateAtom> observation_candidates;
  double lambda_sup = 1.0;
  double epsilon = 0.0;  // infinite activity truncation (0 otherwise)
  std::size_t collisions_redrawn = 0;

  double dt() const { return horizon / static_cast<double>(steps); }
};

struct NoiseOptions {
  double epsilon = 0.05;         // infinite activity only
  double band_anchor = 0.1;      // top of the first nested band below 1
};

NoiseBundle make_noise_bundle(const ModelSpec& m, std::uint64_t seed, double horizon,
                              std::size_t steps, const NoiseOptions& opt = {});

/// The signal-only part of a bundle (B and N_p), drawn from the same
/// streams as make_noise_bundle; dW and the observation candidates stay empty.
NoiseBundle make_auxiliary_noise(const ModelSpec& m, std::uint64_t seed, double horizon,
                                 std::size_t steps, const NoiseOptions& opt = {});

/// Jumps of an epsilon-truncated shot noise: sizes with eps < |x| < 1.
/// Sizes are sampled band by band, band k covering
/// [anchor 2^{-k}, anchor 2^{1-k}) (band 0: [anchor, 1)), each band from
/// its own stream, so lowering eps only adds jumps.
struct ShotNoise {
  std::vector<JumpAtom> jumps;  // time order, scalar marks
  double drift = 0.0;           // compensator: -int_{eps<|x|<1} x nu(dx) per unit time
  double epsilon = 0.0;
  CadlagPath path;              // xi^eps sampled at 0, the jump times and T
};

/// Band streams of the observation shot noise start this far above the
/// signal's, so the two never share a stream.
inline constexpr std::uint64_t kObservationBandOffset = 500;

ShotNoise shot_noise(const StableLevy& levy, double epsilon, std::uint64_t seed, double horizon,
                     std::uint64_t stream_base = 0, double band_anchor = 0.1);

enum class Measure { physical, reference };

struct SimulationResult {
  std::vector<double> times;
  CadlagPath x, y;
  CadlagPath w;        // W (physical) or W~ (reference) driving noise, continuous
  CadlagPath w_tilde;  // W~ = W + int h dt
  CadlagPath log_weight;  // I_t
  std::vector<JumpAtom> observed_jumps;  // accepted N_lambda atoms / xi^2 jumps
  std::vector<JumpAtom> signal_jumps;
  Measure measure = Measure::physical;
  std::uint64_t seed = 0;
  Vec x0;
  double horizon = 0.0;
  std::size_t steps = 0;  // base grid of the noise bundle
  double epsilon = 0.0;   // shot-noise truncation (infinite regime)
};

/// Simulates (X, Y) with Heun steps on the base grid merged with every jump
/// time. Jumps of discrete measures act additively, stable-like jumps in
/// the Marcus sense (time-1 flow, RK4 with 64 steps).
SimulationResult simulate_pair(const ModelSpec& m, const NoiseBundle& noise,
                               Measure measure = Measure::physical);
/// Same with a fixed initial state.
SimulationResult simulate_pair(const ModelSpec& m, const NoiseBundle& noise, const Vec& x0,
                               Measure measure = Measure::physical);

/// I_t = int h dW~ - 1/2 int |h|^2 dt + sum log lambda(X_{t-}, u)
///       - int int (lambda - 1) dnu2 dt,
/// with left-point (Ito) sums on the grid of x.
CadlagPath girsanov_exponent(const ModelSpec& m, const CadlagPath& x, const CadlagPath& y,
                             const CadlagPath& w_tilde, const std::vector<JumpAtom>& observed);

/// Time-1 flow of z' = g(z) delta by RK4 with `substeps` steps.
template <class Field>
SVec marcus_flow(const SVec& z0, double delta, Field&& g, int substeps = 64) {
  const double h = delta / substeps;
  SVec z = z0;
  for (int k = 0; k < substeps; ++k) {
    const SVec k1 = g(z);
    const SVec k2 = g(SVec(z + 0.5 * h * k1));
    const SVec k3 = g(SVec(z + 0.5 * h * k2));
    const SVec k4 = g(SVec(z + h * k3));
    z += h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
  }
  return z;
}

/// Draws X_0 from the model's Gaussian initial law.
Vec draw_initial(const ModelSpec& m, std::uint64_t seed, std::uint64_t stream);

}  // namespace rf
