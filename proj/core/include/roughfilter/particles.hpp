#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <vector>

#include "roughfilter/fillin.hpp"
#include "roughfilter/model.hpp"
#include "roughfilter/sim.hpp"

namespace rf {

/// How the auxiliary noise (X_0, B, N_p) of each particle is produced.
///
/// monte_carlo: particle i draws from seed_base + i through the same
/// streams as make_auxiliary_noise.
/// enumeration: every outcome of a Bernoulli discretization on the base
/// grid (dB = +-sqrt(dt), at most one signal atom per step with probability
/// weight * dt) is visited once and weighted by its probability. X_0 is the
/// initial mean, which must then be deterministic.
enum class AuxMode { monte_carlo, enumeration };

struct EngineOptions {
  /// Steps of the uniform grid carrying B; 0 picks the number of driver
  /// segments (at least 64).
  std::size_t aux_steps = 0;
  AuxMode mode = AuxMode::monte_carlo;
  double epsilon = 0.05;       // signal shot-noise truncation (infinite regime)
  double band_anchor = 0.1;
  int jump_substeps = 64;      // RK4 steps of each Marcus / log-ODE jump flow
  unsigned threads = 0;        // 0: hardware concurrency
  double log_weight_abort = 700.0;
  std::size_t max_outcomes = 1u << 22;
};

/// Everything the particles share: the merged time grid, the driver
/// increments on it, the observed atoms and the observation path Y, which
/// under the reference measure depends on the driver alone.
struct DriverTable {
  Eigen::Index q = 0;              // driver dimension (d_Y, plus one for xi^2)
  std::vector<double> times;       // grid up to the evaluation time
  std::vector<double> base_times;  // aux grid nodes up to the evaluation time
  std::size_t aux_steps = 0;       // aux grid steps over the driver horizon
  double aux_dt = 0.0;
  std::vector<std::size_t> base_step;  // per interval: index of its aux step
  std::vector<double> base_frac;       // per interval: length / aux dt
  Mat x1;                          // per interval level-1 increments (rows)
  std::vector<Mat> area;           // per interval antisymmetric level 2 (empty if zero)
  std::vector<Vec> jump_log1;      // per node: driver jump log (empty if none)
  std::vector<Mat> jump_area;
  std::vector<std::vector<JumpAtom>> atoms;  // per node: observed N_lambda atoms
  Mat y_pre, y_post;               // Y at nodes (rows)
  Mat y_pred;                      // per interval: Heun predictor of Y
  double horizon = 0.0;
};

/// Builds the table for the model on [0, t]; the jump record is the list of
/// observed atoms (finite activity) and must be empty in the infinite regime.
DriverTable make_driver_table(const ModelSpec& m, const AdmissiblePair& driver,
                              const std::vector<JumpAtom>& jump_record, double t,
                              const EngineOptions& opt = {});

/// Terminal states and log weights I_t of a particle cloud.
struct ParticleCloud {
  Mat x;                     // particles x d_X
  Vec y;                     // the shared Y_t
  Vec log_weight;            // I_t per particle
  Vec probability;           // enumeration mode: outcome probabilities; empty otherwise
  std::uint64_t seed_base = 0;
  std::size_t steps = 0;     // grid intervals
};

ParticleCloud run_particles(const ModelSpec& m, const DriverTable& table, std::size_t particles,
                            std::uint64_t seed_base, const EngineOptions& opt = {});

/// Runs body(i) for i in [0, n) on up to `threads` workers. Each index is
/// processed exactly once; callers write results into slot i, so the
/// outcome does not depend on the thread count.
void parallel_for(std::size_t n, unsigned threads, const std::function<void(std::size_t)>& body);

/// Sum in a fixed pairwise order, independent of how values were produced.
double pairwise_sum(const double* v, std::size_t n);

}  // namespace rf
