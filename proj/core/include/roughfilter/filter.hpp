#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "roughfilter/fillin.hpp"
#include "roughfilter/model.hpp"
#include "roughfilter/particles.hpp"
#include "roughfilter/sim.hpp"

namespace rf {

struct McEstimate {
  double value = 0.0;
  double se = 0.0;  // zero for exact (enumerated) expectations
  std::size_t n = 0;
};

struct FilterResult {
  McEstimate g_f, g_1;
  double theta = 0.0;
  double theta_se = 0.0;  // delta method on the ratio
  std::size_t particles = 0;
  std::uint64_t seed_base = 0;
  double t = 0.0;
  double max_log_weight = 0.0;
  double ess = 0.0;  // effective sample size of the normalized weights
  std::string model_id, f_name;
  std::map<std::string, double> driver_meta;
};

/// The observation as the filter sees it: W~ and Y on the uniform base grid
/// of the simulation, the accepted observation atoms, and in the infinite
/// regime the truncated shot noise xi^2 driving the observation jumps.
struct ObservationRecord {
  std::string model_id;
  double horizon = 0.0;
  std::size_t steps = 0;
  CadlagPath w_tilde;  // continuous, base grid
  CadlagPath y;        // base grid plus atom times (jumps kept)
  std::vector<JumpAtom> atoms;
  CadlagPath xi2;      // infinite regime only
  double epsilon = 0.0;
};

ObservationRecord observation_record(const ModelSpec& m, const SimulationResult& sim);

/// Rough driver of the filter: the Stratonovich lift of W~ (finite
/// activity) or the Marcus lift of L = (W~, xi^2) (infinite activity).
AdmissiblePair observation_driver(const ModelSpec& m, const ObservationRecord& rec);

/// Observation atoms the engine needs beside the driver (empty in the
/// infinite regime, where the jumps sit inside the driver).
std::vector<JumpAtom> jump_record(const ModelSpec& m, const ObservationRecord& rec);

McEstimate g_functional(const ModelSpec& m, const TestFunction& f, const AdmissiblePair& driver,
                        const std::vector<JumpAtom>& jump_record, double t, std::size_t particles,
                        std::uint64_t seed_base, const EngineOptions& opt = {});

/// g^f / g^1 from one particle cloud (common random numbers).
FilterResult theta(const ModelSpec& m, const TestFunction& f, const AdmissiblePair& driver,
                   const std::vector<JumpAtom>& jump_record, double t, std::size_t particles,
                   std::uint64_t seed_base, const EngineOptions& opt = {});

/// Estimates from an existing cloud, so several test functions share draws.
FilterResult estimate(const ParticleCloud& cloud, const TestFunction& f);
McEstimate estimate_g(const ParticleCloud& cloud, const TestFunction& f);

/// Weighted particle filter under the reference measure that simulates the
/// signal directly against the recorded W~ increments, with left-point
/// (Ito) Girsanov sums and no rough lift.
FilterResult direct_filter(const ModelSpec& m, const TestFunction& f, const ObservationRecord& rec,
                           double t, std::size_t particles, std::uint64_t seed_base);

/// Scalar models with a common-noise field sigma1(x): removes dW~ from the
/// signal through the flow phi(t, x) = exp(W~_t sigma1)(x), simulates the
/// transformed signal X~ = psi(t, X) and maps back.
FilterResult scalar_flow_filter(const ModelSpec& m, const TestFunction& f,
                                const ObservationRecord& rec, double t, std::size_t particles,
                                std::uint64_t seed_base);

/// Closed-form Kalman-Bucy mean and variance for linear_gaussian, driven by
/// the recorded Y (left-point sums, Riccati by RK4 on the same grid).
struct KalmanState {
  double mean = 0.0;
  double var = 0.0;
};
KalmanState kalman_bucy(const ModelSpec& m, const ObservationRecord& rec, double t);

struct ConsistencyRow {
  std::uint64_t seed = 0;
  double x_true = 0.0;
  double theta = 0.0, theta_se = 0.0;
  double direct = 0.0, direct_se = 0.0;
  double gap = 0.0, combined_se = 0.0;
  bool pass = false;
};

struct ConsistencyReport {
  std::string model_id, f_name;
  std::size_t particles = 0, steps = 0;
  std::vector<ConsistencyRow> rows;
  double pass_rate = 0.0;
};

ConsistencyReport robust_consistency_check(const ModelSpec& m, const TestFunction& f, double t,
                                           std::size_t particles,
                                           const std::vector<std::uint64_t>& seeds,
                                           std::size_t steps, const EngineOptions& opt = {});

struct RobustnessRow {
  std::size_t mesh = 0;  // sample intervals kept from the record
  double theta_lin = 0.0, se_lin = 0.0;
  double theta_rect = 0.0, se_rect = 0.0;
  double gap = 0.0;
  double gap_se = 0.0;  // paired (common random numbers) standard error
  double rho_alpha = 0.0;
  double ratio = 0.0;   // gap / rho_alpha
};

struct RobustnessTable {
  std::string model_id, f_name;
  std::uint64_t seed = 0, seed_base = 0;
  std::size_t particles = 0;
  double alpha = 0.0;
  std::vector<RobustnessRow> rows;
  bool non_increasing = false;  // each gap <= previous gap + 2 gap_se
};

/// Subsamples the record at each mesh, builds the linear interpolant and the
/// sample-and-hold interpolant (read piecewise linearly on the record grid,
/// so both drivers are continuous), lifts both and compares theta.
RobustnessTable robustness_experiment(const ModelSpec& m, const TestFunction& f, double t,
                                      const ObservationRecord& rec,
                                      const std::vector<std::size_t>& meshes, std::size_t particles,
                                      std::uint64_t seed_base, double alpha = 0.3,
                                      const EngineOptions& opt = {});

struct EpsilonRow {
  double epsilon = 0.0;
  std::size_t observed_jumps = 0;
  double theta = 0.0, theta_se = 0.0;
  double beta_to_next = 0.0;   // beta_p(L^eps, L^next eps), NaN on the last row
  double theta_gap_to_next = 0.0;
};

/// Infinite-activity sweep: for each truncation level eps builds
/// L^eps = (W~, xi^{2, eps}) from one seed with nested shot-noise bands,
/// lifts it in the Marcus sense and computes theta with the signal noise
/// truncated at the same eps.
std::vector<EpsilonRow> epsilon_sweep(const ModelSpec& m, const TestFunction& f, double horizon,
                                      std::size_t steps, const std::vector<double>& epsilons,
                                      std::size_t particles, std::uint64_t seed,
                                      std::uint64_t seed_base, double p = 2.5,
                                      const EngineOptions& opt = {});

}  // namespace rf
