#include "rfilt/cli.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <iostream>
#include <random>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "roughfilter/cadlag_path.hpp"
#include "roughfilter/errors.hpp"
#include "roughfilter/filter.hpp"
#include "roughfilter/fillin.hpp"
#include "roughfilter/io.hpp"
#include "roughfilter/lift.hpp"
#include "roughfilter/model.hpp"
#include "roughfilter/rde.hpp"
#include "roughfilter/rng.hpp"
#include "roughfilter/sim.hpp"

#ifndef ROUGHFILTER_VERSION
#define ROUGHFILTER_VERSION "unknown"
#endif

namespace rfilt {

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

constexpr const char* kNormConvention =
    "level1 Euclidean, level2 Frobenius; homogeneous norm max(|x1|, sqrt(2 |Anti(x2)|)); "
    "rho_p = max(level1 p-var, level2 (p/2)-var^(2/p)) on merged grids";

std::string trim(const std::string& s) {
  const auto a = s.find_first_not_of(" \t\r");
  if (a == std::string::npos) return "";
  const auto b = s.find_last_not_of(" \t\r");
  return s.substr(a, b - a + 1);
}

double to_double(const std::string& key, const std::string& v) {
  try {
    std::size_t used = 0;
    const double d = std::stod(v, &used);
    if (used != v.size()) throw std::invalid_argument(v);
    return d;
  } catch (const std::exception&) {
    throw rf::ValidationError("'" + key + "' expects a number, got '" + v + "'");
  }
}

std::uint64_t to_uint(const std::string& key, const std::string& v) {
  const double d = to_double(key, v);
  if (d < 0.0 || d != std::floor(d) || d > 9.0e15)
    throw rf::ValidationError("'" + key + "' expects a non-negative integer, got '" + v + "'");
  return static_cast<std::uint64_t>(d);
}

template <class T, class F>
std::vector<T> to_list(const std::string& v, F&& conv) {
  std::vector<T> out;
  std::stringstream ss(v);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (!item.empty()) out.push_back(conv(item));
  }
  return out;
}

template <class T>
std::string join(const std::vector<T>& v) {
  std::string out;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) out += ',';
    if constexpr (std::is_floating_point_v<T>)
      out += rf::format_double(v[i]);
    else
      out += std::to_string(v[i]);
  }
  return out;
}

double median(std::vector<double> v) {
  if (v.empty()) return std::nan("");
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

fs::path default_out(const RunConfig& c) {
  if (!c.out.empty()) return c.out;
  if (const char* env = std::getenv(kOutDirEnv); env && *env) return fs::path(env) / c.command;
  return fs::path("rfilt_out") / c.command;
}

// Shared per-run context.
struct Ctx {
  const RunConfig& c;
  fs::path dir;
  std::vector<fs::path> artifacts;
  json summary = json::object();

  void write(const std::string& name, const std::string& content) {
    rf::write_text(dir / name, content);
    artifacts.push_back(dir / name);
  }
};

rf::ObservationRecord make_record(const rf::ModelSpec& m, const RunConfig& c, std::uint64_t seed,
                                  rf::SimulationResult* sim_out = nullptr) {
  const rf::NoiseBundle nb = rf::make_noise_bundle(m, seed, c.T, c.steps, {c.epsilon, 0.1});
  rf::SimulationResult sim = rf::simulate_pair(m, nb, rf::Measure::physical);
  rf::ObservationRecord rec = rf::observation_record(m, sim);
  if (sim_out) *sim_out = std::move(sim);
  return rec;
}

rf::CadlagPath brownian(std::uint64_t seed, std::size_t steps, double T, Eigen::Index dim) {
  rf::CounterRng rng(seed, rf::stream::kBrownianW);
  std::normal_distribution<double> normal;
  std::vector<double> times(steps + 1);
  rf::Mat v = rf::Mat::Zero(static_cast<Eigen::Index>(steps + 1), dim);
  const double dt = T / static_cast<double>(steps);
  for (std::size_t k = 0; k <= steps; ++k) times[k] = k == steps ? T : dt * static_cast<double>(k);
  for (std::size_t k = 1; k <= steps; ++k)
    for (Eigen::Index j = 0; j < dim; ++j)
      v(static_cast<Eigen::Index>(k), j) = v(static_cast<Eigen::Index>(k - 1), j) + std::sqrt(dt) * normal(rng);
  return rf::CadlagPath(times, v);
}

rf::RoughPath lift_any(const rf::CadlagPath& x) {
  return x.has_jumps() ? rf::marcus_lift(x) : rf::stratonovich_lift(x);
}

rf::VectorField demo_field(Eigen::Index d) {
  std::vector<rf::Mat> a;
  const rf::Mat catalog[] = {(rf::Mat(2, 2) << 0.0, -1.0, 1.0, 0.0).finished(),
                             (rf::Mat(2, 2) << 0.3, 0.5, 0.0, -0.2).finished(),
                             (rf::Mat(2, 2) << 0.0, 0.4, 0.4, 0.1).finished()};
  for (Eigen::Index i = 0; i < d; ++i) a.push_back(catalog[i % 3] * (1.0 / (1.0 + static_cast<double>(i / 3))));
  return rf::linear_field(a);
}

void cmd_lift(Ctx& ctx) {
  const RunConfig& c = ctx.c;
  rf::CadlagPath x;
  if (!c.input.empty()) {
    x = rf::parse_path_csv(rf::read_text(c.input));
  } else {
    const rf::ModelSpec m = rf::make_model(c.model_id, c.model_params);
    x = make_record(m, c, c.seed).w_tilde;
  }
  const rf::RoughPath r = lift_any(x);
  ctx.write("lift.json", rf::rough_path_json(r));
  ctx.write("trace.csv", rf::path_csv(r.trace()));
  ctx.summary["samples"] = r.size();
  ctx.summary["jumps"] = r.jump_indices().size();
  ctx.summary["lift"] = x.has_jumps() ? "marcus" : "stratonovich";
  ctx.summary["p_variation"] = rf::p_variation(x, c.p);
  ctx.summary["chen_defect"] = rf::chen_defect(r);
  ctx.summary["geometric_defect"] = rf::max_geometric_defect(r);
}

void cmd_metrics(Ctx& ctx) {
  const RunConfig& c = ctx.c;
  rf::CadlagPath x, y;
  if (!c.input.empty() || !c.input2.empty()) {
    if (c.input.empty() || c.input2.empty()) throw rf::ValidationError("metrics needs both --input and --input2");
    x = rf::parse_path_csv(rf::read_text(c.input));
    y = rf::parse_path_csv(rf::read_text(c.input2));
  } else {
    // Linear against sample-and-hold interpolation of a simulated W~.
    const rf::ModelSpec m = rf::make_model(c.model_id, c.model_params);
    const rf::CadlagPath w = make_record(m, c, c.seed).w_tilde;
    const std::size_t mesh = c.meshes.front();
    std::vector<double> st;
    rf::Mat sv(static_cast<Eigen::Index>(mesh + 1), w.dim());
    for (std::size_t k = 0; k <= mesh; ++k) {
      const std::size_t idx = (k * (w.size() - 1) + mesh / 2) / mesh;
      st.push_back(w.times()[idx]);
      sv.row(static_cast<Eigen::Index>(k)) = w.value(idx).transpose();
    }
    x = rf::linear_interpolant(st, sv);
    y = rf::rectangular_interpolant(st, sv);
  }
  rf::AdmissiblePair px, py;
  px.rough = lift_any(x);
  py.rough = lift_any(y);
  const rf::DeltaLimit beta = rf::beta_p(px, py, c.p, c.delta_seq);
  const rf::DeltaLimit alpha = rf::alpha_p(px, py, c.p, 16, c.delta_seq);
  json& s = ctx.summary;
  s["p_variation_x"] = rf::p_variation(x, c.p);
  s["p_variation_y"] = rf::p_variation(y, c.p);
  s["d_p"] = rf::d_p(x, y, c.p);
  s["skorokhod_sigma_p"] = rf::skorokhod_sigma_p(x, y, c.p, 16).value;
  s["beta_p"] = beta.estimate;
  s["beta_p_stagnated"] = beta.stagnated;
  s["beta_p_padded"] = beta.padded;
  s["alpha_p"] = alpha.estimate;
  s["alpha_p_stagnated"] = alpha.stagnated;
  if (!x.has_jumps() && !y.has_jumps()) {
    s["rho_p"] = rf::rho_p(px.rough, py.rough, c.p);
    s["rho_alpha"] = rf::rho_alpha_holder(px.rough, py.rough, c.alpha);
  }
  std::string csv = "delta,beta_p,alpha_p,seed,mesh,norm\n";
  for (std::size_t k = 0; k < beta.per_delta.size(); ++k)
    csv += rf::format_double(beta.per_delta[k].delta) + ',' + rf::format_double(beta.per_delta[k].value) + ',' +
           rf::format_double(alpha.per_delta[k].value) + ',' + std::to_string(c.seed) + ',' +
           std::to_string(c.meshes.front()) + ",p=" + rf::format_double(c.p) + '\n';
  ctx.write("metrics_delta.csv", csv);
}

void cmd_rde(Ctx& ctx) {
  const RunConfig& c = ctx.c;
  const rf::CadlagPath x = c.input.empty() ? brownian(c.seed, c.steps, c.T, 2)
                                           : rf::parse_path_csv(rf::read_text(c.input));
  const rf::VectorField v = demo_field(x.dim());
  const rf::Vec y0 = (rf::Vec(2) << 1.0, 0.0).finished();
  rf::AdmissiblePair pair;
  pair.rough = lift_any(x);
  pair.delta = c.delta_seq.back();
  const rf::RdeSolution sol = x.has_jumps() ? rf::solve_canonical_rde(v, pair, y0, c.steps)
                                            : rf::solve_continuous_rde(v, pair.rough, y0, c.steps);
  ctx.write("solution.csv", rf::solution_csv(sol));
  const rf::Vec yT = sol.final_state();
  ctx.summary["final_state"] = std::vector<double>(yT.data(), yT.data() + yT.size());
  ctx.summary["driver_jumps"] = pair.rough.jump_indices().size();
  ctx.summary["scheme_steps"] = sol.stats.steps;
  if (x.has_jumps()) ctx.summary["error_estimate"] = rf::canonical_error_estimate(v, pair, y0, c.steps);
}

std::string atoms_csv(const std::vector<rf::JumpAtom>& atoms, std::uint64_t seed) {
  std::string out = "time,mark,seed\n";
  for (const auto& a : atoms) {
    std::string mark;
    for (Eigen::Index j = 0; j < a.mark.size(); ++j) mark += (j ? ";" : "") + rf::format_double(a.mark(j));
    out += rf::format_double(a.time) + ',' + mark + ',' + std::to_string(seed) + '\n';
  }
  return out;
}

void cmd_simulate(Ctx& ctx) {
  const RunConfig& c = ctx.c;
  const rf::ModelSpec m = rf::make_model(c.model_id, c.model_params);
  rf::validate_model(m);
  const rf::NoiseBundle nb = rf::make_noise_bundle(m, c.seed, c.T, c.steps, {c.epsilon, 0.1});
  const rf::SimulationResult sim = rf::simulate_pair(m, nb, rf::Measure::physical);
  ctx.write("x.csv", rf::path_csv(sim.x));
  ctx.write("y.csv", rf::path_csv(sim.y));
  ctx.write("w_tilde.csv", rf::path_csv(sim.w_tilde));
  ctx.write("log_weight.csv", rf::path_csv(sim.log_weight));
  ctx.write("observed_atoms.csv", atoms_csv(sim.observed_jumps, c.seed));
  ctx.summary["observed_jumps"] = sim.observed_jumps.size();
  ctx.summary["signal_jumps"] = sim.signal_jumps.size();
  ctx.summary["collisions_redrawn"] = nb.collisions_redrawn;
  ctx.summary["grid_points"] = sim.times.size();
}

void cmd_filter(Ctx& ctx) {
  const RunConfig& c = ctx.c;
  const rf::ModelSpec m = rf::make_model(c.model_id, c.model_params);
  rf::validate_model(m);
  const rf::TestFunction f = rf::make_test_function(c.f);
  rf::SimulationResult sim;
  const rf::ObservationRecord rec = make_record(m, c, c.seed, &sim);
  rf::EngineOptions opt;
  opt.epsilon = c.epsilon;
  opt.aux_steps = c.steps;
  const std::uint64_t seed_base = c.seed << 20;
  const rf::FilterResult r = rf::theta(m, f, rf::observation_driver(m, rec), rf::jump_record(m, rec), c.T,
                                       c.particles, seed_base, opt);
  ctx.write("filter.json", rf::filter_result_json(r));
  ctx.write("w_tilde.csv", rf::path_csv(rec.w_tilde));
  ctx.write("observed_atoms.csv", atoms_csv(rec.atoms, c.seed));
  ctx.summary["theta"] = r.theta;
  ctx.summary["theta_se"] = r.theta_se;
  ctx.summary["ess"] = r.ess;
  ctx.summary["f_true_state"] = f(sim.x.at(c.T), sim.y.at(c.T));
  if (m.id == "linear_gaussian") {
    const rf::KalmanState k = rf::kalman_bucy(m, rec, c.T);
    ctx.summary["kalman_mean"] = k.mean;
    ctx.summary["kalman_var"] = k.var;
  }
}

void cmd_robustness(Ctx& ctx) {
  const RunConfig& c = ctx.c;
  const rf::ModelSpec m = rf::make_model(c.model_id, c.model_params);
  rf::validate_model(m);
  const rf::TestFunction f = rf::make_test_function(c.f);
  rf::EngineOptions opt;
  opt.epsilon = c.epsilon;
  std::string csv =
      "seed,seed_base,mesh,interp,norm,alpha,theta_lin,se_lin,theta_rect,se_rect,gap,gap_se,rho_alpha,ratio\n";
  std::map<std::size_t, std::vector<double>> gaps, ratios;
  std::size_t per_seed_trend = 0;
  for (std::size_t s = 0; s < c.seeds; ++s) {
    const std::uint64_t seed = c.seed + s;
    const rf::ObservationRecord rec = make_record(m, c, seed);
    const std::uint64_t seed_base = (seed + 1) << 24;
    const rf::RobustnessTable t = rf::robustness_experiment(m, f, c.T, rec, c.meshes, c.particles, seed_base, c.alpha, opt);
    per_seed_trend += t.non_increasing ? 1 : 0;
    for (const auto& r : t.rows) {
      csv += std::to_string(seed) + ',' + std::to_string(seed_base) + ',' + std::to_string(r.mesh) +
             ",linear|rectangular,rho_alpha," + rf::format_double(c.alpha) + ',' + rf::format_double(r.theta_lin) +
             ',' + rf::format_double(r.se_lin) + ',' + rf::format_double(r.theta_rect) + ',' +
             rf::format_double(r.se_rect) + ',' + rf::format_double(r.gap) + ',' + rf::format_double(r.gap_se) +
             ',' + rf::format_double(r.rho_alpha) + ',' + rf::format_double(r.ratio) + '\n';
      gaps[r.mesh].push_back(r.gap);
      ratios[r.mesh].push_back(r.ratio);
    }
  }
  ctx.write("robustness.csv", csv);
  json med = json::array();
  bool non_increasing = true;
  double prev = std::numeric_limits<double>::infinity(), rmin = std::numeric_limits<double>::infinity(), rmax = 0.0;
  for (std::size_t mesh : c.meshes) {
    const double g = median(gaps[mesh]), r = median(ratios[mesh]);
    med.push_back({{"mesh", mesh}, {"median_gap", g}, {"median_ratio", r}});
    non_increasing = non_increasing && g <= prev;
    prev = g;
    rmin = std::min(rmin, r);
    rmax = std::max(rmax, r);
  }
  ctx.summary["medians"] = med;
  ctx.summary["median_gap_non_increasing"] = non_increasing;
  ctx.summary["ratio_max_over_min"] = rmax / rmin;
  ctx.summary["seeds_with_trend"] = per_seed_trend;
}

void cmd_consistency(Ctx& ctx) {
  const RunConfig& c = ctx.c;
  const rf::ModelSpec m = rf::make_model(c.model_id, c.model_params);
  rf::validate_model(m);
  const rf::TestFunction f = rf::make_test_function(c.f);
  std::vector<std::uint64_t> seeds;
  for (std::size_t s = 0; s < c.seeds; ++s) seeds.push_back(c.seed + s);
  rf::EngineOptions opt;
  opt.epsilon = c.epsilon;
  const rf::ConsistencyReport rep = rf::robust_consistency_check(m, f, c.T, c.particles, seeds, c.steps, opt);
  std::string csv = "seed,particles,steps,x_true,theta,theta_se,direct,direct_se,gap,combined_se,pass\n";
  for (const auto& r : rep.rows)
    csv += std::to_string(r.seed) + ',' + std::to_string(c.particles) + ',' + std::to_string(c.steps) + ',' +
           rf::format_double(r.x_true) + ',' + rf::format_double(r.theta) + ',' + rf::format_double(r.theta_se) +
           ',' + rf::format_double(r.direct) + ',' + rf::format_double(r.direct_se) + ',' +
           rf::format_double(r.gap) + ',' + rf::format_double(r.combined_se) + ',' + (r.pass ? "1" : "0") + '\n';
  ctx.write("consistency.csv", csv);
  ctx.summary["pass_rate"] = rep.pass_rate;
}

void cmd_wongzakai(Ctx& ctx) {
  const RunConfig& c = ctx.c;
  const std::size_t fine_level = c.levels + 4;
  const std::size_t fine_steps = std::size_t{1} << fine_level;
  const rf::CadlagPath w = brownian(c.seed, fine_steps, c.T, 2);
  const rf::RoughPath reference = rf::stratonovich_lift(w);
  const rf::VectorField v = demo_field(2);
  const rf::Vec y0 = (rf::Vec(2) << 1.0, 0.0).finished();
  const rf::Vec y_ref = rf::solve_continuous_rde(v, reference, y0, 4 * fine_steps).final_state();
  std::string csv = "level,points,rho_p,terminal_error,seed,norm\n";
  json rows = json::array();
  bool decreasing = true;
  double prev = std::numeric_limits<double>::infinity();
  for (std::size_t level = 1; level <= c.levels; ++level) {
    const std::size_t n = std::size_t{1} << level;
    std::vector<std::size_t> idx;
    for (std::size_t k = 0; k <= n; ++k) idx.push_back(k * (fine_steps / n));
    const rf::RoughPath approx = rf::stratonovich_lift(rf::subsample(w, idx));
    const double rho = rf::rho_p(approx, reference, c.p);
    const double err = (rf::solve_continuous_rde(v, approx, y0, 4 * fine_steps).final_state() - y_ref).norm();
    decreasing = decreasing && rho < prev;
    prev = rho;
    csv += std::to_string(level) + ',' + std::to_string(n + 1) + ',' + rf::format_double(rho) + ',' +
           rf::format_double(err) + ',' + std::to_string(c.seed) + ",rho_p p=" + rf::format_double(c.p) + '\n';
    rows.push_back({{"level", level}, {"rho_p", rho}, {"terminal_error", err}});
  }
  ctx.write("wongzakai.csv", csv);
  ctx.summary["levels"] = rows;
  ctx.summary["rho_p_decreasing"] = decreasing;
}

}  // namespace

std::vector<std::string> commands() {
  return {"lift", "metrics", "rde", "simulate", "filter", "robustness", "consistency", "wongzakai"};
}

std::map<std::string, std::string> parse_flat_config(const std::string& text) {
  std::map<std::string, std::string> kv;
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw rf::ValidationError("config line " + std::to_string(lineno) + " is not key = value");
    kv[trim(line.substr(0, eq))] = trim(line.substr(eq + 1));
  }
  return kv;
}

std::string format_flat_config(const std::map<std::string, std::string>& kv) {
  std::string out;
  for (const auto& [k, v] : kv) out += k + " = " + v + '\n';
  return out;
}

void apply_settings(RunConfig& c, const std::map<std::string, std::string>& kv) {
  for (const auto& [key, v] : kv) {
    if (key == "command") c.command = v;
    else if (key == "model") c.model_id = v;
    else if (key == "f") c.f = v;
    else if (key == "T") c.T = to_double(key, v);
    else if (key == "steps") c.steps = to_uint(key, v);
    else if (key == "particles") c.particles = to_uint(key, v);
    else if (key == "p") c.p = to_double(key, v);
    else if (key == "alpha") c.alpha = to_double(key, v);
    else if (key == "epsilon") c.epsilon = to_double(key, v);
    else if (key == "meshes") c.meshes = to_list<std::size_t>(v, [&](const std::string& s) { return to_uint(key, s); });
    else if (key == "delta_seq" || key == "delta-seq")
      c.delta_seq = to_list<double>(v, [&](const std::string& s) { return to_double(key, s); });
    else if (key == "seed") c.seed = to_uint(key, v);
    else if (key == "seeds") c.seeds = to_uint(key, v);
    else if (key == "levels") c.levels = to_uint(key, v);
    else if (key == "input") c.input = v;
    else if (key == "input2") c.input2 = v;
    else if (key == "out") c.out = v;
    else if (key.rfind("param.", 0) == 0) c.model_params[key.substr(6)] = to_double(key, v);
    else throw rf::ValidationError("unknown config key '" + key + "'");
  }
}

std::map<std::string, std::string> to_key_values(const RunConfig& c) {
  std::map<std::string, std::string> kv{
      {"command", c.command},
      {"model", c.model_id},
      {"f", c.f},
      {"T", rf::format_double(c.T)},
      {"steps", std::to_string(c.steps)},
      {"particles", std::to_string(c.particles)},
      {"p", rf::format_double(c.p)},
      {"alpha", rf::format_double(c.alpha)},
      {"epsilon", rf::format_double(c.epsilon)},
      {"meshes", join(c.meshes)},
      {"delta_seq", join(c.delta_seq)},
      {"seed", std::to_string(c.seed)},
      {"seeds", std::to_string(c.seeds)},
      {"levels", std::to_string(c.levels)},
  };
  if (!c.input.empty()) kv["input"] = c.input;
  if (!c.input2.empty()) kv["input2"] = c.input2;
  for (const auto& [k, v] : c.model_params) kv["param." + k] = rf::format_double(v);
  return kv;
}

void validate(const RunConfig& c) {
  const auto cmds = commands();
  rf::require(std::find(cmds.begin(), cmds.end(), c.command) != cmds.end(),
              "unknown command '" + c.command + "'");
  const auto models = rf::model_catalog();
  rf::require(std::find(models.begin(), models.end(), c.model_id) != models.end(),
              "unknown model id '" + c.model_id + "'");
  rf::make_model(c.model_id, c.model_params);  // rejects unknown parameters
  rf::make_test_function(c.f);
  rf::require(c.T > 0.0 && std::isfinite(c.T), "T must be positive");
  rf::require(c.steps >= 1, "steps must be >= 1");
  rf::require(c.particles >= 1, "particles must be >= 1");
  rf::require(c.seeds >= 1, "seeds must be >= 1");
  const bool rough = c.command == "lift" || c.command == "metrics" || c.command == "rde" ||
                     c.command == "wongzakai" || c.command == "robustness";
  if (rough) rf::require(c.p >= 2.0 && c.p < 3.0, "p must lie in [2, 3)");
  rf::require(c.alpha > 0.0 && c.alpha < 0.5, "alpha must lie in (0, 1/2)");
  rf::require(c.epsilon > 0.0 && c.epsilon < 1.0, "epsilon must lie in (0, 1)");
  rf::require(!c.meshes.empty(), "meshes must not be empty");
  for (std::size_t k = 0; k < c.meshes.size(); ++k) {
    rf::require(c.meshes[k] >= 1, "meshes must be >= 1");
    if (c.command == "robustness") rf::require(c.meshes[k] <= c.steps, "meshes must lie in [1, steps]");
    if (k) rf::require(c.meshes[k] > c.meshes[k - 1], "meshes must be increasing");
  }
  rf::require(!c.delta_seq.empty(), "delta_seq must not be empty");
  for (std::size_t k = 0; k < c.delta_seq.size(); ++k) {
    rf::require(c.delta_seq[k] > 0.0 && c.delta_seq[k] <= 1.0, "delta_seq values must lie in (0, 1]");
    if (k) rf::require(c.delta_seq[k] < c.delta_seq[k - 1], "delta_seq must be decreasing");
  }
  rf::require(c.levels >= 1 && c.levels <= 12, "levels must lie in [1, 12]");
}

RunResult run(const RunConfig& c) {
  RunResult res;
  const auto start = std::chrono::steady_clock::now();
  try {
    validate(c);
    Ctx ctx{c, default_out(c), {}, json::object()};
    fs::create_directories(ctx.dir);
    if (c.command == "lift") cmd_lift(ctx);
    else if (c.command == "metrics") cmd_metrics(ctx);
    else if (c.command == "rde") cmd_rde(ctx);
    else if (c.command == "simulate") cmd_simulate(ctx);
    else if (c.command == "filter") cmd_filter(ctx);
    else if (c.command == "robustness") cmd_robustness(ctx);
    else if (c.command == "consistency") cmd_consistency(ctx);
    else if (c.command == "wongzakai") cmd_wongzakai(ctx);

    ctx.write("summary.json", ctx.summary.dump(2) + "\n");
    const double wall =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    json artifacts = json::array();
    for (const auto& a : ctx.artifacts) artifacts.push_back(a.filename().string());
    json manifest{{"tool", "rfilt"},
                  {"version", ROUGHFILTER_VERSION},
                  {"command", c.command},
                  {"config", to_key_values(c)},
                  {"norm_convention", kNormConvention},
                  {"wall_time_s", wall},
                  {"artifacts", artifacts}};
    res.manifest = ctx.dir / "manifest.json";
    rf::write_text(res.manifest, manifest.dump(2) + "\n");
    res.artifacts = ctx.artifacts;
    res.message = ctx.summary.dump();
  } catch (const rf::ValidationError& e) {
    res.status = kExitValidation;
    res.message = std::string("validation error: ") + e.what();
  } catch (const rf::NumericalError& e) {
    res.status = kExitNumerical;
    res.message = std::string("numerical abort: ") + e.what();
  } catch (const std::exception& e) {
    res.status = kExitFailure;
    res.message = std::string("error: ") + e.what();
  }
  return res;
}

RunConfig config_from_manifest(const fs::path& manifest) {
  json j;
  try {
    j = json::parse(rf::read_text(manifest));
  } catch (const json::exception& e) {
    throw rf::ValidationError(std::string("invalid manifest: ") + e.what());
  }
  if (!j.contains("config") || !j["config"].is_object()) throw rf::ValidationError("manifest has no config");
  RunConfig c;
  apply_settings(c, j["config"].get<std::map<std::string, std::string>>());
  return c;
}

int main_entry(int argc, char** argv) {
  CLI::App app{"rfilt: rough-path tools and robust jump-diffusion filtering"};
  std::string command, config_file, manifest;
  std::vector<std::string> params;
  app.add_option("command", command, "lift | metrics | rde | simulate | filter | robustness | consistency | wongzakai");
  app.add_option("--config", config_file, "flat key = value config file");
  app.add_option("--manifest", manifest, "re-run the configuration echoed in a manifest.json");
  app.add_option("--param", params, "model parameter override key=value (repeatable)");
  const std::vector<std::pair<std::string, std::string>> flags{
      {"model", "model id"}, {"f", "test function"}, {"T", "horizon"}, {"steps", "base grid steps"},
      {"particles", "particles"}, {"p", "p-variation exponent"}, {"alpha", "Holder exponent"},
      {"epsilon", "shot-noise truncation"}, {"meshes", "comma-separated meshes"},
      {"delta-seq", "comma-separated delta sequence"}, {"seed", "seed"}, {"seeds", "number of seeds"},
      {"levels", "dyadic levels"}, {"input", "input path CSV"}, {"input2", "second input path CSV"},
      {"out", "output directory"}};
  std::map<std::string, std::string> values;
  for (const auto& [name, help] : flags) app.add_option("--" + name, values[name], help);
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitValidation;
  }

  RunConfig c;
  try {
    if (!manifest.empty()) c = config_from_manifest(manifest);
    if (!config_file.empty()) apply_settings(c, parse_flat_config(rf::read_text(config_file)));
    std::map<std::string, std::string> kv;
    for (const auto& [name, help] : flags) {
      (void)help;
      if (app.get_option("--" + name)->count() > 0) kv[name == "delta-seq" ? "delta_seq" : name] = values[name];
    }
    for (const auto& p : params) {
      const auto eq = p.find('=');
      if (eq == std::string::npos) throw rf::ValidationError("--param expects key=value");
      kv["param." + p.substr(0, eq)] = p.substr(eq + 1);
    }
    if (!command.empty()) kv["command"] = command;
    apply_settings(c, kv);
  } catch (const rf::ValidationError& e) {
    std::cerr << "validation error: " << e.what() << '\n';
    return kExitValidation;
  }
  const RunResult r = run(c);
  if (r.status == kExitOk) {
    std::cout << r.message << '\n';
    std::cerr << "wrote " << r.artifacts.size() << " artifacts and " << r.manifest.string() << '\n';
  } else {
    std::cerr << r.message << '\n';
  }
  return r.status;
}

}  // namespace rfilt
