#include "roughfilter/fillin.hpp"

#include <algorithm>
#include <cmath>

#include "roughfilter/errors.hpp"

namespace rf {

namespace {

GroupElement along(const GroupElement& a, const TensorElement& lie, double s1, double s2) {
  TensorElement step = lie;
  step.level1 *= s1;
  step.level2 *= s2;
  return group_mul(a, group_exp(step));
}

const JumpSlot* slot_at(const TimeExtension& ext, std::size_t sample) {
  for (const auto& s : ext.slots)
    if (s.sample == sample) return &s;
  return nullptr;
}

bool settled(double a, double b) {
  const double scale = std::max(std::abs(a), std::abs(b));
  return scale <= 1e-12 || std::abs(a - b) <= 0.05 * scale;
}

}  // namespace

PathFunction PathFunction::tabulated(std::vector<double> profile) {
  require(profile.size() >= 2, "tabulated path function needs at least two nodes");
  require(profile.front() == 0.0 && profile.back() == 1.0,
          "tabulated path function must run from 0 to 1");
  for (double v : profile) require(std::isfinite(v), "tabulated path function has non-finite node");
  return {PathFunctionKind::custom_tabulated, std::move(profile)};
}

GroupElement PathFunction::operator()(const GroupElement& a, const GroupElement& b,
                                      double s) const {
  if (s <= 0.0) return a;
  if (s >= 1.0) return b;
  const TensorElement lie = group_log(increment(a, b));
  switch (kind) {
    case PathFunctionKind::log_linear:
      return along(a, lie, s, s);
    case PathFunctionKind::linear:
      return along(a, lie, s, s * s);
    case PathFunctionKind::custom_tabulated: {
      const double pos = s * static_cast<double>(profile.size() - 1);
      const auto k = std::min(profile.size() - 2, static_cast<std::size_t>(pos));
      const double w = pos - static_cast<double>(k);
      const double h = profile[k] + w * (profile[k + 1] - profile[k]);
      return along(a, lie, h, h);
    }
  }
  return b;
}

bool PathFunction::admits(const GroupElement& a, const GroupElement& b) const {
  return a.dim() == b.dim();
}

std::string PathFunction::name() const {
  switch (kind) {
    case PathFunctionKind::log_linear: return "log_linear";
    case PathFunctionKind::linear: return "linear";
    case PathFunctionKind::custom_tabulated: return "custom_tabulated";
  }
  return "unknown";
}

double RSequence::operator[](std::size_t k) const {
  require(k >= 1, "r_seq is indexed from 1");
  if (k <= prefix.size()) return prefix[k - 1];
  return scale * std::pow(ratio, static_cast<double>(k));
}

void RSequence::validate() const {
  for (double r : prefix) require(std::isfinite(r) && r > 0.0, "r_seq entries must be positive");
  require(std::isfinite(scale) && scale > 0.0, "r_seq tail scale must be positive");
  require(ratio > 0.0 && ratio < 1.0, "r_seq tail is not summable (ratio must lie in (0, 1))");
}

void AdmissiblePair::validate() const {
  r_seq.validate();
  require(delta > 0.0 && delta <= 1.0, "delta must lie in (0, 1]");
  require(slot_substeps >= 1, "slot_substeps must be >= 1");
  for (auto i : rough.jump_indices())
    require(phi.admits(rough.pre_points()[i], rough.points()[i]),
            "pair is not admissible: a jump lies outside the path function domain");
}

std::vector<std::size_t> jump_ranking(const RoughPath& x) {
  std::vector<std::size_t> idx = x.jump_indices();
  std::vector<double> size(idx.size());
  for (std::size_t k = 0; k < idx.size(); ++k) size[k] = homogeneous_norm(x.jump(idx[k]));
  std::vector<std::size_t> order(idx.size());
  for (std::size_t k = 0; k < order.size(); ++k) order[k] = k;
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return size[a] > size[b]; });
  std::vector<std::size_t> out;
  out.reserve(idx.size());
  for (auto k : order) out.push_back(idx[k]);
  return out;
}

double TimeExtension::operator()(double t) const {
  double s = t;
  for (const auto& slot : slots)
    if (slot.time <= t) s += slot.width;
  return s;
}

double TimeExtension::left(double t) const {
  double s = t;
  for (const auto& slot : slots)
    if (slot.time < t) s += slot.width;
  return s;
}

TimeExtension time_extension(const AdmissiblePair& pair) {
  pair.validate();
  const RoughPath& x = pair.rough;
  TimeExtension ext;
  ext.horizon = x.horizon();
  const auto ranking = jump_ranking(x);
  for (std::size_t k = 0; k < ranking.size(); ++k) {
    JumpSlot slot;
    slot.sample = ranking[k];
    slot.time = x.times()[ranking[k]];
    slot.rank = k + 1;
    slot.width = pair.delta * pair.r_seq[k + 1];
    ext.slots.push_back(slot);
  }
  std::sort(ext.slots.begin(), ext.slots.end(),
            [](const JumpSlot& a, const JumpSlot& b) { return a.time < b.time; });
  double shift = 0.0;
  for (auto& slot : ext.slots) {
    slot.start = slot.time + shift;
    shift += slot.width;
    slot.end = slot.time + shift;
  }
  ext.total = shift;
  return ext;
}

double TimeChange::operator()(double t) const {
  return ext(t) * ext.horizon / (ext.horizon + ext.total);
}

double TimeChange::left(double t) const {
  return ext.left(t) * ext.horizon / (ext.horizon + ext.total);
}

TimeChange time_change_back(const AdmissiblePair& pair) { return {time_extension(pair)}; }

ContinuousRepresentative continuous_representative(const AdmissiblePair& pair) {
  ContinuousRepresentative rep;
  rep.ext = time_extension(pair);
  const RoughPath& x = pair.rough;
  const double T = x.horizon();
  const double factor = T / (T + rep.ext.total);

  std::vector<double> t;
  std::vector<GroupElement> pts;
  // `slot_segment` tags the segment ending at the pushed point.
  auto push = [&](double u, const GroupElement& g, bool slot_segment) {
    if (!t.empty()) {
      if (!(u > t.back()))
        throw ValidationError(
            "fill-in slots too narrow to resolve in floating point; use a slower-decaying r_seq");
      rep.in_slot.push_back(slot_segment);
    }
    t.push_back(u);
    pts.push_back(g);
  };

  for (std::size_t i = 0; i < x.size(); ++i) {
    const bool last = i + 1 == x.size();
    if (x.is_jump(i)) {
      const JumpSlot* slot = slot_at(rep.ext, i);
      const double u0 = slot->start * factor;
      const double width = slot->width * factor;
      rep.slot_begin.push_back(t.size());
      push(u0, x.pre_points()[i], false);
      const int m = pair.slot_substeps;
      for (int j = 1; j < m; ++j) {
        const double s = static_cast<double>(j) / m;
        push(u0 + s * width, pair.phi(x.pre_points()[i], x.points()[i], s), true);
      }
      push(last ? T : slot->end * factor, x.points()[i], true);
    } else {
      push(i == 0 ? 0.0 : (last ? T : rep.ext(x.times()[i]) * factor), x.points()[i], false);
    }
    rep.original_index.push_back(t.size() - 1);
  }
  const std::size_t n = t.size();
  std::vector<GroupElement> pre = pts;
  rep.path = RoughPath(std::move(t), std::move(pts), std::move(pre), std::vector<bool>(n, false));
  return rep;
}

RoughPath restrict_to_original(const ContinuousRepresentative& rep, const RoughPath& original) {
  std::vector<GroupElement> pts, pre;
  std::size_t slot = 0;
  for (std::size_t i = 0; i < original.size(); ++i) {
    pts.push_back(rep.path.points()[rep.original_index[i]]);
    if (original.is_jump(i)) {
      pre.push_back(rep.path.points()[rep.slot_begin[slot++]]);
    } else {
      pre.push_back(pts.back());
    }
  }
  return RoughPath(original.times(), std::move(pts), std::move(pre), original.jump_flags());
}

namespace {

template <class Metric>
DeltaLimit delta_limit(const AdmissiblePair& x, const AdmissiblePair& y,
                       const std::vector<double>& delta_seq, Metric&& metric) {
  require(!delta_seq.empty(), "delta_seq must not be empty");
  for (std::size_t k = 0; k < delta_seq.size(); ++k) {
    require(delta_seq[k] > 0.0 && delta_seq[k] <= 1.0, "delta values must lie in (0, 1]");
    require(k == 0 || delta_seq[k] < delta_seq[k - 1], "delta_seq must be decreasing");
  }
  DeltaLimit out;
  out.padded = x.rough.jump_indices().size() != y.rough.jump_indices().size();
  for (double delta : delta_seq) {
    AdmissiblePair xs = x, ys = y;
    xs.delta = delta;
    ys.delta = delta;
    const auto rx = continuous_representative(xs);
    const auto ry = continuous_representative(ys);
    out.per_delta.push_back({delta, metric(rx.path, ry.path)});
  }
  out.estimate = out.per_delta.back().value;
  const auto n = out.per_delta.size();
  out.stagnated = n >= 2 && settled(out.per_delta[n - 1].value, out.per_delta[n - 2].value);
  return out;
}

}  // namespace

DeltaLimit beta_p(const AdmissiblePair& x, const AdmissiblePair& y, double p,
                  const std::vector<double>& delta_seq) {
  return delta_limit(x, y, delta_seq,
                     [p](const RoughPath& a, const RoughPath& b) { return rho_p(a, b, p); });
}

DeltaLimit alpha_p(const AdmissiblePair& x, const AdmissiblePair& y, double p, int warp_grid,
                   const std::vector<double>& delta_seq) {
  DeltaLimit out = delta_limit(x, y, delta_seq, [&](const RoughPath& a, const RoughPath& b) {
    return skorokhod_sigma_rough(a, b, p, warp_grid).value;
  });
  out.warp_grid = warp_grid;
  return out;
}

}  // namespace rf
