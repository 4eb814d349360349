#include "roughfilter/io.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "roughfilter/errors.hpp"

namespace rf {

using nlohmann::json;

std::string format_double(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

namespace {

double parse_double(const std::string& s) {
  double v = 0.0;
  const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (res.ec != std::errc() || res.ptr != s.data() + s.size())
    throw ValidationError("cannot parse number '" + s + "'");
  return v;
}

std::vector<std::string> split(const std::string& line, char sep) {
  std::vector<std::string> out;
  std::string cell;
  std::istringstream in(line);
  while (std::getline(in, cell, sep)) out.push_back(cell);
  return out;
}

}  // namespace

std::string path_csv(const CadlagPath& x, bool with_pre) {
  with_pre = with_pre || x.has_jumps();
  std::string out = "t";
  for (Eigen::Index j = 0; j < x.dim(); ++j) out += ",v" + std::to_string(j + 1);
  if (with_pre)
    for (Eigen::Index j = 0; j < x.dim(); ++j) out += ",pre_v" + std::to_string(j + 1);
  out += '\n';
  for (std::size_t i = 0; i < x.size(); ++i) {
    out += format_double(x.times()[i]);
    const auto r = static_cast<Eigen::Index>(i);
    for (Eigen::Index j = 0; j < x.dim(); ++j) out += ',' + format_double(x.values()(r, j));
    if (with_pre)
      for (Eigen::Index j = 0; j < x.dim(); ++j) out += ',' + format_double(x.pre_values()(r, j));
    out += '\n';
  }
  return out;
}

CadlagPath parse_path_csv(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  require(static_cast<bool>(std::getline(in, line)), "empty path CSV");
  const auto header = split(line, ',');
  require(header.size() >= 2 && header[0] == "t", "path CSV must start with a t column");
  std::size_t d = 0;
  while (d + 1 < header.size() && header[d + 1].rfind("v", 0) == 0) ++d;
  const bool with_pre = header.size() == 1 + 2 * d;
  require(d >= 1 && (with_pre || header.size() == 1 + d), "malformed path CSV header");
  std::vector<double> times;
  std::vector<std::vector<double>> rows;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto cells = split(line, ',');
    require(cells.size() == header.size(), "path CSV row has the wrong number of columns");
    times.push_back(parse_double(cells[0]));
    std::vector<double> row;
    for (std::size_t k = 1; k < cells.size(); ++k) row.push_back(parse_double(cells[k]));
    rows.push_back(std::move(row));
  }
  const auto n = static_cast<Eigen::Index>(rows.size());
  const auto dd = static_cast<Eigen::Index>(d);
  Mat v(n, dd), p(n, dd);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < dd; ++j) {
      const auto& row = rows[static_cast<std::size_t>(i)];
      v(i, j) = row[static_cast<std::size_t>(j)];
      p(i, j) = with_pre ? row[static_cast<std::size_t>(dd + j)] : v(i, j);
    }
  return CadlagPath(std::move(times), std::move(v), std::move(p));
}

std::string rough_path_json(const RoughPath& x) {
  json j;
  j["times"] = x.times();
  json l1 = json::array(), l2 = json::array(), p1 = json::array(), p2 = json::array();
  auto flat = [](const Mat& m) {
    std::vector<double> out;
    for (Eigen::Index r = 0; r < m.rows(); ++r)
      for (Eigen::Index c = 0; c < m.cols(); ++c) out.push_back(m(r, c));
    return out;
  };
  for (std::size_t i = 0; i < x.size(); ++i) {
    const auto& g = x.points()[i];
    const auto& pg = x.pre_points()[i];
    l1.push_back(std::vector<double>(g.level1.data(), g.level1.data() + g.level1.size()));
    l2.push_back(flat(g.level2));
    p1.push_back(std::vector<double>(pg.level1.data(), pg.level1.data() + pg.level1.size()));
    p2.push_back(flat(pg.level2));
  }
  j["level1"] = l1;
  j["level2"] = l2;
  j["pre_level1"] = p1;
  j["pre_level2"] = p2;
  std::vector<int> flags;
  for (bool b : x.jump_flags()) flags.push_back(b ? 1 : 0);
  j["jump_flags"] = flags;
  return j.dump();
}

RoughPath parse_rough_path_json(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw ValidationError(std::string("invalid rough path JSON: ") + e.what());
  }
  try {
    const auto times = j.at("times").get<std::vector<double>>();
    auto element = [](const json& a, const json& b) {
      const auto v1 = a.get<std::vector<double>>();
      const auto v2 = b.get<std::vector<double>>();
      const auto d = static_cast<Eigen::Index>(v1.size());
      require(static_cast<Eigen::Index>(v2.size()) == d * d, "level2 must hold d*d entries");
      GroupElement g = GroupElement::identity(d);
      for (Eigen::Index i = 0; i < d; ++i) g.level1(i) = v1[static_cast<std::size_t>(i)];
      for (Eigen::Index r = 0; r < d; ++r)
        for (Eigen::Index c = 0; c < d; ++c) g.level2(r, c) = v2[static_cast<std::size_t>(r * d + c)];
      return g;
    };
    std::vector<GroupElement> pts, pre;
    for (std::size_t i = 0; i < times.size(); ++i) {
      pts.push_back(element(j.at("level1").at(i), j.at("level2").at(i)));
      pre.push_back(j.contains("pre_level1") ? element(j.at("pre_level1").at(i), j.at("pre_level2").at(i))
                                             : pts.back());
    }
    std::vector<bool> flags(times.size(), false);
    if (j.contains("jump_flags")) {
      const auto f = j.at("jump_flags").get<std::vector<int>>();
      require(f.size() == times.size(), "jump_flags has the wrong length");
      for (std::size_t i = 0; i < f.size(); ++i) flags[i] = f[i] != 0;
    }
    return RoughPath(times, std::move(pts), std::move(pre), std::move(flags));
  } catch (const json::exception& e) {
    throw ValidationError(std::string("malformed rough path JSON: ") + e.what());
  }
}

std::string solution_csv(const RdeSolution& s) {
  return path_csv(CadlagPath(s.times, s.states, s.pre_states), true);
}

std::string filter_result_json(const FilterResult& r) {
  auto est = [](const McEstimate& e) {
    return json{{"value", e.value}, {"se", e.se}, {"n", e.n}};
  };
  json j{{"model", r.model_id},
         {"f", r.f_name},
         {"t", r.t},
         {"theta", r.theta},
         {"theta_se", r.theta_se},
         {"g_f", est(r.g_f)},
         {"g_1", est(r.g_1)},
         {"particles", r.particles},
         {"seed_base", r.seed_base},
         {"max_log_weight", r.max_log_weight},
         {"ess", r.ess},
         {"driver_meta", r.driver_meta}};
  return j.dump(2) + "\n";
}

void write_text(const std::filesystem::path& file, const std::string& content) {
  if (file.has_parent_path()) std::filesystem::create_directories(file.parent_path());
  std::ofstream out(file, std::ios::binary);
  if (!out) throw Error("cannot write " + file.string());
  out << content;
}

std::string read_text(const std::filesystem::path& file) {
  std::ifstream in(file, std::ios::binary);
  if (!in) throw ValidationError("cannot read " + file.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace rf
