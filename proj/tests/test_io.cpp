#include "doctest.h"

#include <cstdlib>
#include <filesystem>
#include <limits>
#include <random>

#include "json.hpp"
#include "oracles.hpp"
#include "roughfilter/errors.hpp"
#include "roughfilter/io.hpp"

using namespace rf;

TEST_CASE("format_double round trips") {
  std::mt19937_64 gen(3);
  std::uniform_real_distribution<double> u(-1e6, 1e6);
  for (int i = 0; i < 1000; ++i) {
    const double v = u(gen) * std::pow(10.0, static_cast<double>(i % 40) - 20.0);
    CHECK(std::stod(format_double(v)) == v);
  }
  CHECK(format_double(0.5) == "0.5");
  CHECK(format_double(1e-300) == "1e-300");
  CHECK(std::strtod(format_double(std::numeric_limits<double>::denorm_min()).c_str(), nullptr) == std::numeric_limits<double>::denorm_min());
}

TEST_CASE("path csv") {
  std::vector<double> t{0.0, 0.25, 0.5, 1.0};
  Mat v(4, 2), pre(4, 2);
  v << 0, 0, 0.1, -0.2, 1.3, 0.4, 1.0, 1.0 / 3.0;
  pre = v;
  pre(2, 0) = 0.2;
  const CadlagPath x(t, v, pre);
  const std::string text = path_csv(x);
  CHECK(text.rfind("t,v1,v2,pre_v1,pre_v2\n", 0) == 0);
  CHECK(text.find('\r') == std::string::npos);
  const CadlagPath back = parse_path_csv(text);
  CHECK(back.times() == x.times());
  CHECK(back.values() == x.values());
  CHECK(back.pre_values() == x.pre_values());

  const CadlagPath cont(t, v);
  const CadlagPath back2 = parse_path_csv(path_csv(cont, false));
  CHECK(back2.values() == cont.values());
  CHECK(back2.jump_indices().empty());

  CHECK_THROWS_AS(parse_path_csv("t,v1\n0,1\n0.5,abc\n"), ValidationError);
  CHECK_THROWS_AS(parse_path_csv("t,v1\n0,1\n0.5\n"), ValidationError);
  CHECK_THROWS_AS(parse_path_csv(""), ValidationError);
}

TEST_CASE("rough path json") {
  std::mt19937_64 gen(8);
  Mat v = oracle::random_walk(gen, 12, 3, 0.3);
  // one jump at sample 6
  Mat pre = v;
  v.bottomRows(6).rowwise() += Vec::Constant(3, 0.7).transpose();
  pre.bottomRows(5).rowwise() += Vec::Constant(3, 0.7).transpose();
  const RoughPath x = marcus_lift(CadlagPath(oracle::uniform_times(12), v, pre));
  const std::string text = rough_path_json(x);
  const auto j = nlohmann::json::parse(text);
  CHECK(j.at("times").size() == 12);
  CHECK(j.at("level2").at(0).size() == 9);
  const RoughPath back = parse_rough_path_json(text);
  REQUIRE(back.size() == x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    CHECK(back.points()[i].level1 == x.points()[i].level1);
    CHECK(back.points()[i].level2 == x.points()[i].level2);
  }
  CHECK(back.jump_indices() == x.jump_indices());
  CHECK_THROWS_AS(parse_rough_path_json("{\"times\": [0, 1]}"), ValidationError);
  CHECK_THROWS_AS(parse_rough_path_json("not json"), ValidationError);
}

TEST_CASE("files and filter json") {
  const auto dir = std::filesystem::temp_directory_path() / "rf_test_io";
  std::filesystem::remove_all(dir);
  const auto file = dir / "sub" / "a.txt";
  write_text(file, "hello\n");
  CHECK(read_text(file) == "hello\n");
  CHECK_THROWS_AS(read_text(dir / "missing.txt"), ValidationError);
  FilterResult r;
  r.theta = 0.25;
  r.theta_se = 0.01;
  r.model_id = "linear_gaussian";
  r.f_name = "identity";
  r.particles = 10;
  const auto j = nlohmann::json::parse(filter_result_json(r));
  CHECK(j.at("theta").get<double>() == 0.25);
  CHECK(j.at("model").get<std::string>() == "linear_gaussian");
  std::filesystem::remove_all(dir);
}
