#pragma once

#include <filesystem>
#include <map>
#include <string>

#include "roughfilter/cadlag_path.hpp"
#include "roughfilter/filter.hpp"
#include "roughfilter/lift.hpp"
#include "roughfilter/rde.hpp"

namespace rf {

/// Shortest decimal text that parses back to the same double.
std::string format_double(double v);

/// CSV with header `t,v1..vd` and, when the path jumps or `with_pre` is set,
/// `pre_v1..pre_vd` for the left limits.
std::string path_csv(const CadlagPath& x, bool with_pre = true);
CadlagPath parse_path_csv(const std::string& text);

/// {"times": [...], "level1": [[...]], "level2": [[row-major d*d]], "jump_flags": [...]}
std::string rough_path_json(const RoughPath& x);
RoughPath parse_rough_path_json(const std::string& text);

/// `t,y1..ye,pre_y1..pre_ye`.
std::string solution_csv(const RdeSolution& s);

std::string filter_result_json(const FilterResult& r);

void write_text(const std::filesystem::path& file, const std::string& content);
std::string read_text(const std::filesystem::path& file);

}  // namespace rf
