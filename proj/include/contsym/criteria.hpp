#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

namespace contsym::criteria {

struct Options {
  std::uint64_t seed = 1;
};

struct Result {
  int id = 0;
  std::string title;
  std::string claim;  // statement being checked
  bool passed = false;
  std::string detail;
  double seconds = 0;
  double time_limit = 0;  // 0 when unbounded
};

/// Criterion ids in order (1..12).
std::vector<int> ids();
std::string title(int id);
std::string claim(int id);

/// Runs one criterion. Never throws; exceptions turn into failures.
Result run(int id, const Options& opts);
std::vector<Result> run_all(const Options& opts);

void to_json(nlohmann::json& j, const Result& r);

/// One line per criterion: "[PASS] 3  title  detail (1.23 s)".
std::string format_line(const Result& r);

}  // namespace contsym::criteria
