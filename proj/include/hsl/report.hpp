#pragma once

// Check records and suite reports. Records carry no timestamps so reports are
// byte-identical across runs and thread counts.

#include <algorithm>
#include <string>
#include <vector>

#include "hsl/json_io.hpp"

namespace hsl {

struct CheckRecord {
  std::string id;
  Json inputs = Json::object();
  Json expected;
  Json got;
  bool pass = false;

  [[nodiscard]] Json to_json() const {
    return Json::object({{"id", id}, {"inputs", inputs}, {"expected", expected}, {"got", got}, {"pass", pass}});
  }
};

struct Report {
  std::string suite;
  std::vector<CheckRecord> checks;

  [[nodiscard]] bool pass() const {
    return std::all_of(checks.begin(), checks.end(), [](const CheckRecord& c) { return c.pass; });
  }
  [[nodiscard]] std::size_t failures() const {
    return static_cast<std::size_t>(
        std::count_if(checks.begin(), checks.end(), [](const CheckRecord& c) { return !c.pass; }));
  }
  void append(const Report& other) { checks.insert(checks.end(), other.checks.begin(), other.checks.end()); }

  [[nodiscard]] Json to_json() const {
    Json arr = Json::array();
    for (const auto& c : checks) arr.push_back(c.to_json());
    return Json::object({{"suite", suite}, {"pass", pass()}, {"failures", failures()}, {"checks", arr}});
  }
};

}  // namespace hsl
