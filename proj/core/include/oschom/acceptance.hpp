#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

namespace oschom {

struct CriterionResult {
  int id = 0;
  std::string title;
  bool pass = false;
  double seconds = 0.0;
  double budget_seconds = 0.0;
  std::string detail;
};

struct AcceptanceOptions {
  int threads = 1;
  std::uint64_t seed = 20240607;
};

inline constexpr int kNumCriteria = 8;

CriterionResult run_criterion(int id, const AcceptanceOptions& opts = {});
std::vector<CriterionResult> run_acceptance(const AcceptanceOptions& opts = {},
                                            const std::function<void(const CriterionResult&)>& on_result = {});

// "PASS 3 <title> (12.3 s of 60 s): <detail>"
std::string format_result(const CriterionResult& r);

}  // namespace oschom
