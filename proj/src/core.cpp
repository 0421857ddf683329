#include <cstdlib>
#include <string>

#include "lap/core.hpp"
#include "lap/policies.hpp"

namespace lap {

std::size_t default_state_budget() {
  if (const char* env = std::getenv("LAP_BUDGET_STATES")) {
    try {
      std::size_t pos = 0;
      unsigned long long v = std::stoull(env, &pos);
      if (pos == std::string(env).size() && v > 0) return static_cast<std::size_t>(v);
    } catch (const std::exception&) {
    }
    throw InvalidInput(std::string("LAP_BUDGET_STATES must be a positive integer, got '") + env + "'");
  }
  return 1000000;
}

const char* to_string(PolicyKind kind) {
  switch (kind) {
    case PolicyKind::Threshold: return "threshold";
    case PolicyKind::FixedIndex: return "fixed";
    case PolicyKind::OptimalBiased: return "optimal-biased";
    case PolicyKind::OptimalRational: return "optimal-rational";
    case PolicyKind::AcceptLast: return "accept-last";
  }
  return "?";
}

}  // namespace lap
