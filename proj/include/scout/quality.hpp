#pragma once

#include <string>
#include <vector>

#include "scout/core.hpp"

namespace scout {

/// Structured verdict on one answer: completeness of the core conceptual
/// elements, breadth across subtopics, the unresolved gaps, and targeted
/// follow-up queries for the next refinement round.
struct QualityReport {
  double completeness = 0.0;
  double breadth = 0.0;
  std::vector<std::string> gaps;
  std::vector<Query> followups;

  bool operator==(const QualityReport&) const = default;
};

inline double overall_quality(const QualityReport& report) {
  return (report.completeness + report.breadth) / 2.0;
}

}  // namespace scout
