#pragma once

#include <cstdint>
#include <functional>
#include <ostream>
#include <string>
#include <vector>

#include "covqec/linalg.hpp"

namespace covqec::verify {

struct Check {
  std::string what;
  double measured = 0.0;
  double expected = 0.0;
  double tolerance = 0.0;
  bool pass = false;
  // |measured - expected| / tolerance, or the one-sided analogue; > 1 fails.
  double load = 0.0;
};

struct CriterionResult {
  int id = 0;
  std::string title;
  std::vector<std::string> tags;
  std::vector<Check> checks;
  std::string error; // exception text, if the criterion threw
  double seconds = 0.0;

  bool pass() const;
  // Check with the largest load, for the one-line summary.
  const Check* worst() const;
};

struct SuiteOptions {
  // Comma separated criterion numbers or tags; empty runs everything.
  std::string filter;
  // Every tolerance is multiplied by this factor. Values below 1 are the
  // perturbed-tolerance test mode.
  double tolerance_scale = 1.0;
  std::uint64_t seed = kDefaultSeed;
};

struct CriterionInfo {
  int id;
  std::string title;
  std::vector<std::string> tags;
};
std::vector<CriterionInfo> criteria();

bool selected(const CriterionInfo& c, const std::string& filter);

// Runs the selected criteria in order; if `out` is given each line is printed as
// soon as its criterion finishes.
std::vector<CriterionResult> run_suite(const SuiteOptions& options, std::ostream* out = nullptr,
                                       bool verbose = false);

std::string format_line(const CriterionResult& r);

} // namespace covqec::verify
