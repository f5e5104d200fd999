#pragma once

// Invariant suites over the bounds, the W oracle and integrated trajectories.

#include <cstdint>
#include <ostream>
#include <string>
#include <vector>

#include "lvb/bounds.hpp"

namespace lvb {

inline constexpr std::uint64_t kDefaultSeed = 20240611;

struct SuiteResult {
  std::string name;
  long checks = 0;
  long failures = 0;
  double worst_margin = 0.0;  // smallest slack over all checks
  std::string worst_at;       // where the smallest slack occurred
  std::string note;

  bool passed() const { return failures == 0; }
};

struct VerifyOptions {
  std::uint64_t seed = kDefaultSeed;
  // Scales c of the tangent-at-e family by 1.2; used as a negative control.
  bool corrupt_coefficient = false;
};

struct VerifyReport {
  std::vector<SuiteResult> suites;

  bool passed() const;
  void print(std::ostream& out) const;
};

// Families with one deliberately wrong coefficient.
PadeFamilies corrupted_families();

VerifyReport run_invariant_suites(const VerifyOptions& options);

}  // namespace lvb
