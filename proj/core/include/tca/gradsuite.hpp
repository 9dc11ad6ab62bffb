#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace tca {

struct GradSuiteResult {
  std::string name;
  double max_rel_err = 0.0;
};

// Central finite-difference verification of every backward pass in the
// library on small random shapes (n, g <= 8): each dense activation, the
// temporal contextual layer, the feed-forward attention baseline, both
// full architectures with their losses, and the sparsity penalty.
//
// Configurations that land a relu pre-activation within 1e-4 of zero are
// resampled (the two-sided difference straddles the subgradient there);
// the resample path is deterministic in the seed.
std::vector<GradSuiteResult> run_gradient_suite(std::uint64_t seed);

// Convenience: true iff every entry is below the threshold.
bool gradient_suite_passes(const std::vector<GradSuiteResult>& results, double threshold = 1e-6);

}  // namespace tca
