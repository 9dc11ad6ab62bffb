#pragma once

#include <functional>
#include <string>
#include <vector>

#include "tca/layers.hpp"
#include "tca/matrix.hpp"

namespace tca {

// Mutable view into one named parameter, used by the checker and the
// optimizer.
struct ParamRef {
  std::string name;
  Matrix* value = nullptr;
};

// Central finite differences against analytic gradients.
//
// loss_fn re-evaluates the scalar loss from the current parameter values;
// analytic holds the gradient for every name in params, computed at the
// unperturbed point. Each entry is perturbed by +-eps in place (and
// restored). Returns the maximum over entries of
//   |analytic - numeric| / max(1e-8, |analytic| + |numeric|).
//
// Throws Error if the loss is non-finite at any evaluation point. The
// caller is responsible for avoiding relu kinks (|pre-activation| below
// roughly eps), where the two-sided difference straddles the subgradient.
double grad_check(const std::vector<ParamRef>& params, const std::function<double()>& loss_fn,
                  const GradMap& analytic, double eps = 1e-5);

}  // namespace tca
