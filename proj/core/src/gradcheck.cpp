#include "tca/gradcheck.hpp"

#include <cmath>

#include "tca/error.hpp"

namespace tca {

double grad_check(const std::vector<ParamRef>& params, const std::function<double()>& loss_fn,
                  const GradMap& analytic, double eps) {
  double max_rel_err = 0.0;
  for (const ParamRef& p : params) {
    auto it = analytic.find(p.name);
    if (it == analytic.end()) {
      throw Error("grad_check: no analytic gradient for '" + p.name + "'");
    }
    const Matrix& g = it->second;
    if (!g.same_shape(*p.value)) {
      throw ShapeError("grad_check: gradient for '" + p.name + "' is " + g.shape_str() +
                       ", parameter is " + p.value->shape_str());
    }
    for (int i = 0; i < p.value->size(); ++i) {
      double& theta = p.value->data()[i];
      const double saved = theta;

      theta = saved + eps;
      const double up = loss_fn();
      theta = saved - eps;
      const double down = loss_fn();
      theta = saved;

      if (!std::isfinite(up) || !std::isfinite(down)) {
        throw Error("grad_check: non-finite loss while perturbing '" + p.name + "'");
      }
      const double numeric = (up - down) / (2.0 * eps);
      const double analytic_v = g.data()[i];
      const double denom = std::max(1e-8, std::fabs(analytic_v) + std::fabs(numeric));
      const double rel = std::fabs(analytic_v - numeric) / denom;
      if (rel > max_rel_err) max_rel_err = rel;
    }
  }
  return max_rel_err;
}

}  // namespace tca
