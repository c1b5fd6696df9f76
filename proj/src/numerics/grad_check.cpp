#include "schemaqa/numerics/grad_check.hpp"

#include <algorithm>
#include <cmath>

namespace schemaqa::numerics {

double grad_check(const std::function<double()>& loss_fn, const std::vector<Tensor*>& params,
                  const std::vector<Tensor>& analytic, double h) {
    if (params.size() != analytic.size()) {
        throw Error("grad_check: analytic gradient count does not match parameter count");
    }
    if (h < 1e-6 || h > 1e-3) throw Error("grad_check: step size outside [1e-6, 1e-3]");
    double worst = 0.0;
    for (std::size_t p = 0; p < params.size(); ++p) {
        Tensor& param = *params[p];
        if (!param.same_shape(analytic[p])) {
            throw Error("grad_check: analytic gradient shape mismatch at parameter " +
                        std::to_string(p));
        }
        for (std::size_t i = 0; i < param.size(); ++i) {
            double orig = param[i];
            param[i] = orig + h;
            double up = loss_fn();
            param[i] = orig - h;
            double down = loss_fn();
            param[i] = orig;
            if (!std::isfinite(up) || !std::isfinite(down)) {
                throw Error("grad_check: non-finite loss during perturbation");
            }
            double fd = (up - down) / (2.0 * h);
            double g = analytic[p][i];
            double denom = std::max({1.0, std::fabs(fd), std::fabs(g)});
            worst = std::max(worst, std::fabs(fd - g) / denom);
        }
    }
    return worst;
}

}  // namespace schemaqa::numerics
