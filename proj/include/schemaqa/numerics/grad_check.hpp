#pragma once
// Central finite-difference gradient verification. Every analytic backward
// pass in the system is held to this check.

#include <functional>
#include <vector>

#include "schemaqa/numerics/tensor.hpp"

namespace schemaqa::numerics {

// loss_fn evaluates the scalar loss at the current contents of params.
// analytic[i] holds the claimed gradient for *params[i]. Returns the worst
// relative error |fd - g| / max(1, |fd|, |g|) over all coordinates.
double grad_check(const std::function<double()>& loss_fn, const std::vector<Tensor*>& params,
                  const std::vector<Tensor>& analytic, double h = 1e-5);

}  // namespace schemaqa::numerics
