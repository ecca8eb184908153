#include "kernel_fill.hpp"

#include <cmath>

namespace gsasvr::detail {

void exp_neg_scaled(double* values, std::size_t n, double gamma) {
#pragma omp simd
  for (std::size_t k = 0; k < n; ++k) values[k] = std::exp(-gamma * values[k]);
}

}  // namespace gsasvr::detail
