#pragma once

#include <cstddef>

namespace gsasvr::detail {

// values[k] = exp(-gamma * values[k]) for k < n. Built with vector math so
// results may differ from std::exp by a few ulp.
void exp_neg_scaled(double* values, std::size_t n, double gamma);

}  // namespace gsasvr::detail
