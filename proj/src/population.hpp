#pragma once

// Helpers shared by the population-based optimizers.

#include <cstddef>
#include <vector>

#include "gsasvr/optimizer.hpp"

namespace gsasvr::detail {

/// Evaluates every position, possibly on several threads. Positions are only
/// read; the RNG never leaves the calling thread. Throws EvaluationError for
/// the lowest-indexed non-finite result.
std::vector<double> evaluate_all(const Objective& objective,
                                 const std::vector<std::vector<double>>& positions,
                                 std::size_t jobs);

/// Tracks the incumbent and the history/evaluation counters.
class Incumbent {
 public:
  // Returns true when some fitness strictly improves on the incumbent.
  bool offer(const std::vector<std::vector<double>>& positions, const std::vector<double>& fitness);
  void record() { result_.history.push_back(result_.best_fitness); }

  const std::vector<double>& position() const noexcept { return result_.best_position; }
  double fitness() const noexcept { return result_.best_fitness; }
  OptimizationResult take() { return std::move(result_); }

 private:
  bool empty_ = true;
  OptimizationResult result_;
};

}  // namespace gsasvr::detail
