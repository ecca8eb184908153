#include "population.hpp"

#include <cmath>
#include <exception>
#include <sstream>
#include <thread>

#include "gsasvr/error.hpp"

namespace gsasvr::detail {

std::vector<double> evaluate_all(const Objective& objective,
                                 const std::vector<std::vector<double>>& positions,
                                 std::size_t jobs) {
  const std::size_t n = positions.size();
  std::vector<double> fitness(n);
  std::vector<std::exception_ptr> failures(n);

  auto run = [&](std::size_t first, std::size_t step) {
    for (std::size_t i = first; i < n; i += step) {
      try {
        fitness[i] = objective(positions[i]);
      } catch (...) {
        failures[i] = std::current_exception();
      }
    }
  };

  const std::size_t workers = std::max<std::size_t>(1, std::min(jobs, n));
  if (workers == 1) {
    run(0, 1);
  } else {
    std::vector<std::jthread> pool;
    pool.reserve(workers);
    for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(run, w, workers);
  }

  for (std::size_t i = 0; i < n; ++i) {
    if (failures[i]) std::rethrow_exception(failures[i]);
    if (!std::isfinite(fitness[i])) {
      std::ostringstream msg;
      msg.precision(17);
      msg << "objective returned " << fitness[i] << " at position (";
      for (std::size_t k = 0; k < positions[i].size(); ++k)
        msg << (k ? ", " : "") << positions[i][k];
      msg << ")";
      throw EvaluationError(msg.str());
    }
  }
  return fitness;
}

bool Incumbent::offer(const std::vector<std::vector<double>>& positions,
                      const std::vector<double>& fitness) {
  const bool first_batch = empty_;
  bool improved = false;
  for (std::size_t i = 0; i < positions.size(); ++i) {
    if (empty_ || fitness[i] < result_.best_fitness) {
      result_.best_fitness = fitness[i];
      result_.best_position = positions[i];
      improved = !first_batch;
      empty_ = false;
    }
  }
  result_.evaluations += positions.size();
  return improved;
}

}  // namespace gsasvr::detail
