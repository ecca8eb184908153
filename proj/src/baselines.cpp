#include <algorithm>
#include <cmath>
#include <numeric>

#include "gsasvr/error.hpp"
#include "gsasvr/optimizer.hpp"
#include "population.hpp"

namespace gsasvr {

namespace {

using Positions = std::vector<std::vector<double>>;

Positions initial_positions(const SearchSpace& space, const OptimizerConfig& cfg, Rng& rng) {
  Positions positions;
  for (auto& agent : init_agents(space, cfg.population, rng))
    positions.push_back(std::move(agent.position));
  return positions;
}

OptimizationResult random_search(const Objective& objective, const SearchSpace& space,
                                 const OptimizerConfig& cfg, const ProgressCallback& progress) {
  Rng rng(cfg.seed);
  auto positions = initial_positions(space, cfg, rng);
  detail::Incumbent best;
  best.offer(positions, detail::evaluate_all(objective, positions, cfg.jobs));
  best.record();
  for (std::size_t t = 1; t <= cfg.max_iterations; ++t) {
    positions = initial_positions(space, cfg, rng);
    best.offer(positions, detail::evaluate_all(objective, positions, cfg.jobs));
    best.record();
    if (progress) progress(t, best.fitness());
  }
  return best.take();
}

constexpr double kInertia = 0.72;
constexpr double kCognitive = 1.49;
constexpr double kSocial = 1.49;
constexpr double kVelocityFraction = 0.2;  // |v_j| <= 0.2 (ub_j - lb_j)

OptimizationResult particle_swarm(const Objective& objective, const SearchSpace& space,
                                  const OptimizerConfig& cfg, const ProgressCallback& progress) {
  Rng rng(cfg.seed);
  const std::size_t k = space.dimension();
  auto positions = initial_positions(space, cfg, rng);
  Positions velocity(positions.size(), std::vector<double>(k, 0.0));

  auto fitness = detail::evaluate_all(objective, positions, cfg.jobs);
  Positions personal = positions;
  auto personal_fitness = fitness;
  detail::Incumbent best;
  best.offer(positions, fitness);
  best.record();

  for (std::size_t t = 1; t <= cfg.max_iterations; ++t) {
    const auto global = best.position();
    for (std::size_t i = 0; i < positions.size(); ++i) {
      for (std::size_t j = 0; j < k; ++j) {
        const double vmax = kVelocityFraction * (space.upper[j] - space.lower[j]);
        double v = kInertia * velocity[i][j] +
                   kCognitive * rng.open_unit() * (personal[i][j] - positions[i][j]) +
                   kSocial * rng.open_unit() * (global[j] - positions[i][j]);
        v = std::clamp(v, -vmax, vmax);
        double x = positions[i][j] + v;
        if (x < space.lower[j] || x > space.upper[j]) {
          x = std::clamp(x, space.lower[j], space.upper[j]);
          v = 0.0;
        }
        velocity[i][j] = v;
        positions[i][j] = x;
      }
    }
    fitness = detail::evaluate_all(objective, positions, cfg.jobs);
    for (std::size_t i = 0; i < positions.size(); ++i) {
      if (fitness[i] < personal_fitness[i]) {
        personal_fitness[i] = fitness[i];
        personal[i] = positions[i];
      }
    }
    best.offer(positions, fitness);
    best.record();
    if (progress) progress(t, best.fitness());
  }
  return best.take();
}

OptimizationResult grey_wolf(const Objective& objective, const SearchSpace& space,
                             const OptimizerConfig& cfg, const ProgressCallback& progress) {
  Rng rng(cfg.seed);
  const std::size_t k = space.dimension();
  auto positions = initial_positions(space, cfg, rng);
  auto fitness = detail::evaluate_all(objective, positions, cfg.jobs);
  detail::Incumbent best;
  best.offer(positions, fitness);
  best.record();

  // Alpha, beta and delta wolves: the three best positions seen so far.
  Positions leaders;
  std::vector<double> leader_fitness;
  auto update_leaders = [&] {
    for (std::size_t i = 0; i < positions.size(); ++i) {
      leaders.push_back(positions[i]);
      leader_fitness.push_back(fitness[i]);
    }
    std::vector<std::size_t> order(leaders.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return leader_fitness[a] < leader_fitness[b]; });
    Positions top;
    std::vector<double> top_fitness;
    for (std::size_t r = 0; r < std::min<std::size_t>(3, order.size()); ++r) {
      top.push_back(leaders[order[r]]);
      top_fitness.push_back(leader_fitness[order[r]]);
    }
    leaders = std::move(top);
    leader_fitness = std::move(top_fitness);
  };
  update_leaders();

  for (std::size_t t = 1; t <= cfg.max_iterations; ++t) {
    const double a = 2.0 * (1.0 - static_cast<double>(t - 1) / static_cast<double>(cfg.max_iterations));
    for (auto& x : positions) {
      for (std::size_t j = 0; j < k; ++j) {
        double sum = 0.0;
        for (const auto& leader : leaders) {
          const double big_a = 2.0 * a * rng.open_unit() - a;
          const double big_c = 2.0 * rng.open_unit();
          const double dist = std::abs(big_c * leader[j] - x[j]);
          sum += leader[j] - big_a * dist;
        }
        x[j] = sum / static_cast<double>(leaders.size());
      }
      space.clamp(x);
    }
    fitness = detail::evaluate_all(objective, positions, cfg.jobs);
    best.offer(positions, fitness);
    update_leaders();
    best.record();
    if (progress) progress(t, best.fitness());
  }
  return best.take();
}

}  // namespace

OptimizationResult optimize_baseline(const Objective& objective, const SearchSpace& space,
                                     const OptimizerConfig& cfg,
                                     const ProgressCallback& progress) {
  space.validate();
  cfg.validate();
  switch (cfg.algorithm) {
    case Algorithm::RandomSearch: return random_search(objective, space, cfg, progress);
    case Algorithm::ParticleSwarm: return particle_swarm(objective, space, cfg, progress);
    case Algorithm::GreyWolf: return grey_wolf(objective, space, cfg, progress);
    case Algorithm::GoldenSine: break;
  }
  throw InputError("optimize_baseline: golden_sine is not a baseline");
}

}  // namespace gsasvr
