#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "gsasvr/error.hpp"
#include "gsasvr/optimizer.hpp"
#include "population.hpp"

namespace gsasvr {

using std::numbers::pi;

void SearchSpace::validate() const {
  if (lower.size() != upper.size())
    throw InputError("search space bounds have different dimensions");
  if (lower.empty()) throw InputError("search space must have at least one dimension");
  for (std::size_t i = 0; i < lower.size(); ++i) {
    if (!std::isfinite(lower[i]) || !std::isfinite(upper[i]) || !(lower[i] < upper[i])) {
      std::ostringstream msg;
      msg << "search space dimension " << i << " needs lower < upper (got " << lower[i] << ", "
          << upper[i] << ")";
      throw InputError(msg.str());
    }
  }
}

bool SearchSpace::contains(std::span<const double> x) const {
  if (x.size() != lower.size()) return false;
  for (std::size_t i = 0; i < x.size(); ++i)
    if (!(x[i] >= lower[i] && x[i] <= upper[i])) return false;
  return true;
}

void SearchSpace::clamp(std::span<double> x) const {
  for (std::size_t i = 0; i < x.size(); ++i) x[i] = std::clamp(x[i], lower[i], upper[i]);
}

double golden_ratio() { return (std::sqrt(5.0) - 1.0) / 2.0; }

namespace {

GoldenCoefficients from_interval(double a, double width) {
  const double tau = golden_ratio();
  return {a, a + width, a + (1.0 - tau) * width, a + tau * width, tau, width};
}

constexpr double kMinIntervalWidth = 1e-12;

}  // namespace

GoldenCoefficients GoldenCoefficients::initial() { return from_interval(-pi, 2.0 * pi); }

std::string_view algorithm_name(Algorithm a) {
  switch (a) {
    case Algorithm::GoldenSine: return "golden_sine";
    case Algorithm::RandomSearch: return "random_search";
    case Algorithm::ParticleSwarm: return "particle_swarm";
    case Algorithm::GreyWolf: return "grey_wolf";
  }
  return "unknown";
}

std::optional<Algorithm> parse_algorithm(std::string_view name) {
  for (auto a : {Algorithm::GoldenSine, Algorithm::RandomSearch, Algorithm::ParticleSwarm,
                 Algorithm::GreyWolf})
    if (algorithm_name(a) == name) return a;
  return std::nullopt;
}

void OptimizerConfig::validate() const {
  if (population < 2) throw InputError("population must be at least 2");
  if (max_iterations < 1) throw InputError("max_iterations must be at least 1");
}

std::vector<AgentState> init_agents(const SearchSpace& space, std::size_t n, Rng& rng) {
  space.validate();
  std::vector<AgentState> agents(n);
  for (auto& agent : agents) {
    agent.position.resize(space.dimension());
    for (std::size_t i = 0; i < space.dimension(); ++i)
      agent.position[i] = space.lower[i] + (space.upper[i] - space.lower[i]) * rng.open_unit();
  }
  return agents;
}

std::vector<double> golden_sine_step(std::span<const double> v, std::span<const double> d,
                                     double r1, double r2, double x1, double x2) {
  if (v.size() != d.size()) throw InputError("golden_sine_step: dimension mismatch");
  const double s = std::sin(r1);
  const double abs_s = std::abs(s);
  std::vector<double> out(v.size());
  for (std::size_t j = 0; j < v.size(); ++j)
    out[j] = v[j] * abs_s - r2 * s * std::abs(x1 * d[j] - x2 * v[j]);
  return out;
}

GoldenCoefficients ensure_distinct(GoldenCoefficients coeffs, Rng& rng) {
  if (coeffs.x1 != coeffs.x2) return coeffs;
  coeffs.a = -pi;
  coeffs.b = pi;
  coeffs.width = 2.0 * pi;
  // x1 in [0, pi] and x2 in [-pi, 0] are disjoint except at 0, and open_unit
  // never returns 0.
  coeffs.x1 = pi * rng.open_unit();
  coeffs.x2 = -pi * rng.open_unit();
  return coeffs;
}

GoldenCoefficients update_golden_coefficients(const GoldenCoefficients& coeffs, bool improved,
                                              Rng& rng) {
  double a = coeffs.a, width = coeffs.width;
  if (width < kMinIntervalWidth) {
    a = -pi;
    width = 2.0 * pi;
  }
  const double tau = golden_ratio();
  if (!improved) a += (1.0 - tau) * width;  // a <- x1, otherwise b <- x2
  width *= tau;
  return ensure_distinct(from_interval(a, width), rng);
}

// ---------------------------------------------------------------------------

namespace {

OptimizationResult optimize_golden_sine(const Objective& objective, const SearchSpace& space,
                                        const OptimizerConfig& cfg,
                                        const ProgressCallback& progress) {
  Rng rng(cfg.seed);
  std::vector<std::vector<double>> positions;
  for (auto& agent : init_agents(space, cfg.population, rng))
    positions.push_back(std::move(agent.position));

  detail::Incumbent best;
  best.offer(positions, detail::evaluate_all(objective, positions, cfg.jobs));
  best.record();

  auto coeffs = GoldenCoefficients::initial();
  for (std::size_t t = 1; t <= cfg.max_iterations; ++t) {
    const auto target = best.position();
    for (auto& v : positions) {
      const double r1 = 2.0 * pi * rng.open_unit();
      const double r2 = pi * rng.open_unit();
      v = golden_sine_step(v, target, r1, r2, coeffs.x1, coeffs.x2);
      space.clamp(v);
    }
    const bool improved = best.offer(positions, detail::evaluate_all(objective, positions, cfg.jobs));
    coeffs = update_golden_coefficients(coeffs, improved, rng);
    best.record();
    if (progress) progress(t, best.fitness());
  }
  return best.take();
}

}  // namespace

OptimizationResult optimize(const Objective& objective, const SearchSpace& space,
                            const OptimizerConfig& cfg, const ProgressCallback& progress) {
  space.validate();
  cfg.validate();
  if (cfg.algorithm == Algorithm::GoldenSine)
    return optimize_golden_sine(objective, space, cfg, progress);
  return optimize_baseline(objective, space, cfg, progress);
}

}  // namespace gsasvr
