#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace gsasvr {

/// Box bounds for a k-dimensional search.
struct SearchSpace {
  std::vector<double> lower;
  std::vector<double> upper;

  std::size_t dimension() const noexcept { return lower.size(); }
  // Throws InputError unless sizes match, k >= 1, lower[i] < upper[i], finite.
  void validate() const;
  bool contains(std::span<const double> x) const;
  void clamp(std::span<double> x) const;
};

struct AgentState {
  std::vector<double> position;
  double fitness = 0.0;
};

/// Golden-section coefficients steering the golden sine update.
/// x1 = a*tau + b*(1-tau) and x2 = a*(1-tau) + b*tau over the interval [a, b].
struct GoldenCoefficients {
  double a;
  double b;
  double x1;
  double x2;
  double tau;
  // b - a, carried separately so that repeated contraction does not lose
  // precision against endpoints of magnitude ~pi.
  double width;

  static GoldenCoefficients initial();
};

/// (sqrt(5) - 1) / 2.
double golden_ratio();

enum class Algorithm { GoldenSine, RandomSearch, ParticleSwarm, GreyWolf };

std::string_view algorithm_name(Algorithm a);
std::optional<Algorithm> parse_algorithm(std::string_view name);

struct OptimizerConfig {
  std::size_t population = 20;
  std::size_t max_iterations = 50;
  std::uint64_t seed = 42;
  Algorithm algorithm = Algorithm::GoldenSine;
  // Worker threads for the per-iteration fitness evaluations.
  std::size_t jobs = 1;

  void validate() const;
};

struct OptimizationResult {
  std::vector<double> best_position;
  double best_fitness = 0.0;
  // Incumbent fitness after initialization (entry 0) and after each iteration.
  std::vector<double> history;
  std::size_t evaluations = 0;
};

using Objective = std::function<double(std::span<const double>)>;
using ProgressCallback = std::function<void(std::size_t iteration, double best_fitness)>;

/// The random source owned by an optimizer loop. Draws are built from raw
/// 64-bit outputs so that a seed reproduces bit-for-bit on every platform.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  // Uniform on the open interval (0, 1).
  double open_unit() { return (static_cast<double>(engine_() >> 11) + 0.5) * 0x1p-53; }
  double uniform(double lo, double hi) { return lo + (hi - lo) * open_unit(); }

 private:
  std::mt19937_64 engine_;
};

std::vector<AgentState> init_agents(const SearchSpace& space, std::size_t n, Rng& rng);

/// v'_j = v_j |sin r1| - r2 sin(r1) |x1 d_j - x2 v_j|. No clamping.
std::vector<double> golden_sine_step(std::span<const double> v, std::span<const double> d,
                                     double r1, double r2, double x1, double x2);

/// Narrows [a, b] by tau toward the low end when the incumbent improved and
/// toward the high end otherwise, then recomputes x1, x2. An interval
/// narrower than 1e-12 is reset to [-pi, pi] first.
GoldenCoefficients update_golden_coefficients(const GoldenCoefficients& coeffs, bool improved,
                                              Rng& rng);

/// If x1 == x2, redraws x1 in [0, pi] and x2 in [-pi, 0] and resets the
/// interval to [-pi, pi].
GoldenCoefficients ensure_distinct(GoldenCoefficients coeffs, Rng& rng);

/// Minimizes objective over space with the algorithm named in cfg. Throws
/// EvaluationError when the objective returns a non-finite value.
OptimizationResult optimize(const Objective& objective, const SearchSpace& space,
                            const OptimizerConfig& cfg, const ProgressCallback& progress = {});

/// Random search, particle swarm (inertia 0.72, acceleration 1.49) or grey
/// wolf (a decays linearly from 2 to 0). Same budget accounting as the golden
/// sine path. cfg.algorithm must not be GoldenSine.
OptimizationResult optimize_baseline(const Objective& objective, const SearchSpace& space,
                                     const OptimizerConfig& cfg,
                                     const ProgressCallback& progress = {});

}  // namespace gsasvr
