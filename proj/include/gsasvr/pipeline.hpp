#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "gsasvr/embedding.hpp"
#include "gsasvr/optimizer.hpp"
#include "gsasvr/svr.hpp"

namespace gsasvr {

/// Partition on which the tuning objective is scored.
enum class FitnessTarget {
  TestSet,          // score on the test rows (reproduces the original protocol)
  ValidationSplit,  // score on the chronological tail of the training rows
};

/// Where the min/max scaling statistics come from.
enum class ScalingMode {
  TrainOnly,   // raw values that appear in training rows
  FullSeries,  // the whole series, before splitting
};

std::string_view fitness_target_name(FitnessTarget t);
std::optional<FitnessTarget> parse_fitness_target(std::string_view s);
std::string_view scaling_mode_name(ScalingMode m);

/// Penalty returned by the objective when SVR training fails.
inline constexpr double kTrainingFailurePenalty = 1e3;

/// C and gamma in [4^-7, 4^4], epsilon in [4^-7, 0.25].
SearchSpace default_search_space();

struct EmbeddingEstimation {
  std::size_t max_delay = 30;
  std::size_t bins = 0;  // 0 = Sturges
  std::size_t max_dim = 15;
  FnnOptions fnn;
};

struct TuneRequest {
  TimeSeries series;
  std::vector<std::string> dates;  // optional, one per series value
  std::optional<EmbeddingSpec> embedding;  // estimated when absent
  EmbeddingEstimation estimation;
  SearchSpace space = default_search_space();
  OptimizerConfig optimizer;
  double split_ratio = 0.8;
  FitnessTarget fitness_target = FitnessTarget::TestSet;
  ScalingMode scaling = ScalingMode::TrainOnly;
  SolverConfig solver;
  ProgressCallback progress;

  void validate() const;
};

/// Everything computed before the optimizer runs.
struct PreparedData {
  EmbeddingSpec spec;
  bool estimated = false;
  bool delay_at_local_minimum = true;
  bool dimension_below_cutoff = true;
  SplitDataset raw;     // unscaled
  SplitDataset scaled;  // what the SVR sees
  MinMaxScaling scaling;
  std::size_t first_test_target = 0;  // series index of test_y[0]
};

/// Estimates (or accepts) the embedding, reconstructs, splits and scales.
PreparedData prepare(const TuneRequest& request);

/// Maps (C, gamma, epsilon) to the MSE on the fitness partition of a scaled
/// split. Training failures return kTrainingFailurePenalty and are logged.
Objective objective_from_split(const SplitDataset& split, const SolverConfig& solver,
                               FitnessTarget target = FitnessTarget::TestSet,
                               double validation_ratio = 0.8);

struct ForecastPoint {
  std::optional<std::string> date;
  double actual = 0.0;     // raw units
  double predicted = 0.0;  // raw units
};

struct TuneReport {
  std::string dataset;
  EmbeddingSpec embedding;
  std::string optimizer;
  std::uint64_t seed = 0;
  SvrParams params;
  double mse = 0.0;   // raw units, over forecasts
  double mape = 0.0;  // fraction, over forecasts
  double cost_seconds = 0.0;
  std::vector<double> fitness_history;
  std::vector<ForecastPoint> forecasts;

  // Run context.
  double scaled_mse = 0.0;
  double scaled_mape = 0.0;
  std::string fitness_target;
  std::string scaling;
  std::size_t train_rows = 0;
  std::size_t test_rows = 0;
  std::size_t population = 0;
  std::size_t iterations = 0;
  std::size_t evaluations = 0;
  std::size_t support_vectors = 0;
  SearchSpace space;
};

TuneReport run_tune(const TuneRequest& request);
TuneReport run_tune(const TuneRequest& request, const PreparedData& prepared);

struct CompareRow {
  std::string model;
  SvrParams params;
  double mse = 0.0;
  double mape = 0.0;
  double cost_seconds = 0.0;
};

struct CompareReport {
  std::string dataset;
  EmbeddingSpec embedding;
  std::uint64_t seed = 0;
  std::vector<CompareRow> table;  // ascending MSE
  // dm[a][b] = DM statistic of a against b; nullopt for degenerate pairs.
  std::map<std::string, std::map<std::string, std::optional<double>>> dm_matrix;
  std::vector<std::pair<std::string, std::string>> failed;  // (optimizer, reason)
  std::vector<std::pair<std::string, std::string>> degenerate;  // identical-loss pairs
  std::vector<TuneReport> members;
};

/// Runs one tune per algorithm on shared prepared data and compares them.
/// Members may run on up to `jobs` threads.
CompareReport run_compare(const TuneRequest& base, const std::vector<Algorithm>& algorithms,
                          std::size_t jobs = 1);

}  // namespace gsasvr
