#include "gsasvr/pipeline.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <memory>
#include <mutex>
#include <sstream>
#include <thread>

#include "gsasvr/error.hpp"
#include "gsasvr/log.hpp"
#include "gsasvr/metrics.hpp"

namespace gsasvr {

std::string_view fitness_target_name(FitnessTarget t) {
  return t == FitnessTarget::TestSet ? "test_set" : "validation_split";
}

std::optional<FitnessTarget> parse_fitness_target(std::string_view s) {
  if (s == "test_set") return FitnessTarget::TestSet;
  if (s == "validation_split") return FitnessTarget::ValidationSplit;
  return std::nullopt;
}

std::string_view scaling_mode_name(ScalingMode m) {
  return m == ScalingMode::TrainOnly ? "train_only" : "full_series";
}

SearchSpace default_search_space() {
  const double lo = std::pow(4.0, -7.0);
  const double hi = std::pow(4.0, 4.0);
  return {{lo, lo, lo}, {hi, hi, 0.25}};
}

void TuneRequest::validate() const {
  series.validate();
  space.validate();
  if (space.dimension() != 3) throw InputError("search space must cover (C, gamma, epsilon)");
  if (!(space.lower[0] > 0.0 && space.lower[1] > 0.0))
    throw InputError("C and gamma bounds must be positive");
  if (space.lower[2] < 0.0) throw InputError("epsilon bounds must be non-negative");
  optimizer.validate();
  solver.validate();
  if (!(split_ratio > 0.0 && split_ratio < 1.0)) throw InputError("split ratio must lie in (0, 1)");
  if (!dates.empty() && dates.size() != series.values.size())
    throw InputError("dates must align with series values");
}

PreparedData prepare(const TuneRequest& request) {
  request.validate();
  const auto& values = request.series.values;

  PreparedData out;
  if (request.embedding) {
    out.spec = *request.embedding;
  } else {
    const auto& est = request.estimation;
    const std::size_t max_delay = std::min(est.max_delay, values.size() >= 3 ? values.size() - 2 : 0);
    if (max_delay < 1) {
      std::ostringstream msg;
      msg << "series of length " << values.size() << " is too short to estimate an embedding"
          << " (minimum length 3)";
      throw EstimationError(msg.str());
    }
    const auto delay = estimate_delay_ami(request.series, max_delay, est.bins);
    const auto dim = estimate_dimension_fnn(request.series, delay.delay, est.max_dim, est.fnn);
    out.spec = {dim.dimension, delay.delay};
    out.estimated = true;
    out.delay_at_local_minimum = delay.local_minimum;
    out.dimension_below_cutoff = dim.below_cutoff;
    if (!delay.local_minimum)
      log_message(LogLevel::Warning, "AMI has no local minimum; using the maximum delay");
    if (!dim.below_cutoff)
      log_message(LogLevel::Warning, "false-neighbour fraction never fell below the cutoff");
  }

  if (out.spec.dimension < 1 || out.spec.delay < 1) throw InputError("embedding m and tau must be >= 1");
  // Need at least two rows so that both sides of the split are non-empty.
  const std::size_t min_length = out.spec.minimum_length() + 1;
  if (values.size() < min_length) {
    std::ostringstream msg;
    msg << "series '" << request.series.label << "' has " << values.size()
        << " values, too short for m=" << out.spec.dimension << ", tau=" << out.spec.delay
        << " (minimum length " << min_length << ")";
    throw DataError(msg.str());
  }

  const auto embedded = reconstruct(request.series, out.spec);
  try {
    out.raw = split_chronological(embedded, request.split_ratio);
  } catch (const InputError& e) {
    throw DataError(e.what());
  }

  if (request.scaling == ScalingMode::FullSeries) {
    out.scaling = fit_minmax(values);
  } else {
    std::vector<double> seen(out.raw.train_x.values().begin(), out.raw.train_x.values().end());
    seen.insert(seen.end(), out.raw.train_y.begin(), out.raw.train_y.end());
    out.scaling = fit_minmax(seen);
  }
  out.scaled = scale_split(out.raw, out.scaling);
  out.first_test_target = out.raw.train_y.size() + 1 + (out.spec.dimension - 1) * out.spec.delay;
  return out;
}

namespace {

struct ObjectiveData {
  TrainingSet train;
  Matrix score_x;
  std::vector<double> score_y;
  SolverConfig solver;
};

}  // namespace

Objective objective_from_split(const SplitDataset& split, const SolverConfig& solver,
                               FitnessTarget target, double validation_ratio) {
  auto data = std::make_shared<ObjectiveData>();
  data->solver = solver;
  if (target == FitnessTarget::TestSet) {
    data->train = {split.train_x, split.train_y};
    data->score_x = split.test_x;
    data->score_y = split.test_y;
  } else {
    const std::size_t rows = split.train_y.size();
    const std::size_t fit_rows = train_row_count(rows, validation_ratio);
    if (fit_rows < 2 || fit_rows >= rows)
      throw DataError("training partition too small for a validation split");
    data->train = {split.train_x.slice_rows(0, fit_rows),
                   {split.train_y.begin(), split.train_y.begin() + static_cast<std::ptrdiff_t>(fit_rows)}};
    data->score_x = split.train_x.slice_rows(fit_rows, rows);
    data->score_y.assign(split.train_y.begin() + static_cast<std::ptrdiff_t>(fit_rows), split.train_y.end());
  }
  data->train.validate();

  return [data](std::span<const double> p) -> double {
    const SvrParams params{p[0], p[1], p[2]};
    try {
      const auto model = train(data->train, params, data->solver);
      const auto predicted = predict_batch(model, data->score_x);
      return mse({data->score_y, predicted});
    } catch (const TrainingError& e) {
      std::ostringstream msg;
      msg.precision(9);
      msg << "training failed at C=" << params.c << " gamma=" << params.gamma
          << " epsilon=" << params.epsilon << ": " << e.what();
      log_message(LogLevel::Warning, msg.str());
      return kTrainingFailurePenalty;
    }
  };
}

TuneReport run_tune(const TuneRequest& request) { return run_tune(request, prepare(request)); }

TuneReport run_tune(const TuneRequest& request, const PreparedData& prepared) {
  const auto started = std::chrono::steady_clock::now();

  const auto objective =
      objective_from_split(prepared.scaled, request.solver, request.fitness_target, request.split_ratio);
  const auto result = optimize(objective, request.space, request.optimizer, request.progress);

  const SvrParams best{result.best_position[0], result.best_position[1], result.best_position[2]};
  const auto model = train({prepared.scaled.train_x, prepared.scaled.train_y}, best, request.solver);
  const auto scaled_pred = predict_batch(model, prepared.scaled.test_x);

  const auto finished = std::chrono::steady_clock::now();

  TuneReport report;
  report.dataset = request.series.label;
  report.embedding = prepared.spec;
  report.optimizer = std::string(algorithm_name(request.optimizer.algorithm));
  report.seed = request.optimizer.seed;
  report.params = best;
  report.cost_seconds = std::chrono::duration<double>(finished - started).count();
  report.fitness_history = result.history;

  std::vector<double> actual, predicted;
  for (std::size_t i = 0; i < scaled_pred.size(); ++i) {
    ForecastPoint fp;
    fp.actual = prepared.raw.test_y[i];
    fp.predicted = invert_minmax(scaled_pred[i], prepared.scaling);
    if (!request.dates.empty()) fp.date = request.dates[prepared.first_test_target + i];
    actual.push_back(fp.actual);
    predicted.push_back(fp.predicted);
    report.forecasts.push_back(std::move(fp));
  }
  report.mse = mse({actual, predicted});
  report.mape = mape({actual, predicted});
  report.scaled_mse = mse({prepared.scaled.test_y, scaled_pred});
  try {
    report.scaled_mape = mape({prepared.scaled.test_y, scaled_pred});
  } catch (const InputError&) {
    report.scaled_mape = std::numeric_limits<double>::quiet_NaN();
  }

  report.fitness_target = std::string(fitness_target_name(request.fitness_target));
  report.scaling = std::string(scaling_mode_name(request.scaling));
  report.train_rows = prepared.raw.train_y.size();
  report.test_rows = prepared.raw.test_y.size();
  report.population = request.optimizer.population;
  report.iterations = request.optimizer.max_iterations;
  report.evaluations = result.evaluations;
  report.support_vectors = model.support_count();
  report.space = request.space;
  return report;
}

CompareReport run_compare(const TuneRequest& base, const std::vector<Algorithm>& algorithms,
                          std::size_t jobs) {
  if (algorithms.empty()) throw InputError("compare needs at least one optimizer");
  const auto prepared = prepare(base);

  // Unique labels so that repeated algorithms stay distinguishable.
  std::vector<std::string> labels;
  for (auto a : algorithms) {
    std::string name(algorithm_name(a));
    const auto seen = std::count_if(labels.begin(), labels.end(), [&](const std::string& l) {
      return l == name || l.starts_with(name + "#");
    });
    labels.push_back(seen == 0 ? name : name + "#" + std::to_string(seen + 1));
  }

  const std::size_t count = algorithms.size();
  std::vector<std::optional<TuneReport>> reports(count);
  std::vector<std::string> errors(count);
  const std::size_t workers = std::max<std::size_t>(1, std::min(jobs, count));

  auto run_member = [&](std::size_t i) {
    TuneRequest req = base;
    req.optimizer.algorithm = algorithms[i];
    if (workers > 1) {
      req.optimizer.jobs = 1;
      req.progress = {};
    }
    try {
      reports[i] = run_tune(req, prepared);
    } catch (const Error& e) {
      errors[i] = e.what();
    }
  };
  if (workers == 1) {
    for (std::size_t i = 0; i < count; ++i) run_member(i);
  } else {
    std::vector<std::jthread> pool;
    for (std::size_t w = 0; w < workers; ++w)
      pool.emplace_back([&, w] {
        for (std::size_t i = w; i < count; i += workers) run_member(i);
      });
  }

  CompareReport out;
  out.dataset = base.series.label;
  out.embedding = prepared.spec;
  out.seed = base.optimizer.seed;

  std::vector<std::size_t> ok;
  for (std::size_t i = 0; i < count; ++i) {
    if (!reports[i]) {
      out.failed.emplace_back(labels[i], errors[i]);
      log_message(LogLevel::Warning, "optimizer " + labels[i] + " failed: " + errors[i]);
      continue;
    }
    ok.push_back(i);
    const auto& r = *reports[i];
    out.table.push_back({labels[i], r.params, r.mse, r.mape, r.cost_seconds});
  }
  std::stable_sort(out.table.begin(), out.table.end(), [](const CompareRow& a, const CompareRow& b) {
    return a.mse != b.mse ? a.mse < b.mse : a.model < b.model;
  });

  auto residuals = [](const TuneReport& r) {
    std::vector<double> e;
    for (const auto& f : r.forecasts) e.push_back(f.actual - f.predicted);
    return e;
  };
  for (std::size_t a : ok) out.dm_matrix[labels[a]][labels[a]] = std::nullopt;
  for (std::size_t ia = 0; ia < ok.size(); ++ia) {
    for (std::size_t ib = ia + 1; ib < ok.size(); ++ib) {
      const auto& la = labels[ok[ia]];
      const auto& lb = labels[ok[ib]];
      try {
        const double stat = diebold_mariano(residuals(*reports[ok[ia]]), residuals(*reports[ok[ib]])).statistic;
        out.dm_matrix[la][lb] = stat;
        out.dm_matrix[lb][la] = -stat;
      } catch (const DegenerateComparisonError&) {
        out.dm_matrix[la][lb] = std::nullopt;
        out.dm_matrix[lb][la] = std::nullopt;
        out.degenerate.emplace_back(la, lb);
        log_message(LogLevel::Warning, "Diebold-Mariano degenerate for " + la + " vs " + lb);
      }
    }
  }
  for (std::size_t i : ok) out.members.push_back(std::move(*reports[i]));
  return out;
}

}  // namespace gsasvr
