#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <random>
#include <sstream>

#include "gsasvr/error.hpp"
#include "gsasvr/log.hpp"
#include "gsasvr/metrics.hpp"
#include "gsasvr/pipeline.hpp"
#include "gsasvr/quotes.hpp"
#include "gsasvr/report.hpp"

using namespace gsasvr;

namespace {

const std::string kHeader = "Date,Open,High,Low,Close,Adj Close,Volume\n";

IngestResult ingest_text(const std::string& text) {
  std::istringstream in(text);
  return ingest_csv(in);
}

// Silences and records warnings for the lifetime of the object.
struct CaptureLog {
  std::vector<std::string> warnings;
  CaptureLog() {
    set_log_sink([this](LogLevel level, std::string_view msg) {
      if (level == LogLevel::Warning) warnings.emplace_back(msg);
    });
  }
  ~CaptureLog() { set_log_sink({}); }
};

TimeSeries noisy_sine(std::size_t n, std::uint64_t seed = 1) {
  std::mt19937_64 gen(seed);
  std::normal_distribution<double> g(0.0, 0.01);
  TimeSeries s;
  s.label = "sine";
  for (std::size_t i = 0; i < n; ++i)
    s.values.push_back(10.0 + std::sin(2.0 * std::numbers::pi * static_cast<double>(i) / 25.0) + g(gen));
  return s;
}

TuneRequest small_request(std::uint64_t seed = 3) {
  TuneRequest req;
  req.series = noisy_sine(160);
  req.embedding = EmbeddingSpec{3, 2};
  req.optimizer.population = 6;
  req.optimizer.max_iterations = 4;
  req.optimizer.seed = seed;
  return req;
}

std::filesystem::path temp_file(const std::string& name) {
  return std::filesystem::temp_directory_path() / ("gsasvr_test_pipeline_" + name);
}

}  // namespace

TEST(Ingest, WellFormedRows) {
  const auto r = ingest_text(kHeader +
                             "2020-01-02,1,2,0.5,1.5,1.4,100\n"
                             "2020-01-03,1.5,2,1,1.75,1.7,200\n"
                             "2020-01-06,1.75,2,1,1.8,1.8,300\n");
  ASSERT_EQ(r.records.size(), 3u);
  EXPECT_EQ(r.dropped_rows, 0u);
  EXPECT_TRUE(r.warnings.empty());
  EXPECT_EQ(r.records[0].date.to_string(), "2020-01-02");
  EXPECT_EQ(r.records[2].date.to_string(), "2020-01-06");
  EXPECT_EQ(r.records[1].close, 1.75);
  EXPECT_EQ(r.records[1].adj_close, 1.7);
  EXPECT_EQ(r.records[2].volume, 300);
  const auto s = series_from_quotes(r.records, PriceColumn::AdjClose, "x");
  EXPECT_EQ(s.values, (std::vector<double>{1.4, 1.7, 1.8}));
  EXPECT_EQ(s.label, "x");
}

TEST(Ingest, NullRowsDropped) {
  CaptureLog log;
  const auto r = ingest_text(kHeader +
                             "2020-01-02,1,2,0.5,1.5,1.4,100\n"
                             "2020-01-03,null,null,null,null,null,null\n"
                             "2020-01-06,1.75,2,1,1.8,1.8,300\n");
  EXPECT_EQ(r.records.size(), 2u);
  EXPECT_EQ(r.dropped_rows, 1u);
  ASSERT_EQ(log.warnings.size(), 1u);
  EXPECT_NE(log.warnings[0].find("dropped 1"), std::string::npos);
}

TEST(Ingest, OutOfOrderRowsSortedWithWarning) {
  CaptureLog log;
  const auto r = ingest_text(kHeader +
                             "2020-01-06,1,2,0.5,3,3,100\n"
                             "2020-01-02,1,2,0.5,1,1,100\n"
                             "2020-01-03,1,2,0.5,2,2,100\n");
  ASSERT_EQ(r.records.size(), 3u);
  EXPECT_EQ(series_from_quotes(r.records, PriceColumn::Close, "x").values, (std::vector<double>{1, 2, 3}));
  ASSERT_EQ(r.warnings.size(), 1u);
  EXPECT_EQ(log.warnings, r.warnings);
}

TEST(Ingest, CrlfAndBomAccepted) {
  const auto r = ingest_text("\xEF\xBB\xBF" "Date,Open,High,Low,Close,Adj Close,Volume\r\n"
                             "2020-01-02,1,2,0.5,1.5,1.4,100\r\n");
  EXPECT_EQ(r.records.size(), 1u);
}

TEST(Ingest, Errors) {
  EXPECT_THROW(ingest_text(""), DataError);
  EXPECT_THROW(ingest_text("\n\n"), DataError);
  EXPECT_THROW(ingest_text("Date,Close\n2020-01-02,1\n"), DataError);
  const auto expect_line = [](const std::string& text, const std::string& fragment) {
    try {
      ingest_text(text);
      FAIL() << text;
    } catch (const DataError& e) {
      EXPECT_NE(std::string(e.what()).find(fragment), std::string::npos) << e.what();
    }
  };
  expect_line(kHeader + "2020-01-02,1,2,0.5,1.5,1.4,100\n2020-02-30,1,2,0.5,1.5,1.4,100\n", "line 3");
  expect_line(kHeader + "2020-01-02,1,2,0.5,abc,1.4,100\n", "line 2: unparseable Close");
  expect_line(kHeader + "2020-01-02,1,2,0.5,1.5,1.4\n", "expected 7 fields");
  expect_line(kHeader + "2020-01-02,1,2,0.5,-1,1.4,100\n", "Close must be positive");
  expect_line(kHeader + "2020-01-02,1,2,0.5,1,1,1\n2020-01-02,1,2,0.5,1,1,1\n", "duplicate date 2020-01-02");
  EXPECT_THROW(ingest_csv(temp_file("does_not_exist.csv")), DataError);
}

TEST(Ingest, DateParsing) {
  Date d;
  EXPECT_TRUE(Date::parse("2020-02-29", d));
  EXPECT_FALSE(Date::parse("2019-02-29", d));
  EXPECT_FALSE(Date::parse("1900-02-29", d));
  EXPECT_TRUE(Date::parse("2000-02-29", d));
  EXPECT_FALSE(Date::parse("2020-13-01", d));
  EXPECT_FALSE(Date::parse("2020-1-01", d));
}

TEST(Ingest, SineFixture) {
  const auto r = ingest_csv(std::filesystem::path(GSASVR_TEST_DATA) / "sine_800.csv");
  EXPECT_EQ(r.records.size(), 800u);
  EXPECT_EQ(r.dropped_rows, 0u);
}

TEST(SearchSpaceDefaults, ReferenceBounds) {
  const auto s = default_search_space();
  ASSERT_EQ(s.dimension(), 3u);
  EXPECT_EQ(s.lower, (std::vector<double>{1.0 / 16384, 1.0 / 16384, 1.0 / 16384}));
  EXPECT_EQ(s.upper, (std::vector<double>{256.0, 256.0, 0.25}));
}

TEST(Prepare, OverrideAndScaling) {
  const auto req = small_request();
  const auto p = prepare(req);
  EXPECT_FALSE(p.estimated);
  EXPECT_EQ(p.spec, (EmbeddingSpec{3, 2}));
  const std::size_t rows = 160 - 1 - 2 * 2;
  EXPECT_EQ(p.raw.train_y.size() + p.raw.test_y.size(), rows);
  EXPECT_EQ(p.raw.train_y.size(), train_row_count(rows, 0.8));
  for (double v : p.scaled.train_x.values()) {
    EXPECT_GE(v, 0.0);
    EXPECT_LE(v, 1.0);
  }
  EXPECT_EQ(req.series.values[p.first_test_target], p.raw.test_y[0]);
  for (std::size_t i = 0; i < p.raw.test_y.size(); ++i)
    EXPECT_EQ(p.scaled.test_y[i], p.scaling.apply(p.raw.test_y[i]));
}

TEST(Prepare, FullSeriesScaling) {
  auto req = small_request();
  req.scaling = ScalingMode::FullSeries;
  const auto p = prepare(req);
  const auto [lo, hi] = std::minmax_element(req.series.values.begin(), req.series.values.end());
  EXPECT_EQ(p.scaling.min, *lo);
  EXPECT_EQ(p.scaling.max, *hi);
}

TEST(Prepare, EstimatesEmbedding) {
  CaptureLog log;
  auto req = small_request();
  req.embedding.reset();
  req.series = noisy_sine(400);
  const auto p = prepare(req);
  EXPECT_TRUE(p.estimated);
  EXPECT_GE(p.spec.delay, 1u);
  EXPECT_GE(p.spec.dimension, 1u);
}

TEST(Prepare, TooShortSeriesNamesMinimumLength) {
  auto req = small_request();
  req.embedding = EmbeddingSpec{10, 10};
  req.series.values.resize(50);
  try {
    prepare(req);
    FAIL();
  } catch (const DataError& e) {
    EXPECT_NE(std::string(e.what()).find("minimum length 93"), std::string::npos) << e.what();
  }
}

TEST(Prepare, RejectsInvalidRequests) {
  auto req = small_request();
  req.split_ratio = 1.0;
  EXPECT_THROW(prepare(req), InputError);
  req = small_request();
  req.space = SearchSpace{{1, 1}, {2, 2}};
  EXPECT_THROW(prepare(req), InputError);
  req = small_request();
  req.dates = {"2020-01-01"};
  EXPECT_THROW(prepare(req), InputError);
  req = small_request();
  req.series.values.assign(160, 5.0);
  EXPECT_THROW(prepare(req), DataError);
}

TEST(Objective, MatchesIndependentComposition) {
  const auto p = prepare(small_request());
  const SolverConfig solver;
  const auto f = objective_from_split(p.scaled, solver);
  for (const SvrParams params : {SvrParams{1.0, 0.5, 0.01}, SvrParams{30.0, 2.0, 0.001}, SvrParams{0.1, 10.0, 0.2}}) {
    const auto model = train({p.scaled.train_x, p.scaled.train_y}, params, solver);
    const auto pred = predict_batch(model, p.scaled.test_x);
    const double direct = mse({p.scaled.test_y, pred});
    const double pos[] = {params.c, params.gamma, params.epsilon};
    EXPECT_EQ(f(pos), direct);
  }
}

TEST(Objective, ValidationSplitUsesTrainingTail) {
  const auto p = prepare(small_request());
  const SolverConfig solver;
  const auto f = objective_from_split(p.scaled, solver, FitnessTarget::ValidationSplit, 0.8);
  const std::size_t rows = p.scaled.train_y.size();
  const std::size_t fit = train_row_count(rows, 0.8);
  TrainingSet head{p.scaled.train_x.slice_rows(0, fit),
                   {p.scaled.train_y.begin(), p.scaled.train_y.begin() + static_cast<std::ptrdiff_t>(fit)}};
  const SvrParams params{2.0, 1.0, 0.01};
  const auto model = train(head, params, solver);
  const auto pred = predict_batch(model, p.scaled.train_x.slice_rows(fit, rows));
  const std::vector<double> tail(p.scaled.train_y.begin() + static_cast<std::ptrdiff_t>(fit), p.scaled.train_y.end());
  const double pos[] = {params.c, params.gamma, params.epsilon};
  EXPECT_EQ(f(pos), mse({tail, pred}));
}

TEST(Objective, ConstantTargetsFitPerfectly) {
  SplitDataset split;
  split.train_x = Matrix(6, 1, std::vector<double>{0, 0.2, 0.4, 0.6, 0.8, 1});
  split.train_y.assign(6, 0.5);
  split.test_x = Matrix(2, 1, std::vector<double>{0.1, 0.9});
  split.test_y.assign(2, 0.5);
  const auto f = objective_from_split(split, {});
  const double pos[] = {1.0, 1.0, 0.01};
  EXPECT_LT(f(pos), 1e-12);
}

TEST(Objective, TrainingFailureReturnsPenalty) {
  CaptureLog log;
  const auto p = prepare(small_request());
  SolverConfig solver;
  solver.max_iterations = 1;
  const auto f = objective_from_split(p.scaled, solver);
  const double pos[] = {100.0, 1.0, 1e-4};
  EXPECT_EQ(f(pos), kTrainingFailurePenalty);
  ASSERT_FALSE(log.warnings.empty());
  EXPECT_NE(log.warnings.back().find("training failed at C=100"), std::string::npos);
}

TEST(RunTune, ReportIsSelfConsistent) {
  const auto req = small_request();
  const auto p = prepare(req);
  const auto r = run_tune(req, p);
  EXPECT_EQ(r.dataset, "sine");
  EXPECT_EQ(r.optimizer, "golden_sine");
  EXPECT_EQ(r.seed, 3u);
  EXPECT_EQ(r.embedding, (EmbeddingSpec{3, 2}));
  EXPECT_TRUE(req.space.contains(std::vector<double>{r.params.c, r.params.gamma, r.params.epsilon}));
  ASSERT_EQ(r.forecasts.size(), p.raw.test_y.size());
  EXPECT_EQ(r.fitness_history.size(), req.optimizer.max_iterations + 1);
  EXPECT_EQ(r.evaluations, 6u * 5u);
  EXPECT_EQ(r.train_rows, p.raw.train_y.size());
  EXPECT_EQ(r.test_rows, p.raw.test_y.size());

  std::vector<double> a, f;
  for (const auto& fp : r.forecasts) {
    a.push_back(fp.actual);
    f.push_back(fp.predicted);
    EXPECT_FALSE(fp.date.has_value());
  }
  EXPECT_EQ(a, p.raw.test_y);
  EXPECT_NEAR(mse({a, f}), r.mse, 1e-12);
  EXPECT_NEAR(mape({a, f}), r.mape, 1e-12);

  // Forecasts are the de-normalized outputs of the final model.
  const auto model = train({p.scaled.train_x, p.scaled.train_y}, r.params, req.solver);
  const auto scaled = predict_batch(model, p.scaled.test_x);
  for (std::size_t i = 0; i < scaled.size(); ++i) EXPECT_EQ(f[i], invert_minmax(scaled[i], p.scaling));
  EXPECT_EQ(r.fitness_history.back(), mse({p.scaled.test_y, scaled}));
  EXPECT_EQ(r.scaled_mse, r.fitness_history.back());
}

TEST(RunTune, DatesFollowTestTargets) {
  auto req = small_request();
  for (std::size_t i = 0; i < req.series.values.size(); ++i) req.dates.push_back("d" + std::to_string(i));
  const auto p = prepare(req);
  const auto r = run_tune(req, p);
  for (std::size_t i = 0; i < r.forecasts.size(); ++i) {
    ASSERT_TRUE(r.forecasts[i].date.has_value());
    EXPECT_EQ(*r.forecasts[i].date, "d" + std::to_string(p.first_test_target + i));
    EXPECT_EQ(req.series.values[p.first_test_target + i], r.forecasts[i].actual);
  }
}

TEST(RunTune, SameSeedSameReport) {
  const auto req = small_request(11);
  auto a = to_json(run_tune(req));
  auto b = to_json(run_tune(req));
  a.erase("cost_seconds");
  b.erase("cost_seconds");
  EXPECT_EQ(a.dump(), b.dump());
}

TEST(Report, JsonLayoutAndRoundTrip) {
  const auto r = run_tune(small_request());
  const auto doc = to_json(r);
  std::vector<std::string> keys;
  for (const auto& [k, v] : doc.items()) keys.push_back(k);
  const std::vector<std::string> expected{"dataset", "embedding", "optimizer", "seed", "params", "mse", "mape",
                                          "cost_seconds", "fitness_history", "forecasts", "scaled", "run"};
  EXPECT_EQ(keys, expected);
  EXPECT_EQ(doc["embedding"]["m"], 3);
  EXPECT_EQ(doc["embedding"]["tau"], 2);
  EXPECT_EQ(doc["run"]["fitness_target"], "test_set");
  EXPECT_EQ(doc["run"]["scaling"], "train_only");

  const auto back = tune_report_from_json(Json::parse(doc.dump()));
  EXPECT_EQ(back.mse, r.mse);
  EXPECT_EQ(back.mape, r.mape);
  EXPECT_EQ(back.params.c, r.params.c);
  EXPECT_EQ(back.fitness_history, r.fitness_history);
  ASSERT_EQ(back.forecasts.size(), r.forecasts.size());
  EXPECT_EQ(back.forecasts.back().predicted, r.forecasts.back().predicted);
  EXPECT_TRUE(validate_report(doc).empty());
}

TEST(Report, SummaryLineMatchesFields) {
  const auto r = run_tune(small_request());
  std::istringstream line(summary_line(r));
  std::string dataset, optimizer, mse_field, mape_field, time_field;
  line >> dataset >> optimizer >> mse_field >> mape_field >> time_field;
  EXPECT_EQ(dataset, r.dataset);
  EXPECT_EQ(optimizer, r.optimizer);
  EXPECT_EQ(std::stod(mse_field.substr(4)), r.mse);
  EXPECT_EQ(std::stod(mape_field.substr(5)), r.mape);
  EXPECT_NEAR(std::stod(time_field.substr(5)), r.cost_seconds, 1e-3);
}

TEST(Report, FileRoundTripAndCorruption) {
  const auto path = temp_file("report.json");
  const auto doc = to_json(run_tune(small_request()));
  write_json(doc, path);
  auto loaded = read_json(path);
  EXPECT_EQ(loaded, doc);
  EXPECT_TRUE(validate_report(loaded).empty());

  loaded["mse"] = loaded["mse"].get<double>() * 1.01 + 1e-6;
  EXPECT_EQ(validate_report(loaded), (std::vector<std::string>{"mse"}));
  loaded["mape"] = 0.5;
  EXPECT_EQ(validate_report(loaded), (std::vector<std::string>{"mse", "mape"}));

  loaded.erase("forecasts");
  EXPECT_THROW(validate_report(loaded), PersistenceError);
  EXPECT_THROW(read_json(temp_file("missing.json")), PersistenceError);
  {
    std::ofstream bad(temp_file("bad.json"));
    bad << "{not json";
  }
  EXPECT_THROW(read_json(temp_file("bad.json")), PersistenceError);
  EXPECT_THROW(write_json(doc, temp_file("no_such_dir") / "x.json"), PersistenceError);
  std::filesystem::remove(path);
  std::filesystem::remove(temp_file("bad.json"));
}

TEST(RunCompare, TableAndAntisymmetricMatrix) {
  const std::vector<Algorithm> algs{Algorithm::GoldenSine, Algorithm::RandomSearch, Algorithm::ParticleSwarm,
                                    Algorithm::GreyWolf};
  const auto c = run_compare(small_request(), algs);
  ASSERT_EQ(c.table.size(), 4u);
  ASSERT_EQ(c.members.size(), 4u);
  EXPECT_TRUE(c.failed.empty());
  for (std::size_t i = 1; i < c.table.size(); ++i) EXPECT_LE(c.table[i - 1].mse, c.table[i].mse);
  ASSERT_EQ(c.dm_matrix.size(), 4u);
  for (const auto& [a, row] : c.dm_matrix) {
    ASSERT_EQ(row.size(), 4u);
    EXPECT_FALSE(row.at(a).has_value());
    for (const auto& [b, stat] : row) {
      if (a == b) continue;
      const auto& other = c.dm_matrix.at(b).at(a);
      ASSERT_EQ(stat.has_value(), other.has_value());
      if (stat) EXPECT_EQ(*stat, -*other);
    }
  }
  // Every member saw the same data and budget.
  for (const auto& m : c.members) {
    EXPECT_EQ(m.test_rows, c.members[0].test_rows);
    EXPECT_EQ(m.evaluations, c.members[0].evaluations);
    EXPECT_EQ(m.forecasts.front().actual, c.members[0].forecasts.front().actual);
  }
  const auto doc = to_json(c);
  ASSERT_EQ(doc["table"].size(), 4u);
  std::vector<std::string> cols;
  for (const auto& [k, v] : doc["table"][0].items()) cols.push_back(k);
  EXPECT_EQ(cols, (std::vector<std::string>{"model", "c", "gamma", "epsilon", "mse", "mape", "cost_time"}));
}

TEST(RunCompare, IdenticalConfigurationsAreDegenerate) {
  CaptureLog log;
  const auto c = run_compare(small_request(), {Algorithm::GoldenSine, Algorithm::GoldenSine});
  ASSERT_EQ(c.table.size(), 2u);
  ASSERT_EQ(c.degenerate.size(), 1u);
  EXPECT_EQ(c.degenerate[0], (std::pair<std::string, std::string>{"golden_sine", "golden_sine#2"}));
  EXPECT_FALSE(c.dm_matrix.at("golden_sine").at("golden_sine#2").has_value());
}

TEST(RunCompare, ParallelMembersMatchSerial) {
  const std::vector<Algorithm> algs{Algorithm::GoldenSine, Algorithm::GreyWolf, Algorithm::RandomSearch};
  auto a = to_json(run_compare(small_request(), algs, 1));
  auto b = to_json(run_compare(small_request(), algs, 3));
  for (auto* d : {&a, &b})
    for (auto& row : (*d)["table"]) row.erase("cost_time");
  EXPECT_EQ(a.dump(), b.dump());
}

TEST(RunCompare, RejectsInvalidConfig) {
  auto req = small_request();
  req.optimizer.population = 1;
  EXPECT_THROW(run_compare(req, {}), InputError);
  EXPECT_THROW(run_compare(req, {Algorithm::GoldenSine}), InputError);
}
