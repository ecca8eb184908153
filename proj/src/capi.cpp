#include "gsasvr.h"

#include <cmath>
#include <exception>
#include <fstream>
#include <memory>
#include <new>
#include <sstream>
#include <string>
#include <vector>

#include "gsasvr/error.hpp"
#include "gsasvr/log.hpp"
#include "gsasvr/pipeline.hpp"
#include "gsasvr/quotes.hpp"
#include "gsasvr/report.hpp"

struct gsasvr_request {
  gsasvr::TuneRequest tune;
  std::string input_path;
  bool have_series = false;
  gsasvr::PriceColumn column = gsasvr::PriceColumn::Close;
  std::vector<gsasvr::Algorithm> compare_algorithms = {
      gsasvr::Algorithm::GoldenSine, gsasvr::Algorithm::RandomSearch,
      gsasvr::Algorithm::ParticleSwarm, gsasvr::Algorithm::GreyWolf};
  std::size_t jobs = 1;
};

struct gsasvr_report {
  std::string json;
  std::string summary;
};

struct gsasvr_model {
  gsasvr::SvrModel model;
};

namespace {

thread_local std::string g_last_error;

gsasvr_status status_for(gsasvr::ErrorKind kind) {
  using gsasvr::ErrorKind;
  switch (kind) {
    case ErrorKind::Input: return GSASVR_ERR_USAGE;
    case ErrorKind::Data: return GSASVR_ERR_DATA;
    case ErrorKind::Estimation:
    case ErrorKind::Training:
    case ErrorKind::Evaluation:
    case ErrorKind::Degenerate: return GSASVR_ERR_COMPUTE;
    case ErrorKind::Persistence: return GSASVR_ERR_IO;
  }
  return GSASVR_ERR_COMPUTE;
}

gsasvr_status fail(gsasvr_status status, std::string message) {
  g_last_error = std::move(message);
  return status;
}

// Runs body, translating exceptions into status codes.
template <class F>
gsasvr_status guarded(F&& body) {
  try {
    g_last_error.clear();
    return body();
  } catch (const gsasvr::Error& e) {
    return fail(status_for(e.kind()), e.what());
  } catch (const std::bad_alloc&) {
    return fail(GSASVR_ERR_COMPUTE, "out of memory");
  } catch (const std::exception& e) {
    return fail(GSASVR_ERR_COMPUTE, e.what());
  }
}

#define GSASVR_REQUIRE(cond, msg) \
  do {                            \
    if (!(cond)) return fail(GSASVR_ERR_USAGE, msg); \
  } while (0)

// Materializes the series (reading the CSV if needed) into a TuneRequest.
gsasvr::TuneRequest resolve(const gsasvr_request& req) {
  gsasvr::TuneRequest tune = req.tune;
  if (!req.input_path.empty()) {
    const std::filesystem::path path(req.input_path);
    const auto ingest = gsasvr::ingest_csv(path);
    if (ingest.records.size() < 2) {
      std::ostringstream msg;
      msg << "'" << req.input_path << "' holds " << ingest.records.size()
          << " usable rows (minimum length 2)";
      throw gsasvr::DataError(msg.str());
    }
    tune.series = gsasvr::series_from_quotes(ingest.records, req.column, path.stem().string());
    tune.dates.clear();
    for (const auto& r : ingest.records) tune.dates.push_back(r.date.to_string());
  } else if (!req.have_series) {
    throw gsasvr::InputError("no input: set a CSV path or an in-memory series");
  }
  return tune;
}

}  // namespace

extern "C" {

const char* gsasvr_version(void) { return "1.0.0"; }

const char* gsasvr_last_error(void) { return g_last_error.c_str(); }

const char* gsasvr_status_name(gsasvr_status status) {
  switch (status) {
    case GSASVR_OK: return "ok";
    case GSASVR_ERR_USAGE: return "usage error";
    case GSASVR_ERR_DATA: return "data error";
    case GSASVR_ERR_COMPUTE: return "computation error";
    case GSASVR_ERR_IO: return "i/o error";
    case GSASVR_ERR_MISMATCH: return "validation mismatch";
  }
  return "unknown";
}

void gsasvr_set_log_callback(gsasvr_log_fn fn, void* user) {
  if (!fn) {
    gsasvr::set_log_sink({});
    return;
  }
  gsasvr::set_log_sink([fn, user](gsasvr::LogLevel level, std::string_view msg) {
    const std::string text(msg);
    fn(level == gsasvr::LogLevel::Warning ? 1 : 0, text.c_str(), user);
  });
}

gsasvr_status gsasvr_request_create(gsasvr_request** out) {
  GSASVR_REQUIRE(out, "out must not be NULL");
  return guarded([&] {
    *out = new gsasvr_request();
    return GSASVR_OK;
  });
}

void gsasvr_request_destroy(gsasvr_request* req) { delete req; }

gsasvr_status gsasvr_request_set_input(gsasvr_request* req, const char* path) {
  GSASVR_REQUIRE(req && path && *path, "request and path must be non-empty");
  req->input_path = path;
  return GSASVR_OK;
}

gsasvr_status gsasvr_request_set_series(gsasvr_request* req, const double* values, size_t n,
                                        const char* label) {
  GSASVR_REQUIRE(req && (values || n == 0), "request and values must not be NULL");
  req->tune.series.values.assign(values, values + n);
  req->tune.series.label = label ? label : "series";
  req->tune.dates.clear();
  req->input_path.clear();
  req->have_series = true;
  return GSASVR_OK;
}

gsasvr_status gsasvr_request_set_column(gsasvr_request* req, const char* column) {
  GSASVR_REQUIRE(req && column, "request and column must not be NULL");
  const std::string_view c(column);
  if (c == "close") req->column = gsasvr::PriceColumn::Close;
  else if (c == "adj_close") req->column = gsasvr::PriceColumn::AdjClose;
  else return fail(GSASVR_ERR_USAGE, "column must be close or adj_close");
  return GSASVR_OK;
}

gsasvr_status gsasvr_request_set_seed(gsasvr_request* req, uint64_t seed) {
  GSASVR_REQUIRE(req, "request must not be NULL");
  req->tune.optimizer.seed = seed;
  return GSASVR_OK;
}

gsasvr_status gsasvr_request_set_embedding(gsasvr_request* req, size_t m, size_t tau) {
  GSASVR_REQUIRE(req, "request must not be NULL");
  if (m == 0 && tau == 0) {
    req->tune.embedding.reset();
    return GSASVR_OK;
  }
  GSASVR_REQUIRE(m >= 1 && tau >= 1, "embedding m and tau must both be >= 1");
  req->tune.embedding = gsasvr::EmbeddingSpec{m, tau};
  return GSASVR_OK;
}

gsasvr_status gsasvr_request_set_population(gsasvr_request* req, size_t population) {
  GSASVR_REQUIRE(req, "request must not be NULL");
  GSASVR_REQUIRE(population >= 2, "population must be at least 2");
  req->tune.optimizer.population = population;
  return GSASVR_OK;
}

gsasvr_status gsasvr_request_set_iterations(gsasvr_request* req, size_t iterations) {
  GSASVR_REQUIRE(req, "request must not be NULL");
  GSASVR_REQUIRE(iterations >= 1, "iterations must be at least 1");
  req->tune.optimizer.max_iterations = iterations;
  return GSASVR_OK;
}

gsasvr_status gsasvr_request_set_optimizer(gsasvr_request* req, const char* name) {
  GSASVR_REQUIRE(req && name, "request and name must not be NULL");
  const auto algo = gsasvr::parse_algorithm(name);
  if (!algo) return fail(GSASVR_ERR_USAGE, std::string("unknown optimizer '") + name + "'");
  req->tune.optimizer.algorithm = *algo;
  return GSASVR_OK;
}

gsasvr_status gsasvr_request_set_optimizers(gsasvr_request* req, const char* names) {
  GSASVR_REQUIRE(req && names, "request and names must not be NULL");
  std::vector<gsasvr::Algorithm> algos;
  std::string_view rest(names);
  while (!rest.empty()) {
    const auto comma = rest.find(',');
    const auto item = rest.substr(0, comma);
    if (!item.empty()) {
      const auto algo = gsasvr::parse_algorithm(item);
      if (!algo) return fail(GSASVR_ERR_USAGE, "unknown optimizer '" + std::string(item) + "'");
      algos.push_back(*algo);
    }
    if (comma == std::string_view::npos) break;
    rest.remove_prefix(comma + 1);
  }
  GSASVR_REQUIRE(!algos.empty(), "optimizer list is empty");
  req->compare_algorithms = std::move(algos);
  return GSASVR_OK;
}

gsasvr_status gsasvr_request_set_bounds(gsasvr_request* req, gsasvr_param param, double lower,
                                        double upper) {
  GSASVR_REQUIRE(req, "request must not be NULL");
  GSASVR_REQUIRE(param >= GSASVR_PARAM_C && param <= GSASVR_PARAM_EPSILON, "unknown parameter");
  GSASVR_REQUIRE(std::isfinite(lower) && std::isfinite(upper) && lower < upper,
                 "bounds need finite lower < upper");
  GSASVR_REQUIRE(param == GSASVR_PARAM_EPSILON ? lower >= 0.0 : lower > 0.0,
                 "C and gamma bounds must be positive; epsilon bounds non-negative");
  req->tune.space.lower[static_cast<std::size_t>(param)] = lower;
  req->tune.space.upper[static_cast<std::size_t>(param)] = upper;
  return GSASVR_OK;
}

gsasvr_status gsasvr_request_set_split(gsasvr_request* req, double ratio) {
  GSASVR_REQUIRE(req, "request must not be NULL");
  GSASVR_REQUIRE(ratio > 0.0 && ratio < 1.0, "split ratio must lie in (0, 1)");
  req->tune.split_ratio = ratio;
  return GSASVR_OK;
}

gsasvr_status gsasvr_request_set_fitness_target(gsasvr_request* req, const char* target) {
  GSASVR_REQUIRE(req && target, "request and target must not be NULL");
  const auto t = gsasvr::parse_fitness_target(target);
  if (!t) return fail(GSASVR_ERR_USAGE, "fitness target must be test_set or validation_split");
  req->tune.fitness_target = *t;
  return GSASVR_OK;
}

gsasvr_status gsasvr_request_set_full_series_scaling(gsasvr_request* req, int enabled) {
  GSASVR_REQUIRE(req, "request must not be NULL");
  req->tune.scaling = enabled ? gsasvr::ScalingMode::FullSeries : gsasvr::ScalingMode::TrainOnly;
  return GSASVR_OK;
}

gsasvr_status gsasvr_request_set_jobs(gsasvr_request* req, size_t jobs) {
  GSASVR_REQUIRE(req, "request must not be NULL");
  GSASVR_REQUIRE(jobs >= 1, "jobs must be at least 1");
  req->jobs = jobs;
  return GSASVR_OK;
}

gsasvr_status gsasvr_request_set_progress(gsasvr_request* req, gsasvr_progress_fn fn, void* user) {
  GSASVR_REQUIRE(req, "request must not be NULL");
  if (fn)
    req->tune.progress = [fn, user](std::size_t it, double best) { fn(it, best, user); };
  else
    req->tune.progress = {};
  return GSASVR_OK;
}

gsasvr_status gsasvr_embed(const gsasvr_request* req, gsasvr_embedding_info* out) {
  GSASVR_REQUIRE(req && out, "request and out must not be NULL");
  return guarded([&] {
    const auto tune = resolve(*req);
    const auto prepared = gsasvr::prepare(tune);
    out->m = prepared.spec.dimension;
    out->tau = prepared.spec.delay;
    out->estimated = prepared.estimated ? 1 : 0;
    out->series_length = tune.series.values.size();
    out->train_rows = prepared.raw.train_y.size();
    out->test_rows = prepared.raw.test_y.size();
    out->rows = out->train_rows + out->test_rows;
    return GSASVR_OK;
  });
}

gsasvr_status gsasvr_embed_write(const gsasvr_request* req, const char* path) {
  GSASVR_REQUIRE(req && path && *path, "request and path must be non-empty");
  return guarded([&] {
    const auto prepared = gsasvr::prepare(resolve(*req));
    std::ofstream out(path, std::ios::trunc);
    if (!out) throw gsasvr::PersistenceError(std::string("cannot open '") + path + "' for writing");
    out.precision(17);
    out << "index,split";
    for (std::size_t j = 1; j <= prepared.spec.dimension; ++j) out << ",x" << j;
    out << ",y\n";
    std::size_t index = 0;
    auto emit = [&](const gsasvr::Matrix& x, const std::vector<double>& y, const char* split) {
      for (std::size_t r = 0; r < y.size(); ++r, ++index) {
        out << index << ',' << split;
        for (double v : x.row(r)) out << ',' << v;
        out << ',' << y[r] << '\n';
      }
    };
    emit(prepared.raw.train_x, prepared.raw.train_y, "train");
    emit(prepared.raw.test_x, prepared.raw.test_y, "test");
    out.flush();
    if (!out) throw gsasvr::PersistenceError(std::string("failed writing '") + path + "'");
    return GSASVR_OK;
  });
}

gsasvr_status gsasvr_tune(const gsasvr_request* req, gsasvr_report** out) {
  GSASVR_REQUIRE(req && out, "request and out must not be NULL");
  return guarded([&] {
    auto tune = resolve(*req);
    tune.optimizer.jobs = req->jobs;
    const auto report = gsasvr::run_tune(tune);
    auto handle = std::make_unique<gsasvr_report>();
    handle->json = gsasvr::to_json(report).dump(2) + "\n";
    handle->summary = gsasvr::summary_line(report);
    *out = handle.release();
    return GSASVR_OK;
  });
}

gsasvr_status gsasvr_compare(const gsasvr_request* req, gsasvr_report** out) {
  GSASVR_REQUIRE(req && out, "request and out must not be NULL");
  return guarded([&] {
    const auto tune = resolve(*req);
    const auto report = gsasvr::run_compare(tune, req->compare_algorithms, req->jobs);
    auto handle = std::make_unique<gsasvr_report>();
    handle->json = gsasvr::to_json(report).dump(2) + "\n";
    *out = handle.release();
    return GSASVR_OK;
  });
}

void gsasvr_report_destroy(gsasvr_report* report) { delete report; }

const char* gsasvr_report_json(const gsasvr_report* report) {
  return report ? report->json.c_str() : "";
}

const char* gsasvr_report_summary(const gsasvr_report* report) {
  return report ? report->summary.c_str() : "";
}

gsasvr_status gsasvr_report_write(const gsasvr_report* report, const char* path) {
  GSASVR_REQUIRE(report && path && *path, "report and path must be non-empty");
  return guarded([&] {
    gsasvr::write_json(gsasvr::Json::parse(report->json), path);
    return GSASVR_OK;
  });
}

gsasvr_status gsasvr_validate_report_file(const char* path, double tolerance) {
  GSASVR_REQUIRE(path && *path, "path must be non-empty");
  GSASVR_REQUIRE(tolerance >= 0.0, "tolerance must be non-negative");
  return guarded([&] {
    const auto bad = gsasvr::validate_report(gsasvr::read_json(path), tolerance);
    if (bad.empty()) return GSASVR_OK;
    std::string msg = "report fields do not match recomputed values:";
    for (const auto& f : bad) msg += " " + f;
    return fail(GSASVR_ERR_MISMATCH, msg);
  });
}

gsasvr_status gsasvr_svr_train(const double* x, size_t n, size_t d, const double* y, double c,
                               double gamma, double epsilon, double kkt_tolerance,
                               gsasvr_model** out) {
  GSASVR_REQUIRE(x && y && out, "x, y and out must not be NULL");
  return guarded([&] {
    gsasvr::TrainingSet data{gsasvr::Matrix(n, d, std::vector<double>(x, x + n * d)),
                             std::vector<double>(y, y + n)};
    gsasvr::SolverConfig cfg;
    if (kkt_tolerance > 0.0) cfg.kkt_tolerance = kkt_tolerance;
    auto handle = std::make_unique<gsasvr_model>();
    handle->model = gsasvr::train(data, {c, gamma, epsilon}, cfg);
    *out = handle.release();
    return GSASVR_OK;
  });
}

void gsasvr_model_destroy(gsasvr_model* model) { delete model; }

gsasvr_status gsasvr_svr_predict(const gsasvr_model* model, const double* x, size_t d, double* out) {
  GSASVR_REQUIRE(model && x && out, "model, x and out must not be NULL");
  return guarded([&] {
    *out = gsasvr::predict(model->model, {x, d});
    return GSASVR_OK;
  });
}

size_t gsasvr_model_support_count(const gsasvr_model* model) {
  return model ? model->model.support_count() : 0;
}

double gsasvr_model_bias(const gsasvr_model* model) { return model ? model->model.bias : 0.0; }

gsasvr_status gsasvr_optimize(gsasvr_objective_fn fn, void* user, const double* lower,
                              const double* upper, size_t dim, const char* algorithm,
                              size_t population, size_t iterations, uint64_t seed,
                              double* best_position, double* best_fitness) {
  GSASVR_REQUIRE(fn && lower && upper && best_position && best_fitness,
                 "callback, bounds and outputs must not be NULL");
  return guarded([&] {
    gsasvr::SearchSpace space{{lower, lower + dim}, {upper, upper + dim}};
    gsasvr::OptimizerConfig cfg;
    cfg.population = population;
    cfg.max_iterations = iterations;
    cfg.seed = seed;
    if (algorithm) {
      const auto algo = gsasvr::parse_algorithm(algorithm);
      if (!algo) throw gsasvr::InputError(std::string("unknown optimizer '") + algorithm + "'");
      cfg.algorithm = *algo;
    }
    const auto objective = [&](std::span<const double> p) {
      double value = 0.0;
      if (fn(p.data(), p.size(), &value, user) != 0)
        throw gsasvr::EvaluationError("objective callback reported failure");
      return value;
    };
    const auto result = gsasvr::optimize(objective, space, cfg);
    std::copy(result.best_position.begin(), result.best_position.end(), best_position);
    *best_fitness = result.best_fitness;
    return GSASVR_OK;
  });
}

}  // extern "C"
