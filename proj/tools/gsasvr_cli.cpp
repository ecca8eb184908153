// Command-line front end for libgsasvr.
#include <CLI11.hpp>

#include <cstdint>
#include <cstdio>
#include <iostream>
#include <memory>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "gsasvr.h"

namespace {

enum Exit { kOk = 0, kUsage = 1, kData = 2, kCompute = 3 };

struct Options {
  std::string input;
  std::string output;
  std::string seed = "42";
  std::size_t m = 0;
  std::size_t tau = 0;
  std::size_t population = 20;
  std::size_t iterations = 50;
  std::string optimizer = "golden_sine";
  std::string optimizers = "golden_sine,random_search,particle_swarm,grey_wolf";
  std::vector<double> bounds_c = {1.0 / 16384.0, 256.0};
  std::vector<double> bounds_gamma = {1.0 / 16384.0, 256.0};
  std::vector<double> bounds_epsilon = {1.0 / 16384.0, 0.25};
  double split = 0.8;
  std::string fitness_target = "test_set";
  bool paper_faithful_scaling = false;
  std::string column = "close";
  std::size_t jobs = 1;
  bool quiet = false;
  std::string report;
};

int exit_code(gsasvr_status s) {
  switch (s) {
    case GSASVR_OK: return kOk;
    case GSASVR_ERR_USAGE: return kUsage;
    case GSASVR_ERR_DATA:
    case GSASVR_ERR_IO: return kData;
    case GSASVR_ERR_COMPUTE:
    case GSASVR_ERR_MISMATCH: return kCompute;
  }
  return kCompute;
}

struct RequestDeleter {
  void operator()(gsasvr_request* r) const { gsasvr_request_destroy(r); }
};
struct ReportDeleter {
  void operator()(gsasvr_report* r) const { gsasvr_report_destroy(r); }
};
using RequestPtr = std::unique_ptr<gsasvr_request, RequestDeleter>;
using ReportPtr = std::unique_ptr<gsasvr_report, ReportDeleter>;

// Thrown to unwind with a status after printing its diagnostic.
struct Failure {
  gsasvr_status status;
};

void check(gsasvr_status s, const char* what) {
  if (s == GSASVR_OK) return;
  std::cerr << "error: " << what << ": " << gsasvr_last_error() << '\n';
  throw Failure{s};
}

void progress(std::size_t iteration, double best, void*) {
  std::fprintf(stderr, "iteration %zu best=%.9g\n", iteration, best);
}

std::uint64_t resolve_seed(const std::string& text) {
  if (text == "random") {
    std::random_device rd;
    const std::uint64_t seed = (static_cast<std::uint64_t>(rd()) << 32) ^ rd();
    std::cerr << "seed " << seed << '\n';
    return seed;
  }
  try {
    std::size_t used = 0;
    const auto v = std::stoull(text, &used);
    if (used == text.size() && text.find('-') == std::string::npos) return v;
  } catch (const std::exception&) {
  }
  std::cerr << "error: --seed must be a non-negative integer or 'random'\n";
  throw Failure{GSASVR_ERR_USAGE};
}

RequestPtr build_request(const Options& o, bool need_input) {
  gsasvr_request* raw = nullptr;
  check(gsasvr_request_create(&raw), "request");
  RequestPtr req(raw);
  if (need_input) {
    if (o.input.empty()) {
      std::cerr << "error: --input is required\n";
      throw Failure{GSASVR_ERR_USAGE};
    }
    check(gsasvr_request_set_input(req.get(), o.input.c_str()), "--input");
  }
  if ((o.m == 0) != (o.tau == 0)) {
    std::cerr << "error: --m and --tau must be given together\n";
    throw Failure{GSASVR_ERR_USAGE};
  }
  check(gsasvr_request_set_embedding(req.get(), o.m, o.tau), "--m/--tau");
  check(gsasvr_request_set_column(req.get(), o.column.c_str()), "--column");
  check(gsasvr_request_set_seed(req.get(), resolve_seed(o.seed)), "--seed");
  check(gsasvr_request_set_population(req.get(), o.population), "--population");
  check(gsasvr_request_set_iterations(req.get(), o.iterations), "--iterations");
  check(gsasvr_request_set_optimizer(req.get(), o.optimizer.c_str()), "--optimizer");
  check(gsasvr_request_set_optimizers(req.get(), o.optimizers.c_str()), "--optimizers");
  check(gsasvr_request_set_bounds(req.get(), GSASVR_PARAM_C, o.bounds_c[0], o.bounds_c[1]), "--bounds-c");
  check(gsasvr_request_set_bounds(req.get(), GSASVR_PARAM_GAMMA, o.bounds_gamma[0], o.bounds_gamma[1]),
        "--bounds-gamma");
  check(gsasvr_request_set_bounds(req.get(), GSASVR_PARAM_EPSILON, o.bounds_epsilon[0], o.bounds_epsilon[1]),
        "--bounds-epsilon");
  check(gsasvr_request_set_split(req.get(), o.split), "--split");
  check(gsasvr_request_set_fitness_target(req.get(), o.fitness_target.c_str()), "--fitness-target");
  check(gsasvr_request_set_full_series_scaling(req.get(), o.paper_faithful_scaling ? 1 : 0),
        "--paper-faithful-scaling");
  check(gsasvr_request_set_jobs(req.get(), o.jobs), "--jobs");
  if (!o.quiet) check(gsasvr_request_set_progress(req.get(), progress, nullptr), "progress");
  return req;
}

int cmd_embed(const Options& o) {
  const auto req = build_request(o, true);
  gsasvr_embedding_info info{};
  check(gsasvr_embed(req.get(), &info), "embed");
  std::cout << "m=" << info.m << " tau=" << info.tau
            << " source=" << (info.estimated ? "estimated" : "override")
            << " length=" << info.series_length << " rows=" << info.rows
            << " train_rows=" << info.train_rows << " test_rows=" << info.test_rows << '\n';
  if (!o.output.empty()) check(gsasvr_embed_write(req.get(), o.output.c_str()), "--output");
  return kOk;
}

int cmd_tune(const Options& o) {
  const auto req = build_request(o, true);
  gsasvr_report* raw = nullptr;
  check(gsasvr_tune(req.get(), &raw), "tune");
  const ReportPtr report(raw);
  if (!o.output.empty()) check(gsasvr_report_write(report.get(), o.output.c_str()), "--output");
  std::cout << gsasvr_report_summary(report.get()) << '\n';
  return kOk;
}

int cmd_compare(const Options& o) {
  const auto req = build_request(o, true);
  gsasvr_report* raw = nullptr;
  check(gsasvr_compare(req.get(), &raw), "compare");
  const ReportPtr report(raw);
  if (o.output.empty())
    std::cout << gsasvr_report_json(report.get());
  else
    check(gsasvr_report_write(report.get(), o.output.c_str()), "--output");
  return kOk;
}

int cmd_validate(const Options& o) {
  const std::string path = !o.report.empty() ? o.report : o.input;
  if (path.empty()) {
    std::cerr << "error: validate needs a report path\n";
    return kUsage;
  }
  const auto status = gsasvr_validate_report_file(path.c_str(), 1e-9);
  if (status == GSASVR_OK) {
    std::cout << path << ": ok\n";
    return kOk;
  }
  std::cerr << "error: " << gsasvr_last_error() << '\n';
  return exit_code(status);
}

}  // namespace

int main(int argc, char** argv) {
  Options o;
  CLI::App app{"Epsilon-SVR forecasting with golden-sine hyperparameter tuning", "gsasvr-cli"};
  app.option_defaults()->always_capture_default();
  app.set_version_flag("--version", gsasvr_version());
  app.set_config("--config", "", "Key-value config file using the long flag names; flags win");
  app.require_subcommand(1);

  app.add_option("--input", o.input, "Quote CSV (Date,Open,High,Low,Close,Adj Close,Volume)");
  app.add_option("--output", o.output, "Report or embedded-dataset output path");
  app.add_option("--seed", o.seed, "RNG seed, or 'random' for entropy");
  app.add_option("--m", o.m, "Embedding dimension override (0 = estimate with FNN)");
  app.add_option("--tau", o.tau, "Embedding delay override (0 = estimate with AMI)");
  app.add_option("--population", o.population, "Agents per population")->check(CLI::Range(2, 1000000));
  app.add_option("--iterations", o.iterations, "Optimizer iterations")->check(CLI::Range(1, 1000000));
  app.add_option("--optimizer", o.optimizer, "golden_sine, random_search, particle_swarm or grey_wolf");
  app.add_option("--optimizers", o.optimizers, "Comma-separated optimizers for compare");
  app.add_option("--bounds-c", o.bounds_c, "C search bounds LO HI (4^-7 4^4)")->expected(2);
  app.add_option("--bounds-gamma", o.bounds_gamma, "gamma search bounds LO HI (4^-7 4^4)")->expected(2);
  app.add_option("--bounds-epsilon", o.bounds_epsilon, "epsilon search bounds LO HI (4^-7 0.25)")->expected(2);
  app.add_option("--split", o.split, "Training fraction of embedded rows");
  app.add_option("--fitness-target", o.fitness_target, "test_set or validation_split")
      ->check(CLI::IsMember({"test_set", "validation_split"}));
  app.add_flag("--paper-faithful-scaling", o.paper_faithful_scaling,
               "Min/max scaling over the whole series instead of the training rows");
  app.add_option("--column", o.column, "Price column")->check(CLI::IsMember({"close", "adj_close"}));
  app.add_option("--jobs", o.jobs, "Worker threads")->check(CLI::Range(1, 1024));
  app.add_flag("--quiet", o.quiet, "Suppress per-iteration progress on stderr");

  auto* embed = app.add_subcommand("embed", "Estimate or echo (m, tau) and report row counts")->fallthrough();
  auto* tune = app.add_subcommand("tune", "Tune (C, gamma, epsilon) and forecast the test rows")->fallthrough();
  auto* compare = app.add_subcommand("compare", "Tune with several optimizers and compare forecasts")->fallthrough();
  auto* validate = app.add_subcommand("validate", "Recompute MSE/MAPE of a stored tune report")->fallthrough();
  validate->add_option("report", o.report, "Report JSON path");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kUsage;
  }

  try {
    if (*embed) return cmd_embed(o);
    if (*tune) return cmd_tune(o);
    if (*compare) return cmd_compare(o);
    if (*validate) return cmd_validate(o);
  } catch (const Failure& f) {
    return exit_code(f.status);
  }
  return kUsage;
}
