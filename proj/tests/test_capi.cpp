#include <gtest/gtest.h>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <string>
#include <vector>

#include <json.hpp>

#include "gsasvr.h"

namespace {

struct Request {
  gsasvr_request* ptr = nullptr;
  Request() { EXPECT_EQ(gsasvr_request_create(&ptr), GSASVR_OK); }
  ~Request() { gsasvr_request_destroy(ptr); }
};

struct Report {
  gsasvr_report* ptr = nullptr;
  ~Report() { gsasvr_report_destroy(ptr); }
};

std::vector<double> sine(std::size_t n) {
  std::vector<double> v;
  for (std::size_t i = 0; i < n; ++i)
    v.push_back(5.0 + std::sin(2.0 * std::numbers::pi * static_cast<double>(i) / 25.0) +
                0.01 * std::cos(7.3 * static_cast<double>(i)));
  return v;
}

void small_budget(gsasvr_request* req) {
  const auto v = sine(150);
  ASSERT_EQ(gsasvr_request_set_series(req, v.data(), v.size(), "wave"), GSASVR_OK);
  ASSERT_EQ(gsasvr_request_set_embedding(req, 3, 2), GSASVR_OK);
  ASSERT_EQ(gsasvr_request_set_population(req, 6), GSASVR_OK);
  ASSERT_EQ(gsasvr_request_set_iterations(req, 3), GSASVR_OK);
}

std::string temp_path(const std::string& name) {
  return (std::filesystem::temp_directory_path() / ("gsasvr_test_capi_" + name)).string();
}

}  // namespace

TEST(CApi, VersionAndStatusNames) {
  EXPECT_STREQ(gsasvr_version(), "1.0.0");
  EXPECT_STREQ(gsasvr_status_name(GSASVR_OK), "ok");
  EXPECT_STRNE(gsasvr_status_name(GSASVR_ERR_MISMATCH), gsasvr_status_name(GSASVR_ERR_IO));
}

TEST(CApi, SetterValidation) {
  Request r;
  EXPECT_EQ(gsasvr_request_set_population(r.ptr, 1), GSASVR_ERR_USAGE);
  EXPECT_NE(std::string(gsasvr_last_error()), "");
  EXPECT_EQ(gsasvr_request_set_iterations(r.ptr, 0), GSASVR_ERR_USAGE);
  EXPECT_EQ(gsasvr_request_set_optimizer(r.ptr, "annealing"), GSASVR_ERR_USAGE);
  EXPECT_EQ(gsasvr_request_set_optimizers(r.ptr, "golden_sine,nope"), GSASVR_ERR_USAGE);
  EXPECT_EQ(gsasvr_request_set_optimizers(r.ptr, ""), GSASVR_ERR_USAGE);
  EXPECT_EQ(gsasvr_request_set_bounds(r.ptr, GSASVR_PARAM_C, 2.0, 1.0), GSASVR_ERR_USAGE);
  EXPECT_EQ(gsasvr_request_set_split(r.ptr, 1.5), GSASVR_ERR_USAGE);
  EXPECT_EQ(gsasvr_request_set_fitness_target(r.ptr, "train"), GSASVR_ERR_USAGE);
  EXPECT_EQ(gsasvr_request_set_column(r.ptr, "open"), GSASVR_ERR_USAGE);
  EXPECT_EQ(gsasvr_request_set_jobs(r.ptr, 0), GSASVR_ERR_USAGE);
  EXPECT_EQ(gsasvr_request_set_embedding(r.ptr, 3, 0), GSASVR_ERR_USAGE);
  EXPECT_EQ(gsasvr_request_set_series(r.ptr, nullptr, 3, "x"), GSASVR_ERR_USAGE);
  EXPECT_EQ(gsasvr_request_set_optimizer(r.ptr, "grey_wolf"), GSASVR_OK);
  EXPECT_EQ(gsasvr_request_create(nullptr), GSASVR_ERR_USAGE);
}

TEST(CApi, MissingInputIsUsageError) {
  Request r;
  gsasvr_embedding_info info{};
  EXPECT_EQ(gsasvr_embed(r.ptr, &info), GSASVR_ERR_USAGE);
}

TEST(CApi, UnreadableInputIsDataError) {
  Request r;
  ASSERT_EQ(gsasvr_request_set_input(r.ptr, temp_path("missing.csv").c_str()), GSASVR_OK);
  gsasvr_embedding_info info{};
  EXPECT_EQ(gsasvr_embed(r.ptr, &info), GSASVR_ERR_DATA);
}

TEST(CApi, EmbedOverrideAndWrite) {
  Request r;
  small_budget(r.ptr);
  gsasvr_embedding_info info{};
  ASSERT_EQ(gsasvr_embed(r.ptr, &info), GSASVR_OK);
  EXPECT_EQ(info.m, 3u);
  EXPECT_EQ(info.tau, 2u);
  EXPECT_EQ(info.estimated, 0);
  EXPECT_EQ(info.series_length, 150u);
  EXPECT_EQ(info.rows, 150u - 1 - 4);
  EXPECT_EQ(info.train_rows + info.test_rows, info.rows);

  const auto path = temp_path("embed.csv");
  ASSERT_EQ(gsasvr_embed_write(r.ptr, path.c_str()), GSASVR_OK);
  std::ifstream in(path);
  std::string line;
  std::getline(in, line);
  EXPECT_EQ(line, "index,split,x1,x2,x3,y");
  std::size_t rows = 0, train = 0;
  while (std::getline(in, line)) {
    ++rows;
    if (line.find(",train,") != std::string::npos) ++train;
  }
  EXPECT_EQ(rows, info.rows);
  EXPECT_EQ(train, info.train_rows);
  std::filesystem::remove(path);
}

TEST(CApi, TuneWriteValidate) {
  Request r;
  small_budget(r.ptr);
  std::vector<std::size_t> seen;
  ASSERT_EQ(gsasvr_request_set_progress(
                r.ptr, [](std::size_t it, double, void* u) { static_cast<std::vector<std::size_t>*>(u)->push_back(it); },
                &seen),
            GSASVR_OK);
  Report rep;
  ASSERT_EQ(gsasvr_tune(r.ptr, &rep.ptr), GSASVR_OK) << gsasvr_last_error();
  EXPECT_EQ(seen, (std::vector<std::size_t>{1, 2, 3}));

  const auto doc = nlohmann::json::parse(gsasvr_report_json(rep.ptr));
  EXPECT_EQ(doc["dataset"], "wave");
  EXPECT_EQ(doc["optimizer"], "golden_sine");
  EXPECT_EQ(doc["seed"], 42);
  const std::string summary = gsasvr_report_summary(rep.ptr);
  EXPECT_EQ(summary.rfind("wave golden_sine mse=", 0), 0u) << summary;

  const auto path = temp_path("tune.json");
  ASSERT_EQ(gsasvr_report_write(rep.ptr, path.c_str()), GSASVR_OK);
  EXPECT_EQ(gsasvr_validate_report_file(path.c_str(), 1e-9), GSASVR_OK);

  auto edited = doc;
  edited["mape"] = doc["mape"].get<double>() + 1e-3;
  std::ofstream(path) << edited.dump(2);
  EXPECT_EQ(gsasvr_validate_report_file(path.c_str(), 1e-9), GSASVR_ERR_MISMATCH);
  EXPECT_NE(std::string(gsasvr_last_error()).find("mape"), std::string::npos);
  std::filesystem::remove(path);
  EXPECT_EQ(gsasvr_validate_report_file(path.c_str(), 1e-9), GSASVR_ERR_IO);
  EXPECT_EQ(gsasvr_report_write(rep.ptr, temp_path("nodir/x.json").c_str()), GSASVR_ERR_IO);
}

TEST(CApi, CompareJson) {
  Request r;
  small_budget(r.ptr);
  ASSERT_EQ(gsasvr_request_set_optimizers(r.ptr, "golden_sine,particle_swarm"), GSASVR_OK);
  Report rep;
  ASSERT_EQ(gsasvr_compare(r.ptr, &rep.ptr), GSASVR_OK) << gsasvr_last_error();
  const auto doc = nlohmann::json::parse(gsasvr_report_json(rep.ptr));
  EXPECT_EQ(doc["table"].size(), 2u);
  EXPECT_EQ(doc["dm_matrix"].size(), 2u);
  EXPECT_STREQ(gsasvr_report_summary(rep.ptr), "");
}

TEST(CApi, SvrTrainPredict) {
  const std::vector<double> x{0.0, 0.25, 0.5, 0.75, 1.0};
  std::vector<double> y;
  for (double v : x) y.push_back(2.0 * v + 1.0);
  gsasvr_model* model = nullptr;
  ASSERT_EQ(gsasvr_svr_train(x.data(), 5, 1, y.data(), 100.0, 1.0, 0.01, 0.0, &model), GSASVR_OK);
  double out = 0.0;
  const double probe = 0.5;
  ASSERT_EQ(gsasvr_svr_predict(model, &probe, 1, &out), GSASVR_OK);
  EXPECT_NEAR(out, 2.0, 0.05);
  EXPECT_GT(gsasvr_model_support_count(model), 0u);
  EXPECT_TRUE(std::isfinite(gsasvr_model_bias(model)));
  EXPECT_EQ(gsasvr_svr_predict(model, &probe, 2, &out), GSASVR_ERR_USAGE);
  gsasvr_model_destroy(model);
  EXPECT_EQ(gsasvr_svr_train(x.data(), 5, 1, y.data(), -1.0, 1.0, 0.01, 0.0, &model), GSASVR_ERR_USAGE);
}

TEST(CApi, OptimizeCallback) {
  const double lo[] = {-5, -5}, hi[] = {5, 5};
  double best[2] = {0, 0}, fit = 0.0;
  const auto sphere = [](const double* p, std::size_t d, double* out, void*) {
    *out = 0.0;
    for (std::size_t i = 0; i < d; ++i) *out += p[i] * p[i];
    return 0;
  };
  ASSERT_EQ(gsasvr_optimize(sphere, nullptr, lo, hi, 2, "golden_sine", 20, 200, 1, best, &fit), GSASVR_OK);
  EXPECT_LT(fit, 1e-4);
  EXPECT_NEAR(best[0] * best[0] + best[1] * best[1], fit, 1e-15);

  const auto abort_fn = [](const double*, std::size_t, double*, void*) { return 1; };
  EXPECT_EQ(gsasvr_optimize(abort_fn, nullptr, lo, hi, 2, "golden_sine", 5, 5, 1, best, &fit), GSASVR_ERR_COMPUTE);
  EXPECT_EQ(gsasvr_optimize(sphere, nullptr, lo, hi, 2, "nope", 5, 5, 1, best, &fit), GSASVR_ERR_USAGE);
}

TEST(CApi, LogCallback) {
  std::vector<std::string> messages;
  gsasvr_set_log_callback(
      [](int warn, const char* m, void* u) {
        if (warn) static_cast<std::vector<std::string>*>(u)->emplace_back(m);
      },
      &messages);
  Request r;
  small_budget(r.ptr);
  ASSERT_EQ(gsasvr_request_set_optimizers(r.ptr, "golden_sine,golden_sine"), GSASVR_OK);
  Report rep;
  ASSERT_EQ(gsasvr_compare(r.ptr, &rep.ptr), GSASVR_OK);
  gsasvr_set_log_callback(nullptr, nullptr);
  ASSERT_FALSE(messages.empty());
  EXPECT_NE(messages.back().find("degenerate"), std::string::npos);
}
