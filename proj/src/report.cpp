#include "gsasvr/report.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "gsasvr/error.hpp"
#include "gsasvr/metrics.hpp"

namespace gsasvr {

namespace {

Json number_or_null(double v) { return std::isfinite(v) ? Json(v) : Json(nullptr); }

Json params_json(const SvrParams& p) {
  Json j;
  j["c"] = p.c;
  j["gamma"] = p.gamma;
  j["epsilon"] = p.epsilon;
  return j;
}

Json embedding_json(const EmbeddingSpec& s) {
  Json j;
  j["m"] = s.dimension;
  j["tau"] = s.delay;
  return j;
}

template <class T>
T get_field(const Json& doc, const char* key) {
  try {
    return doc.at(key).get<T>();
  } catch (const nlohmann::json::exception& e) {
    throw PersistenceError(std::string("report field '") + key + "': " + e.what());
  }
}

const Json& get_object(const Json& doc, const char* key) {
  if (!doc.contains(key) || !doc.at(key).is_object())
    throw PersistenceError(std::string("report field '") + key + "' is missing or not an object");
  return doc.at(key);
}

}  // namespace

Json to_json(const TuneReport& r) {
  Json doc;
  doc["dataset"] = r.dataset;
  doc["embedding"] = embedding_json(r.embedding);
  doc["optimizer"] = r.optimizer;
  doc["seed"] = r.seed;
  doc["params"] = params_json(r.params);
  doc["mse"] = r.mse;
  doc["mape"] = r.mape;
  doc["cost_seconds"] = r.cost_seconds;
  doc["fitness_history"] = r.fitness_history;

  Json forecasts = Json::array();
  for (const auto& f : r.forecasts) {
    Json p;
    if (f.date) p["date"] = *f.date;
    p["actual"] = f.actual;
    p["predicted"] = f.predicted;
    forecasts.push_back(std::move(p));
  }
  doc["forecasts"] = std::move(forecasts);

  Json scaled;
  scaled["mse"] = number_or_null(r.scaled_mse);
  scaled["mape"] = number_or_null(r.scaled_mape);
  doc["scaled"] = std::move(scaled);

  Json run;
  run["fitness_target"] = r.fitness_target;
  run["scaling"] = r.scaling;
  run["train_rows"] = r.train_rows;
  run["test_rows"] = r.test_rows;
  run["population"] = r.population;
  run["iterations"] = r.iterations;
  run["evaluations"] = r.evaluations;
  run["support_vectors"] = r.support_vectors;
  Json bounds;
  static constexpr const char* kNames[] = {"c", "gamma", "epsilon"};
  for (std::size_t i = 0; i < r.space.dimension() && i < 3; ++i)
    bounds[kNames[i]] = Json::array({r.space.lower[i], r.space.upper[i]});
  run["bounds"] = std::move(bounds);
  doc["run"] = std::move(run);
  return doc;
}

Json to_json(const CompareReport& r) {
  Json doc;
  doc["dataset"] = r.dataset;
  doc["embedding"] = embedding_json(r.embedding);
  doc["seed"] = r.seed;

  Json table = Json::array();
  for (const auto& row : r.table) {
    Json j;
    j["model"] = row.model;
    j["c"] = row.params.c;
    j["gamma"] = row.params.gamma;
    j["epsilon"] = row.params.epsilon;
    j["mse"] = row.mse;
    j["mape"] = row.mape;
    j["cost_time"] = row.cost_seconds;
    table.push_back(std::move(j));
  }
  doc["table"] = std::move(table);

  Json dm = Json::object();
  for (const auto& [a, inner] : r.dm_matrix) {
    Json row = Json::object();
    for (const auto& [b, stat] : inner) row[b] = stat ? Json(*stat) : Json(nullptr);
    dm[a] = std::move(row);
  }
  doc["dm_matrix"] = std::move(dm);

  Json degenerate = Json::array();
  for (const auto& [a, b] : r.degenerate) degenerate.push_back(Json::array({a, b}));
  doc["degenerate"] = std::move(degenerate);

  Json failed = Json::array();
  for (const auto& [name, reason] : r.failed) {
    Json f;
    f["optimizer"] = name;
    f["error"] = reason;
    failed.push_back(std::move(f));
  }
  doc["failed"] = std::move(failed);
  return doc;
}

TuneReport tune_report_from_json(const Json& doc) {
  if (!doc.is_object()) throw PersistenceError("report is not a JSON object");
  TuneReport r;
  r.dataset = get_field<std::string>(doc, "dataset");
  const auto& emb = get_object(doc, "embedding");
  r.embedding = {get_field<std::size_t>(emb, "m"), get_field<std::size_t>(emb, "tau")};
  r.optimizer = get_field<std::string>(doc, "optimizer");
  r.seed = get_field<std::uint64_t>(doc, "seed");
  const auto& p = get_object(doc, "params");
  r.params = {get_field<double>(p, "c"), get_field<double>(p, "gamma"), get_field<double>(p, "epsilon")};
  r.mse = get_field<double>(doc, "mse");
  r.mape = get_field<double>(doc, "mape");
  r.cost_seconds = get_field<double>(doc, "cost_seconds");
  r.fitness_history = get_field<std::vector<double>>(doc, "fitness_history");
  if (!doc.contains("forecasts") || !doc.at("forecasts").is_array())
    throw PersistenceError("report field 'forecasts' is missing or not an array");
  for (const auto& f : doc.at("forecasts")) {
    ForecastPoint fp;
    if (f.contains("date")) fp.date = get_field<std::string>(f, "date");
    fp.actual = get_field<double>(f, "actual");
    fp.predicted = get_field<double>(f, "predicted");
    r.forecasts.push_back(std::move(fp));
  }
  return r;
}

std::string summary_line(const TuneReport& r) {
  char buf[256];
  std::snprintf(buf, sizeof buf, " mse=%.17g mape=%.17g time=%.3f", r.mse, r.mape, r.cost_seconds);
  return r.dataset + " " + r.optimizer + buf;
}

void write_json(const Json& doc, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw PersistenceError("cannot open '" + path.string() + "' for writing");
  out << doc.dump(2) << '\n';
  out.flush();
  if (!out) throw PersistenceError("failed writing '" + path.string() + "'");
}

Json read_json(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw PersistenceError("cannot open report '" + path.string() + "'");
  try {
    return Json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw PersistenceError("report '" + path.string() + "' is not valid JSON: " + e.what());
  }
}

std::vector<std::string> validate_report(const Json& doc, double tolerance) {
  const auto report = tune_report_from_json(doc);
  std::vector<double> actual, predicted;
  for (const auto& f : report.forecasts) {
    actual.push_back(f.actual);
    predicted.push_back(f.predicted);
  }
  std::vector<std::string> bad;
  if (actual.empty()) {
    bad.emplace_back("forecasts");
    return bad;
  }
  const double m = mse({actual, predicted});
  if (!(std::abs(m - report.mse) <= tolerance)) bad.emplace_back("mse");
  try {
    const double p = mape({actual, predicted});
    if (!(std::abs(p - report.mape) <= tolerance)) bad.emplace_back("mape");
  } catch (const InputError&) {
    bad.emplace_back("mape");
  }
  return bad;
}

}  // namespace gsasvr
