#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

#include "gsasvr/pipeline.hpp"

namespace gsasvr {

using Json = nlohmann::ordered_json;

Json to_json(const TuneReport& report);
Json to_json(const CompareReport& report);

/// Inverse of to_json for the fields validation needs. Throws
/// PersistenceError on missing or mistyped keys.
TuneReport tune_report_from_json(const Json& doc);

/// `<dataset> <optimizer> mse=<v> mape=<v> time=<s>`
std::string summary_line(const TuneReport& report);

/// Writes pretty-printed JSON with a trailing newline. Throws PersistenceError.
void write_json(const Json& doc, const std::filesystem::path& path);
/// Throws PersistenceError if the file is missing or not JSON.
Json read_json(const std::filesystem::path& path);

/// Recomputes MSE and MAPE from the stored forecasts and returns the names of
/// fields whose stored value differs by more than `tolerance`.
std::vector<std::string> validate_report(const Json& doc, double tolerance = 1e-9);

}  // namespace gsasvr
