#include "gsasvr/quotes.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "gsasvr/error.hpp"
#include "gsasvr/log.hpp"

namespace gsasvr {

namespace {

bool is_leap(int y) { return (y % 4 == 0 && y % 100 != 0) || y % 400 == 0; }

int days_in_month(int y, int m) {
  static constexpr int kDays[] = {31, 28, 31, 30, 31, 30, 31, 31, 30, 31, 30, 31};
  return m == 2 && is_leap(y) ? 29 : kDays[m - 1];
}

bool parse_int(std::string_view s, int& out) {
  const auto* end = s.data() + s.size();
  auto [ptr, ec] = std::from_chars(s.data(), end, out);
  return ec == std::errc() && ptr == end;
}

bool parse_double(std::string_view s, double& out) {
  if (s.empty()) return false;
  const auto* end = s.data() + s.size();
  auto [ptr, ec] = std::from_chars(s.data(), end, out);
  return ec == std::errc() && ptr == end && std::isfinite(out);
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.back() == '\r' || s.back() == ' ' || s.back() == '\t')) s.remove_suffix(1);
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  return s;
}

std::vector<std::string_view> split_fields(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const auto pos = line.find(',', start);
    out.push_back(trim(line.substr(start, pos == std::string_view::npos ? line.npos : pos - start)));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

[[noreturn]] void row_error(std::size_t line_no, const std::string& what) {
  std::ostringstream msg;
  msg << "line " << line_no << ": " << what;
  throw DataError(msg.str());
}

}  // namespace

bool Date::parse(std::string_view text, Date& out) {
  if (text.size() != 10 || text[4] != '-' || text[7] != '-') return false;
  Date d;
  if (!parse_int(text.substr(0, 4), d.year) || !parse_int(text.substr(5, 2), d.month) ||
      !parse_int(text.substr(8, 2), d.day))
    return false;
  if (d.month < 1 || d.month > 12 || d.day < 1 || d.day > days_in_month(d.year, d.month))
    return false;
  out = d;
  return true;
}

std::string Date::to_string() const {
  char buf[16];
  std::snprintf(buf, sizeof buf, "%04d-%02d-%02d", year, month, day);
  return buf;
}

IngestResult ingest_csv(std::istream& in) {
  IngestResult result;
  std::string line;
  std::size_t line_no = 0;

  bool have_header = false;
  while (std::getline(in, line)) {
    ++line_no;
    std::string_view view = trim(line);
    if (line_no == 1 && view.starts_with("\xEF\xBB\xBF")) view.remove_prefix(3);
    if (view.empty()) continue;
    if (view != kQuoteHeader) {
      std::ostringstream msg;
      msg << "line " << line_no << ": expected header '" << kQuoteHeader << "'";
      throw DataError(msg.str());
    }
    have_header = true;
    break;
  }
  if (!have_header) throw DataError("quote file is empty");

  while (std::getline(in, line)) {
    ++line_no;
    const std::string_view view = trim(line);
    if (view.empty()) continue;
    const auto fields = split_fields(view);
    if (fields.size() != 7) {
      std::ostringstream what;
      what << "expected 7 fields, found " << fields.size();
      row_error(line_no, what.str());
    }
    if (std::any_of(fields.begin(), fields.end(), [](std::string_view f) { return f == "null"; })) {
      ++result.dropped_rows;
      continue;
    }
    QuoteRecord rec;
    if (!Date::parse(fields[0], rec.date)) row_error(line_no, "unparseable date '" + std::string(fields[0]) + "'");
    double* targets[] = {&rec.open, &rec.high, &rec.low, &rec.close, &rec.adj_close};
    static constexpr const char* kNames[] = {"Open", "High", "Low", "Close", "Adj Close"};
    for (int k = 0; k < 5; ++k)
      if (!parse_double(fields[k + 1], *targets[k]))
        row_error(line_no, std::string("unparseable ") + kNames[k] + " value '" + std::string(fields[k + 1]) + "'");
    double volume = 0.0;
    if (!parse_double(fields[6], volume) || volume < 0.0 || volume != std::floor(volume))
      row_error(line_no, "unparseable Volume value '" + std::string(fields[6]) + "'");
    rec.volume = static_cast<std::int64_t>(volume);
    if (!(rec.close > 0.0)) row_error(line_no, "Close must be positive");
    result.records.push_back(rec);
  }

  if (result.dropped_rows > 0) {
    std::ostringstream msg;
    msg << "dropped " << result.dropped_rows << " row(s) containing null";
    result.warnings.push_back(msg.str());
  }
  const auto by_date = [](const QuoteRecord& a, const QuoteRecord& b) { return a.date < b.date; };
  if (!std::is_sorted(result.records.begin(), result.records.end(), by_date)) {
    std::stable_sort(result.records.begin(), result.records.end(), by_date);
    result.warnings.emplace_back("rows were not in date order and have been sorted");
  }
  const auto dup = std::adjacent_find(result.records.begin(), result.records.end(),
                                      [](const QuoteRecord& a, const QuoteRecord& b) { return a.date == b.date; });
  if (dup != result.records.end()) throw DataError("duplicate date " + dup->date.to_string());

  for (const auto& w : result.warnings) log_message(LogLevel::Warning, w);
  return result;
}

IngestResult ingest_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open quote file '" + path.string() + "'");
  return ingest_csv(in);
}

std::string_view column_name(PriceColumn c) {
  return c == PriceColumn::Close ? "close" : "adj_close";
}

TimeSeries series_from_quotes(const std::vector<QuoteRecord>& records, PriceColumn column,
                              std::string label) {
  TimeSeries ts;
  ts.label = std::move(label);
  ts.values.reserve(records.size());
  for (const auto& r : records) ts.values.push_back(column == PriceColumn::Close ? r.close : r.adj_close);
  return ts;
}

}  // namespace gsasvr
