#pragma once

#include <compare>
#include <cstdint>
#include <filesystem>
#include <istream>
#include <string>
#include <string_view>
#include <vector>

#include "gsasvr/embedding.hpp"

namespace gsasvr {

struct Date {
  int year = 1970;
  int month = 1;
  int day = 1;

  // Parses YYYY-MM-DD; returns false on malformed or impossible dates.
  static bool parse(std::string_view text, Date& out);
  std::string to_string() const;

  auto operator<=>(const Date&) const = default;
};

/// One row of a daily quote file.
struct QuoteRecord {
  Date date;
  double open = 0.0;
  double high = 0.0;
  double low = 0.0;
  double close = 0.0;
  double adj_close = 0.0;
  std::int64_t volume = 0;
};

struct IngestResult {
  std::vector<QuoteRecord> records;  // ascending dates
  std::size_t dropped_rows = 0;      // rows carrying a `null` token
  std::vector<std::string> warnings;
};

inline constexpr std::string_view kQuoteHeader = "Date,Open,High,Low,Close,Adj Close,Volume";

/// Reads a `Date,Open,High,Low,Close,Adj Close,Volume` file. Rows containing
/// `null` are dropped and counted, out-of-order rows are re-sorted with a
/// warning. Throws DataError for an empty stream, a wrong header, an
/// unparseable row (with its line number) or a repeated date.
IngestResult ingest_csv(std::istream& in);
IngestResult ingest_csv(const std::filesystem::path& path);

enum class PriceColumn { Close, AdjClose };

std::string_view column_name(PriceColumn c);

TimeSeries series_from_quotes(const std::vector<QuoteRecord>& records, PriceColumn column,
                              std::string label);

}  // namespace gsasvr
