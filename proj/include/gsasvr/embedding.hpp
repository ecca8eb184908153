#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "gsasvr/matrix.hpp"

namespace gsasvr {

struct TimeSeries {
  std::vector<double> values;
  std::string label;

  // Throws InputError unless length >= 2 and every value is finite.
  void validate() const;
};

/// Delay embedding with `dimension` coordinates spaced `delay` samples apart.
struct EmbeddingSpec {
  std::size_t dimension = 1;
  std::size_t delay = 1;

  // Smallest series length that yields one row: (m - 1) * tau + 2.
  std::size_t minimum_length() const noexcept { return (dimension - 1) * delay + 2; }
  // Throws InputError if m or tau is zero or the series is too short.
  void validate(std::size_t series_length) const;

  friend bool operator==(const EmbeddingSpec&, const EmbeddingSpec&) = default;
};

/// Affine map v -> (v - min) / (max - min).
struct MinMaxScaling {
  double min = 0.0;
  double max = 1.0;

  double apply(double v) const noexcept { return (v - min) / (max - min); }
};

struct EmbeddedDataset {
  Matrix x;               // rows = n - 1 - (m - 1) tau, cols = m
  std::vector<double> y;  // y[r] = series[r + 1 + (m - 1) tau]
  EmbeddingSpec spec;
  MinMaxScaling scaling;  // identity until scaled
  bool scaled = false;

  std::size_t rows() const noexcept { return y.size(); }
};

struct SplitDataset {
  Matrix train_x;
  std::vector<double> train_y;
  Matrix test_x;
  std::vector<double> test_y;
  double ratio = 0.8;
};

struct DelayEstimate {
  std::size_t delay = 1;
  // False when AMI had no local minimum in range and max_delay was returned.
  bool local_minimum = true;
  std::vector<double> ami;  // ami[k] = AMI at lag k, k = 0..max_delay+1
};

struct DimensionEstimate {
  std::size_t dimension = 1;
  // False when no dimension up to max_dim met the cutoff.
  bool below_cutoff = true;
  std::vector<double> false_fraction;  // false_fraction[m-1] for m = 1..
};

struct FnnOptions {
  double r_tol = 10.0;   // distance-ratio threshold
  double a_tol = 2.0;    // attractor-size threshold
  double cutoff = 0.01;  // accepted fraction of false neighbours
};

/// Sturges' rule, floor(1 + log2 n).
std::size_t default_bins(std::size_t n);

/// Average mutual information between x_t and x_{t+lag} with an equal-width
/// histogram spanning the full series range.
double average_mutual_information(std::span<const double> series, std::size_t lag,
                                  std::size_t bins);

/// First local minimum of AMI over lags 1..max_delay. bins = 0 selects
/// Sturges. Throws EstimationError for a constant series.
DelayEstimate estimate_delay_ami(const TimeSeries& series, std::size_t max_delay,
                                 std::size_t bins = 0);

/// Smallest dimension whose false-nearest-neighbour fraction is below the
/// cutoff. Throws EstimationError if the series cannot be embedded at m = 2.
DimensionEstimate estimate_dimension_fnn(const TimeSeries& series, std::size_t delay,
                                         std::size_t max_dim, const FnnOptions& opts = {});

/// Delay-embeds the series (unscaled).
EmbeddedDataset reconstruct(const TimeSeries& series, const EmbeddingSpec& spec);

/// Min/max over the given values. Throws DataError if max == min.
MinMaxScaling fit_minmax(std::span<const double> values);

/// Applies scaling to every entry of x and y.
EmbeddedDataset scale_minmax(EmbeddedDataset dataset, const MinMaxScaling& scaling);
/// Scales with min/max taken over the dataset's own entries.
EmbeddedDataset scale_minmax(EmbeddedDataset dataset);

inline double invert_minmax(double value, const MinMaxScaling& scaling) noexcept {
  return value * (scaling.max - scaling.min) + scaling.min;
}

/// Applies one scaling to both sides of a split.
SplitDataset scale_split(SplitDataset split, const MinMaxScaling& scaling);

/// Number of training rows for a chronological split: floor(ratio * rows),
/// guarded against representation error in the product.
std::size_t train_row_count(std::size_t rows, double ratio);

/// First train_row_count rows train, the rest test, no shuffling. Throws
/// InputError if either side would be empty.
SplitDataset split_chronological(const EmbeddedDataset& dataset, double ratio);

}  // namespace gsasvr
