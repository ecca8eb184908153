#include "gsasvr/embedding.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "gsasvr/error.hpp"

namespace gsasvr {

void TimeSeries::validate() const {
  if (values.size() < 2) throw InputError("time series needs at least 2 values");
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (!std::isfinite(values[i])) {
      std::ostringstream msg;
      msg << "time series value " << i << " is not finite";
      throw InputError(msg.str());
    }
  }
}

void EmbeddingSpec::validate(std::size_t series_length) const {
  if (dimension < 1) throw InputError("embedding dimension must be >= 1");
  if (delay < 1) throw InputError("embedding delay must be >= 1");
  if (series_length < minimum_length()) {
    std::ostringstream msg;
    msg << "series of length " << series_length << " is too short for m=" << dimension
        << ", tau=" << delay << " (minimum length " << minimum_length() << ")";
    throw InputError(msg.str());
  }
}

std::size_t default_bins(std::size_t n) {
  if (n < 2) return 1;
  return static_cast<std::size_t>(std::floor(1.0 + std::log2(static_cast<double>(n))));
}

namespace {

std::pair<double, double> value_range(std::span<const double> v) {
  const auto [lo, hi] = std::minmax_element(v.begin(), v.end());
  return {*lo, *hi};
}

std::vector<std::size_t> bin_indices(std::span<const double> series, std::size_t bins) {
  const auto [lo, hi] = value_range(series);
  const double width = hi - lo;
  std::vector<std::size_t> idx(series.size());
  for (std::size_t t = 0; t < series.size(); ++t) {
    auto b = static_cast<std::size_t>(std::floor((series[t] - lo) / width * static_cast<double>(bins)));
    idx[t] = std::min(b, bins - 1);
  }
  return idx;
}

double ami_from_bins(const std::vector<std::size_t>& idx, std::size_t lag, std::size_t bins) {
  const std::size_t pairs = idx.size() - lag;
  std::vector<double> joint(bins * bins, 0.0), left(bins, 0.0), right(bins, 0.0);
  for (std::size_t t = 0; t < pairs; ++t) {
    const std::size_t i = idx[t], j = idx[t + lag];
    joint[i * bins + j] += 1.0;
    left[i] += 1.0;
    right[j] += 1.0;
  }
  const double total = static_cast<double>(pairs);
  double mi = 0.0;
  for (std::size_t i = 0; i < bins; ++i) {
    for (std::size_t j = 0; j < bins; ++j) {
      const double c = joint[i * bins + j];
      if (c == 0.0) continue;
      mi += c / total * std::log(c * total / (left[i] * right[j]));
    }
  }
  return mi;
}

void require_variation(std::span<const double> v, const char* what) {
  const auto [lo, hi] = value_range(v);
  if (!(hi > lo)) throw EstimationError(std::string(what) + ": series is constant");
}

}  // namespace

double average_mutual_information(std::span<const double> series, std::size_t lag,
                                  std::size_t bins) {
  if (bins == 0) throw InputError("AMI needs at least one bin");
  if (lag >= series.size()) throw InputError("AMI lag must be shorter than the series");
  require_variation(series, "average mutual information");
  return ami_from_bins(bin_indices(series, bins), lag, bins);
}

DelayEstimate estimate_delay_ami(const TimeSeries& series, std::size_t max_delay,
                                 std::size_t bins) {
  series.validate();
  if (max_delay < 1) throw InputError("max_delay must be >= 1");
  if (series.values.size() <= max_delay + 1) {
    std::ostringstream msg;
    msg << "series of length " << series.values.size() << " is too short for max_delay "
        << max_delay << " (needs more than " << max_delay + 1 << " values)";
    throw EstimationError(msg.str());
  }
  require_variation(series.values, "delay estimation");
  if (bins == 0) bins = default_bins(series.values.size());

  const auto idx = bin_indices(series.values, bins);
  DelayEstimate est;
  est.ami.reserve(max_delay + 2);
  for (std::size_t lag = 0; lag <= max_delay + 1; ++lag)
    est.ami.push_back(ami_from_bins(idx, lag, bins));

  for (std::size_t tau = 1; tau <= max_delay; ++tau) {
    if (est.ami[tau] < est.ami[tau - 1] && est.ami[tau] <= est.ami[tau + 1]) {
      est.delay = tau;
      est.local_minimum = true;
      return est;
    }
  }
  est.delay = max_delay;
  est.local_minimum = false;
  return est;
}

DimensionEstimate estimate_dimension_fnn(const TimeSeries& series, std::size_t delay,
                                         std::size_t max_dim, const FnnOptions& opts) {
  series.validate();
  if (delay < 1) throw InputError("delay must be >= 1");
  if (max_dim < 1) throw InputError("max_dim must be >= 1");
  const auto& x = series.values;
  const std::size_t n = x.size();
  if (n < delay + 2) {
    std::ostringstream msg;
    msg << "series of length " << n << " is too short for false-nearest-neighbour estimation"
        << " with delay " << delay << " (minimum length " << delay + 2 << ")";
    throw EstimationError(msg.str());
  }
  require_variation(x, "dimension estimation");

  double mean = 0.0;
  for (double v : x) mean += v;
  mean /= static_cast<double>(n);
  double var = 0.0;
  for (double v : x) var += (v - mean) * (v - mean);
  const double attractor_size = std::sqrt(var / static_cast<double>(n));

  DimensionEstimate est;
  for (std::size_t m = 1; m <= max_dim; ++m) {
    // Points whose (m+1)-th coordinate exists.
    if (n <= m * delay + 1) break;
    const std::size_t count = n - m * delay;

    std::size_t false_count = 0;
    for (std::size_t i = 0; i < count; ++i) {
      double best = std::numeric_limits<double>::infinity();
      std::size_t nearest = i;
      for (std::size_t j = 0; j < count; ++j) {
        if (j == i) continue;
        double d2 = 0.0;
        for (std::size_t k = 0; k < m && d2 < best; ++k) {
          const double diff = x[i + k * delay] - x[j + k * delay];
          d2 += diff * diff;
        }
        if (d2 < best) {
          best = d2;
          nearest = j;
        }
      }
      const double dist = std::sqrt(best);
      const double extra = std::abs(x[i + m * delay] - x[nearest + m * delay]);
      const bool ratio_test = dist > 0.0 ? extra / dist > opts.r_tol : extra > 0.0;
      const bool size_test = std::sqrt(best + extra * extra) / attractor_size > opts.a_tol;
      if (ratio_test || size_test) ++false_count;
    }
    const double fraction = static_cast<double>(false_count) / static_cast<double>(count);
    est.false_fraction.push_back(fraction);
    if (fraction < opts.cutoff) {
      est.dimension = m;
      est.below_cutoff = true;
      return est;
    }
  }
  est.dimension = std::max<std::size_t>(est.false_fraction.size(), 1);
  est.below_cutoff = false;
  return est;
}

EmbeddedDataset reconstruct(const TimeSeries& series, const EmbeddingSpec& spec) {
  spec.validate(series.values.size());
  const auto& v = series.values;
  const std::size_t m = spec.dimension, tau = spec.delay;
  const std::size_t rows = v.size() - 1 - (m - 1) * tau;

  EmbeddedDataset out;
  out.spec = spec;
  out.x = Matrix(rows, m);
  out.y.resize(rows);
  for (std::size_t r = 0; r < rows; ++r) {
    for (std::size_t j = 0; j < m; ++j) out.x(r, j) = v[r + j * tau];
    out.y[r] = v[r + 1 + (m - 1) * tau];
  }
  return out;
}

MinMaxScaling fit_minmax(std::span<const double> values) {
  if (values.empty()) throw DataError("cannot fit min-max scaling to no values");
  const auto [lo, hi] = value_range(values);
  if (!(hi > lo)) throw DataError("cannot min-max scale a constant series");
  return {lo, hi};
}

namespace {

void apply_scaling(Matrix& x, std::vector<double>& y, const MinMaxScaling& s) {
  for (double& v : x.values()) v = s.apply(v);
  for (double& v : y) v = s.apply(v);
}

}  // namespace

EmbeddedDataset scale_minmax(EmbeddedDataset dataset, const MinMaxScaling& scaling) {
  if (!(scaling.max > scaling.min)) throw DataError("min-max scaling needs max > min");
  apply_scaling(dataset.x, dataset.y, scaling);
  dataset.scaling = scaling;
  dataset.scaled = true;
  return dataset;
}

EmbeddedDataset scale_minmax(EmbeddedDataset dataset) {
  std::vector<double> all(dataset.x.values().begin(), dataset.x.values().end());
  all.insert(all.end(), dataset.y.begin(), dataset.y.end());
  const auto scaling = fit_minmax(all);
  return scale_minmax(std::move(dataset), scaling);
}

SplitDataset scale_split(SplitDataset split, const MinMaxScaling& scaling) {
  if (!(scaling.max > scaling.min)) throw DataError("min-max scaling needs max > min");
  apply_scaling(split.train_x, split.train_y, scaling);
  apply_scaling(split.test_x, split.test_y, scaling);
  return split;
}

std::size_t train_row_count(std::size_t rows, double ratio) {
  return static_cast<std::size_t>(std::floor(ratio * static_cast<double>(rows) + 1e-9));
}

SplitDataset split_chronological(const EmbeddedDataset& dataset, double ratio) {
  if (!(ratio > 0.0 && ratio < 1.0)) throw InputError("split ratio must lie in (0, 1)");
  const std::size_t rows = dataset.rows();
  const std::size_t n_train = train_row_count(rows, ratio);
  if (n_train == 0 || n_train >= rows) {
    std::ostringstream msg;
    msg << "split ratio " << ratio << " leaves an empty side for " << rows << " rows";
    throw InputError(msg.str());
  }
  SplitDataset out;
  out.ratio = ratio;
  out.train_x = dataset.x.slice_rows(0, n_train);
  out.test_x = dataset.x.slice_rows(n_train, rows);
  out.train_y.assign(dataset.y.begin(), dataset.y.begin() + static_cast<std::ptrdiff_t>(n_train));
  out.test_y.assign(dataset.y.begin() + static_cast<std::ptrdiff_t>(n_train), dataset.y.end());
  return out;
}

}  // namespace gsasvr
