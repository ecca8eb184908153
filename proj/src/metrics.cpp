#include "gsasvr/metrics.hpp"

#include <cmath>
#include <sstream>
#include <vector>

#include "gsasvr/error.hpp"

namespace gsasvr {

namespace {

void check_pair(const ForecastPair& pair) {
  if (pair.actual.size() != pair.predicted.size()) {
    std::ostringstream msg;
    msg << "forecast pair lengths differ (" << pair.actual.size() << " vs "
        << pair.predicted.size() << ")";
    throw InputError(msg.str());
  }
  if (pair.actual.empty()) throw InputError("forecast pair is empty");
  for (std::size_t i = 0; i < pair.actual.size(); ++i)
    if (!std::isfinite(pair.actual[i]) || !std::isfinite(pair.predicted[i]))
      throw InputError("forecast pair contains non-finite values");
}

}  // namespace

double mse(const ForecastPair& pair) {
  check_pair(pair);
  double sum = 0.0;
  for (std::size_t i = 0; i < pair.actual.size(); ++i) {
    const double e = pair.actual[i] - pair.predicted[i];
    sum += e * e;
  }
  return sum / static_cast<double>(pair.actual.size());
}

double mape(const ForecastPair& pair) {
  check_pair(pair);
  double sum = 0.0;
  for (std::size_t i = 0; i < pair.actual.size(); ++i) {
    if (pair.actual[i] == 0.0) {
      std::ostringstream msg;
      msg << "MAPE undefined: actual value at index " << i << " is zero";
      throw InputError(msg.str());
    }
    sum += std::abs((pair.actual[i] - pair.predicted[i]) / pair.actual[i]);
  }
  return sum / static_cast<double>(pair.actual.size());
}

DmResult diebold_mariano(std::span<const double> errors_a, std::span<const double> errors_b,
                         const DmOptions& opts) {
  if (errors_a.size() != errors_b.size())
    throw InputError("Diebold-Mariano: error vectors differ in length");
  const std::size_t n = errors_a.size();
  if (n < 2) throw InputError("Diebold-Mariano needs at least 2 forecast errors");

  auto loss = [&](double e) { return opts.loss == DmLoss::Squared ? e * e : std::abs(e); };
  std::vector<double> d(n);
  bool any_nonzero = false;
  for (std::size_t i = 0; i < n; ++i) {
    d[i] = loss(errors_a[i]) - loss(errors_b[i]);
    any_nonzero = any_nonzero || d[i] != 0.0;
  }
  if (!any_nonzero)
    throw DegenerateComparisonError("Diebold-Mariano: loss differential is identically zero");

  const double count = static_cast<double>(n);
  double mean = 0.0;
  for (double v : d) mean += v;
  mean /= count;
  double var = 0.0;
  for (double v : d) var += (v - mean) * (v - mean);
  var /= count;
  if (!(var > 0.0))
    throw DegenerateComparisonError("Diebold-Mariano: loss differential has zero variance");

  DmResult out;
  out.n = n;
  out.statistic = mean / std::sqrt(var / count);
  if (opts.small_sample_correction) out.statistic *= std::sqrt((count - 1.0) / count);
  out.significant = std::abs(out.statistic) > kDmCriticalValue;
  return out;
}

}  // namespace gsasvr
