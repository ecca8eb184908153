#pragma once

#include <cstddef>
#include <span>

namespace gsasvr {

/// Actual and predicted values, equal length.
struct ForecastPair {
  std::span<const double> actual;
  std::span<const double> predicted;
};

double mse(const ForecastPair& pair);

/// Mean absolute percentage error as a fraction (not multiplied by 100).
/// Throws InputError naming the index of a zero actual.
double mape(const ForecastPair& pair);

enum class DmLoss { Squared, Absolute };

struct DmOptions {
  DmLoss loss = DmLoss::Squared;
  // Harvey-Leybourne-Newbold small-sample factor for horizon 1.
  bool small_sample_correction = false;
};

struct DmResult {
  double statistic = 0.0;
  bool significant = false;  // |statistic| > 1.96
  std::size_t n = 0;
};

inline constexpr double kDmCriticalValue = 1.96;

/// Diebold-Mariano statistic on the loss differential d_i = L(a_i) - L(b_i)
/// with lag-0 variance (denominator N). Throws DegenerateComparisonError when
/// every d_i is zero.
DmResult diebold_mariano(std::span<const double> errors_a, std::span<const double> errors_b,
                         const DmOptions& opts = {});

}  // namespace gsasvr
