#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "gsasvr/matrix.hpp"

namespace gsasvr {

/// The three epsilon-SVR hyperparameters. This triple is also the search
/// point of the tuners, in (c, gamma, epsilon) order.
struct SvrParams {
  double c = 1.0;        // penalty on tube violations
  double gamma = 1.0;    // RBF width
  double epsilon = 0.1;  // tube half-width

  // Throws InputError unless c > 0, gamma > 0, epsilon >= 0, all finite.
  void validate() const;

  friend bool operator==(const SvrParams&, const SvrParams&) = default;
};

struct TrainingSet {
  Matrix x;               // n rows, d columns
  std::vector<double> y;  // n targets

  // Throws InputError unless rows(x) == size(y), n >= 2, d >= 1, all finite.
  void validate() const;
};

/// How SMO picks the second member of each working pair. Both take the
/// maximal KKT violator as the first member and share the stopping rule.
enum class PairSelection {
  SecondOrder,       // largest guaranteed objective decrease
  MaximalViolation,  // most violating partner
};

struct SolverConfig {
  double kkt_tolerance = 1e-3;
  PairSelection selection = PairSelection::SecondOrder;
  // Temporarily drop bounded points that cannot violate the KKT conditions.
  bool shrinking = true;
  // Pair updates before giving up. Unset means 10'000 * n.
  std::optional<std::size_t> max_iterations;
  // Kernel rows held by the LRU cache. Unset means min(n, 2048).
  std::optional<std::size_t> kernel_cache_rows;

  void validate() const;
  std::size_t resolved_max_iterations(std::size_t n) const;
  std::size_t resolved_cache_rows(std::size_t n) const;
};

/// Dual coefficients with magnitude below this are treated as zero.
inline constexpr double kSupportVectorThreshold = 1e-8;

/// Trained regressor f(x) = sum_k coef_k * K(sv_k, x) + bias.
/// Immutable after training; safe to evaluate from several threads.
struct SvrModel {
  Matrix support_vectors;
  std::vector<double> dual_coefs;  // beta_k - beta*_k, one per support vector
  double bias = 0.0;
  double gamma = 1.0;

  // Solver bookkeeping, not needed for prediction.
  double c = 1.0;
  std::size_t iterations = 0;

  std::size_t dimension() const noexcept { return support_vectors.cols(); }
  std::size_t support_count() const noexcept { return dual_coefs.size(); }
};

/// exp(-gamma * ||a - b||^2). Throws InputError on dimension mismatch.
double rbf_kernel(std::span<const double> a, std::span<const double> b, double gamma);

/// Least-recently-used cache of kernel rows K(x_i, .) over one training set.
/// At least two rows are always kept so that a working pair fits.
class KernelCache {
 public:
  KernelCache(const Matrix& x, double gamma, std::size_t budget_rows);

  // Row i of the kernel matrix. The span stays valid until the next call that
  // misses and evicts it; the solver only holds two rows at a time.
  std::span<const double> row(std::size_t i);
  double diagonal(std::size_t) const noexcept { return 1.0; }

  std::size_t size() const noexcept { return n_; }
  std::size_t capacity() const noexcept { return capacity_; }
  std::size_t hits() const noexcept { return hits_; }
  std::size_t misses() const noexcept { return misses_; }

 private:
  void touch(std::size_t slot);
  void fill(std::size_t i, std::span<double> out) const;

  const Matrix& x_;
  double gamma_;
  std::size_t n_;
  std::size_t capacity_;
  std::vector<double> storage_;        // capacity_ * n_
  std::vector<std::ptrdiff_t> slot_of_;  // row -> slot or -1
  std::vector<std::size_t> row_of_;    // slot -> row
  // Intrusive LRU list over slots; head is most recent.
  std::vector<std::ptrdiff_t> prev_, next_;
  std::ptrdiff_t head_ = -1, tail_ = -1;
  std::size_t used_ = 0;
  std::size_t hits_ = 0, misses_ = 0;
};

/// Solves the epsilon-SVR dual with SMO (maximal violating pair, lowest index
/// on ties). Throws TrainingError when max_iterations is exhausted.
SvrModel train(const TrainingSet& data, const SvrParams& params,
               const SolverConfig& cfg = {});

double predict(const SvrModel& model, std::span<const double> x);

std::vector<double> predict_batch(const SvrModel& model, const Matrix& xs);

}  // namespace gsasvr
