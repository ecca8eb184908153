#include "gsasvr/svr.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <string>

#include "gsasvr/error.hpp"
#include "kernel_fill.hpp"

namespace gsasvr {

namespace {

bool all_finite(std::span<const double> v) {
  return std::all_of(v.begin(), v.end(), [](double x) { return std::isfinite(x); });
}

double squared_distance(std::span<const double> a, std::span<const double> b) {
  double sum = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) {
    const double diff = a[k] - b[k];
    sum += diff * diff;
  }
  return sum;
}

}  // namespace

void SvrParams::validate() const {
  if (!(std::isfinite(c) && c > 0.0)) throw InputError("SVR penalty C must be positive");
  if (!(std::isfinite(gamma) && gamma > 0.0)) throw InputError("RBF gamma must be positive");
  if (!(std::isfinite(epsilon) && epsilon >= 0.0))
    throw InputError("SVR epsilon must be non-negative");
}

void TrainingSet::validate() const {
  if (x.rows() != y.size()) {
    std::ostringstream msg;
    msg << "training set has " << x.rows() << " rows but " << y.size() << " targets";
    throw InputError(msg.str());
  }
  if (y.size() < 2) throw InputError("training set needs at least 2 rows");
  if (x.cols() < 1) throw InputError("training set needs at least 1 feature column");
  if (!all_finite(x.values()) || !all_finite(y))
    throw InputError("training set contains non-finite values");
}

void SolverConfig::validate() const {
  if (!(kkt_tolerance > 0.0)) throw InputError("kkt_tolerance must be positive");
  if (max_iterations && *max_iterations < 1) throw InputError("max_iterations must be >= 1");
}

std::size_t SolverConfig::resolved_max_iterations(std::size_t n) const {
  return max_iterations.value_or(std::max<std::size_t>(10'000 * n, 1));
}

std::size_t SolverConfig::resolved_cache_rows(std::size_t n) const {
  return kernel_cache_rows.value_or(std::min<std::size_t>(n, 2048));
}

double rbf_kernel(std::span<const double> a, std::span<const double> b, double gamma) {
  if (a.size() != b.size()) {
    std::ostringstream msg;
    msg << "rbf_kernel: dimension mismatch (" << a.size() << " vs " << b.size() << ")";
    throw InputError(msg.str());
  }
  return std::exp(-gamma * squared_distance(a, b));
}

// ---------------------------------------------------------------------------
// KernelCache

KernelCache::KernelCache(const Matrix& x, double gamma, std::size_t budget_rows)
    : x_(x),
      gamma_(gamma),
      n_(x.rows()),
      capacity_(std::min(n_, std::max<std::size_t>(budget_rows, 2))),
      storage_(capacity_ * n_),
      slot_of_(n_, -1),
      row_of_(capacity_),
      prev_(capacity_, -1),
      next_(capacity_, -1) {}

void KernelCache::fill(std::size_t i, std::span<double> out) const {
  const auto xi = x_.row(i);
  for (std::size_t j = 0; j < n_; ++j) out[j] = squared_distance(xi, x_.row(j));
  detail::exp_neg_scaled(out.data(), n_, gamma_);
}

void KernelCache::touch(std::size_t slot) {
  const auto s = static_cast<std::ptrdiff_t>(slot);
  if (head_ == s) return;
  // unlink
  if (prev_[slot] >= 0) next_[static_cast<std::size_t>(prev_[slot])] = next_[slot];
  if (next_[slot] >= 0) prev_[static_cast<std::size_t>(next_[slot])] = prev_[slot];
  if (tail_ == s) tail_ = prev_[slot];
  // push front
  prev_[slot] = -1;
  next_[slot] = head_;
  if (head_ >= 0) prev_[static_cast<std::size_t>(head_)] = s;
  head_ = s;
  if (tail_ < 0) tail_ = s;
}

std::span<const double> KernelCache::row(std::size_t i) {
  if (slot_of_[i] >= 0) {
    ++hits_;
    const auto slot = static_cast<std::size_t>(slot_of_[i]);
    touch(slot);
    return {storage_.data() + slot * n_, n_};
  }
  ++misses_;
  std::size_t slot;
  if (used_ < capacity_) {
    slot = used_++;
  } else {
    slot = static_cast<std::size_t>(tail_);
    slot_of_[row_of_[slot]] = -1;
  }
  row_of_[slot] = i;
  slot_of_[i] = static_cast<std::ptrdiff_t>(slot);
  std::span<double> out{storage_.data() + slot * n_, n_};
  fill(i, out);
  touch(slot);
  return out;
}

// ---------------------------------------------------------------------------
// SMO for the epsilon-SVR dual.
//
// Variables alpha[0..n) are beta_i with sign +1, alpha[n..2n) are beta*_i with
// sign -1. The dual is
//   min 0.5 a'Qa + p'a  s.t.  s'a = 0,  0 <= a <= C
// with Q_ts = s_t s_u K(t mod n, u mod n), p_t = eps - y_t (t < n) and
// p_t = eps + y_{t-n} (t >= n).
//
// With f_p = sum_u K(p, u)(beta_u - beta*_u) the scaled gradients are
//   -s_t G_t = r_p - eps (t = p),  r_p + eps (t = p + n),  r_p = y_p - f_p,
// so a single residual per point carries the whole gradient.

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

class EpsilonSvrSolver {
 public:
  EpsilonSvrSolver(const TrainingSet& data, const SvrParams& params, const SolverConfig& cfg)
      : n_(data.y.size()),
        c_(params.c),
        eps_(params.epsilon),
        tol_(cfg.kkt_tolerance),
        selection_(cfg.selection),
        max_iter_(cfg.resolved_max_iterations(data.y.size())),
        cache_(data.x, params.gamma, cfg.resolved_cache_rows(data.y.size())),
        alpha_(2 * n_, 0.0),
        r_(data.y),
        off_up_(n_),
        off_low_(n_),
        up_star_(n_),
        y_(data.y),
        shrinking_(cfg.shrinking) {
    active_.resize(n_);
    for (std::size_t p = 0; p < n_; ++p) {
      active_[p] = p;
      refresh(p);
    }
    scan();
  }

  void solve() {
    std::size_t countdown = std::min<std::size_t>(n_, 1000);
    while (true) {
      if (shrinking_ && --countdown == 0) {
        shrink();
        countdown = std::min<std::size_t>(n_, 1000);
      }
      if (gmax_ - gmin_ < tol_) {
        if (active_.size() == n_) return;
        // Converged on the active set; confirm on all points.
        unshrink();
        if (gmax_ - gmin_ < tol_) return;
        countdown = 1;
      }
      if (iterations_ >= max_iter_) {
        std::ostringstream msg;
        msg << "SMO did not converge within " << iterations_ << " pair updates";
        throw TrainingError(msg.str(), iterations_);
      }
      ++iterations_;
      const std::size_t i = up_star_[imax_] ? imax_ + n_ : imax_;
      const std::size_t j = selection_ == PairSelection::MaximalViolation ? low_variable(jmin_)
                                                                          : second_order_partner(i);
      update_pair(i, j);
    }
  }

  std::vector<double> coefficients() const {
    std::vector<double> out(n_);
    for (std::size_t i = 0; i < n_; ++i) out[i] = alpha_[i] - alpha_[i + n_];
    return out;
  }

  // Bias b = -rho, rho averaged over free variables or the midpoint of the
  // feasible interval when no variable is free.
  double bias() const {
    double ub = kInf;
    double lb = -kInf;
    double sum_free = 0.0;
    std::size_t free_count = 0;
    for (std::size_t t = 0; t < 2 * n_; ++t) {
      const double yg = -v(t);
      if (alpha_[t] >= c_) {
        if (sign(t) < 0) ub = std::min(ub, yg);
        else lb = std::max(lb, yg);
      } else if (alpha_[t] <= 0.0) {
        if (sign(t) > 0) ub = std::min(ub, yg);
        else lb = std::max(lb, yg);
      } else {
        ++free_count;
        sum_free += yg;
      }
    }
    const double rho = free_count > 0 ? sum_free / static_cast<double>(free_count) : (ub + lb) / 2;
    return -rho;
  }

  std::size_t iterations() const noexcept { return iterations_; }

 private:
  double sign(std::size_t t) const noexcept { return t < n_ ? 1.0 : -1.0; }
  std::size_t point(std::size_t t) const noexcept { return t < n_ ? t : t - n_; }
  // -s_t G_t
  double v(std::size_t t) const noexcept { return t < n_ ? r_[t] - eps_ : r_[t - n_] + eps_; }
  double grad(std::size_t t) const noexcept { return -sign(t) * v(t); }

  // Recomputes which of point p's variables can move up (increase -s G) or
  // down, as offsets from r_p. On equal values beta_p wins over beta*_p.
  void refresh(std::size_t p) {
    const double beta = alpha_[p], beta_star = alpha_[p + n_];
    const bool star_up = beta_star > 0.0 && (eps_ > 0.0 || beta >= c_);
    up_star_[p] = star_up;
    off_up_[p] = star_up ? eps_ : (beta < c_ ? -eps_ : -kInf);
    off_low_[p] = beta > 0.0 ? -eps_ : (beta_star < c_ ? eps_ : kInf);
  }

  std::size_t low_variable(std::size_t p) const { return alpha_[p] > 0.0 ? p : p + n_; }

  // Largest up value and smallest low value, lowest point index on ties.
  void scan() {
    gmax_ = -kInf;
    gmin_ = kInf;
    for (const std::size_t p : active_) {
      const double u = r_[p] + off_up_[p];
      const double l = r_[p] + off_low_[p];
      if (u > gmax_) {
        gmax_ = u;
        imax_ = p;
      }
      if (l < gmin_) {
        gmin_ = l;
        jmin_ = p;
      }
    }
  }

  // Partner maximizing the guaranteed decrease b^2 / a with b = gmax - v_t.
  std::size_t second_order_partner(std::size_t i) {
    const auto ki = cache_.row(point(i));
    // Compares b^2 / a as fractions to keep the division out of the loop.
    const double* const r = r_.data();
    const double* const low = off_low_.data();
    const double gmax = gmax_;
    double best_num = -1.0, best_den = 1.0;
    std::size_t best_p = jmin_;
    for (const std::size_t p : active_) {
      const double b = gmax - (r[p] + low[p]);
      if (b <= 0.0) continue;
      const double a = std::max(2.0 - 2.0 * ki[p], kTau);
      const double num = b * b;
      if (num * best_den > best_num * a) {
        best_num = num;
        best_den = a;
        best_p = p;
      }
    }
    return low_variable(best_p);
  }

  // A bounded variable that can only move up is stuck while its value is
  // below gmin; one that can only move down while above gmax. Points whose
  // variables are all stuck leave the active set.
  bool stuck(std::size_t p) const {
    const double beta = alpha_[p], beta_star = alpha_[p + n_];
    const double lo = r_[p] - eps_, hi = r_[p] + eps_;
    bool ok = true;
    if (beta <= 0.0) ok = ok && lo < gmin_;
    else if (beta >= c_) ok = ok && lo > gmax_;
    else return false;
    if (beta_star <= 0.0) ok = ok && hi > gmax_;
    else if (beta_star >= c_) ok = ok && hi < gmin_;
    else return false;
    return ok;
  }

  void shrink() {
    if (!unshrunk_ && gmax_ - gmin_ <= 10.0 * tol_) {
      // Close to the end: refresh stale residuals once before trusting them.
      unshrunk_ = true;
      unshrink();
    }
    std::erase_if(active_, [this](std::size_t p) { return stuck(p); });
  }

  // Recomputes residuals of inactive points and reactivates everything.
  void unshrink() {
    if (active_.size() < n_) {
      std::vector<char> is_active(n_, 0);
      for (const std::size_t p : active_) is_active[p] = 1;
      std::vector<std::size_t> inactive;
      for (std::size_t p = 0; p < n_; ++p) {
        if (is_active[p]) continue;
        inactive.push_back(p);
        r_[p] = y_[p];
      }
      for (std::size_t u = 0; u < n_; ++u) {
        const double coef = alpha_[u] - alpha_[u + n_];
        if (coef == 0.0) continue;
        const auto ku = cache_.row(u);
        for (const std::size_t p : inactive) r_[p] -= ku[p] * coef;
      }
      active_.resize(n_);
      for (std::size_t p = 0; p < n_; ++p) active_[p] = p;
    }
    scan();
  }

  void update_pair(std::size_t i, std::size_t j) {
    const std::size_t pi = point(i), pj = point(j);
    const double si = sign(i), sj = sign(j);
    const double kij = cache_.row(pi)[pj];
    // Q_ii = Q_jj = 1 for the RBF kernel; Q_ij = si sj K.
    const double qij = si * sj * kij;
    const double gi = grad(i), gj = grad(j);

    const double old_i = alpha_[i], old_j = alpha_[j];
    if (si != sj) {
      double quad = 2.0 + 2.0 * qij;
      if (quad <= 0.0) quad = kTau;
      const double delta = (-gi - gj) / quad;
      const double diff = alpha_[i] - alpha_[j];
      alpha_[i] += delta;
      alpha_[j] += delta;
      if (diff > 0) {
        if (alpha_[j] < 0) {
          alpha_[j] = 0;
          alpha_[i] = diff;
        }
      } else if (alpha_[i] < 0) {
        alpha_[i] = 0;
        alpha_[j] = -diff;
      }
      if (diff > 0) {
        if (alpha_[i] > c_) {
          alpha_[i] = c_;
          alpha_[j] = c_ - diff;
        }
      } else if (alpha_[j] > c_) {
        alpha_[j] = c_;
        alpha_[i] = c_ + diff;
      }
    } else {
      double quad = 2.0 - 2.0 * qij;
      if (quad <= 0.0) quad = kTau;
      const double delta = (gi - gj) / quad;
      const double sum = alpha_[i] + alpha_[j];
      alpha_[i] -= delta;
      alpha_[j] += delta;
      if (sum > c_) {
        if (alpha_[i] > c_) {
          alpha_[i] = c_;
          alpha_[j] = sum - c_;
        }
      } else if (alpha_[j] < 0) {
        alpha_[j] = 0;
        alpha_[i] = sum;
      }
      if (sum > c_) {
        if (alpha_[j] > c_) {
          alpha_[j] = c_;
          alpha_[i] = sum - c_;
        }
      } else if (alpha_[i] < 0) {
        alpha_[i] = 0;
        alpha_[j] = sum;
      }
    }
    refresh(pi);
    refresh(pj);

    // r_p -= K(p, pi) s_i d_i + K(p, pj) s_j d_j, fused with the next scan.
    const double wi = si * (alpha_[i] - old_i);
    const double wj = sj * (alpha_[j] - old_j);
    const auto ki = cache_.row(pi);
    const auto kj = cache_.row(pj);
    double* const r = r_.data();
    const double* const up = off_up_.data();
    const double* const low = off_low_.data();
    double gmax = -kInf, gmin = kInf;
    std::size_t imax = imax_, jmin = jmin_;
    for (const std::size_t p : active_) {
      const double rp = r[p] - (ki[p] * wi + kj[p] * wj);
      r[p] = rp;
      const double u = rp + up[p];
      const double l = rp + low[p];
      if (u > gmax) {
        gmax = u;
        imax = p;
      }
      if (l < gmin) {
        gmin = l;
        jmin = p;
      }
    }
    gmax_ = gmax;
    gmin_ = gmin;
    imax_ = imax;
    jmin_ = jmin;
  }

  static constexpr double kTau = 1e-12;

  std::size_t n_;
  double c_;
  double eps_;
  double tol_;
  PairSelection selection_;
  std::size_t max_iter_;
  KernelCache cache_;
  std::vector<double> alpha_;
  std::vector<double> r_;
  std::vector<double> off_up_;
  std::vector<double> off_low_;
  std::vector<char> up_star_;
  const std::vector<double>& y_;
  bool shrinking_;
  bool unshrunk_ = false;
  std::vector<std::size_t> active_;
  double gmax_ = 0.0, gmin_ = 0.0;
  std::size_t imax_ = 0, jmin_ = 0;
  std::size_t iterations_ = 0;
};

}  // namespace

SvrModel train(const TrainingSet& data, const SvrParams& params, const SolverConfig& cfg) {
  data.validate();
  params.validate();
  cfg.validate();

  EpsilonSvrSolver solver(data, params, cfg);
  solver.solve();

  const auto coefs = solver.coefficients();
  SvrModel model;
  model.gamma = params.gamma;
  model.c = params.c;
  model.bias = solver.bias();
  model.iterations = solver.iterations();

  std::vector<double> sv_values;
  for (std::size_t i = 0; i < coefs.size(); ++i) {
    if (std::abs(coefs[i]) < kSupportVectorThreshold) continue;
    model.dual_coefs.push_back(coefs[i]);
    const auto r = data.x.row(i);
    sv_values.insert(sv_values.end(), r.begin(), r.end());
  }
  model.support_vectors = Matrix(model.dual_coefs.size(), data.x.cols(), std::move(sv_values));
  return model;
}

double predict(const SvrModel& model, std::span<const double> x) {
  if (model.dimension() != 0 && x.size() != model.dimension()) {
    std::ostringstream msg;
    msg << "predict: expected " << model.dimension() << " features, got " << x.size();
    throw InputError(msg.str());
  }
  double sum = model.bias;
  for (std::size_t k = 0; k < model.support_count(); ++k)
    sum += model.dual_coefs[k] * std::exp(-model.gamma * squared_distance(model.support_vectors.row(k), x));
  return sum;
}

std::vector<double> predict_batch(const SvrModel& model, const Matrix& xs) {
  std::vector<double> out;
  out.reserve(xs.rows());
  for (std::size_t r = 0; r < xs.rows(); ++r) out.push_back(predict(model, xs.row(r)));
  return out;
}

}  // namespace gsasvr
