#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <span>
#include <stdexcept>
#include <type_traits>

namespace alex {

/// Maps a key to a fractional slot: y = slope * x + intercept.
struct LinearModel {
  double slope = 0.0;
  double intercept = 0.0;

  double raw(double x) const { return slope * x + intercept; }

  bool operator==(const LinearModel&) const = default;
};

template <class Key>
inline double key_to_double(Key k) {
  return static_cast<double>(k);
}

/// Clamp a raw model output to [0, capacity - 1]. NaN goes to 0.
inline std::size_t clamp_slot(double raw, std::size_t capacity) {
  if (!(raw > 0.0)) return 0;
  double last = static_cast<double>(capacity - 1);
  if (raw >= last) return capacity - 1;
  return static_cast<std::size_t>(raw);
}

template <class Key>
inline std::size_t predict(const LinearModel& m, Key key, std::size_t capacity) {
  return clamp_slot(m.raw(key_to_double(key)), capacity);
}

inline LinearModel scale(const LinearModel& m, double factor) {
  if (!(factor > 0.0)) throw std::invalid_argument("scale factor must be positive");
  return {m.slope * factor, m.intercept * factor};
}

/// Running least-squares sums. x is shifted by the first point seen and y by
/// the first target so large keys (1e13 and up) keep their precision.
class ModelAccumulator {
 public:
  void add(double x, double y) {
    if (n_ == 0) {
      x0_ = x;
      y0_ = y;
    }
    double dx = x - x0_, dy = y - y0_;
    ++n_;
    sx_ += dx;
    sy_ += dy;
    sxx_ += dx * dx;
    sxy_ += dx * dy;
  }

  std::size_t count() const { return n_; }

  LinearModel model() const {
    if (n_ == 0) return {};
    double n = static_cast<double>(n_);
    double mx = sx_ / n, my = sy_ / n;
    double var = sxx_ / n - mx * mx;
    double cov = sxy_ / n - mx * my;
    if (n_ == 1 || !(var > 0.0) || !std::isfinite(var)) return {0.0, y0_};
    double slope = cov / var;
    // line passes through (mean x, mean y) in shifted coordinates
    double intercept = (y0_ + my) - slope * (x0_ + mx);
    if (!std::isfinite(slope) || !std::isfinite(intercept)) return {0.0, y0_};
    return {slope, intercept};
  }

 private:
  std::size_t n_ = 0;
  double x0_ = 0, y0_ = 0;
  double sx_ = 0, sy_ = 0, sxx_ = 0, sxy_ = 0;
};

/// Ordinary least squares of targets on keys.
template <class Key, class Target>
LinearModel fit(std::span<const Key> keys, std::span<const Target> targets) {
  if (keys.empty()) throw std::invalid_argument("fit: empty input");
  if (keys.size() != targets.size()) throw std::invalid_argument("fit: length mismatch");
  // two-pass centering is more accurate than running sums for a full fit;
  // keys are first taken relative to the first key
  double n = static_cast<double>(keys.size());
  double x0 = key_to_double(keys[0]);
  double mx = 0, my = 0;
  for (std::size_t i = 0; i < keys.size(); ++i) {
    mx += key_to_double(keys[i]) - x0;
    my += static_cast<double>(targets[i]);
  }
  mx /= n;
  my /= n;
  double sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < keys.size(); ++i) {
    double dx = (key_to_double(keys[i]) - x0) - mx;
    sxx += dx * dx;
    sxy += dx * (static_cast<double>(targets[i]) - my);
  }
  double first = static_cast<double>(targets[0]);
  if (keys.size() == 1 || !(sxx > 0.0)) return {0.0, first};
  double slope = sxy / sxx;
  double intercept = my - slope * (x0 + mx);
  if (!std::isfinite(slope) || !std::isfinite(intercept)) return {0.0, first};
  return {slope, intercept};
}

/// Fit against ranks 0..n-1.
template <class Key>
LinearModel fit_ranks(std::span<const Key> keys) {
  if (keys.empty()) throw std::invalid_argument("fit: empty input");
  double n = static_cast<double>(keys.size());
  double x0 = key_to_double(keys[0]);
  double mx = 0;
  for (auto k : keys) mx += key_to_double(k) - x0;
  mx /= n;
  double my = (n - 1) / 2.0;
  double sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < keys.size(); ++i) {
    double dx = (key_to_double(keys[i]) - x0) - mx;
    sxx += dx * dx;
    sxy += dx * (static_cast<double>(i) - my);
  }
  if (keys.size() == 1 || !(sxx > 0.0)) return {0.0, 0.0};
  double slope = sxy / sxx;
  double intercept = my - slope * (x0 + mx);
  if (!std::isfinite(slope) || !std::isfinite(intercept)) return {0.0, 0.0};
  return {slope, intercept};
}

struct ProgressiveFit {
  LinearModel model;
  std::size_t points_touched = 0;  // sample points fed to the accumulator
  int rounds = 0;                  // sample sizes fitted
};

inline constexpr std::size_t kInitialSample = 64;

namespace detail {
inline bool within_relative(double now, double before, double tol) {
  if (before == 0.0) return now == 0.0;
  return std::fabs(now - before) < tol * std::fabs(before);
}
}  // namespace detail

/// Progressive systematic sampling against rank targets. Stride starts at the
/// largest power of two leaving at least 64 samples and halves each round; the
/// odd multiples of the new stride are added to the running sums.
template <class Key>
ProgressiveFit fit_progressive_detail(std::span<const Key> keys, double tol = 0.01) {
  if (keys.empty()) throw std::invalid_argument("fit_progressive: empty input");
  std::size_t n = keys.size();
  ProgressiveFit out;
  if (n <= kInitialSample) {
    out.model = fit_ranks(keys);
    out.points_touched = n;
    out.rounds = 1;
    return out;
  }
  std::size_t stride = 1;
  while (n / (stride * 2) >= kInitialSample) stride *= 2;

  ModelAccumulator acc;
  for (std::size_t i = 0; i < n; i += stride) acc.add(key_to_double(keys[i]), static_cast<double>(i));
  out.points_touched = acc.count();
  out.rounds = 1;
  LinearModel prev = acc.model();
  while (stride > 1) {
    std::size_t half = stride / 2;
    for (std::size_t i = half; i < n; i += stride) acc.add(key_to_double(keys[i]), static_cast<double>(i));
    stride = half;
    out.points_touched = acc.count();
    ++out.rounds;
    LinearModel cur = acc.model();
    if (detail::within_relative(cur.slope, prev.slope, tol) &&
        detail::within_relative(cur.intercept, prev.intercept, tol)) {
      out.model = cur;
      return out;
    }
    prev = cur;
  }
  out.model = prev;
  return out;
}

template <class Key>
LinearModel fit_progressive(std::span<const Key> keys) {
  return fit_progressive_detail(keys).model;
}

}  // namespace alex
