#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <stdexcept>

namespace alex::bench {

/// Zipfian ranks in [0, n) in the style of the YCSB generator (Gray et al.),
/// rank 0 most popular. The item count may grow; zeta is extended
/// incrementally.
class ZipfGenerator {
 public:
  ZipfGenerator(std::uint64_t n, double theta) : theta_(theta) {
    if (n == 0) throw std::invalid_argument("zipf: empty domain");
    if (!(theta >= 0.0 && theta < 1.0)) throw std::invalid_argument("zipf: theta must be in [0, 1)");
    alpha_ = 1.0 / (1.0 - theta_);
    zeta2_ = zeta_range(0, 2);
    grow(n);
  }

  std::uint64_t items() const { return n_; }

  void grow(std::uint64_t n) {
    if (n <= n_) return;
    zetan_ += zeta_range(n_, n);
    n_ = n;
    eta_ = (1.0 - std::pow(2.0 / static_cast<double>(n_), 1.0 - theta_)) / (1.0 - zeta2_ / zetan_);
  }

  template <class Rng>
  std::uint64_t operator()(Rng& rng) {
    double u = std::uniform_real_distribution<double>(0.0, 1.0)(rng);
    double uz = u * zetan_;
    if (uz < 1.0) return 0;
    if (n_ >= 2 && uz < 1.0 + std::pow(0.5, theta_)) return 1;
    auto r = static_cast<std::uint64_t>(static_cast<double>(n_) * std::pow(eta_ * u - eta_ + 1.0, alpha_));
    return r < n_ ? r : n_ - 1;
  }

 private:
  double zeta_range(std::uint64_t from, std::uint64_t to) const {
    double s = 0;
    for (std::uint64_t i = from; i < to; ++i) s += 1.0 / std::pow(static_cast<double>(i + 1), theta_);
    return s;
  }

  double theta_;
  double alpha_ = 0;
  double zeta2_ = 0;
  double zetan_ = 0;
  double eta_ = 0;
  std::uint64_t n_ = 0;
};

}  // namespace alex::bench
