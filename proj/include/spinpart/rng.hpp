#pragma once

// Seed-stable random numbers.  The generator is std::mt19937_64 with
// hand-rolled conversions (53-bit uniform, Box-Muller normal, CDF-binned
// multinomial) so that identical seeds give identical streams on every
// platform and standard library.

#include <cmath>
#include <cstdint>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

namespace spinpart {

class DeterministicRng {
 public:
  explicit DeterministicRng(std::uint64_t seed) : engine_(seed) {}

  // Uniform double in [0, 1) with 53 random bits.
  double uniform() { return double(engine_() >> 11) * 0x1.0p-53; }

  // Standard normal via Box-Muller; generates pairs, caches the spare.
  double normal() {
    if (have_spare_) {
      have_spare_ = false;
      return spare_;
    }
    double u1 = uniform();
    while (u1 <= 0.0) u1 = uniform();
    const double u2 = uniform();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double a = 2.0 * 3.14159265358979323846 * u2;
    spare_ = r * std::sin(a);
    have_spare_ = true;
    return r * std::cos(a);
  }

  // Draws `shots` samples from the distribution `probs` (need not be
  // perfectly normalized; small round-off is absorbed by the last bin).
  std::vector<long> multinomial(const std::vector<double>& probs, long shots) {
    if (probs.empty()) throw std::domain_error("multinomial: empty probability vector");
    std::vector<double> cdf(probs.size());
    double acc = 0.0;
    for (size_t i = 0; i < probs.size(); ++i) {
      if (probs[i] < -1e-12)
        throw std::domain_error("multinomial: negative probability " + std::to_string(probs[i]));
      acc += std::max(0.0, probs[i]);
      cdf[i] = acc;
    }
    if (acc <= 0.0) throw std::domain_error("multinomial: probabilities sum to zero");
    std::vector<long> counts(probs.size(), 0);
    for (long s = 0; s < shots; ++s) {
      const double x = uniform() * acc;
      size_t lo = 0, hi = probs.size() - 1;
      while (lo < hi) {
        const size_t mid = (lo + hi) / 2;
        if (x < cdf[mid])
          hi = mid;
        else
          lo = mid + 1;
      }
      ++counts[lo];
    }
    return counts;
  }

 private:
  std::mt19937_64 engine_;
  bool have_spare_ = false;
  double spare_ = 0.0;
};

}  // namespace spinpart
