#ifndef TBEN_SPLITMIX64_HPP
#define TBEN_SPLITMIX64_HPP

#include <cmath>
#include <cstdint>

namespace tben {

// SplitMix64 (Steele/Lea/Flood; Vigna's fixed-increment variant). Every
// random draw in the toolkit goes through this generator so that datasets,
// projectors and trained heads are bit-identical across platforms and
// implementations for the same seed.
class SplitMix64 {
  public:
    explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next() {
        std::uint64_t z = (state_ += 0x9E3779B97F4A7C15ull);
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
        return z ^ (z >> 31);
    }

    // Uniform double in [0, 1) with 53-bit resolution.
    double next_unit() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

    // Uniform double in [lo, hi).
    double next_uniform(double lo, double hi) { return lo + (hi - lo) * next_unit(); }

    // Uniform integer in [0, n). Plain modulo; the bias is irrelevant for
    // shuffling and the simple rule keeps cross-language streams identical.
    std::uint64_t next_below(std::uint64_t n) { return next() % n; }

  private:
    std::uint64_t state_;
};

// Standard normal variates via Box-Muller over a SplitMix64 stream. The
// second variate of each pair is cached, so draw order alone determines the
// output sequence.
class GaussianStream {
  public:
    explicit GaussianStream(std::uint64_t seed) : rng_(seed) {}

    double next() {
        if (has_spare_) {
            has_spare_ = false;
            return spare_;
        }
        double u1 = 1.0 - rng_.next_unit();  // (0, 1]: keeps log() finite
        double u2 = rng_.next_unit();
        double r = std::sqrt(-2.0 * std::log(u1));
        double a = 2.0 * 3.14159265358979323846 * u2;
        spare_ = r * std::sin(a);
        has_spare_ = true;
        return r * std::cos(a);
    }

  private:
    SplitMix64 rng_;
    double spare_ = 0.0;
    bool has_spare_ = false;
};

}  // namespace tben

#endif  // TBEN_SPLITMIX64_HPP
