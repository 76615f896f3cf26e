#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <stdexcept>

namespace covdist {

// Mixes a (base_seed, stream_id...) tuple into a 64-bit seed.  SplitMix64
// finalizer, so nearby stream ids land far apart in seed space.
inline std::uint64_t mix_seed(std::uint64_t z) {
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

// Chain-mixes a base seed with up to four stream ids into one 64-bit seed.
inline std::uint64_t derive_seed(std::uint64_t base, std::uint64_t a = 0, std::uint64_t b = 0,
                                 std::uint64_t c = 0, std::uint64_t d = 0) {
    return mix_seed(mix_seed(mix_seed(mix_seed(mix_seed(base) ^ a) ^ b) ^ c) ^ d);
}

// Deterministic per-stream generator: each (base_seed, stream ids) tuple
// yields an independent mt19937_64 stream, so parallel trials never share
// state and the merge order does not affect the draws.
class RngStream {
  public:
    explicit RngStream(std::uint64_t base_seed, std::uint64_t s1 = 0,
                       std::uint64_t s2 = 0, std::uint64_t s3 = 0)
        : gen_(mix_seed(mix_seed(mix_seed(mix_seed(base_seed) ^ s1) ^ s2) ^ s3)) {}

    // Uniform on [0, 1) with 53 random bits.
    double uniform() { return static_cast<double>(gen_() >> 11) * 0x1.0p-53; }

    double normal() { return norm_inv_cdf(uniform_open()); }

  private:
    // Uniform on (0, 1); rejects exact zero so the inverse CDF stays finite.
    double uniform_open() {
        double u;
        do {
            u = uniform();
        } while (u <= 0.0);
        return u;
    }

    // Acklam's rational approximation to the standard normal quantile,
    // refined with one Halley step.  Fully deterministic given libm.
    static double norm_inv_cdf(double p) {
        static const double a[] = {-3.969683028665376e+01, 2.209460984245205e+02,
                                   -2.759285104469687e+02, 1.383577518672690e+02,
                                   -3.066479806614716e+01, 2.506628277459239e+00};
        static const double b[] = {-5.447609879822406e+01, 1.615858368580409e+02,
                                   -1.556989798598866e+02, 6.680131188771972e+01,
                                   -1.328068155288572e+01};
        static const double c[] = {-7.784894002430293e-03, -3.223964580411365e-01,
                                   -2.400758277161838e+00, -2.549732539343734e+00,
                                   4.374664141464968e+00,  2.938163982698783e+00};
        static const double d[] = {7.784695709041462e-03, 3.224671290700398e-01,
                                   2.445134137142996e+00, 3.754408661907416e+00};
        const double p_low = 0.02425;
        double x;
        if (p < p_low) {
            double q = std::sqrt(-2.0 * std::log(p));
            x = (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
                ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
        } else if (p <= 1.0 - p_low) {
            double q = p - 0.5;
            double r = q * q;
            x = (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) * q /
                (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1.0);
        } else {
            double q = std::sqrt(-2.0 * std::log(1.0 - p));
            x = -(((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
                ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
        }
        // Halley refinement against the exact CDF.
        double e = 0.5 * std::erfc(-x / std::sqrt(2.0)) - p;
        double u = e * std::sqrt(2.0 * M_PI) * std::exp(x * x / 2.0);
        x = x - u / (1.0 + x * u / 2.0);
        return x;
    }

    std::mt19937_64 gen_;
};

}  // namespace covdist
