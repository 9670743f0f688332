#pragma once

#include <cmath>
#include <cstdint>
#include <string>

#include "mgrsc/errors.hpp"

namespace mgrsc {

// Deterministic, platform-stable pseudo-random stream. All sampling in the
// project goes through this class so that a (seed, slot, purpose) triple
// always reproduces the same draws regardless of the standard library's
// distribution implementations.
class Rng {
public:
    explicit Rng(std::uint64_t seed) { set_state(seed); }

    // Derives an independent stream for a named purpose within a slot.
    static Rng split(std::uint64_t seed, const std::string& slot, std::uint64_t purpose) {
        std::uint64_t h = seed;
        for (unsigned char c : slot) h = mix(h ^ c);
        return Rng(mix(h ^ (0x9e3779b97f4a7c15ULL * (purpose + 1))));
    }

    std::uint64_t next_u64() {
        // splitmix64
        std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

    // Uniform in [0, 1), 53-bit resolution.
    double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    // Polar Box-Muller, one deviate per call; the spare is cached.
    double normal() {
        if (have_spare_) {
            have_spare_ = false;
            return spare_;
        }
        double u, v, s;
        do {
            u = 2.0 * uniform() - 1.0;
            v = 2.0 * uniform() - 1.0;
            s = u * u + v * v;
        } while (s >= 1.0 || s == 0.0);
        const double m = std::sqrt(-2.0 * std::log(s) / s);
        spare_ = v * m;
        have_spare_ = true;
        return u * m;
    }

    double normal(double mean, double sd) { return mean + sd * normal(); }

    // Inverse-CDF Weibull with shape k, scale lambda.
    double weibull(double k, double lambda) {
        if (k <= 0.0 || lambda <= 0.0) throw ValidationError("weibull: k and lambda must be > 0");
        const double u = uniform();
        return lambda * std::pow(-std::log1p(-u), 1.0 / k);
    }

    // Marsaglia-Tsang gamma, shape a, unit scale.
    double gamma(double a) {
        if (a <= 0.0) throw ValidationError("gamma: shape must be > 0");
        if (a < 1.0) {
            const double u = uniform();
            return gamma(a + 1.0) * std::pow(u, 1.0 / a);
        }
        const double d = a - 1.0 / 3.0;
        const double c = 1.0 / std::sqrt(9.0 * d);
        for (;;) {
            double x, v;
            do {
                x = normal();
                v = 1.0 + c * x;
            } while (v <= 0.0);
            v = v * v * v;
            const double u = uniform();
            if (u < 1.0 - 0.0331 * x * x * x * x) return d * v;
            if (std::log(u) < 0.5 * x * x + d * (1.0 - v + std::log(v))) return d * v;
        }
    }

    double beta(double a, double b) {
        if (a <= 0.0 || b <= 0.0) throw ValidationError("beta: shape parameters must be > 0");
        const double x = gamma(a);
        const double y = gamma(b);
        return x / (x + y);
    }

    // Rejection-sampled truncated normal on [lo, hi].
    double truncated_normal(double mean, double sd, double lo, double hi) {
        if (!(lo < hi)) throw ValidationError("truncated_normal: requires lo < hi");
        if (sd <= 0.0) throw ValidationError("truncated_normal: sd must be > 0");
        for (int i = 0; i < 100000; ++i) {
            const double x = normal(mean, sd);
            if (x >= lo && x <= hi) return x;
        }
        throw ValidationError("truncated_normal: acceptance region has negligible mass");
    }

private:
    void set_state(std::uint64_t seed) { state_ = mix(seed ^ 0x2545f4914f6cdd1dULL); }

    static std::uint64_t mix(std::uint64_t z) {
        z = (z ^ (z >> 33)) * 0xff51afd7ed558ccdULL;
        z = (z ^ (z >> 33)) * 0xc4ceb9fe1a85ec53ULL;
        return z ^ (z >> 33);
    }

    std::uint64_t state_ = 0;
    double spare_ = 0.0;
    bool have_spare_ = false;
};

}  // namespace mgrsc
