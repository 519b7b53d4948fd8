// Seeded random stream with platform-independent uniform/normal draws.
// std::uniform_real_distribution is implementation-defined, which would break
// the byte-identical-report contract, so the mapping is done explicitly.
#pragma once

#include <cmath>
#include <cstdint>
#include <random>

namespace hessfield {

class RngStream {
  public:
    explicit RngStream(std::uint64_t seed) : eng_(seed) {}

    // uniform in [0, 1)
    double uniform() { return static_cast<double>(eng_() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    // standard normal via Box-Muller (two draws per pair, one cached)
    double normal() {
        if (have_cached_) {
            have_cached_ = false;
            return cached_;
        }
        double u1 = uniform();
        double u2 = uniform();
        while (u1 <= 0x1.0p-60) u1 = uniform();
        const double rad = std::sqrt(-2.0 * std::log(u1));
        const double ang = 2.0 * 3.14159265358979323846 * u2;
        cached_ = rad * std::sin(ang);
        have_cached_ = true;
        return rad * std::cos(ang);
    }

    std::uint64_t raw() { return eng_(); }

  private:
    std::mt19937_64 eng_;
    bool have_cached_ = false;
    double cached_ = 0.0;
};

}  // namespace hessfield
