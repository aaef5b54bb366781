#pragma once

#include <cstdint>
#include <random>

namespace revcont {

/// Seeded random stream. All draws go through explicit bit-to-double
/// conversions so a given seed produces the same stream on every platform
/// (std::*_distribution output is implementation-defined; we avoid it).
class Rng {
public:
    explicit Rng(std::uint64_t seed) : gen_(seed) {}

    std::uint64_t bits() { return gen_(); }

    /// Uniform in [0, 1).
    double uniform() { return static_cast<double>(gen_() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    /// Uniform integer in [lo, hi], inclusive.
    int uniform_int(int lo, int hi) {
        const auto span = static_cast<std::uint64_t>(hi - lo) + 1;
        return lo + static_cast<int>(gen_() % span);
    }

    /// Uniform in (0, 1); never returns 0 so logs and inverses stay finite.
    double uniform_pos() {
        double u = uniform();
        return u > 0.0 ? u : 0x1.0p-53;
    }

private:
    std::mt19937_64 gen_;
};

}  // namespace revcont
