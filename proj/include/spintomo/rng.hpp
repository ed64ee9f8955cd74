#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>
#include <vector>

namespace spintomo {

// Seeded variate source. std::*_distribution output differs between standard
// libraries, so the transforms are spelled out to keep streams reproducible.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    /// Uniform on (0, 1).
    double uniform() {
        double u = 0.0;
        do {
            u = static_cast<double>(engine_() >> 11) * 0x1.0p-53;
        } while (u == 0.0);
        return u;
    }

    double normal() {
        double u1 = uniform();
        double u2 = uniform();
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
    }

    double exponential() { return -std::log(uniform()); }

    /// Uniform point on the (n-1)-simplex.
    std::vector<double> simplex(int n) {
        std::vector<double> p(static_cast<std::size_t>(n));
        double total = 0.0;
        for (auto& x : p) total += (x = exponential());
        for (auto& x : p) x /= total;
        return p;
    }

private:
    std::mt19937_64 engine_;
};

}  // namespace spintomo
