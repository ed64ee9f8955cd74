#pragma once

#include <charconv>
#include <cmath>
#include <compare>
#include <string>
#include <string_view>

#include "spintomo/error.hpp"

namespace spintomo {

/// Exact half-integer, stored as twice its value.
class HalfInt {
public:
    constexpr HalfInt() = default;

    static constexpr HalfInt from_twice(int twice) { return HalfInt(twice); }

    /// Accepts "3/2", "-1/2", "2" or a decimal that is a multiple of 0.5 ("1.5").
    static HalfInt parse(std::string_view text) {
        auto fail = [&] { return Error(ErrorKind::InvalidInput, "not a half-integer: '" + std::string(text) + "'"); };
        if (text.empty()) throw fail();
        if (auto slash = text.find('/'); slash != std::string_view::npos) {
            int num = 0, den = 0;
            auto num_txt = text.substr(0, slash), den_txt = text.substr(slash + 1);
            auto r1 = std::from_chars(num_txt.data(), num_txt.data() + num_txt.size(), num);
            auto r2 = std::from_chars(den_txt.data(), den_txt.data() + den_txt.size(), den);
            if (r1.ec != std::errc{} || r1.ptr != num_txt.data() + num_txt.size() || r2.ec != std::errc{} ||
                r2.ptr != den_txt.data() + den_txt.size())
                throw fail();
            if (den == 1) return from_twice(2 * num);
            if (den == 2) return from_twice(num);
            throw fail();
        }
        double value = 0.0;
        try {
            std::size_t used = 0;
            value = std::stod(std::string(text), &used);
            if (used != text.size()) throw fail();
        } catch (const std::logic_error&) {
            throw fail();
        }
        double twice = 2.0 * value;
        if (!std::isfinite(twice) || std::abs(twice - std::round(twice)) > 1e-12 || std::abs(twice) > 1e6) throw fail();
        return from_twice(static_cast<int>(std::lround(twice)));
    }

    constexpr int twice() const { return twice_; }
    constexpr double value() const { return 0.5 * twice_; }
    constexpr bool is_integer() const { return twice_ % 2 == 0; }

    std::string str() const {
        if (is_integer()) return std::to_string(twice_ / 2);
        return std::to_string(twice_) + "/2";
    }

    constexpr auto operator<=>(const HalfInt&) const = default;

private:
    constexpr explicit HalfInt(int twice) : twice_(twice) {}
    int twice_ = 0;
};

using Spin = HalfInt;

constexpr int dimension(Spin j) { return j.twice() + 1; }

inline Spin spin_from_dim(int dim) {
    if (dim < 1) throw Error(ErrorKind::DimensionMismatch, "dimension must be positive, got " + std::to_string(dim));
    return Spin::from_twice(dim - 1);
}

inline Spin checked_spin(HalfInt j) {
    if (j.twice() < 0) throw Error(ErrorKind::InvalidSpinLabel, "spin must be nonnegative, got " + j.str());
    return j;
}

// Basis index k of |j m> in the descending-m ordering (m = j first).
constexpr int basis_index(Spin j, HalfInt m) { return (j.twice() - m.twice()) / 2; }
constexpr HalfInt magnetic_at(Spin j, int index) { return HalfInt::from_twice(j.twice() - 2 * index); }

inline bool is_valid_projection(Spin j, HalfInt m) {
    return j.twice() >= 0 && std::abs(m.twice()) <= j.twice() && (j.twice() - m.twice()) % 2 == 0;
}

}  // namespace spintomo
