#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <string>
#include <vector>

#include "afcmem/error.hpp"

namespace afcmem {

/// Uniform frequency axis shared by all spectral profiles.
///
/// Point i sits at center + (i - count/2) * spacing, so the axis is
/// slightly asymmetric: it starts at center - span/2 and ends one spacing
/// short of center + span/2.
class FrequencyGrid {
public:
    FrequencyGrid(double center, double spacing, std::size_t count)
        : center_(center), spacing_(spacing), count_(count) {
        if (!(spacing > 0.0) || !std::isfinite(spacing))
            throw PhysicsError("FrequencyGrid", "spacing must be positive");
        if (count < 2) throw PhysicsError("FrequencyGrid", "count must be at least 2");
    }

    double center() const noexcept { return center_; }
    double spacing() const noexcept { return spacing_; }
    std::size_t size() const noexcept { return count_; }
    double span() const noexcept { return spacing_ * static_cast<double>(count_); }

    double at(std::size_t i) const noexcept {
        return center_ + (static_cast<double>(i) - static_cast<double>(count_ / 2)) * spacing_;
    }
    double front() const noexcept { return at(0); }
    double back() const noexcept { return at(count_ - 1); }

    bool contains(double freq) const noexcept { return freq >= front() && freq <= back(); }

    /// Fractional index of a frequency (may lie outside [0, size-1]).
    double position(double freq) const noexcept {
        return (freq - center_) / spacing_ + static_cast<double>(count_ / 2);
    }

    /// Nearest grid index, clamped to the axis.
    std::size_t nearest(double freq) const noexcept {
        const double p = std::round(position(freq));
        if (p <= 0.0) return 0;
        const auto last = static_cast<double>(count_ - 1);
        return static_cast<std::size_t>(std::min(p, last));
    }

    std::vector<double> axis() const {
        std::vector<double> out(count_);
        for (std::size_t i = 0; i < count_; ++i) out[i] = at(i);
        return out;
    }

    friend bool operator==(const FrequencyGrid&, const FrequencyGrid&) = default;

private:
    double center_;
    double spacing_;
    std::size_t count_;
};

inline bool is_power_of_two(std::size_t n) noexcept { return n != 0 && (n & (n - 1)) == 0; }

inline std::size_t next_power_of_two(std::size_t n) noexcept {
    std::size_t p = 1;
    while (p < n) p <<= 1;
    return p;
}

/// Grid with spacing span/count centred on `center`. Count must be a power of two.
inline FrequencyGrid make_grid(double center, double span, std::size_t count) {
    if (!(span > 0.0) || !std::isfinite(span)) throw PhysicsError("make_grid", "span must be positive");
    if (count < 2) throw PhysicsError("make_grid", "count must be at least 2");
    if (!is_power_of_two(count))
        throw PhysicsError("make_grid", "count must be a power of two, got " + std::to_string(count));
    return FrequencyGrid(center, span / static_cast<double>(count), count);
}

inline void require_same_grid(const FrequencyGrid& a, const FrequencyGrid& b, const char* operation) {
    if (!(a == b)) throw PhysicsError(operation, "profiles live on different frequency grids");
}

/// A closed frequency interval [lo, hi].
struct FrequencyBand {
    double lo = 0.0;
    double hi = 0.0;

    bool contains(double f) const noexcept { return f >= lo && f <= hi; }
    double width() const noexcept { return hi - lo; }
};

}  // namespace afcmem
