#pragma once

#include <cstddef>
#include <stdexcept>
#include <vector>

namespace fsflow {

/// Periodic horizontal grid on [0,L)^{dim_h} with M points per axis.
/// Wavevectors are xi' = 2*pi*k/L for integer k with |k_i| <= M/2.
struct HorizontalGrid {
    int dim_h = 2;       // N-1, one of {1,2,3}
    double length = 1.0; // L, per axis
    int points = 16;     // M, even

    HorizontalGrid() = default;
    HorizontalGrid(int dim_h_, double length_, int points_)
        : dim_h(dim_h_), length(length_), points(points_) {
        if (dim_h < 1 || dim_h > 3) throw std::invalid_argument("HorizontalGrid: dim_h must be 1, 2, or 3");
        if (length <= 0.0) throw std::invalid_argument("HorizontalGrid: length must be positive");
        if (points < 2 || points % 2 != 0) throw std::invalid_argument("HorizontalGrid: points must be even and >= 2");
    }

    std::size_t total() const {
        std::size_t n = 1;
        for (int d = 0; d < dim_h; ++d) n *= static_cast<std::size_t>(points);
        return n;
    }
    double spacing() const { return length / points; }
    double node(int i) const { return spacing() * i; }

    /// Signed integer wavenumber for FFT bin a on one axis (a in [0,M)).
    int wave_index(int a) const { return (a <= points / 2) ? a : a - points; }
    /// Physical wavenumber component 2*pi*k/L.
    double wavenumber(int a) const { return 2.0 * 3.14159265358979323846 * wave_index(a) / length; }

    bool operator==(const HorizontalGrid& o) const {
        return dim_h == o.dim_h && length == o.length && points == o.points;
    }
    bool operator!=(const HorizontalGrid& o) const { return !(*this == o); }
};

/// Truncated depth grid: M_z uniformly spaced nodes on [-H,0], last node exactly 0.
struct VerticalGrid {
    double depth = 1.0; // H
    int points = 16;    // M_z

    VerticalGrid() = default;
    VerticalGrid(double depth_, int points_) : depth(depth_), points(points_) {
        if (depth <= 0.0) throw std::invalid_argument("VerticalGrid: depth must be positive");
        if (points < 4) throw std::invalid_argument("VerticalGrid: needs at least 4 nodes");
    }

    double spacing() const { return depth / (points - 1); }
    double node(int i) const { return -depth + spacing() * i; } // node(points-1) == 0 up to roundoff
    std::vector<double> nodes() const {
        std::vector<double> z(points);
        for (int i = 0; i < points; ++i) z[i] = node(i);
        z[points - 1] = 0.0;
        return z;
    }

    bool operator==(const VerticalGrid& o) const { return depth == o.depth && points == o.points; }
    bool operator!=(const VerticalGrid& o) const { return !(*this == o); }
};

} // namespace fsflow
