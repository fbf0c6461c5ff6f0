#pragma once

#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <vector>

#include "fsflow/grid.hpp"

namespace fsflow {

/// Surface elevation (or any scalar boundary field) on the horizontal torus.
struct HeightField {
    HorizontalGrid grid;
    std::vector<double> values; // size grid.total()

    HeightField() = default;
    explicit HeightField(const HorizontalGrid& g) : grid(g), values(g.total(), 0.0) {}

    double& operator[](std::size_t i) { return values[i]; }
    double operator[](std::size_t i) const { return values[i]; }
    std::size_t size() const { return values.size(); }

    bool all_finite() const {
        for (double v : values)
            if (!std::isfinite(v)) return false;
        return true;
    }
};

/// Scalar or N-vector field on torus x [-H,0].
/// Storage: component-major, then horizontal index, then vertical index.
struct BulkField {
    HorizontalGrid h_grid;
    VerticalGrid v_grid;
    int components = 1;
    std::vector<double> values;

    BulkField() = default;
    BulkField(const HorizontalGrid& hg, const VerticalGrid& vg, int comps)
        : h_grid(hg), v_grid(vg), components(comps),
          values(static_cast<std::size_t>(comps) * hg.total() * vg.points, 0.0) {
        if (comps < 1) throw std::invalid_argument("BulkField: components must be >= 1");
    }

    std::size_t horiz() const { return h_grid.total(); }
    int nz() const { return v_grid.points; }

    std::size_t index(int c, std::size_t ih, int iz) const {
        return (static_cast<std::size_t>(c) * horiz() + ih) * static_cast<std::size_t>(nz()) + iz;
    }
    double& at(int c, std::size_t ih, int iz) { return values[index(c, ih, iz)]; }
    double at(int c, std::size_t ih, int iz) const { return values[index(c, ih, iz)]; }

    /// Trace at x_N = 0 of one component.
    HeightField trace_top(int c = 0) const {
        HeightField f(h_grid);
        const int top = nz() - 1;
        for (std::size_t ih = 0; ih < horiz(); ++ih) f[ih] = at(c, ih, top);
        return f;
    }

    bool all_finite() const {
        for (double v : values)
            if (!std::isfinite(v)) return false;
        return true;
    }

    bool same_grids(const BulkField& o) const { return h_grid == o.h_grid && v_grid == o.v_grid; }
};

inline void require_same_grids(const BulkField& a, const BulkField& b, const char* what) {
    if (!a.same_grids(b)) throw std::invalid_argument(std::string("grid mismatch: ") + what);
}
inline void require_same_grid(const HeightField& a, const HorizontalGrid& g, const char* what) {
    if (!(a.grid == g)) throw std::invalid_argument(std::string("grid mismatch: ") + what);
}

// Domain-specific error types.

/// The flattening map degenerates: min(1 + dz E_N eta) dropped below 1/2.
struct DiffeoViolation : std::runtime_error {
    double min_jacobian;
    explicit DiffeoViolation(double mj)
        : std::runtime_error("diffeomorphism condition violated: min Jacobian " + std::to_string(mj) + " < 1/2"),
          min_jacobian(mj) {}
};

struct SingularSystem : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct IncompatibleData : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct PicardDivergence : std::runtime_error {
    using std::runtime_error::runtime_error;
};

} // namespace fsflow
