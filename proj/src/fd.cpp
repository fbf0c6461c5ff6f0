#include "fsflow/fd.hpp"

#include <stdexcept>

namespace fsflow {

namespace {

// Strides for horizontal axes in the row-major horizontal index.
std::size_t h_stride(const HorizontalGrid& g, int axis) {
    std::size_t s = 1;
    for (int d = g.dim_h - 1; d > axis; --d) s *= static_cast<std::size_t>(g.points);
    return s;
}

int h_coord(const HorizontalGrid& g, std::size_t ih, int axis) {
    const std::size_t s = h_stride(g, axis);
    return static_cast<int>((ih / s) % static_cast<std::size_t>(g.points));
}

std::size_t h_shift(const HorizontalGrid& g, std::size_t ih, int axis, int offset) {
    const std::size_t s = h_stride(g, axis);
    const int M = g.points;
    const int c = h_coord(g, ih, axis);
    const int cn = ((c + offset) % M + M) % M;
    const std::ptrdiff_t delta = static_cast<std::ptrdiff_t>(cn) - static_cast<std::ptrdiff_t>(c);
    return static_cast<std::size_t>(static_cast<std::ptrdiff_t>(ih) + delta * static_cast<std::ptrdiff_t>(s));
}

} // namespace

BulkField fd_derivative(const BulkField& f, int comp, int axis) {
    const int dim_h = f.h_grid.dim_h;
    if (axis < 0 || axis > dim_h) throw std::invalid_argument("fd_derivative: bad axis");
    BulkField out(f.h_grid, f.v_grid, 1);
    const std::size_t nh = f.horiz();
    const int nz = f.nz();

    if (axis < dim_h) {
        const double inv2h = 1.0 / (2.0 * f.h_grid.spacing());
        for (std::size_t ih = 0; ih < nh; ++ih) {
            const std::size_t ip = h_shift(f.h_grid, ih, axis, +1);
            const std::size_t im = h_shift(f.h_grid, ih, axis, -1);
            for (int iz = 0; iz < nz; ++iz)
                out.at(0, ih, iz) = (f.at(comp, ip, iz) - f.at(comp, im, iz)) * inv2h;
        }
    } else {
        const double invh = 1.0 / f.v_grid.spacing();
        for (std::size_t ih = 0; ih < nh; ++ih) {
            for (int iz = 1; iz < nz - 1; ++iz)
                out.at(0, ih, iz) = (f.at(comp, ih, iz + 1) - f.at(comp, ih, iz - 1)) * 0.5 * invh;
            out.at(0, ih, 0) =
                (-1.5 * f.at(comp, ih, 0) + 2.0 * f.at(comp, ih, 1) - 0.5 * f.at(comp, ih, 2)) * invh;
            out.at(0, ih, nz - 1) =
                (1.5 * f.at(comp, ih, nz - 1) - 2.0 * f.at(comp, ih, nz - 2) + 0.5 * f.at(comp, ih, nz - 3)) * invh;
        }
    }
    return out;
}

BulkField fd_second_derivative(const BulkField& f, int comp, int axis1, int axis2) {
    const int dim_h = f.h_grid.dim_h;
    if (axis1 != axis2) {
        BulkField d1 = fd_derivative(f, comp, axis1);
        return fd_derivative(d1, 0, axis2);
    }
    BulkField out(f.h_grid, f.v_grid, 1);
    const std::size_t nh = f.horiz();
    const int nz = f.nz();
    if (axis1 < dim_h) {
        const double invh2 = 1.0 / (f.h_grid.spacing() * f.h_grid.spacing());
        for (std::size_t ih = 0; ih < nh; ++ih) {
            const std::size_t ip = h_shift(f.h_grid, ih, axis1, +1);
            const std::size_t im = h_shift(f.h_grid, ih, axis1, -1);
            for (int iz = 0; iz < nz; ++iz)
                out.at(0, ih, iz) = (f.at(comp, ip, iz) - 2.0 * f.at(comp, ih, iz) + f.at(comp, im, iz)) * invh2;
        }
    } else {
        const double invh2 = 1.0 / (f.v_grid.spacing() * f.v_grid.spacing());
        for (std::size_t ih = 0; ih < nh; ++ih) {
            for (int iz = 1; iz < nz - 1; ++iz)
                out.at(0, ih, iz) =
                    (f.at(comp, ih, iz + 1) - 2.0 * f.at(comp, ih, iz) + f.at(comp, ih, iz - 1)) * invh2;
            // one-sided second-order second differences at the walls
            out.at(0, ih, 0) = (2.0 * f.at(comp, ih, 0) - 5.0 * f.at(comp, ih, 1) + 4.0 * f.at(comp, ih, 2) -
                                f.at(comp, ih, 3)) *
                               invh2;
            out.at(0, ih, nz - 1) = (2.0 * f.at(comp, ih, nz - 1) - 5.0 * f.at(comp, ih, nz - 2) +
                                     4.0 * f.at(comp, ih, nz - 3) - f.at(comp, ih, nz - 4)) *
                                    invh2;
        }
    }
    return out;
}

BulkField fd_gradient(const BulkField& f, int comp) {
    const int N = f.h_grid.dim_h + 1;
    BulkField out(f.h_grid, f.v_grid, N);
    for (int ax = 0; ax < N; ++ax) {
        BulkField d = fd_derivative(f, comp, ax);
        for (std::size_t ih = 0; ih < f.horiz(); ++ih)
            for (int iz = 0; iz < f.nz(); ++iz) out.at(ax, ih, iz) = d.at(0, ih, iz);
    }
    return out;
}

BulkField fd_divergence(const BulkField& f) {
    const int N = f.h_grid.dim_h + 1;
    if (f.components != N) throw std::invalid_argument("fd_divergence: field must have N components");
    BulkField out(f.h_grid, f.v_grid, 1);
    for (int ax = 0; ax < N; ++ax) {
        BulkField d = fd_derivative(f, ax, ax);
        for (std::size_t ih = 0; ih < f.horiz(); ++ih)
            for (int iz = 0; iz < f.nz(); ++iz) out.at(0, ih, iz) += d.at(0, ih, iz);
    }
    return out;
}

BulkField fd_laplacian(const BulkField& f, int comp) {
    const int N = f.h_grid.dim_h + 1;
    BulkField out(f.h_grid, f.v_grid, 1);
    for (int ax = 0; ax < N; ++ax) {
        BulkField d = fd_second_derivative(f, comp, ax, ax);
        for (std::size_t ih = 0; ih < f.horiz(); ++ih)
            for (int iz = 0; iz < f.nz(); ++iz) out.at(0, ih, iz) += d.at(0, ih, iz);
    }
    return out;
}

HeightField fd_derivative(const HeightField& f, int axis) {
    if (axis < 0 || axis >= f.grid.dim_h) throw std::invalid_argument("fd_derivative: bad horizontal axis");
    HeightField out(f.grid);
    const double inv2h = 1.0 / (2.0 * f.grid.spacing());
    for (std::size_t ih = 0; ih < f.size(); ++ih) {
        const std::size_t ip = h_shift(f.grid, ih, axis, +1);
        const std::size_t im = h_shift(f.grid, ih, axis, -1);
        out[ih] = (f[ip] - f[im]) * inv2h;
    }
    return out;
}

} // namespace fsflow
