#include "fsflow/spectral.hpp"

#include <cmath>
#include <stdexcept>

namespace fsflow {

namespace {

std::vector<std::size_t> h_dims(const HorizontalGrid& g) {
    return std::vector<std::size_t>(static_cast<std::size_t>(g.dim_h), static_cast<std::size_t>(g.points));
}

// Forward DFT over all horizontal axes with continuum scaling h^{dim}.
void forward_inplace(cplx* data, const HorizontalGrid& g) {
    auto dims = h_dims(g);
    for (int ax = 0; ax < g.dim_h; ++ax) dft_axis(data, dims, ax, -1);
    double scale = 1.0;
    for (int d = 0; d < g.dim_h; ++d) scale *= g.spacing();
    const std::size_t n = g.total();
    for (std::size_t i = 0; i < n; ++i) data[i] *= scale;
}

// Inverse with 1/L^{dim} scaling.
void inverse_inplace(cplx* data, const HorizontalGrid& g) {
    auto dims = h_dims(g);
    for (int ax = 0; ax < g.dim_h; ++ax) dft_axis(data, dims, ax, +1);
    double scale = 1.0;
    for (int d = 0; d < g.dim_h; ++d) scale /= g.length;
    const std::size_t n = g.total();
    for (std::size_t i = 0; i < n; ++i) data[i] *= scale;
}

void decode_bins(const HorizontalGrid& g, std::size_t mode, int* bins) {
    // row-major: mode = ((a0*M + a1)*M + a2)...
    for (int d = g.dim_h - 1; d >= 0; --d) {
        bins[d] = static_cast<int>(mode % static_cast<std::size_t>(g.points));
        mode /= static_cast<std::size_t>(g.points);
    }
}

} // namespace

void mode_wavevector(const HorizontalGrid& g, std::size_t mode, double* xi_out) {
    int bins[3] = {0, 0, 0};
    decode_bins(g, mode, bins);
    for (int d = 0; d < g.dim_h; ++d) xi_out[d] = g.wavenumber(bins[d]);
}

double mode_wavenumber(const HorizontalGrid& g, std::size_t mode) {
    double xi[3] = {0, 0, 0};
    mode_wavevector(g, mode, xi);
    double s = 0;
    for (int d = 0; d < g.dim_h; ++d) s += xi[d] * xi[d];
    return std::sqrt(s);
}

double deriv_wavenumber(const HorizontalGrid& g, int axis_bin) {
    if (axis_bin == g.points / 2) return 0.0; // unpaired Nyquist: derivative of the real interpolant
    return g.wavenumber(axis_bin);
}

HSpectrum partial_fourier(const HeightField& f) {
    if (!f.all_finite()) throw std::invalid_argument("partial_fourier: non-finite values in input");
    HSpectrum s(f.grid);
    for (std::size_t i = 0; i < f.size(); ++i) s.coeff[i] = cplx(f[i], 0.0);
    forward_inplace(s.coeff.data(), f.grid);
    return s;
}

BSpectrum partial_fourier(const BulkField& f) {
    if (!f.all_finite()) throw std::invalid_argument("partial_fourier: non-finite values in input");
    BSpectrum s(f.h_grid, f.v_grid, f.components);
    const std::size_t nh = f.horiz();
    const int nz = f.nz();
    // transpose (c,ih,iz) -> per-level contiguous horizontal slabs, transform, pack
    std::vector<cplx> slab(nh);
    for (int c = 0; c < f.components; ++c) {
        for (int iz = 0; iz < nz; ++iz) {
            for (std::size_t ih = 0; ih < nh; ++ih) slab[ih] = cplx(f.at(c, ih, iz), 0.0);
            forward_inplace(slab.data(), f.h_grid);
            for (std::size_t ih = 0; ih < nh; ++ih) s.at(c, ih, iz) = slab[ih];
        }
    }
    return s;
}

HeightField inverse_fourier(const HSpectrum& s) {
    std::vector<cplx> buf = s.coeff;
    inverse_inplace(buf.data(), s.grid);
    HeightField f(s.grid);
    for (std::size_t i = 0; i < f.size(); ++i) f[i] = buf[i].real();
    return f;
}

BulkField inverse_fourier(const BSpectrum& s) {
    BulkField f(s.h_grid, s.v_grid, s.components);
    const std::size_t nh = f.horiz();
    const int nz = f.nz();
    std::vector<cplx> slab(nh);
    for (int c = 0; c < s.components; ++c) {
        for (int iz = 0; iz < nz; ++iz) {
            for (std::size_t ih = 0; ih < nh; ++ih) slab[ih] = s.at(c, ih, iz);
            inverse_inplace(slab.data(), s.h_grid);
            for (std::size_t ih = 0; ih < nh; ++ih) f.at(c, ih, iz) = slab[ih].real();
        }
    }
    return f;
}

void apply_multiplier(BSpectrum& s, const std::function<cplx(const double*, int)>& m) {
    const std::size_t nh = s.h_grid.total();
    const int nz = s.v_grid.points;
    double xi[3];
    for (std::size_t mode = 0; mode < nh; ++mode) {
        mode_wavevector(s.h_grid, mode, xi);
        for (int c = 0; c < s.components; ++c)
            for (int iz = 0; iz < nz; ++iz) s.at(c, mode, iz) *= m(xi, iz);
    }
}

void apply_multiplier(HSpectrum& s, const std::function<cplx(const double*)>& m) {
    const std::size_t nh = s.grid.total();
    double xi[3];
    for (std::size_t mode = 0; mode < nh; ++mode) {
        mode_wavevector(s.grid, mode, xi);
        s.coeff[mode] *= m(xi);
    }
}

double extension_rate(double xi_abs, int N) {
    if (N <= 3) return xi_abs;
    return std::sqrt(1.0 + xi_abs * xi_abs);
}

namespace {

BulkField extend_with_rate(const HeightField& f, const VerticalGrid& vg, int N) {
    if (!f.all_finite()) throw std::invalid_argument("extend: non-finite values in input");
    HSpectrum s = partial_fourier(f);
    BSpectrum b(f.grid, vg, 1);
    const std::size_t nh = f.grid.total();
    const auto z = vg.nodes();
    for (std::size_t mode = 0; mode < nh; ++mode) {
        const double rate = extension_rate(mode_wavenumber(f.grid, mode), N);
        const cplx fh = s.coeff[mode];
        for (int iz = 0; iz < vg.points; ++iz) b.at(0, mode, iz) = fh * std::exp(rate * z[iz]);
    }
    return inverse_fourier(b);
}

} // namespace

BulkField extend_A(const HeightField& f, const VerticalGrid& vg) { return extend_with_rate(f, vg, 3); }
BulkField extend_B(const HeightField& f, const VerticalGrid& vg) { return extend_with_rate(f, vg, 4); }

BulkField extend_EN(const HeightField& f, int N, const VerticalGrid& vg) {
    if (N < 2 || N > 4) throw std::invalid_argument("extend_EN: N must be 2, 3, or 4");
    return extend_with_rate(f, vg, N);
}

BulkField extension_derivative(const HeightField& f, int N, const VerticalGrid& vg,
                               const std::array<int, 3>& alpha_h, int alpha_n) {
    if (N < 2 || N > 4) throw std::invalid_argument("extension_derivative: N must be 2, 3, or 4");
    if (!f.all_finite()) throw std::invalid_argument("extension_derivative: non-finite values");
    HSpectrum s = partial_fourier(f);
    BSpectrum b(f.grid, vg, 1);
    const std::size_t nh = f.grid.total();
    const auto z = vg.nodes();
    const int dim_h = f.grid.dim_h;
    int bins[3];
    for (std::size_t mode = 0; mode < nh; ++mode) {
        // horizontal factor (i xi)^alpha_h, Nyquist-safe for odd orders
        double xi[3];
        mode_wavevector(f.grid, mode, xi);
        {
            std::size_t m = mode;
            for (int d = dim_h - 1; d >= 0; --d) {
                bins[d] = static_cast<int>(m % static_cast<std::size_t>(f.grid.points));
                m /= static_cast<std::size_t>(f.grid.points);
            }
        }
        cplx hfac(1.0, 0.0);
        for (int d = 0; d < dim_h; ++d) {
            const double k = (alpha_h[d] % 2 == 1) ? deriv_wavenumber(f.grid, bins[d]) : xi[d];
            for (int a = 0; a < alpha_h[d]; ++a) hfac *= cplx(0.0, k);
        }
        const double rate = extension_rate(mode_wavenumber(f.grid, mode), N);
        double vfac = 1.0;
        for (int a = 0; a < alpha_n; ++a) vfac *= rate;
        const cplx amp = s.coeff[mode] * hfac * vfac;
        for (int iz = 0; iz < vg.points; ++iz) b.at(0, mode, iz) = amp * std::exp(rate * z[iz]);
    }
    return inverse_fourier(b);
}

} // namespace fsflow
