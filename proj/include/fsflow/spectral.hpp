#pragma once

#include <array>
#include <complex>
#include <functional>
#include <vector>

#include "fsflow/fft.hpp"
#include "fsflow/field.hpp"
#include "fsflow/grid.hpp"

namespace fsflow {

/// Horizontal spectrum of a boundary field. Coefficients follow the continuum
/// normalization F(xi) = integral e^{-i x.xi} f dx over the torus, so a field
/// f = cos(xi.x) carries +-xi coefficients of value L^{dim}/2.
struct HSpectrum {
    HorizontalGrid grid;
    std::vector<cplx> coeff; // size grid.total(), FFT bin order per axis

    HSpectrum() = default;
    explicit HSpectrum(const HorizontalGrid& g) : grid(g), coeff(g.total(), cplx(0, 0)) {}
};

/// Horizontal spectrum of a bulk field: one complex vertical profile per mode
/// and component. Same normalization as HSpectrum.
struct BSpectrum {
    HorizontalGrid h_grid;
    VerticalGrid v_grid;
    int components = 1;
    std::vector<cplx> coeff; // index (c, mode, iz), mode in FFT bin order

    BSpectrum() = default;
    BSpectrum(const HorizontalGrid& hg, const VerticalGrid& vg, int comps)
        : h_grid(hg), v_grid(vg), components(comps),
          coeff(static_cast<std::size_t>(comps) * hg.total() * vg.points, cplx(0, 0)) {}

    std::size_t index(int c, std::size_t mode, int iz) const {
        return (static_cast<std::size_t>(c) * h_grid.total() + mode) * static_cast<std::size_t>(v_grid.points) + iz;
    }
    cplx& at(int c, std::size_t mode, int iz) { return coeff[index(c, mode, iz)]; }
    cplx at(int c, std::size_t mode, int iz) const { return coeff[index(c, mode, iz)]; }
};

/// Decode FFT bin -> signed wavevector (2*pi/L)*k for each horizontal axis.
void mode_wavevector(const HorizontalGrid& g, std::size_t mode, double* xi_out);
/// |xi'| for one FFT bin.
double mode_wavenumber(const HorizontalGrid& g, std::size_t mode);
/// Wavenumber used in odd-derivative multipliers: Nyquist bins map to zero.
double deriv_wavenumber(const HorizontalGrid& g, int axis_bin);

// Partial Fourier transform in x' and inverses. Round trip is identity to
// floating-point accuracy. Inputs must be finite.
HSpectrum partial_fourier(const HeightField& f);
BSpectrum partial_fourier(const BulkField& f);
HeightField inverse_fourier(const HSpectrum& s);
BulkField inverse_fourier(const BSpectrum& s);

/// Multiply every mode/profile entry by m(xi', z-index). Generic multiplier hook.
void apply_multiplier(BSpectrum& s, const std::function<cplx(const double* xi, int iz)>& m);
void apply_multiplier(HSpectrum& s, const std::function<cplx(const double* xi)>& m);

// Extension operators: Fourier-multiplier lifts of a boundary field into the
// bulk. Profiles are exact exponentials in z (no vertical discretization
// error). extend_A uses e^{|xi'| z} (harmonic), extend_B uses
// e^{sqrt(1+|xi'|^2) z} (solves (1-Lap)u = 0).
BulkField extend_A(const HeightField& f, const VerticalGrid& vg);
BulkField extend_B(const HeightField& f, const VerticalGrid& vg);

/// Dimension-dependent extension: A for N <= 3 (covers the N=2 test mode),
/// B for N >= 4. Throws on unsupported N.
BulkField extend_EN(const HeightField& f, int N, const VerticalGrid& vg);

/// Exact spectral derivative of the extension: horizontal multi-index alpha_h
/// (per-axis orders) and vertical order alpha_n applied to extend_EN(f).
BulkField extension_derivative(const HeightField& f, int N, const VerticalGrid& vg,
                               const std::array<int, 3>& alpha_h, int alpha_n);

/// Vertical decay rate of the extension multiplier for dimension N.
double extension_rate(double xi_abs, int N);

} // namespace fsflow
