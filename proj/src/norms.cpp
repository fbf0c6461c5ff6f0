#include "fsflow/norms.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "fsflow/fd.hpp"

namespace fsflow {

namespace {

void check_q(double q) {
    if (!(q >= 1.0)) throw std::invalid_argument("norm: exponent q must satisfy q >= 1");
}

double h_cell_measure(const HorizontalGrid& g) {
    double m = 1.0;
    for (int d = 0; d < g.dim_h; ++d) m *= g.spacing();
    return m;
}

} // namespace

double norm_lq(const HeightField& f, double q) {
    check_q(q);
    if (std::isinf(q)) {
        double m = 0.0;
        for (double v : f.values) m = std::max(m, std::abs(v));
        return m;
    }
    const double dm = h_cell_measure(f.grid);
    double acc = 0.0;
    for (double v : f.values) acc += std::pow(std::abs(v), q);
    return std::pow(acc * dm, 1.0 / q);
}

double norm_lq(const BulkField& f, double q) {
    check_q(q);
    const std::size_t nh = f.horiz();
    const int nz = f.nz();
    const double hz = f.v_grid.spacing();
    if (std::isinf(q)) {
        double m = 0.0;
        for (std::size_t ih = 0; ih < nh; ++ih)
            for (int iz = 0; iz < nz; ++iz) {
                double s = 0.0;
                for (int c = 0; c < f.components; ++c) s += f.at(c, ih, iz) * f.at(c, ih, iz);
                m = std::max(m, std::sqrt(s));
            }
        return m;
    }
    const double dm = h_cell_measure(f.h_grid);
    double acc = 0.0;
    for (std::size_t ih = 0; ih < nh; ++ih) {
        for (int iz = 0; iz < nz; ++iz) {
            double s = 0.0;
            for (int c = 0; c < f.components; ++c) s += f.at(c, ih, iz) * f.at(c, ih, iz);
            const double w = (iz == 0 || iz == nz - 1) ? 0.5 : 1.0; // trapezoid in depth
            acc += w * std::pow(s, 0.5 * q);
        }
    }
    return std::pow(acc * dm * hz, 1.0 / q);
}

namespace {

// Nondecreasing axis sequences of a given length over [0, naxes): one
// representative per multi-index alpha.
void axis_sequences(int naxes, int length, std::vector<std::vector<int>>& out) {
    std::vector<int> cur;
    struct Gen {
        int naxes, length;
        std::vector<std::vector<int>>& out;
        void rec(std::vector<int>& c, int start) {
            if (static_cast<int>(c.size()) == length) {
                out.push_back(c);
                return;
            }
            for (int a = start; a < naxes; ++a) {
                c.push_back(a);
                rec(c, a);
                c.pop_back();
            }
        }
    } gen{naxes, length, out};
    gen.rec(cur, 0);
}

double combine_pieces(const std::vector<double>& pieces, double q) {
    if (std::isinf(q)) {
        double mx = 0.0;
        for (double p : pieces) mx = std::max(mx, p);
        return mx;
    }
    double acc = 0.0;
    for (double p : pieces) acc += std::pow(p, q);
    return std::pow(acc, 1.0 / q);
}

} // namespace

double norm_sobolev(const BulkField& f, double q, int m) {
    check_q(q);
    if (m < 0) throw std::invalid_argument("norm_sobolev: order must be >= 0");
    const int N = f.h_grid.dim_h + 1;
    std::vector<double> pieces;
    for (int c = 0; c < f.components; ++c) {
        BulkField comp(f.h_grid, f.v_grid, 1);
        for (std::size_t ih = 0; ih < f.horiz(); ++ih)
            for (int iz = 0; iz < f.nz(); ++iz) comp.at(0, ih, iz) = f.at(c, ih, iz);
        pieces.push_back(norm_lq(comp, q));
        for (int order = 1; order <= m; ++order) {
            std::vector<std::vector<int>> seqs;
            axis_sequences(N, order, seqs);
            for (const auto& seq : seqs) {
                BulkField d = comp;
                for (int ax : seq) d = fd_derivative(d, 0, ax);
                pieces.push_back(norm_lq(d, q));
            }
        }
    }
    return combine_pieces(pieces, q);
}

double norm_sobolev(const HeightField& f, double q, int m) {
    check_q(q);
    std::vector<double> pieces{norm_lq(f, q)};
    for (int order = 1; order <= m; ++order) {
        std::vector<std::vector<int>> seqs;
        axis_sequences(f.grid.dim_h, order, seqs);
        for (const auto& seq : seqs) {
            HeightField d = f;
            for (int ax : seq) d = fd_derivative(d, ax);
            pieces.push_back(norm_lq(d, q));
        }
    }
    return combine_pieces(pieces, q);
}

double norm_sobolev_fractional(const HeightField& f, double q, double s) {
    check_q(q);
    HSpectrum sp = partial_fourier(f);
    apply_multiplier(sp, [s](const double* xi) {
        double r2 = 0.0;
        for (int d = 0; d < 3; ++d) r2 += xi[d] * xi[d];
        return cplx(std::pow(1.0 + r2, 0.5 * s), 0.0);
    });
    return norm_lq(inverse_fourier(sp), q);
}

double norm_sobolev_fractional(const BulkField&, double, double) {
    throw std::invalid_argument("norm_sobolev_fractional: fractional orders are only available for boundary fields");
}

double slobodeckii_seminorm(const HeightField& f, double q, double theta) {
    check_q(q);
    if (!(theta > 0.0 && theta < 1.0)) throw std::invalid_argument("slobodeckii: theta in (0,1)");
    const HorizontalGrid& g = f.grid;
    const int dim = g.dim_h;
    const std::size_t n = f.size();
    const double dm = h_cell_measure(g);
    const double L = g.length;

    auto coords = [&](std::size_t ih, double* x) {
        std::size_t rem = ih;
        for (int d = dim - 1; d >= 0; --d) {
            x[d] = g.node(static_cast<int>(rem % static_cast<std::size_t>(g.points)));
            rem /= static_cast<std::size_t>(g.points);
        }
    };
    double acc = 0.0;
    double xa[3], xb[3];
    for (std::size_t i = 0; i < n; ++i) {
        coords(i, xa);
        for (std::size_t j = 0; j < n; ++j) {
            if (i == j) continue;
            coords(j, xb);
            double r2 = 0.0;
            for (int d = 0; d < dim; ++d) {
                double dx = std::abs(xa[d] - xb[d]);
                dx = std::min(dx, L - dx); // periodic distance
                r2 += dx * dx;
            }
            const double r = std::sqrt(r2);
            acc += std::pow(std::abs(f[i] - f[j]), q) / std::pow(r, dim + theta * q) * dm * dm;
        }
    }
    return std::pow(acc, 1.0 / q);
}

double pnorm(const std::vector<double>& samples, double p) {
    if (samples.empty()) return 0.0;
    if (std::isinf(p)) {
        double m = 0.0;
        for (double v : samples) m = std::max(m, std::abs(v));
        return m;
    }
    check_q(p);
    double scale = 0.0;
    for (double v : samples) scale = std::max(scale, std::abs(v));
    if (scale == 0.0) return 0.0;
    double acc = 0.0;
    for (double v : samples) acc += std::pow(std::abs(v) / scale, p);
    return scale * std::pow(acc, 1.0 / p);
}

} // namespace fsflow
