#pragma once

#include <cmath>
#include <random>
#include <vector>

#include "fsflow/field.hpp"
#include "fsflow/spectral.hpp"

namespace fsflow::testing {

constexpr double kTau = 6.283185307179586476925287;

/// Band-limited random real field on the torus: modes with all |k_i| <= kmax.
inline HeightField random_band_limited(const HorizontalGrid& g, int kmax, std::mt19937_64& rng,
                                       bool zero_mean = false) {
    std::uniform_real_distribution<double> unif(-1.0, 1.0);
    HeightField f(g);
    const int dim = g.dim_h;
    std::vector<int> k(dim, -kmax);
    auto advance = [&]() {
        for (int d = 0; d < dim; ++d) {
            if (++k[d] <= kmax) return true;
            k[d] = -kmax;
        }
        return false;
    };
    bool more = true;
    while (more) {
        const double a = unif(rng), b = unif(rng);
        bool all_zero = true;
        for (int d = 0; d < dim; ++d)
            if (k[d] != 0) all_zero = false;
        if (!(all_zero && zero_mean)) {
            for (std::size_t ih = 0; ih < f.size(); ++ih) {
                double phase = 0.0;
                std::size_t rem = ih;
                for (int d = dim - 1; d >= 0; --d) {
                    const int c = static_cast<int>(rem % static_cast<std::size_t>(g.points));
                    rem /= static_cast<std::size_t>(g.points);
                    phase += kTau * k[d] * c / g.points;
                }
                f[ih] += a * std::cos(phase) + b * std::sin(phase);
            }
        }
        more = advance();
    }
    return f;
}

/// Smooth random bulk field: band-limited horizontally, smooth polynomial*trig in depth.
inline BulkField random_smooth_bulk(const HorizontalGrid& g, const VerticalGrid& vg, int comps, int kmax,
                                    std::mt19937_64& rng) {
    std::uniform_real_distribution<double> unif(-1.0, 1.0);
    BulkField out(g, vg, comps);
    for (int c = 0; c < comps; ++c) {
        HeightField a = random_band_limited(g, kmax, rng);
        HeightField b = random_band_limited(g, kmax, rng);
        const double w1 = unif(rng), w2 = unif(rng);
        for (std::size_t ih = 0; ih < g.total(); ++ih)
            for (int iz = 0; iz < vg.points; ++iz) {
                const double z = vg.node(iz);
                out.at(c, ih, iz) = a[ih] * std::cos(w1 * z) + b[ih] * std::sin(w2 * z) * (z / vg.depth);
            }
    }
    return out;
}

/// Rescale a surface field so that sup |d_N E_N eta| equals target (< 1/2
/// keeps the flattening map a diffeomorphism).
inline HeightField scaled_to_margin(HeightField eta, int N, const VerticalGrid& vg, double target) {
    BulkField dz = extension_derivative(eta, N, vg, {0, 0, 0}, 1);
    double mx = 0.0;
    for (double v : dz.values) mx = std::max(mx, std::abs(v));
    if (mx > 0.0) {
        const double s = target / mx;
        for (auto& v : eta.values) v *= s;
    }
    return eta;
}

/// Least-squares slope of log(err) vs log(h): observed convergence order.
inline double observed_order(const std::vector<double>& hs, const std::vector<double>& errs) {
    const std::size_t n = hs.size();
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < n; ++i) {
        const double x = std::log(hs[i]), y = std::log(errs[i]);
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
    }
    return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

} // namespace fsflow::testing
