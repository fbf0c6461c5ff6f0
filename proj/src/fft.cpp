#include "fsflow/fft.hpp"

#include <cmath>
#include <stdexcept>

namespace fsflow {

namespace {

constexpr double kPi = 3.14159265358979323846;

bool is_pow2(std::size_t n) { return n != 0 && (n & (n - 1)) == 0; }

// Iterative radix-2 Cooley-Tukey, n a power of two.
void fft_pow2(cplx* a, std::size_t n, int sign) {
    // bit reversal
    for (std::size_t i = 1, j = 0; i < n; ++i) {
        std::size_t bit = n >> 1;
        for (; j & bit; bit >>= 1) j ^= bit;
        j ^= bit;
        if (i < j) std::swap(a[i], a[j]);
    }
    for (std::size_t len = 2; len <= n; len <<= 1) {
        const double ang = sign * 2.0 * kPi / static_cast<double>(len);
        const cplx wl(std::cos(ang), std::sin(ang));
        for (std::size_t i = 0; i < n; i += len) {
            cplx w(1.0, 0.0);
            for (std::size_t k = 0; k < len / 2; ++k) {
                cplx u = a[i + k];
                cplx v = a[i + k + len / 2] * w;
                a[i + k] = u + v;
                a[i + k + len / 2] = u - v;
                w *= wl;
            }
        }
    }
}

// Bluestein's algorithm: arbitrary-length DFT via a power-of-two convolution.
void fft_bluestein(cplx* a, std::size_t n, int sign) {
    std::size_t m = 1;
    while (m < 2 * n + 1) m <<= 1;

    std::vector<cplx> w(n); // chirp: exp(sign*i*pi*k^2/n)
    for (std::size_t k = 0; k < n; ++k) {
        // k^2 mod 2n avoids precision loss for large k
        std::size_t k2 = (k * k) % (2 * n);
        double ang = sign * kPi * static_cast<double>(k2) / static_cast<double>(n);
        w[k] = cplx(std::cos(ang), std::sin(ang));
    }
    std::vector<cplx> x(m, cplx(0, 0)), y(m, cplx(0, 0));
    for (std::size_t k = 0; k < n; ++k) x[k] = a[k] * w[k];
    y[0] = cplx(1, 0);
    for (std::size_t k = 1; k < n; ++k) y[k] = y[m - k] = std::conj(w[k]);

    fft_pow2(x.data(), m, -1);
    fft_pow2(y.data(), m, -1);
    for (std::size_t k = 0; k < m; ++k) x[k] *= y[k];
    fft_pow2(x.data(), m, +1);
    const double inv_m = 1.0 / static_cast<double>(m);
    for (std::size_t k = 0; k < n; ++k) a[k] = x[k] * inv_m * w[k];
}

} // namespace

void dft(cplx* data, std::size_t n, int sign) {
    if (n <= 1) return;
    if (is_pow2(n))
        fft_pow2(data, n, sign);
    else
        fft_bluestein(data, n, sign);
}

void idft_normalized(cplx* data, std::size_t n) {
    dft(data, n, +1);
    const double s = 1.0 / static_cast<double>(n);
    for (std::size_t i = 0; i < n; ++i) data[i] *= s;
}

void dft_axis(cplx* data, const std::vector<std::size_t>& dims, int axis, int sign) {
    if (axis < 0 || axis >= static_cast<int>(dims.size())) throw std::invalid_argument("dft_axis: bad axis");
    const std::size_t n = dims[axis];
    std::size_t inner = 1, outer = 1;
    for (std::size_t d = axis + 1; d < dims.size(); ++d) inner *= dims[d];
    for (int d = 0; d < axis; ++d) outer *= dims[d];

    std::vector<cplx> buf(n);
    for (std::size_t o = 0; o < outer; ++o) {
        for (std::size_t in = 0; in < inner; ++in) {
            cplx* base = data + (o * n) * inner + in;
            if (inner == 1) {
                dft(base, n, sign);
            } else {
                for (std::size_t k = 0; k < n; ++k) buf[k] = base[k * inner];
                dft(buf.data(), n, sign);
                for (std::size_t k = 0; k < n; ++k) base[k * inner] = buf[k];
            }
        }
    }
}

} // namespace fsflow
