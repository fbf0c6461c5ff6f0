#include "fsflow/linalg.hpp"

#include <cmath>

namespace fsflow {

void DenseLU::factor() {
    const int n = n_;
    for (int k = 0; k < n; ++k) {
        int p = k;
        double best = std::abs((*this)(k, k));
        for (int r = k + 1; r < n; ++r) {
            const double v = std::abs((*this)(r, k));
            if (v > best) {
                best = v;
                p = r;
            }
        }
        if (best == 0.0) throw SingularSystem("DenseLU: singular matrix (zero pivot)");
        piv_[k] = p;
        if (p != k)
            for (int c = 0; c < n; ++c) std::swap((*this)(k, c), (*this)(p, c));
        const std::complex<double> inv = 1.0 / (*this)(k, k);
        for (int r = k + 1; r < n; ++r) {
            const std::complex<double> m = (*this)(r, k) * inv;
            (*this)(r, k) = m;
            if (m == std::complex<double>(0.0, 0.0)) continue;
            const std::complex<double>* __restrict rowk = &a_[static_cast<std::size_t>(k) * n_];
            std::complex<double>* __restrict rowr = &a_[static_cast<std::size_t>(r) * n_];
            for (int c = k + 1; c < n; ++c) rowr[c] -= m * rowk[c];
        }
    }
    factored_ = true;
}

void DenseLU::solve(std::complex<double>* b) const {
    const int n = n_;
    // apply the full row permutation first; the stored L reflects all swaps
    for (int k = 0; k < n; ++k)
        if (piv_[k] != k) std::swap(b[k], b[piv_[k]]);
    for (int k = 0; k < n; ++k) {
        const std::complex<double> bk = b[k];
        if (bk == std::complex<double>(0.0, 0.0)) continue;
        for (int r = k + 1; r < n; ++r) b[r] -= a_[static_cast<std::size_t>(r) * n_ + k] * bk;
    }
    for (int r = n - 1; r >= 0; --r) {
        const std::complex<double>* __restrict row = &a_[static_cast<std::size_t>(r) * n_];
        std::complex<double> s = b[r];
        for (int c = r + 1; c < n; ++c) s -= row[c] * b[c];
        b[r] = s / row[r];
    }
}

void solve_tridiagonal(std::vector<std::complex<double>> sub, std::vector<std::complex<double>> diag,
                       std::vector<std::complex<double>> sup, std::vector<std::complex<double>>& rhs) {
    const std::size_t n = diag.size();
    for (std::size_t i = 1; i < n; ++i) {
        if (diag[i - 1] == std::complex<double>(0.0, 0.0)) throw SingularSystem("tridiagonal: zero pivot");
        const std::complex<double> m = sub[i] / diag[i - 1];
        diag[i] -= m * sup[i - 1];
        rhs[i] -= m * rhs[i - 1];
    }
    if (diag[n - 1] == std::complex<double>(0.0, 0.0)) throw SingularSystem("tridiagonal: zero pivot");
    rhs[n - 1] /= diag[n - 1];
    for (int i = static_cast<int>(n) - 2; i >= 0; --i) rhs[i] = (rhs[i] - sup[i] * rhs[i + 1]) / diag[i];
}

} // namespace fsflow
