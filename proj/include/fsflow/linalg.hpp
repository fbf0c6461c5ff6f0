#pragma once

#include <complex>
#include <vector>

#include "fsflow/field.hpp"

namespace fsflow {

/// Dense complex LU with partial pivoting. Row-major storage.
class DenseLU {
  public:
    DenseLU() = default;
    explicit DenseLU(int n) : n_(n), a_(static_cast<std::size_t>(n) * n, {0.0, 0.0}), piv_(n, 0) {}

    int size() const { return n_; }
    std::complex<double>& operator()(int r, int c) { return a_[static_cast<std::size_t>(r) * n_ + c]; }
    std::complex<double> operator()(int r, int c) const { return a_[static_cast<std::size_t>(r) * n_ + c]; }

    /// Factor in place. Throws SingularSystem on a vanishing pivot.
    void factor();
    /// Solve with the factored matrix; b overwritten by the solution.
    void solve(std::complex<double>* b) const;
    void solve(std::vector<std::complex<double>>& b) const { solve(b.data()); }

    bool factored() const { return factored_; }

  private:
    int n_ = 0;
    std::vector<std::complex<double>> a_;
    std::vector<int> piv_;
    bool factored_ = false;
};

/// Tridiagonal complex solve (Thomas): sub, diag, super of length n (sub[0]
/// and sup[n-1] ignored); rhs overwritten with the solution.
void solve_tridiagonal(std::vector<std::complex<double>> sub, std::vector<std::complex<double>> diag,
                       std::vector<std::complex<double>> sup, std::vector<std::complex<double>>& rhs);

} // namespace fsflow
