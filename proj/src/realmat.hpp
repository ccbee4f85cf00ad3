#ifndef SIEGLAB_REALMAT_HPP
#define SIEGLAB_REALMAT_HPP

#include <complex>
#include <optional>
#include <vector>

#include "intmat.hpp"
#include "mp.hpp"

namespace sieglab {

using cplx = std::complex<real_t>;

// Symmetric matrix with floating entries (Y = Im(Z) and friends). Symmetry is
// enforced on construction; a Cholesky factor is cached as the positivity
// witness.
class RealSymMatrix {
public:
    RealSymMatrix() : n_(0) {}
    explicit RealSymMatrix(int n) : n_(n), a_(static_cast<size_t>(n) * n, 0) {}
    RealSymMatrix(int n, std::vector<real_t> entries, real_t sym_tol = 1e-9);

    static RealSymMatrix identity(int n);
    static RealSymMatrix scaled_identity(int n, real_t y);

    int dim() const { return n_; }
    real_t at(int i, int j) const { return a_[static_cast<size_t>(i) * n_ + j]; }
    void set(int i, int j, real_t v);

    real_t trace() const;
    real_t det() const;

    bool is_positive_definite() const;
    // Lower-triangular Cholesky factor; empty when not positive definite.
    const std::vector<real_t>& cholesky_witness() const;

    real_t min_eigenvalue() const;
    real_t max_eigenvalue() const;

    RealSymMatrix conjugate_by(const IntMatrix& u) const; // U^t M U
    RealSymMatrix operator+(const RealSymMatrix& o) const;
    RealSymMatrix operator-(const RealSymMatrix& o) const;
    RealSymMatrix scaled(real_t c) const;

    real_t trace_pair(const RealSymMatrix& o) const; // tr(M * O)

private:
    void factor() const;

    int n_;
    std::vector<real_t> a_;
    mutable std::optional<bool> pd_;
    mutable std::vector<real_t> chol_;
};

// Small dense complex matrix: just enough for the symplectic action
// (AZ+B)(CZ+D)^{-1}, determinants and multiplication at n <= 3.
class CMat {
public:
    CMat() : n_(0) {}
    explicit CMat(int n) : n_(n), a_(static_cast<size_t>(n) * n) {}

    static CMat from_parts(const RealSymMatrix& re, const RealSymMatrix& im);
    static CMat from_int(const IntMatrix& m);

    int dim() const { return n_; }
    cplx at(int i, int j) const { return a_[static_cast<size_t>(i) * n_ + j]; }
    cplx& at(int i, int j) { return a_[static_cast<size_t>(i) * n_ + j]; }

    CMat operator*(const CMat& o) const;
    CMat operator+(const CMat& o) const;

    cplx det() const;
    CMat inverse() const; // throws precision_error near singularity

    RealSymMatrix real_sym(real_t tol = 1e-7) const;
    RealSymMatrix imag_sym(real_t tol = 1e-7) const;

private:
    int n_;
    std::vector<cplx> a_;
};

// Eigen-decomposition of a symmetric K x K matrix by cyclic Jacobi rotations.
// Eigenvalues descending; eigenvectors_col[j] belongs to eigenvalue[j].
struct SymEigen {
    std::vector<real_t> values;
    std::vector<std::vector<real_t>> vectors; // vectors[j][i] = i-th component
};
SymEigen jacobi_eigen(const std::vector<real_t>& sym, int k);

} // namespace sieglab

#endif
