#ifndef SIEGLAB_INTMAT_HPP
#define SIEGLAB_INTMAT_HPP

#include <optional>
#include <string>
#include <vector>

#include "mp.hpp"

namespace sieglab {

// Dense matrix over arbitrary-precision integers. Sizes in this project are
// tiny (2n x 2n with n <= 3, or stacked pairs), so simplicity wins over
// cleverness.
class IntMatrix {
public:
    IntMatrix() : rows_(0), cols_(0) {}
    IntMatrix(int rows, int cols) : rows_(rows), cols_(cols), a_(static_cast<size_t>(rows) * cols) {}
    IntMatrix(int rows, int cols, std::vector<Int> entries);

    static IntMatrix identity(int n);
    static IntMatrix zero(int rows, int cols) { return IntMatrix(rows, cols); }

    int rows() const { return rows_; }
    int cols() const { return cols_; }

    Int& at(int i, int j) { return a_[static_cast<size_t>(i) * cols_ + j]; }
    const Int& at(int i, int j) const { return a_[static_cast<size_t>(i) * cols_ + j]; }

    bool operator==(const IntMatrix& o) const { return rows_ == o.rows_ && cols_ == o.cols_ && a_ == o.a_; }
    bool operator!=(const IntMatrix& o) const { return !(*this == o); }

    IntMatrix operator*(const IntMatrix& o) const;
    IntMatrix operator+(const IntMatrix& o) const;
    IntMatrix operator-(const IntMatrix& o) const;
    IntMatrix operator-() const;
    IntMatrix transpose() const;

    bool is_zero() const;
    bool is_symmetric() const;
    bool is_identity() const;

    // Fraction-free (Bareiss) determinant; square input required.
    Int det() const;

    Int trace() const;

    // gcd of all entries (0 for the zero matrix).
    Int content() const;

    std::string to_string() const;

private:
    int rows_, cols_;
    std::vector<Int> a_;
};

// Canonical row-style Hermite normal form: the unique representative of the
// left GL_n(Z)-orbit with positive pivots and entries above each pivot
// reduced into [0, pivot).
IntMatrix hnf_row(const IntMatrix& m);

// Exact inverse of a matrix with determinant +-1 (adjugate route).
IntMatrix unimodular_inverse(const IntMatrix& m);

// P * A * Q = diag(s_1, ..., s_r) padded with zeros, P and Q unimodular,
// s_1 | s_2 | ... | s_r > 0.
struct SmithDecomposition {
    IntMatrix P; // rows(A) x rows(A)
    IntMatrix Q; // cols(A) x cols(A)
    std::vector<Int> diag;
};
SmithDecomposition smith_normal_form(const IntMatrix& a);

// Symmetric matrix over exact rationals; symmetry is enforced at
// construction time and positive definiteness is cached once verified.
class RatSymMatrix {
public:
    RatSymMatrix() : n_(0) {}
    explicit RatSymMatrix(int n) : n_(n), a_(static_cast<size_t>(n) * n) {}
    RatSymMatrix(int n, std::vector<Rat> entries);

    static RatSymMatrix identity(int n);
    static RatSymMatrix from_integer(const IntMatrix& m);

    int dim() const { return n_; }
    const Rat& at(int i, int j) const { return a_[static_cast<size_t>(i) * n_ + j]; }
    void set(int i, int j, const Rat& v);

    bool operator==(const RatSymMatrix& o) const { return n_ == o.n_ && a_ == o.a_; }

    Rat det() const;
    Rat trace() const;
    Rat leading_minor(int k) const; // determinant of the top-left k x k block

    // Exact test: all leading principal minors positive. The minors double as
    // the factorization witness and are cached with the verdict.
    bool is_positive_definite() const;
    const std::vector<Rat>& minor_witness() const;

    // U^t * M * U for integer U.
    RatSymMatrix conjugate_by(const IntMatrix& u) const;

    Rat trace_pair(const IntMatrix& s) const; // tr(M * S)

private:
    int n_;
    std::vector<Rat> a_;
    mutable std::optional<bool> pd_;
    mutable std::vector<Rat> minors_;
};

} // namespace sieglab

#endif
