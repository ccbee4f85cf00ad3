#include "intmat.hpp"

#include <sstream>

namespace sieglab {

IntMatrix::IntMatrix(int rows, int cols, std::vector<Int> entries)
    : rows_(rows), cols_(cols), a_(std::move(entries)) {
    if (a_.size() != static_cast<size_t>(rows) * cols)
        throw structural_error("IntMatrix: entry count does not match dimensions");
}

IntMatrix IntMatrix::identity(int n) {
    IntMatrix m(n, n);
    for (int i = 0; i < n; ++i) m.at(i, i) = 1;
    return m;
}

IntMatrix IntMatrix::operator*(const IntMatrix& o) const {
    if (cols_ != o.rows_) throw structural_error("IntMatrix: dimension mismatch in product");
    IntMatrix r(rows_, o.cols_);
    for (int i = 0; i < rows_; ++i)
        for (int k = 0; k < cols_; ++k) {
            const Int& v = at(i, k);
            if (v == 0) continue;
            for (int j = 0; j < o.cols_; ++j) r.at(i, j) += v * o.at(k, j);
        }
    return r;
}

IntMatrix IntMatrix::operator+(const IntMatrix& o) const {
    if (rows_ != o.rows_ || cols_ != o.cols_) throw structural_error("IntMatrix: dimension mismatch in sum");
    IntMatrix r(rows_, cols_);
    for (size_t i = 0; i < a_.size(); ++i) r.a_[i] = a_[i] + o.a_[i];
    return r;
}

IntMatrix IntMatrix::operator-(const IntMatrix& o) const {
    if (rows_ != o.rows_ || cols_ != o.cols_) throw structural_error("IntMatrix: dimension mismatch in difference");
    IntMatrix r(rows_, cols_);
    for (size_t i = 0; i < a_.size(); ++i) r.a_[i] = a_[i] - o.a_[i];
    return r;
}

IntMatrix IntMatrix::operator-() const {
    IntMatrix r(rows_, cols_);
    for (size_t i = 0; i < a_.size(); ++i) r.a_[i] = -a_[i];
    return r;
}

IntMatrix IntMatrix::transpose() const {
    IntMatrix r(cols_, rows_);
    for (int i = 0; i < rows_; ++i)
        for (int j = 0; j < cols_; ++j) r.at(j, i) = at(i, j);
    return r;
}

bool IntMatrix::is_zero() const {
    for (const auto& v : a_)
        if (v != 0) return false;
    return true;
}

bool IntMatrix::is_symmetric() const {
    if (rows_ != cols_) return false;
    for (int i = 0; i < rows_; ++i)
        for (int j = i + 1; j < cols_; ++j)
            if (at(i, j) != at(j, i)) return false;
    return true;
}

bool IntMatrix::is_identity() const {
    if (rows_ != cols_) return false;
    for (int i = 0; i < rows_; ++i)
        for (int j = 0; j < cols_; ++j)
            if (at(i, j) != (i == j ? 1 : 0)) return false;
    return true;
}

Int IntMatrix::det() const {
    if (rows_ != cols_) throw structural_error("IntMatrix::det: matrix not square");
    int n = rows_;
    if (n == 0) return 1;
    IntMatrix m = *this;
    Int prev = 1;
    int sign = 1;
    for (int k = 0; k < n - 1; ++k) {
        if (m.at(k, k) == 0) {
            int p = -1;
            for (int i = k + 1; i < n; ++i)
                if (m.at(i, k) != 0) { p = i; break; }
            if (p < 0) return 0;
            for (int j = k; j < n; ++j) std::swap(m.at(k, j), m.at(p, j));
            sign = -sign;
        }
        for (int i = k + 1; i < n; ++i)
            for (int j = k + 1; j < n; ++j) {
                Int num = m.at(i, j) * m.at(k, k) - m.at(i, k) * m.at(k, j);
                m.at(i, j) = num / prev; // exact division (Bareiss)
            }
        prev = m.at(k, k);
    }
    Int d = m.at(n - 1, n - 1);
    return sign > 0 ? d : Int(-d);
}

Int IntMatrix::trace() const {
    if (rows_ != cols_) throw structural_error("IntMatrix::trace: matrix not square");
    Int t = 0;
    for (int i = 0; i < rows_; ++i) t += at(i, i);
    return t;
}

Int IntMatrix::content() const {
    Int g = 0;
    for (const auto& v : a_) g = int_gcd(g, v);
    return g;
}

std::string IntMatrix::to_string() const {
    std::ostringstream os;
    os << "[";
    for (int i = 0; i < rows_; ++i) {
        os << "[";
        for (int j = 0; j < cols_; ++j) os << at(i, j) << (j + 1 < cols_ ? "," : "");
        os << "]" << (i + 1 < rows_ ? "," : "");
    }
    os << "]";
    return os.str();
}

IntMatrix hnf_row(const IntMatrix& m) {
    IntMatrix h = m;
    int rows = h.rows(), cols = h.cols();
    int pivot_row = 0;
    for (int col = 0; col < cols && pivot_row < rows; ++col) {
        // Clear everything below pivot_row in this column with gcd steps.
        int nz = -1;
        for (int i = pivot_row; i < rows; ++i)
            if (h.at(i, col) != 0) { nz = i; break; }
        if (nz < 0) continue;
        if (nz != pivot_row)
            for (int j = 0; j < cols; ++j) std::swap(h.at(pivot_row, j), h.at(nz, j));
        for (int i = pivot_row + 1; i < rows; ++i) {
            while (h.at(i, col) != 0) {
                Int q = h.at(pivot_row, col) / h.at(i, col);
                for (int j = 0; j < cols; ++j) {
                    Int t = h.at(pivot_row, j) - q * h.at(i, j);
                    h.at(pivot_row, j) = h.at(i, j);
                    h.at(i, j) = t;
                }
            }
        }
        if (h.at(pivot_row, col) < 0)
            for (int j = 0; j < cols; ++j) h.at(pivot_row, j) = -h.at(pivot_row, j);
        // Reduce rows above the pivot into [0, pivot).
        for (int i = 0; i < pivot_row; ++i) {
            Int q;
            Int r = h.at(i, col) % h.at(pivot_row, col);
            if (r < 0) r += h.at(pivot_row, col);
            q = (h.at(i, col) - r) / h.at(pivot_row, col);
            if (q != 0)
                for (int j = 0; j < cols; ++j) h.at(i, j) -= q * h.at(pivot_row, j);
        }
        ++pivot_row;
    }
    return h;
}

IntMatrix unimodular_inverse(const IntMatrix& m) {
    if (m.rows() != m.cols()) throw structural_error("unimodular_inverse: matrix not square");
    int n = m.rows();
    Int d = m.det();
    if (d != 1 && d != -1) throw domain_error("unimodular_inverse: determinant is not a unit");
    IntMatrix inv(n, n);
    // Cofactor expansion; n <= 6 in practice.
    std::vector<int> rows_idx, cols_idx;
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            IntMatrix minor(n - 1, n - 1);
            int rr = 0;
            for (int r = 0; r < n; ++r) {
                if (r == i) continue;
                int cc = 0;
                for (int c = 0; c < n; ++c) {
                    if (c == j) continue;
                    minor.at(rr, cc) = m.at(r, c);
                    ++cc;
                }
                ++rr;
            }
            Int cof = (n == 1) ? Int(1) : minor.det();
            if ((i + j) % 2 == 1) cof = -cof;
            inv.at(j, i) = d > 0 ? cof : Int(-cof);
        }
    return inv;
}

SmithDecomposition smith_normal_form(const IntMatrix& a) {
    int rows = a.rows(), cols = a.cols();
    IntMatrix s = a;
    IntMatrix p = IntMatrix::identity(rows);
    IntMatrix q = IntMatrix::identity(cols);

    auto row_op = [&](int i, int j, const Int& x, const Int& y, const Int& u, const Int& v) {
        // (row_i, row_j) <- (x*row_i + y*row_j, u*row_i + v*row_j), det = xv - yu = +-1
        for (int c = 0; c < cols; ++c) {
            Int ri = x * s.at(i, c) + y * s.at(j, c);
            Int rj = u * s.at(i, c) + v * s.at(j, c);
            s.at(i, c) = ri;
            s.at(j, c) = rj;
        }
        for (int c = 0; c < rows; ++c) {
            Int ri = x * p.at(i, c) + y * p.at(j, c);
            Int rj = u * p.at(i, c) + v * p.at(j, c);
            p.at(i, c) = ri;
            p.at(j, c) = rj;
        }
    };
    auto col_op = [&](int i, int j, const Int& x, const Int& y, const Int& u, const Int& v) {
        for (int r = 0; r < rows; ++r) {
            Int ci = x * s.at(r, i) + y * s.at(r, j);
            Int cj = u * s.at(r, i) + v * s.at(r, j);
            s.at(r, i) = ci;
            s.at(r, j) = cj;
        }
        for (int r = 0; r < cols; ++r) {
            Int ci = x * q.at(r, i) + y * q.at(r, j);
            Int cj = u * q.at(r, i) + v * q.at(r, j);
            q.at(r, i) = ci;
            q.at(r, j) = cj;
        }
    };

    int t = 0;
    int rank = std::min(rows, cols);
    while (t < rank) {
        // Find a nonzero pivot in the remaining block.
        int pi = -1, pj = -1;
        for (int i = t; i < rows && pi < 0; ++i)
            for (int j = t; j < cols; ++j)
                if (s.at(i, j) != 0) { pi = i; pj = j; break; }
        if (pi < 0) break;
        if (pi != t) row_op(t, pi, 0, 1, 1, 0);
        if (pj != t) col_op(t, pj, 0, 1, 1, 0);

        bool again = true;
        while (again) {
            again = false;
            for (int i = t + 1; i < rows; ++i) {
                if (s.at(i, t) == 0) continue;
                Int x, y;
                Int g = ext_gcd(s.at(t, t), s.at(i, t), x, y);
                Int u = -s.at(i, t) / g, v = s.at(t, t) / g;
                row_op(t, i, x, y, u, v);
            }
            for (int j = t + 1; j < cols; ++j) {
                if (s.at(t, j) == 0) continue;
                Int x, y;
                Int g = ext_gcd(s.at(t, t), s.at(t, j), x, y);
                Int u = -s.at(t, j) / g, v = s.at(t, t) / g;
                col_op(t, j, x, y, u, v);
                again = true; // column ops may reintroduce entries below the pivot
            }
        }
        // Enforce divisibility of the remaining block by the pivot.
        bool fixed = true;
        for (int i = t + 1; i < rows && fixed; ++i)
            for (int j = t + 1; j < cols; ++j)
                if (s.at(i, j) % s.at(t, t) != 0) {
                    row_op(t, i, 1, 1, 0, 1); // add row i to row t, retry
                    fixed = false;
                    break;
                }
        if (!fixed) continue;
        ++t;
    }
    // Sign cleanup and diagonal collection.
    SmithDecomposition out;
    std::vector<Int> diag;
    for (int i = 0; i < std::min(rows, cols); ++i) {
        Int d = s.at(i, i);
        if (d < 0) {
            for (int c = 0; c < cols; ++c) s.at(i, c) = -s.at(i, c);
            for (int c = 0; c < rows; ++c) p.at(i, c) = -p.at(i, c);
            d = -d;
        }
        if (d != 0) diag.push_back(d);
    }
    out.P = std::move(p);
    out.Q = std::move(q);
    out.diag = std::move(diag);
    return out;
}

RatSymMatrix::RatSymMatrix(int n, std::vector<Rat> entries) : n_(n), a_(std::move(entries)) {
    if (a_.size() != static_cast<size_t>(n) * n)
        throw structural_error("RatSymMatrix: entry count does not match dimension");
    for (int i = 0; i < n_; ++i)
        for (int j = i + 1; j < n_; ++j)
            if (at(i, j) != at(j, i)) throw structural_error("RatSymMatrix: input not symmetric");
}

RatSymMatrix RatSymMatrix::identity(int n) {
    RatSymMatrix m(n);
    for (int i = 0; i < n; ++i) m.set(i, i, 1);
    return m;
}

RatSymMatrix RatSymMatrix::from_integer(const IntMatrix& m) {
    if (!m.is_symmetric()) throw structural_error("RatSymMatrix::from_integer: input not symmetric");
    RatSymMatrix r(m.rows());
    for (int i = 0; i < m.rows(); ++i)
        for (int j = 0; j < m.cols(); ++j) r.a_[static_cast<size_t>(i) * m.rows() + j] = Rat(m.at(i, j));
    return r;
}

void RatSymMatrix::set(int i, int j, const Rat& v) {
    a_[static_cast<size_t>(i) * n_ + j] = v;
    a_[static_cast<size_t>(j) * n_ + i] = v;
    pd_.reset();
    minors_.clear();
}

Rat RatSymMatrix::leading_minor(int k) const {
    // Exact Gaussian elimination on the k x k leading block.
    std::vector<Rat> m(static_cast<size_t>(k) * k);
    for (int i = 0; i < k; ++i)
        for (int j = 0; j < k; ++j) m[static_cast<size_t>(i) * k + j] = at(i, j);
    Rat det = 1;
    for (int c = 0; c < k; ++c) {
        int piv = -1;
        for (int i = c; i < k; ++i)
            if (m[static_cast<size_t>(i) * k + c] != 0) { piv = i; break; }
        if (piv < 0) return 0;
        if (piv != c) {
            for (int j = 0; j < k; ++j) std::swap(m[static_cast<size_t>(c) * k + j], m[static_cast<size_t>(piv) * k + j]);
            det = -det;
        }
        Rat pv = m[static_cast<size_t>(c) * k + c];
        det *= pv;
        for (int i = c + 1; i < k; ++i) {
            Rat f = m[static_cast<size_t>(i) * k + c] / pv;
            if (f == 0) continue;
            for (int j = c; j < k; ++j) m[static_cast<size_t>(i) * k + j] -= f * m[static_cast<size_t>(c) * k + j];
        }
    }
    return det;
}

Rat RatSymMatrix::det() const { return leading_minor(n_); }

Rat RatSymMatrix::trace() const {
    Rat t = 0;
    for (int i = 0; i < n_; ++i) t += at(i, i);
    return t;
}

bool RatSymMatrix::is_positive_definite() const {
    if (pd_) return *pd_;
    minors_.clear();
    bool ok = true;
    for (int k = 1; k <= n_; ++k) {
        Rat d = leading_minor(k);
        minors_.push_back(d);
        if (d <= 0) { ok = false; break; }
    }
    pd_ = ok;
    return ok;
}

const std::vector<Rat>& RatSymMatrix::minor_witness() const {
    is_positive_definite();
    return minors_;
}

RatSymMatrix RatSymMatrix::conjugate_by(const IntMatrix& u) const {
    if (u.rows() != n_) throw structural_error("RatSymMatrix::conjugate_by: dimension mismatch");
    int m = u.cols();
    RatSymMatrix r(m);
    for (int i = 0; i < m; ++i)
        for (int j = i; j < m; ++j) {
            Rat acc = 0;
            for (int p = 0; p < n_; ++p)
                for (int q = 0; q < n_; ++q) acc += Rat(u.at(p, i)) * at(p, q) * Rat(u.at(q, j));
            r.set(i, j, acc);
        }
    return r;
}

Rat RatSymMatrix::trace_pair(const IntMatrix& s) const {
    if (s.rows() != n_ || s.cols() != n_) throw structural_error("RatSymMatrix::trace_pair: dimension mismatch");
    Rat acc = 0;
    for (int i = 0; i < n_; ++i)
        for (int j = 0; j < n_; ++j) acc += at(i, j) * Rat(s.at(j, i));
    return acc;
}

} // namespace sieglab
