#include "realmat.hpp"

#include <algorithm>
#include <cmath>

namespace sieglab {

RealSymMatrix::RealSymMatrix(int n, std::vector<real_t> entries, real_t sym_tol)
    : n_(n), a_(std::move(entries)) {
    if (a_.size() != static_cast<size_t>(n) * n)
        throw structural_error("RealSymMatrix: entry count does not match dimension");
    for (int i = 0; i < n_; ++i)
        for (int j = i + 1; j < n_; ++j) {
            real_t d = std::abs(at(i, j) - at(j, i));
            real_t scale = std::max<real_t>(1, std::max(std::abs(at(i, j)), std::abs(at(j, i))));
            if (d > sym_tol * scale) throw structural_error("RealSymMatrix: input not symmetric");
            real_t m = (at(i, j) + at(j, i)) / 2;
            a_[static_cast<size_t>(i) * n_ + j] = m;
            a_[static_cast<size_t>(j) * n_ + i] = m;
        }
}

RealSymMatrix RealSymMatrix::identity(int n) { return scaled_identity(n, 1); }

RealSymMatrix RealSymMatrix::scaled_identity(int n, real_t y) {
    RealSymMatrix m(n);
    for (int i = 0; i < n; ++i) m.set(i, i, y);
    return m;
}

void RealSymMatrix::set(int i, int j, real_t v) {
    a_[static_cast<size_t>(i) * n_ + j] = v;
    a_[static_cast<size_t>(j) * n_ + i] = v;
    pd_.reset();
    chol_.clear();
}

real_t RealSymMatrix::trace() const {
    real_t t = 0;
    for (int i = 0; i < n_; ++i) t += at(i, i);
    return t;
}

real_t RealSymMatrix::det() const {
    // LU with partial pivoting; n is tiny.
    int n = n_;
    std::vector<real_t> m = a_;
    real_t d = 1;
    for (int c = 0; c < n; ++c) {
        int piv = c;
        for (int i = c + 1; i < n; ++i)
            if (std::abs(m[static_cast<size_t>(i) * n + c]) > std::abs(m[static_cast<size_t>(piv) * n + c])) piv = i;
        if (m[static_cast<size_t>(piv) * n + c] == 0) return 0;
        if (piv != c) {
            for (int j = 0; j < n; ++j) std::swap(m[static_cast<size_t>(c) * n + j], m[static_cast<size_t>(piv) * n + j]);
            d = -d;
        }
        real_t pv = m[static_cast<size_t>(c) * n + c];
        d *= pv;
        for (int i = c + 1; i < n; ++i) {
            real_t f = m[static_cast<size_t>(i) * n + c] / pv;
            for (int j = c; j < n; ++j) m[static_cast<size_t>(i) * n + j] -= f * m[static_cast<size_t>(c) * n + j];
        }
    }
    return d;
}

void RealSymMatrix::factor() const {
    if (pd_) return;
    chol_.assign(static_cast<size_t>(n_) * n_, 0);
    bool ok = true;
    for (int i = 0; i < n_ && ok; ++i) {
        for (int j = 0; j <= i; ++j) {
            real_t s = at(i, j);
            for (int k = 0; k < j; ++k) s -= chol_[static_cast<size_t>(i) * n_ + k] * chol_[static_cast<size_t>(j) * n_ + k];
            if (i == j) {
                if (s <= 0) { ok = false; break; }
                chol_[static_cast<size_t>(i) * n_ + j] = std::sqrt(s);
            } else {
                chol_[static_cast<size_t>(i) * n_ + j] = s / chol_[static_cast<size_t>(j) * n_ + j];
            }
        }
    }
    if (!ok) chol_.clear();
    pd_ = ok;
}

bool RealSymMatrix::is_positive_definite() const {
    factor();
    return *pd_;
}

const std::vector<real_t>& RealSymMatrix::cholesky_witness() const {
    factor();
    return chol_;
}

real_t RealSymMatrix::min_eigenvalue() const {
    SymEigen e = jacobi_eigen(a_, n_);
    return e.values.back();
}

real_t RealSymMatrix::max_eigenvalue() const {
    SymEigen e = jacobi_eigen(a_, n_);
    return e.values.front();
}

RealSymMatrix RealSymMatrix::conjugate_by(const IntMatrix& u) const {
    if (u.rows() != n_) throw structural_error("RealSymMatrix::conjugate_by: dimension mismatch");
    int m = u.cols();
    RealSymMatrix r(m);
    for (int i = 0; i < m; ++i)
        for (int j = i; j < m; ++j) {
            real_t acc = 0;
            for (int p = 0; p < n_; ++p) {
                real_t upi = to_double(u.at(p, i));
                if (upi == 0) continue;
                for (int q = 0; q < n_; ++q) acc += upi * at(p, q) * to_double(u.at(q, j));
            }
            r.set(i, j, acc);
        }
    return r;
}

RealSymMatrix RealSymMatrix::operator+(const RealSymMatrix& o) const {
    if (n_ != o.n_) throw structural_error("RealSymMatrix: dimension mismatch in sum");
    RealSymMatrix r(n_);
    for (int i = 0; i < n_; ++i)
        for (int j = i; j < n_; ++j) r.set(i, j, at(i, j) + o.at(i, j));
    return r;
}

RealSymMatrix RealSymMatrix::operator-(const RealSymMatrix& o) const {
    if (n_ != o.n_) throw structural_error("RealSymMatrix: dimension mismatch in difference");
    RealSymMatrix r(n_);
    for (int i = 0; i < n_; ++i)
        for (int j = i; j < n_; ++j) r.set(i, j, at(i, j) - o.at(i, j));
    return r;
}

RealSymMatrix RealSymMatrix::scaled(real_t c) const {
    RealSymMatrix r(n_);
    for (int i = 0; i < n_; ++i)
        for (int j = i; j < n_; ++j) r.set(i, j, c * at(i, j));
    return r;
}

real_t RealSymMatrix::trace_pair(const RealSymMatrix& o) const {
    if (n_ != o.n_) throw structural_error("RealSymMatrix::trace_pair: dimension mismatch");
    real_t acc = 0;
    for (int i = 0; i < n_; ++i)
        for (int j = 0; j < n_; ++j) acc += at(i, j) * o.at(j, i);
    return acc;
}

CMat CMat::from_parts(const RealSymMatrix& re, const RealSymMatrix& im) {
    if (re.dim() != im.dim()) throw structural_error("CMat::from_parts: dimension mismatch");
    CMat m(re.dim());
    for (int i = 0; i < re.dim(); ++i)
        for (int j = 0; j < re.dim(); ++j) m.at(i, j) = cplx(re.at(i, j), im.at(i, j));
    return m;
}

CMat CMat::from_int(const IntMatrix& m) {
    if (m.rows() != m.cols()) throw structural_error("CMat::from_int: matrix not square");
    CMat r(m.rows());
    for (int i = 0; i < m.rows(); ++i)
        for (int j = 0; j < m.cols(); ++j) r.at(i, j) = cplx(to_double(m.at(i, j)), 0);
    return r;
}

CMat CMat::operator*(const CMat& o) const {
    if (n_ != o.n_) throw structural_error("CMat: dimension mismatch in product");
    CMat r(n_);
    for (int i = 0; i < n_; ++i)
        for (int k = 0; k < n_; ++k) {
            cplx v = at(i, k);
            if (v == cplx(0, 0)) continue;
            for (int j = 0; j < n_; ++j) r.at(i, j) += v * o.at(k, j);
        }
    return r;
}

CMat CMat::operator+(const CMat& o) const {
    if (n_ != o.n_) throw structural_error("CMat: dimension mismatch in sum");
    CMat r(n_);
    for (size_t i = 0; i < a_.size(); ++i) r.a_[i] = a_[i] + o.a_[i];
    return r;
}

cplx CMat::det() const {
    int n = n_;
    if (n == 1) return at(0, 0);
    if (n == 2) return at(0, 0) * at(1, 1) - at(0, 1) * at(1, 0);
    std::vector<cplx> m = a_;
    cplx d = 1;
    for (int c = 0; c < n; ++c) {
        int piv = c;
        for (int i = c + 1; i < n; ++i)
            if (std::abs(m[static_cast<size_t>(i) * n + c]) > std::abs(m[static_cast<size_t>(piv) * n + c])) piv = i;
        if (std::abs(m[static_cast<size_t>(piv) * n + c]) == 0) return 0;
        if (piv != c) {
            for (int j = 0; j < n; ++j) std::swap(m[static_cast<size_t>(c) * n + j], m[static_cast<size_t>(piv) * n + j]);
            d = -d;
        }
        cplx pv = m[static_cast<size_t>(c) * n + c];
        d *= pv;
        for (int i = c + 1; i < n; ++i) {
            cplx f = m[static_cast<size_t>(i) * n + c] / pv;
            for (int j = c; j < n; ++j) m[static_cast<size_t>(i) * n + j] -= f * m[static_cast<size_t>(c) * n + j];
        }
    }
    return d;
}

CMat CMat::inverse() const {
    int n = n_;
    std::vector<cplx> m = a_;
    CMat inv(n);
    for (int i = 0; i < n; ++i) inv.at(i, i) = 1;
    for (int c = 0; c < n; ++c) {
        int piv = c;
        for (int i = c + 1; i < n; ++i)
            if (std::abs(m[static_cast<size_t>(i) * n + c]) > std::abs(m[static_cast<size_t>(piv) * n + c])) piv = i;
        real_t pmag = std::abs(m[static_cast<size_t>(piv) * n + c]);
        if (pmag < 1e-300) throw precision_error("CMat::inverse: matrix numerically singular");
        if (piv != c)
            for (int j = 0; j < n; ++j) {
                std::swap(m[static_cast<size_t>(c) * n + j], m[static_cast<size_t>(piv) * n + j]);
                std::swap(inv.at(c, j), inv.at(piv, j));
            }
        cplx pv = m[static_cast<size_t>(c) * n + c];
        for (int j = 0; j < n; ++j) {
            m[static_cast<size_t>(c) * n + j] /= pv;
            inv.at(c, j) /= pv;
        }
        for (int i = 0; i < n; ++i) {
            if (i == c) continue;
            cplx f = m[static_cast<size_t>(i) * n + c];
            if (f == cplx(0, 0)) continue;
            for (int j = 0; j < n; ++j) {
                m[static_cast<size_t>(i) * n + j] -= f * m[static_cast<size_t>(c) * n + j];
                inv.at(i, j) -= f * inv.at(c, j);
            }
        }
    }
    return inv;
}

RealSymMatrix CMat::real_sym(real_t tol) const {
    RealSymMatrix r(n_);
    for (int i = 0; i < n_; ++i)
        for (int j = i; j < n_; ++j) {
            real_t a = at(i, j).real(), b = at(j, i).real();
            if (std::abs(a - b) > tol * std::max<real_t>(1, std::max(std::abs(a), std::abs(b))))
                throw precision_error("CMat::real_sym: real part not symmetric within tolerance");
            r.set(i, j, (a + b) / 2);
        }
    return r;
}

RealSymMatrix CMat::imag_sym(real_t tol) const {
    RealSymMatrix r(n_);
    for (int i = 0; i < n_; ++i)
        for (int j = i; j < n_; ++j) {
            real_t a = at(i, j).imag(), b = at(j, i).imag();
            if (std::abs(a - b) > tol * std::max<real_t>(1, std::max(std::abs(a), std::abs(b))))
                throw precision_error("CMat::imag_sym: imaginary part not symmetric within tolerance");
            r.set(i, j, (a + b) / 2);
        }
    return r;
}

SymEigen jacobi_eigen(const std::vector<real_t>& sym, int k) {
    std::vector<real_t> a = sym;
    std::vector<real_t> v(static_cast<size_t>(k) * k, 0);
    for (int i = 0; i < k; ++i) v[static_cast<size_t>(i) * k + i] = 1;
    auto A = [&](int i, int j) -> real_t& { return a[static_cast<size_t>(i) * k + j]; };
    auto V = [&](int i, int j) -> real_t& { return v[static_cast<size_t>(i) * k + j]; };

    for (int sweep = 0; sweep < 64; ++sweep) {
        real_t off = 0;
        for (int i = 0; i < k; ++i)
            for (int j = i + 1; j < k; ++j) off += A(i, j) * A(i, j);
        if (off < 1e-28) break;
        for (int p = 0; p < k; ++p)
            for (int q = p + 1; q < k; ++q) {
                if (std::abs(A(p, q)) < 1e-300) continue;
                real_t theta = (A(q, q) - A(p, p)) / (2 * A(p, q));
                real_t t = (theta >= 0 ? 1.0 : -1.0) / (std::abs(theta) + std::sqrt(theta * theta + 1));
                real_t c = 1 / std::sqrt(t * t + 1);
                real_t s = t * c;
                for (int i = 0; i < k; ++i) {
                    real_t aip = A(i, p), aiq = A(i, q);
                    A(i, p) = c * aip - s * aiq;
                    A(i, q) = s * aip + c * aiq;
                }
                for (int j = 0; j < k; ++j) {
                    real_t apj = A(p, j), aqj = A(q, j);
                    A(p, j) = c * apj - s * aqj;
                    A(q, j) = s * apj + c * aqj;
                }
                for (int i = 0; i < k; ++i) {
                    real_t vip = V(i, p), viq = V(i, q);
                    V(i, p) = c * vip - s * viq;
                    V(i, q) = s * vip + c * viq;
                }
            }
    }
    std::vector<int> order(k);
    for (int i = 0; i < k; ++i) order[i] = i;
    std::sort(order.begin(), order.end(), [&](int x, int y) { return A(x, x) > A(y, y); });
    SymEigen e;
    e.values.resize(k);
    e.vectors.assign(k, std::vector<real_t>(k));
    for (int j = 0; j < k; ++j) {
        e.values[j] = A(order[j], order[j]);
        for (int i = 0; i < k; ++i) e.vectors[j][i] = V(i, order[j]);
    }
    return e;
}

} // namespace sieglab
