#include "symplectic.hpp"

namespace sieglab {

namespace {

bool symplectic_blocks_ok(const IntMatrix& a, const IntMatrix& b, const IntMatrix& c, const IntMatrix& d) {
    // g^t J g = J in block form: A^t C and B^t D symmetric, A^t D - C^t B = 1.
    IntMatrix atc = a.transpose() * c;
    if (!atc.is_symmetric()) return false;
    IntMatrix btd = b.transpose() * d;
    if (!btd.is_symmetric()) return false;
    IntMatrix rel = a.transpose() * d - c.transpose() * b;
    return rel.is_identity();
}

bool is_prime(long p) {
    if (p < 2) return false;
    for (long q = 2; q * q <= p; ++q)
        if (p % q == 0) return false;
    return true;
}

} // namespace

SymplecticElement::SymplecticElement(IntMatrix a, IntMatrix b, IntMatrix c, IntMatrix d, bool check)
    : n_(a.rows()), a_(std::move(a)), b_(std::move(b)), c_(std::move(c)), d_(std::move(d)) {
    if (a_.rows() != n_ || a_.cols() != n_ || b_.rows() != n_ || b_.cols() != n_ ||
        c_.rows() != n_ || c_.cols() != n_ || d_.rows() != n_ || d_.cols() != n_)
        throw structural_error("SymplecticElement: blocks must be n x n");
    if (check && !symplectic_blocks_ok(a_, b_, c_, d_))
        throw structural_error("SymplecticElement: symplectic relation fails");
}

SymplecticElement SymplecticElement::from_matrix(const IntMatrix& m, bool check) {
    if (m.rows() != m.cols() || m.rows() % 2 != 0)
        throw structural_error("SymplecticElement::from_matrix: dimension must be even and square");
    int n = m.rows() / 2;
    IntMatrix a(n, n), b(n, n), c(n, n), d(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            a.at(i, j) = m.at(i, j);
            b.at(i, j) = m.at(i, j + n);
            c.at(i, j) = m.at(i + n, j);
            d.at(i, j) = m.at(i + n, j + n);
        }
    return SymplecticElement(std::move(a), std::move(b), std::move(c), std::move(d), check);
}

SymplecticElement SymplecticElement::identity(int n) {
    return SymplecticElement(IntMatrix::identity(n), IntMatrix::zero(n, n), IntMatrix::zero(n, n),
                             IntMatrix::identity(n), false);
}

SymplecticElement SymplecticElement::inversion(int n) {
    return SymplecticElement(IntMatrix::zero(n, n), -IntMatrix::identity(n), IntMatrix::identity(n),
                             IntMatrix::zero(n, n), false);
}

SymplecticElement SymplecticElement::translation(const IntMatrix& s) {
    if (!s.is_symmetric()) throw structural_error("translation: S must be symmetric");
    int n = s.rows();
    return SymplecticElement(IntMatrix::identity(n), s, IntMatrix::zero(n, n), IntMatrix::identity(n), false);
}

SymplecticElement SymplecticElement::unit(const IntMatrix& u) {
    Int d = u.det();
    if (d != 1 && d != -1) throw domain_error("unit: U must be unimodular");
    return SymplecticElement(u.transpose(), IntMatrix::zero(u.rows(), u.rows()), IntMatrix::zero(u.rows(), u.rows()),
                             unimodular_inverse(u), false);
}

SymplecticElement SymplecticElement::partial_inversion(int n, int j) {
    if (j < 0 || j > n) throw structural_error("partial_inversion: need 0 <= j <= n");
    IntMatrix a(n, n), b(n, n), c(n, n), d(n, n);
    for (int i = 0; i < n; ++i) {
        if (i < j) {
            b.at(i, i) = -1;
            c.at(i, i) = 1;
        } else {
            a.at(i, i) = 1;
            d.at(i, i) = 1;
        }
    }
    return SymplecticElement(std::move(a), std::move(b), std::move(c), std::move(d));
}

IntMatrix SymplecticElement::matrix() const {
    IntMatrix m(2 * n_, 2 * n_);
    for (int i = 0; i < n_; ++i)
        for (int j = 0; j < n_; ++j) {
            m.at(i, j) = a_.at(i, j);
            m.at(i, j + n_) = b_.at(i, j);
            m.at(i + n_, j) = c_.at(i, j);
            m.at(i + n_, j + n_) = d_.at(i, j);
        }
    return m;
}

SymplecticElement SymplecticElement::operator*(const SymplecticElement& o) const {
    if (n_ != o.n_) throw structural_error("SymplecticElement: degree mismatch in product");
    return SymplecticElement(a_ * o.a_ + b_ * o.c_, a_ * o.b_ + b_ * o.d_, c_ * o.a_ + d_ * o.c_,
                             c_ * o.b_ + d_ * o.d_, false);
}

SymplecticElement SymplecticElement::inverse() const {
    return SymplecticElement(d_.transpose(), -b_.transpose(), -c_.transpose(), a_.transpose(), false);
}

bool SymplecticElement::operator==(const SymplecticElement& o) const {
    return n_ == o.n_ && a_ == o.a_ && b_ == o.b_ && c_ == o.c_ && d_ == o.d_;
}

bool is_symplectic(const IntMatrix& g) {
    if (g.rows() != g.cols() || g.rows() % 2 != 0)
        throw structural_error("is_symplectic: dimension must be even and square");
    int n = g.rows() / 2;
    IntMatrix a(n, n), b(n, n), c(n, n), d(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            a.at(i, j) = g.at(i, j);
            b.at(i, j) = g.at(i, j + n);
            c.at(i, j) = g.at(i + n, j);
            d.at(i, j) = g.at(i + n, j + n);
        }
    return symplectic_blocks_ok(a, b, c, d);
}

SiegelPoint::SiegelPoint(RealSymMatrix x, RealSymMatrix y) : x_(std::move(x)), y_(std::move(y)) {
    if (x_.dim() != y_.dim()) throw structural_error("SiegelPoint: X and Y dimensions differ");
    if (!y_.is_positive_definite()) throw domain_error("SiegelPoint: Y must be positive definite");
}

SiegelPoint SiegelPoint::upper(int n, real_t y) {
    return SiegelPoint(RealSymMatrix(n), RealSymMatrix::scaled_identity(n, y));
}

SiegelPoint SiegelPoint::degree1(real_t x, real_t y) {
    RealSymMatrix xm(1), ym(1);
    xm.set(0, 0, x);
    ym.set(0, 0, y);
    return SiegelPoint(xm, ym);
}

SiegelPoint act(const SymplecticElement& g, const SiegelPoint& z) {
    if (g.degree() != z.degree()) throw structural_error("act: degree mismatch");
    CMat zc = z.Z();
    CMat num = CMat::from_int(g.A()) * zc + CMat::from_int(g.B());
    CMat den = CMat::from_int(g.C()) * zc + CMat::from_int(g.D());
    CMat w = num * den.inverse();
    return SiegelPoint(w.real_sym(), w.imag_sym());
}

cplx automorphy_factor(const SymplecticElement& g, const SiegelPoint& z) {
    if (g.degree() != z.degree()) throw structural_error("automorphy_factor: degree mismatch");
    CMat den = CMat::from_int(g.C()) * z.Z() + CMat::from_int(g.D());
    return den.det();
}

bool is_coprime_symmetric_pair(const IntMatrix& c, const IntMatrix& d) {
    int n = c.rows();
    if (c.cols() != n || d.rows() != n || d.cols() != n)
        throw structural_error("is_coprime_symmetric_pair: blocks must be square of equal size");
    IntMatrix cdt = c * d.transpose();
    if (!cdt.is_symmetric()) return false;
    IntMatrix stacked(2 * n, n); // (ated) D^t over -C^t
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            stacked.at(i, j) = d.at(j, i);
            stacked.at(i + n, j) = -c.at(j, i);
        }
    SmithDecomposition snf = smith_normal_form(stacked);
    if (static_cast<int>(snf.diag.size()) != n) return false;
    for (const auto& e : snf.diag)
        if (e != 1) return false;
    return true;
}

SymplecticElement complete_pair(const IntMatrix& c, const IntMatrix& d) {
    int n = c.rows();
    if (c.cols() != n || d.rows() != n || d.cols() != n)
        throw structural_error("complete_pair: blocks must be square of equal size");
    IntMatrix cdt = c * d.transpose();
    if (!cdt.is_symmetric()) throw domain_error("complete_pair: C D^t is not symmetric");

    IntMatrix m(2 * n, n); // columns of (D^t; -C^t)
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            m.at(i, j) = d.at(j, i);
            m.at(i + n, j) = -c.at(j, i);
        }
    SmithDecomposition snf = smith_normal_form(m);
    if (static_cast<int>(snf.diag.size()) != n)
        throw domain_error("complete_pair: pair is not coprime (rank defect)");
    for (const auto& e : snf.diag)
        if (e != 1) throw domain_error("complete_pair: pair is not coprime (nontrivial elementary divisor)");

    // W0 * M = 1 with W0 = Q * (top n rows of P); split W0 into (A0 B0).
    IntMatrix ptop(n, 2 * n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < 2 * n; ++j) ptop.at(i, j) = snf.P.at(i, j);
    IntMatrix w0 = snf.Q * ptop;
    IntMatrix a0(n, n), b0(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            a0.at(i, j) = w0.at(i, j);
            b0.at(i, j) = w0.at(i, j + n);
        }

    // Symmetrise A B^t: the residual skew part is absorbed by a translation.
    IntMatrix phi = a0 * b0.transpose() - b0 * a0.transpose();
    IntMatrix s(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < i; ++j) {
            s.at(i, j) = phi.at(i, j);
            s.at(j, i) = phi.at(i, j);
        }
    // S - S^t = phi requires the strict lower triangle only; clear the mirror.
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j) s.at(i, j) = 0;
    IntMatrix a = a0 + s * c;
    IntMatrix b = b0 + s * d;

    // Canonical representative: greedily shrink (A B) by symmetric
    // translations (A,B) -> (A - T C, B - T D).
    std::vector<IntMatrix> basis;
    for (int i = 0; i < n; ++i)
        for (int j = i; j < n; ++j) {
            IntMatrix e(n, n);
            e.at(i, j) = 1;
            e.at(j, i) = 1;
            basis.push_back(e);
        }
    auto round_div = [](const Int& num, const Int& den) {
        // Nearest integer to num/den for den > 0, ties towards -inf.
        Int shifted = 2 * num + den;
        Int r = mod_floor(shifted, 2 * den);
        return (shifted - r) / (2 * den);
    };
    for (int pass = 0; pass < 4; ++pass) {
        bool moved = false;
        for (const auto& e : basis) {
            IntMatrix ec = e * c, ed = e * d;
            Int denom = 0, num = 0;
            for (int i = 0; i < n; ++i)
                for (int j = 0; j < n; ++j) {
                    denom += ec.at(i, j) * ec.at(i, j) + ed.at(i, j) * ed.at(i, j);
                    num += a.at(i, j) * ec.at(i, j) + b.at(i, j) * ed.at(i, j);
                }
            if (denom == 0) continue;
            Int t = round_div(num, denom);
            if (t != 0) {
                for (int i = 0; i < n; ++i)
                    for (int j = 0; j < n; ++j) {
                        a.at(i, j) -= t * ec.at(i, j);
                        b.at(i, j) -= t * ed.at(i, j);
                    }
                moved = true;
            }
        }
        if (!moved) break;
    }

    SymplecticElement g(a, b, c, d);
    return g;
}

std::vector<SymplecticElement> gamma0p_cosets_sp2(long p) {
    if (!is_prime(p)) throw domain_error("gamma0p_cosets_sp2: p must be prime");
    std::vector<SymplecticElement> out;
    auto make_b = [&](int j, long b11, long b12, long b22) {
        IntMatrix b(2, 2);
        if (j >= 1) b.at(0, 0) = b11;
        if (j == 2) {
            b.at(0, 1) = b12;
            b.at(1, 0) = b12;
            b.at(1, 1) = b22;
        }
        return b;
    };
    auto unit_reps = [&](int j) {
        std::vector<IntMatrix> reps;
        if (j == 1) {
            reps.push_back(IntMatrix::identity(2));
            for (long x = 0; x < p; ++x) {
                IntMatrix a(2, 2);
                a.at(0, 0) = 0;
                a.at(0, 1) = 1;
                a.at(1, 0) = -1;
                a.at(1, 1) = x;
                reps.push_back(a);
            }
        } else {
            reps.push_back(IntMatrix::identity(2));
        }
        return reps;
    };
    for (int j = 0; j <= 2; ++j) {
        SymplecticElement wj = SymplecticElement::partial_inversion(2, j);
        long b11max = (j >= 1) ? p : 1;
        long brestmax = (j == 2) ? p : 1;
        for (long b11 = 0; b11 < b11max; ++b11)
            for (long b12 = 0; b12 < brestmax; ++b12)
                for (long b22 = 0; b22 < brestmax; ++b22) {
                    SymplecticElement nb = SymplecticElement::translation(make_b(j, b11, b12, b22));
                    for (const auto& arep : unit_reps(j)) {
                        SymplecticElement ma = SymplecticElement::unit(arep.transpose());
                        out.push_back(wj * nb * ma);
                    }
                }
    }
    return out;
}

} // namespace sieglab
