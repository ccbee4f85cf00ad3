#include "reduction.hpp"

#include <cmath>

namespace sieglab {

namespace {

// Quadratic value Y[col_j + t * col_i] bookkeeping is done on the conjugated
// matrix directly; columns of U are updated in exact arithmetic.
struct Work {
    const RealSymMatrix* y0;
    IntMatrix u;
    int n;

    RealSymMatrix current() const { return y0->conjugate_by(u); }
};

void add_column(Work& w, int dst, int src, const Int& t) {
    if (t == 0) return;
    for (int r = 0; r < w.n; ++r) w.u.at(r, dst) += t * w.u.at(r, src);
}

void swap_columns(Work& w, int a, int b) {
    for (int r = 0; r < w.n; ++r) std::swap(w.u.at(r, a), w.u.at(r, b));
}

bool size_reduce_pass(Work& w) {
    bool changed = false;
    RealSymMatrix y = w.current();
    for (int j = 1; j < w.n; ++j)
        for (int i = j - 1; i >= 0; --i) {
            real_t q = std::round(y.at(i, j) / y.at(i, i));
            if (q != 0) {
                add_column(w, j, i, Int(static_cast<long long>(q)) * -1);
                y = w.current();
                changed = true;
            }
        }
    return changed;
}

// Replace the first basis vector by v (primitive, in U-coordinates) and
// complete to a unimodular matrix.
void insert_first(Work& w, const IntMatrix& v) {
    SmithDecomposition snf = smith_normal_form(v);
    // v = P^{-1} (d,0,..,0)^t Q^{-1} with d = content(v) = 1.
    IntMatrix pinv = unimodular_inverse(snf.P);
    Int qsign = snf.Q.at(0, 0); // 1 x 1
    IntMatrix wmat = pinv;
    if (qsign < 0)
        for (int r = 0; r < w.n; ++r) wmat.at(r, 0) = -wmat.at(r, 0);
    w.u = w.u * wmat;
}

void fix_signs(IntMatrix& u) {
    for (int j = 0; j < u.cols(); ++j)
        for (int i = 0; i < u.rows(); ++i) {
            if (u.at(i, j) == 0) continue;
            if (u.at(i, j) < 0)
                for (int r = 0; r < u.rows(); ++r) u.at(r, j) = -u.at(r, j);
            break;
        }
}

bool lex_less(const IntMatrix& u, int a, int b) {
    for (int r = 0; r < u.rows(); ++r) {
        if (u.at(r, a) < u.at(r, b)) return true;
        if (u.at(r, a) > u.at(r, b)) return false;
    }
    return false;
}

ReductionResult finalize(Work& w) {
    fix_signs(w.u);
    // Deterministic order within exactly tied diagonal entries.
    RealSymMatrix y = w.current();
    for (int pass = 0; pass < w.n; ++pass)
        for (int j = 0; j + 1 < w.n; ++j)
            if (y.at(j, j) == y.at(j + 1, j + 1) && lex_less(w.u, j + 1, j)) {
                swap_columns(w, j, j + 1);
                y = w.current();
            }
    return {w.current(), w.u};
}

ReductionResult reduce_impl(const RealSymMatrix& yin, bool full_minkowski) {
    int n = yin.dim();
    if (!yin.is_positive_definite()) throw domain_error("minkowski_reduce: input not positive definite");
    Work w{&yin, IntMatrix::identity(n), n};
    if (n == 1) return finalize(w);

    const real_t rel = 1e-12;
    for (int iter = 0; iter < 512; ++iter) {
        bool changed = size_reduce_pass(w);
        RealSymMatrix y = w.current();
        for (int j = 0; j + 1 < n; ++j)
            if (y.at(j + 1, j + 1) < y.at(j, j) * (1 - rel)) {
                swap_columns(w, j, j + 1);
                changed = true;
                y = w.current();
            }
        if (full_minkowski && n == 3 && !changed) {
            // Check +-1 combination vectors against the current minimum.
            real_t best = y.at(0, 0);
            IntMatrix bestv(3, 1);
            for (int a = -1; a <= 1; ++a)
                for (int b = -1; b <= 1; ++b)
                    for (int c = -1; c <= 1; ++c) {
                        if (a == 0 && b == 0 && c == 0) continue;
                        IntMatrix v(3, 1);
                        v.at(0, 0) = a; v.at(1, 0) = b; v.at(2, 0) = c;
                        real_t q = 0;
                        for (int p = 0; p < 3; ++p)
                            for (int r = 0; r < 3; ++r)
                                q += to_double(v.at(p, 0)) * y.at(p, r) * to_double(v.at(r, 0));
                        if (q < best * (1 - rel)) { best = q; bestv = v; }
                    }
            if (bestv.rows() == 3 && !bestv.is_zero()) {
                insert_first(w, bestv);
                changed = true;
            }
        }
        if (!changed) break;
    }
    return finalize(w);
}

} // namespace

ReductionResult minkowski_reduce(const RealSymMatrix& y) {
    if (y.dim() > 3) throw capability_error("minkowski_reduce: exact reduction implemented for n <= 3 only");
    return reduce_impl(y, true);
}

ReductionResult weak_reduce(const RealSymMatrix& y) { return reduce_impl(y, false); }

bool is_minkowski_reduced(const RealSymMatrix& y, real_t tol) {
    int n = y.dim();
    for (int j = 0; j + 1 < n; ++j)
        if (y.at(j + 1, j + 1) < y.at(j, j) * (1 - tol)) return false;
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j)
            if (2 * std::abs(y.at(i, j)) > y.at(i, i) * (1 + tol)) return false;
    return true;
}

} // namespace sieglab
