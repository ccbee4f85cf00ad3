#include "forms.hpp"

#include <algorithm>
#include <cmath>
#include <functional>

#include "kahan.hpp"

namespace sieglab {

HalfIntegralForm::HalfIntegralForm(IntMatrix gram2, long omega) : n_(gram2.rows()), omega_(omega), g2_(std::move(gram2)) {
    if (!g2_.is_symmetric()) throw structural_error("HalfIntegralForm: matrix must be symmetric");
    if (omega_ < 1) throw structural_error("HalfIntegralForm: omega must be >= 1");
    for (int i = 0; i < n_; ++i)
        if (mod_floor(g2_.at(i, i), 2) != 0)
            throw structural_error("HalfIntegralForm: diagonal of 2*omega*T must be even");
}

HalfIntegralForm HalfIntegralForm::scalar(long t) {
    IntMatrix g(1, 1);
    g.at(0, 0) = 2 * t;
    return HalfIntegralForm(std::move(g), 1);
}

HalfIntegralForm HalfIntegralForm::identity(int n) {
    IntMatrix g(n, n);
    for (int i = 0; i < n; ++i) g.at(i, i) = 2;
    return HalfIntegralForm(std::move(g), 1);
}

HalfIntegralForm HalfIntegralForm::from_rational(const RatSymMatrix& t) {
    // Smallest omega with 2*omega*T integral and omega*T of even diagonal.
    int n = t.dim();
    Int den = 1;
    for (int i = 0; i < n; ++i) {
        Int d1 = boost::multiprecision::denominator(t.at(i, i));
        den = den * d1 / int_gcd(den, d1);
        for (int j = i + 1; j < n; ++j) {
            Rat twice = 2 * t.at(i, j);
            Int d2 = boost::multiprecision::denominator(twice);
            den = den * d2 / int_gcd(den, d2);
        }
    }
    long omega = static_cast<long>(den);
    IntMatrix g(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            Rat v = 2 * Rat(omega) * t.at(i, j);
            if (boost::multiprecision::denominator(v) != 1)
                throw structural_error("HalfIntegralForm::from_rational: entries not commensurable");
            g.at(i, j) = boost::multiprecision::numerator(v);
        }
    return HalfIntegralForm(std::move(g), omega);
}

RatSymMatrix HalfIntegralForm::rational() const {
    RatSymMatrix t(n_);
    for (int i = 0; i < n_; ++i)
        for (int j = i; j < n_; ++j) t.set(i, j, Rat(g2_.at(i, j), Int(2) * omega_));
    return t;
}

Rat HalfIntegralForm::trace() const {
    Rat s = 0;
    for (int i = 0; i < n_; ++i) s += Rat(g2_.at(i, i), Int(2) * omega_);
    return s;
}

Rat HalfIntegralForm::det() const { return rational().det(); }

bool HalfIntegralForm::is_positive_definite() const { return rational().is_positive_definite(); }

Rat HalfIntegralForm::min_eigenvalue_lower_bound() const {
    Rat d = det();
    Rat tr = trace();
    if (d <= 0 || tr <= 0) return 0;
    Rat denom = 1;
    for (int i = 0; i < n_ - 1; ++i) denom *= tr;
    return d / denom;
}

real_t HalfIntegralForm::trace_pair(const RealSymMatrix& y) const {
    if (y.dim() != n_) throw structural_error("HalfIntegralForm::trace_pair: dimension mismatch");
    real_t acc = 0;
    for (int i = 0; i < n_; ++i)
        for (int j = 0; j < n_; ++j) acc += to_double(g2_.at(i, j)) * y.at(j, i);
    return acc / (2.0 * omega_);
}

HalfIntegralForm HalfIntegralForm::conjugate_by(const IntMatrix& u) const {
    IntMatrix g = u.transpose() * g2_ * u;
    return HalfIntegralForm(std::move(g), omega_);
}

bool HalfIntegralForm::operator<(const HalfIntegralForm& o) const {
    if (n_ != o.n_) return n_ < o.n_;
    if (omega_ != o.omega_) return omega_ < o.omega_;
    for (int i = 0; i < n_; ++i)
        for (int j = 0; j < n_; ++j)
            if (g2_.at(i, j) != o.g2_.at(i, j)) return g2_.at(i, j) < o.g2_.at(i, j);
    return false;
}

FormEnumeration enumerate_forms(const DualLatticeDescriptor& lattice, const RealSymMatrix& y, real_t bound) {
    int n = lattice.degree();
    if (n > 3) throw capability_error("enumerate_forms: degrees 1..3 only");
    if (!y.is_positive_definite()) throw domain_error("enumerate_forms: Y must be positive definite");
    if (bound <= 0) throw parameter_error("enumerate_forms: bound must be positive");
    long omega = lattice.omega();
    bool need_dual_check = lattice.index() != 1;

    FormEnumeration out;
    out.y = y;
    out.bound = bound;
    out.omega = omega;

    real_t lam = y.min_eigenvalue();
    if (lam <= 0) throw domain_error("enumerate_forms: Y must be positive definite");
    // tr(T Y) >= lambda_min(Y) tr(T) and the scaled form omega*T has integer
    // diagonal t_i >= 1.
    long tmax = static_cast<long>(std::floor(omega * bound / lam + 1e-9));
    if (tmax < 1) return out;

    std::vector<long> diag(n, 1);
    std::vector<long> off; // entries of 2*omega*T above the diagonal, row-major
    int offc = n * (n - 1) / 2;
    off.assign(offc, 0);

    auto off_index = [&](int i, int j) {
        int k = 0;
        for (int a = 0; a < n; ++a)
            for (int b = a + 1; b < n; ++b) {
                if (a == i && b == j) return k;
                ++k;
            }
        return -1;
    };

    auto emit = [&](const std::vector<long>& d, const std::vector<long>& o) {
        IntMatrix g(n, n);
        for (int i = 0; i < n; ++i) g.at(i, i) = 2 * d[i];
        for (int i = 0; i < n; ++i)
            for (int j = i + 1; j < n; ++j) {
                long v = o[off_index(i, j)];
                g.at(i, j) = v;
                g.at(j, i) = v;
            }
        HalfIntegralForm f(std::move(g), omega);
        if (f.trace_pair(y) > bound) return;
        if (!f.is_positive_definite()) return;
        if (need_dual_check && !lattice.contains(f.rational())) return;
        out.forms.push_back(std::move(f));
    };

    // Iterate diagonals with the trace budget, then box each off-diagonal by
    // Cauchy-Schwarz: (2 omega t_ij)^2 <= (2 omega t_ii)(2 omega t_jj).
    std::function<void(int, long)> rec_diag = [&](int i, long used) {
        if (i == n) {
            std::function<void(int)> rec_off2 = [&](int k) {
                if (k == offc) {
                    emit(diag, off);
                    return;
                }
                int ii = 0, jj = 0, t = 0;
                for (int a = 0; a < n && t <= k; ++a)
                    for (int b = a + 1; b < n; ++b) {
                        if (t == k) { ii = a; jj = b; }
                        ++t;
                    }
                long lim = static_cast<long>(std::floor(2.0 * std::sqrt(static_cast<double>(diag[ii]) * diag[jj]) + 1e-9));
                for (long v = -lim; v <= lim; ++v) {
                    off[k] = v;
                    rec_off2(k + 1);
                }
                off[k] = 0;
            };
            rec_off2(0);
            return;
        }
        for (long t = 1; t + used <= tmax; ++t) {
            diag[i] = t;
            rec_diag(i + 1, used + t);
        }
        diag[i] = 1;
    };
    rec_diag(0, 0);

    std::sort(out.forms.begin(), out.forms.end());
    return out;
}

long required_unit_norm_bound(const HalfIntegralForm& t, const HalfIntegralForm& tp) {
    Rat lam = t.min_eigenvalue_lower_bound();
    if (lam <= 0) throw domain_error("required_unit_norm_bound: T must be positive definite");
    Rat bound = tp.trace() / lam;
    Int num = boost::multiprecision::numerator(bound);
    Int den = boost::multiprecision::denominator(bound);
    Int q = num / den + 1;
    return static_cast<long>(q);
}

long automorphism_count(const HalfIntegralForm& t, const HalfIntegralForm& tp,
                        const std::vector<IntMatrix>& units, long enumerated_bound) {
    if (t.degree() != tp.degree()) throw structural_error("automorphism_count: degree mismatch");
    if (t.omega() != tp.omega()) return 0;
    long covered = enumerated_bound;
    if (covered < 0) {
        covered = 0;
        for (const auto& u : units) covered = std::max(covered, static_cast<long>((u.transpose() * u).trace()));
    }
    if (covered < required_unit_norm_bound(t, tp))
        throw parameter_error("automorphism_count: unit list does not cover the required norm bound");
    long count = 0;
    for (const auto& u : units)
        if (u.transpose() * t.gram2() * u == tp.gram2()) ++count;
    return count;
}

ThetaTail theta_tail(const GroupDescriptor& group, const HalfIntegralForm& t, const RealSymMatrix& y,
                     real_t tail_tol) {
    int n = group.degree();
    if (t.degree() != n || y.dim() != n) throw structural_error("theta_tail: dimension mismatch");
    if (!y.is_positive_definite()) throw domain_error("theta_tail: Y must be positive definite");
    if (!t.is_positive_definite()) throw domain_error("theta_tail: T must be positive definite");
    if (tail_tol <= 0) throw parameter_error("theta_tail: tail tolerance must be positive");

    // tr(T Y[U]) >= c * tr(U^t U) with c = lambda_min(T) lambda_min(Y).
    RealSymMatrix t_real(n);
    for (int i = 0; i < n; ++i)
        for (int j = i; j < n; ++j) t_real.set(i, j, to_double(t.gram2().at(i, j)) / (2.0 * t.omega()));
    real_t c = t_real.min_eigenvalue() * y.min_eigenvalue() * (1 - 1e-9);
    if (c <= 0) throw domain_error("theta_tail: positivity lost in floating bounds");

    // Crude shell count: #(U : tr(U^t U) = s) <= (2 sqrt(s) + 1)^{n^2}.
    auto shell_count = [&](long s) {
        real_t r = 2 * std::sqrt(static_cast<real_t>(s)) + 1;
        return std::pow(r, n * n);
    };
    auto tail_from = [&](long s0) {
        KahanSum acc;
        for (long s = s0 + 1; s <= s0 + 4096; ++s) {
            real_t term = shell_count(s) * std::exp(-2 * kPi * c * s);
            acc.add(term);
            if (term < 1e-300) break;
        }
        return acc.value();
    };

    long cutoff = n;
    while (tail_from(cutoff) >= tail_tol && cutoff < 100000) cutoff += std::max<long>(1, cutoff / 4);

    auto units = unit_group_elements(group, cutoff);
    KahanSum sum;
    for (const auto& u : units) {
        RealSymMatrix yu = y.conjugate_by(u);
        sum.add(std::exp(-2 * kPi * t_real.trace_pair(yu)));
    }
    ThetaTail out;
    out.value = sum.value();
    out.tail_bound = tail_from(cutoff);
    out.norm_cutoff = cutoff;
    out.terms = units.size();
    return out;
}

} // namespace sieglab
