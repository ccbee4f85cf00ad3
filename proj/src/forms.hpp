#ifndef SIEGLAB_FORMS_HPP
#define SIEGLAB_FORMS_HPP

#include <vector>

#include "groups.hpp"
#include "intmat.hpp"
#include "realmat.hpp"

namespace sieglab {

// Element of Lambda*_Gamma with denominator omega: stored exactly as the
// integer matrix G = 2 * omega * T (even diagonal, so omega*T is
// half-integral in the classical sense).
class HalfIntegralForm {
public:
    HalfIntegralForm() : n_(0), omega_(1) {}
    // gram2 = 2 * omega * T; diagonal entries must be even.
    HalfIntegralForm(IntMatrix gram2, long omega = 1);

    static HalfIntegralForm scalar(long t);                   // degree 1, T = (t)
    static HalfIntegralForm identity(int n);                  // T = 1_n
    static HalfIntegralForm from_rational(const RatSymMatrix& t);

    int degree() const { return n_; }
    long omega() const { return omega_; }
    const IntMatrix& gram2() const { return g2_; } // 2 * omega * T

    RatSymMatrix rational() const; // T itself
    Rat trace() const;
    Rat det() const;

    bool is_positive_definite() const;
    // Rational lower bound for the least eigenvalue: det(T) / tr(T)^{n-1}.
    Rat min_eigenvalue_lower_bound() const;

    real_t trace_pair(const RealSymMatrix& y) const; // tr(T Y)
    HalfIntegralForm conjugate_by(const IntMatrix& u) const; // U^t T U

    bool operator==(const HalfIntegralForm& o) const { return n_ == o.n_ && omega_ == o.omega_ && g2_ == o.g2_; }
    bool operator<(const HalfIntegralForm& o) const;

private:
    int n_;
    long omega_;
    IntMatrix g2_;
};

struct FormEnumeration {
    RealSymMatrix y;
    real_t bound;
    long omega;
    std::vector<HalfIntegralForm> forms; // complete, duplicate-free, T > 0, tr(TY) <= bound
};

// All T in Lambda_Gamma (positive definite members of the dual lattice) with
// tr(TY) <= bound; degrees 1..3. Diagonals are boxed by the trace constraint,
// off-diagonals by the Cauchy-Schwarz bound t_ij^2 <= t_ii t_jj, and the
// exact positivity filter runs last.
FormEnumeration enumerate_forms(const DualLatticeDescriptor& lattice, const RealSymMatrix& y, real_t bound);

// Unit norm needed so that every solution of U^t T U = T' satisfies
// tr(U^t U) <= bound (from tr(T') >= lambda_min(T) tr(U^t U)).
long required_unit_norm_bound(const HalfIntegralForm& t, const HalfIntegralForm& tp);

// #{U in units : U^t T U = T'}, exactly. The units list must cover the norm
// bound above; enumerated_bound < 0 means "largest norm present in the list".
long automorphism_count(const HalfIntegralForm& t, const HalfIntegralForm& tp,
                        const std::vector<IntMatrix>& units, long enumerated_bound = -1);

struct ThetaTail {
    real_t value;
    real_t tail_bound;
    long norm_cutoff;
    size_t terms;
};

// H_Gamma(T, Y) = sum over U in U_Gamma of exp(-2 pi tr(T Y[U])), truncated
// by norm shells once the crude shell bound drops below tail_tol.
ThetaTail theta_tail(const GroupDescriptor& group, const HalfIntegralForm& t, const RealSymMatrix& y,
                     real_t tail_tol);

} // namespace sieglab

#endif
