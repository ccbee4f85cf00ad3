#include "bessel.hpp"

#include <cmath>
#include <vector>

namespace sieglab {

namespace {

constexpr long double kPiL = 3.14159265358979323846264338327950288L;
constexpr double kSeriesCut = 16.0;

// Power series in 80-bit arithmetic; the alternating blow-up below the
// crossover stays within ~1e5, so the compensated mantissa keeps 1e-14.
long double j_series(int nu, long double x) {
    long double half = x / 2;
    long double term = 1;
    for (int i = 1; i <= nu; ++i) term *= half / i;
    long double sum = term;
    long double x2 = -half * half;
    for (int j = 1; j < 200; ++j) {
        term *= x2 / (static_cast<long double>(j) * (j + nu));
        sum += term;
        if (std::abs(term) < 1e-25L * (std::abs(sum) + 1e-30L) && j > 4) break;
    }
    return sum;
}

// Hankel expansion J_nu ~ sqrt(2/(pi x)) (P cos(chi) - Q sin(chi)),
// chi = x - (2 nu + 1) pi / 4; truncated at the smallest term.
long double j_asymptotic(int nu, long double x) {
    long double mu = 4.0L * nu * nu;
    long double p = 1, q = 0;
    long double term = 1;
    long double eightx = 8 * x;
    for (int k = 1; k < 60; ++k) {
        long double factor = (mu - (2.0L * k - 1) * (2.0L * k - 1)) / (k * eightx);
        long double next = term * factor;
        if (std::abs(next) > std::abs(term)) break; // divergence point reached
        term = next;
        if (k % 2 == 1)
            q += (k % 4 == 1) ? term : -term;
        else
            p += (k % 4 == 2) ? -term : term;
        if (std::abs(term) < 1e-22L) break;
    }
    long double chi = x - (2 * nu + 1) * kPiL / 4;
    return std::sqrt(2 / (kPiL * x)) * (p * std::cos(chi) - q * std::sin(chi));
}

} // namespace

real_t bessel_j1(real_t x) {
    if (x < 0) throw domain_error("bessel_j1: x must be >= 0");
    if (x < kSeriesCut) return static_cast<real_t>(j_series(1, x));
    return static_cast<real_t>(j_asymptotic(1, x));
}

real_t bessel_j0(real_t x) {
    if (x < 0) throw domain_error("bessel_j0: x must be >= 0");
    if (x < kSeriesCut) return static_cast<real_t>(j_series(0, x));
    return static_cast<real_t>(j_asymptotic(0, x));
}

real_t bessel_jn(int nu, real_t x) {
    if (nu < 0) throw domain_error("bessel_jn: nu must be >= 0");
    if (x < 0) throw domain_error("bessel_jn: x must be >= 0");
    if (nu == 0) return bessel_j0(x);
    if (nu == 1) return bessel_j1(x);
    if (x == 0) return 0;
    // Series is monotone-safe once (x/2)^2 < nu + 1; allow mild growth.
    if (x * x / 4 < nu + 1 || x < 12) return static_cast<real_t>(j_series(nu, x));

    // Miller's backward recurrence.
    int start = static_cast<int>(std::max<real_t>(nu, x)) + 52;
    if (start % 2 == 1) ++start;
    long double jp = 0, jc = 1e-30L;
    long double target = 0, norm = 0;
    for (int m = start; m >= 1; --m) {
        long double jm = (2.0L * m / x) * jc - jp;
        jp = jc;
        jc = jm;
        if (m - 1 == nu) target = jc;
        if ((m - 1) % 2 == 0) norm += (m - 1 == 0) ? jc : 2 * jc;
        if (std::abs(jc) > 1e250L) {
            jc *= 1e-250L;
            jp *= 1e-250L;
            target *= 1e-250L;
            norm *= 1e-250L;
        }
    }
    return static_cast<real_t>(target / norm);
}

} // namespace sieglab
