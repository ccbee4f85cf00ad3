#ifndef SIEGLAB_CONSTANTS_HPP
#define SIEGLAB_CONSTANTS_HPP

#include <complex>

#include "mp.hpp"

namespace sieglab {

// log Gamma_n(s) with Gamma_n(s) = pi^{n(n-1)/4} prod_{j=1..n} Gamma(s - (j-1)/2).
real_t log_gamma_n(int n, real_t s);

// The weight-k spectral constants, kept in log scale; b carries a fourth
// root of unity phase i^{nk}.
struct SpectralConstants {
    int degree = 0;
    int weight = 0;
    real_t log_a = 0;
    real_t log_abs_b = 0;
    std::complex<real_t> b_phase{1, 0};
    real_t log_c = 0;

    real_t a() const { return std::exp(log_a); }
    std::complex<real_t> b() const { return b_phase * std::exp(log_abs_b); }
    real_t c() const { return std::exp(log_c); }
};

SpectralConstants spectral_constants(int n, int k);

} // namespace sieglab

#endif
