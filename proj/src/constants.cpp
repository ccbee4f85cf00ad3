#include "constants.hpp"

#include <cmath>

namespace sieglab {

real_t log_gamma_n(int n, real_t s) {
    if (s - (n - 1) / 2.0 <= 0) throw domain_error("log_gamma_n: gamma argument at a pole or negative");
    real_t acc = n * (n - 1) / 4.0 * std::log(kPi);
    for (int j = 1; j <= n; ++j) acc += std::lgamma(s - (j - 1) / 2.0);
    return acc;
}

SpectralConstants spectral_constants(int n, int k) {
    if (n < 1) throw domain_error("spectral_constants: degree must be >= 1");
    // Smallest Gamma argument across a, b, c is k - n; keep it positive.
    if (2 * k <= 2 * n + 1) throw domain_error("spectral_constants: weight too small, gamma argument at a pole");

    SpectralConstants sc;
    sc.degree = n;
    sc.weight = k;

    real_t log2 = std::log(static_cast<real_t>(2));
    real_t logpi = std::log(kPi);

    // a_{n,k} = 2^{-n(n+3)/2} pi^{-n(n+1)/2} prod_v Gamma(k-(v-1)/2)/Gamma(k-(v+n)/2)
    real_t la = -n * (n + 3) / 2.0 * log2 - n * (n + 1) / 2.0 * logpi;
    for (int v = 1; v <= n; ++v)
        la += std::lgamma(k - (v - 1) / 2.0) - std::lgamma(k - (v + n) / 2.0);
    sc.log_a = la;

    // b_{n,k} = (2 sqrt(pi))^{-n(n-1)/2} (-2 pi i)^{-nk} prod_{v=0..n-1} Gamma(k-v/2)
    real_t lb = -n * (n - 1) / 2.0 * (log2 + logpi / 2) - static_cast<real_t>(n) * k * std::log(2 * kPi);
    for (int v = 0; v < n; ++v) lb += std::lgamma(k - v / 2.0);
    sc.log_abs_b = lb;
    switch ((static_cast<long>(n) * k) % 4) { // (-i)^{-nk} = i^{nk}
        case 0: sc.b_phase = {1, 0}; break;
        case 1: sc.b_phase = {0, 1}; break;
        case 2: sc.b_phase = {-1, 0}; break;
        case 3: sc.b_phase = {0, -1}; break;
    }

    // c_{n,k} = pi^{n(n-1)/4} (4 pi)^{n(n+1)/2 - nk} Gamma_n(k - (n+1)/2)
    sc.log_c = n * (n - 1) / 4.0 * logpi + (n * (n + 1) / 2.0 - static_cast<real_t>(n) * k) * std::log(4 * kPi) +
               log_gamma_n(n, k - (n + 1) / 2.0);
    return sc;
}

} // namespace sieglab
