#ifndef SIEGLAB_BESSEL_HPP
#define SIEGLAB_BESSEL_HPP

#include "mp.hpp"

namespace sieglab {

// J_1 to absolute accuracy ~1e-13 on x >= 0: extended-precision power series
// below the crossover, Hankel asymptotics beyond.
real_t bessel_j1(real_t x);

real_t bessel_j0(real_t x);

// J_nu for integer nu >= 0: direct series when safe, otherwise Miller's
// backward recurrence normalised against the Neumann sum.
real_t bessel_jn(int nu, real_t x);

} // namespace sieglab

#endif
