#ifndef SIEGLAB_KAHAN_HPP
#define SIEGLAB_KAHAN_HPP

#include <complex>

#include "mp.hpp"

namespace sieglab {

// Neumaier-compensated accumulator. All long numeric sums in the library go
// through one of these so that truncation, not roundoff, dominates the error
// budget.
class KahanSum {
public:
    void add(real_t x) {
        real_t t = sum_ + x;
        if (std::abs(sum_) >= std::abs(x))
            comp_ += (sum_ - t) + x;
        else
            comp_ += (x - t) + sum_;
        sum_ = t;
    }
    real_t value() const { return sum_ + comp_; }

private:
    real_t sum_ = 0, comp_ = 0;
};

class KahanCSum {
public:
    void add(std::complex<real_t> z) {
        re_.add(z.real());
        im_.add(z.imag());
    }
    std::complex<real_t> value() const { return {re_.value(), im_.value()}; }

private:
    KahanSum re_, im_;
};

} // namespace sieglab

#endif
