#ifndef SIEGLAB_REDUCTION_HPP
#define SIEGLAB_REDUCTION_HPP

#include "intmat.hpp"
#include "realmat.hpp"

namespace sieglab {

struct ReductionResult {
    RealSymMatrix reduced; // U^t Y U
    IntMatrix transform;   // U, unimodular
};

// Minkowski reduction for n <= 3: ordered diagonal and 2|y_ij| <= y_ii for
// i < j, reached by size-reduction steps, neighbour swaps and (n = 3) short
// candidate insertions. Ties are broken towards the lexicographically
// smallest nonnegative representative; the first nonzero entry of every
// column of U is made positive.
ReductionResult minkowski_reduce(const RealSymMatrix& y);

// Degree-generic fallback: sorted diagonal plus size reduction only. This is
// a weak normal form, not a Minkowski reduction, and is what callers get for
// n > 3.
ReductionResult weak_reduce(const RealSymMatrix& y);

bool is_minkowski_reduced(const RealSymMatrix& y, real_t tol = 1e-12);

} // namespace sieglab

#endif
