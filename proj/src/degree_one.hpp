#ifndef SIEGLAB_DEGREE_ONE_HPP
#define SIEGLAB_DEGREE_ONE_HPP

#include <complex>
#include <cstdint>
#include <vector>

#include "groups.hpp"
#include "realmat.hpp"

namespace sieglab {

// One admissible bottom-row residue: d together with the top-left entry of a
// realising group element, both mod c*omega.
struct DSetEntry {
    long d;
    long dbar;
};

// Residues d in [0, c*omega) realised as bottom rows (c, d) of the group,
// found by completing the row and scanning unipotent left-translates.
std::vector<DSetEntry> d_set(const GroupDescriptor& group, long c);

// S_Gamma(m, n; c) = sum over D(c) of e((m dbar + n d)/(c omega)).
cplx kloosterman(const GroupDescriptor& group, long m, long n, long c);

struct Weight2Coeff {
    real_t value;
    real_t tail;
};

// Fourier coefficient p_m(n) of the weight-2 unit Poincare series:
// 2 delta(m,n) - (4 pi / omega) sqrt(n/m) sum_c S(m,n;c)/c J_1(4 pi sqrt(mn)/(c omega)).
Weight2Coeff weight2_coeff(const GroupDescriptor& group, long m, long n, long c_max, real_t tol = 1e-2);

struct GramMatrix {
    int size = 0;
    long omega = 1;
    std::vector<std::vector<real_t>> entries; // (2/omega^2) sqrt(m/n) p_m(n)
    std::vector<std::vector<real_t>> tails;
    SymEigen eigen;            // of the symmetrised matrix
    real_t asymmetry = 0;      // max |M_mn - M_nm|
};

GramMatrix petersson_gram(const GroupDescriptor& group, int size, long c_max);

struct LargeSieveResult {
    real_t max_ratio = 0;
    std::vector<real_t> ratios; // per trial
    std::uint64_t seed = 0;
};

// Quadratic-form ratio a^H M a / ((1/omega^2)(log K + K/(q omega))) over
// seeded random unit vectors.
LargeSieveResult large_sieve_check(const GroupDescriptor& group, int size, int trials, long c_max,
                                   std::uint64_t seed);
LargeSieveResult large_sieve_check(const GramMatrix& gram, long level, int trials, std::uint64_t seed);

// Classical absolutely convergent coefficient formula for even k >= 4 on
// width-one groups (full or Gamma_0):
// delta(m,n) + 2 pi (-1)^{k/2} (n/m)^{(k-1)/2} sum_c S(m,n;c)/c J_{k-1}(4 pi sqrt(mn)/c).
Weight2Coeff petersson_oracle(int k, long m, long n, const GroupDescriptor& group, long c_max);

} // namespace sieglab

#endif
