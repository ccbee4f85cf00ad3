#ifndef SIEGLAB_SYMPLECTIC_HPP
#define SIEGLAB_SYMPLECTIC_HPP

#include <vector>

#include "intmat.hpp"
#include "realmat.hpp"

namespace sieglab {

// Element of Sp_n(Z) in block form (A B; C D); the defining relation
// g^t J g = J is checked exactly on construction.
class SymplecticElement {
public:
    SymplecticElement() : n_(0) {}
    SymplecticElement(IntMatrix a, IntMatrix b, IntMatrix c, IntMatrix d, bool check = true);

    static SymplecticElement from_matrix(const IntMatrix& m, bool check = true);
    static SymplecticElement identity(int n);
    // J_n = (0 -1; 1 0), the main involution.
    static SymplecticElement inversion(int n);
    // n(S) = (1 S; 0 1), S symmetric integral.
    static SymplecticElement translation(const IntMatrix& s);
    // m(U) = (U^t 0; 0 U^{-1}).
    static SymplecticElement unit(const IntMatrix& u);
    // w_j: the partial involution with c-block diag(1_j, 0_{n-j}).
    static SymplecticElement partial_inversion(int n, int j);

    int degree() const { return n_; }
    const IntMatrix& A() const { return a_; }
    const IntMatrix& B() const { return b_; }
    const IntMatrix& C() const { return c_; }
    const IntMatrix& D() const { return d_; }

    IntMatrix matrix() const;
    SymplecticElement operator*(const SymplecticElement& o) const;
    SymplecticElement inverse() const;
    bool operator==(const SymplecticElement& o) const;

private:
    int n_;
    IntMatrix a_, b_, c_, d_;
};

// Exact check of g^t (0 -1; 1 0) g = (0 -1; 1 0); throws on odd dimension.
bool is_symplectic(const IntMatrix& g);

// Z = X + iY in Siegel's upper half space; Y positive definite.
class SiegelPoint {
public:
    SiegelPoint(RealSymMatrix x, RealSymMatrix y);
    static SiegelPoint upper(int n, real_t y); // i * y * 1_n
    static SiegelPoint degree1(real_t x, real_t y);

    int degree() const { return x_.dim(); }
    const RealSymMatrix& X() const { return x_; }
    const RealSymMatrix& Y() const { return y_; }
    CMat Z() const { return CMat::from_parts(x_, y_); }

private:
    RealSymMatrix x_, y_;
};

// g<Z> = (AZ+B)(CZ+D)^{-1}.
SiegelPoint act(const SymplecticElement& g, const SiegelPoint& z);

// J(g, Z) = det(CZ + D).
cplx automorphy_factor(const SymplecticElement& g, const SiegelPoint& z);

// CD^t symmetric and (C D) completable to Sp_n(Z).
bool is_coprime_symmetric_pair(const IntMatrix& c, const IntMatrix& d);

// Completion of a coprime symmetric pair to a symplectic element with the
// given bottom block row; the top row is canonically size-reduced.
SymplecticElement complete_pair(const IntMatrix& c, const IntMatrix& d);

// Right coset representatives of Gamma_0^(2)(p) \ Sp_2(Z) via the three
// partial involutions w_j: exactly (p+1)(p^2+1) elements.
std::vector<SymplecticElement> gamma0p_cosets_sp2(long p);

} // namespace sieglab

#endif
