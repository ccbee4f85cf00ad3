#ifndef SIEGLAB_POINCARE_HPP
#define SIEGLAB_POINCARE_HPP

#include <complex>
#include <map>
#include <memory>
#include <string>
#include <vector>

#include "constants.hpp"
#include "forms.hpp"
#include "groups.hpp"
#include "symplectic.hpp"

namespace sieglab {

// All cutoffs governing numeric evaluations. Zero/negative entries mean
// "derive from degree and weight".
struct TruncationParams {
    int coset_height = 0;          // H: box bound for coset pairs
    real_t lattice_trace_bound = 0; // B: tr(TY) cutoff in Bergman sums
    int quadrature_grid = 0;       // M: grid points per X-dimension
    real_t tail_tol = 1e-12;
    long c_max = 2000;             // degree-one c-sum cutoff

    static TruncationParams defaults(int degree);
    TruncationParams doubled() const;
};

struct PoincareValue {
    cplx value;
    real_t tail; // a posteriori bound combining coset-shell trend and unit tails
};

struct FourierCoeff {
    real_t value;        // real part, main term plus quadrature of the c != 0 block
    real_t main_term;    // exact |Aut_Gamma(T';T)|-type contribution
    real_t imag_residual;
    real_t tail;         // amplified coset tail + alias + roundoff estimate
    real_t y0;
};

struct BergmanValue {
    real_t value;
    real_t log_value; // log of |value|, safe at large k
    real_t imag_residual;
    real_t tail;
    bool truncation_failure; // negative beyond the noise floor
};

struct LipschitzPair {
    cplx lhs, rhs;
    real_t lhs_tail, rhs_tail;
    real_t relative_gap() const;
};

struct LatticeSumCheck {
    real_t raw;    // |S|^{-1} |b|^{-1} sum_T det(T)^{k-(n+1)/2} exp(-2 pi tr TY)
    real_t scaled; // raw * det(Y)^k
    real_t ratio;  // scaled / k^{n(n+1)/4}
};

struct MajorantValue {
    real_t value;
    real_t tail_trend; // last-shell geometric extrapolation
    size_t classes;
};

struct SupSearchSpec {
    real_t y_min = 0, y_max = 0; // 0 = derive from k: [k/(8 pi), k/(2 pi)]
    int y_count = 14;
    int x_count = 3;   // samples of X across the period cube
    int refine_iters = 22;
};

struct SupSearchResult {
    real_t grid_value = 0, refined_value = 0;
    real_t log_refined = 0;
    real_t argmax_y = 0;
    int argmax_x_index = 0;
    bool boundary_warning = false;
};

struct GramRankResult {
    std::vector<std::vector<real_t>> matrix; // p_{T_j}(T_i) at (i, j)
    enum class Status { NonsingularDominant, NonsingularDeterminant, Indeterminate } status;
    bool nonsingular; // meaningful unless Indeterminate
};

// Evaluation engine for one congruence subgroup; caches coset tables and
// unit lists across calls. Degrees 1 and 2.
class PoincareEngine {
public:
    explicit PoincareEngine(GroupDescriptor group);
    ~PoincareEngine();
    PoincareEngine(const PoincareEngine&) = delete;
    PoincareEngine& operator=(const PoincareEngine&) = delete;

    const GroupDescriptor& group() const;
    const DualLatticeDescriptor& lattice() const;

    // P_{T,Gamma}(Z); requires k > 2n+1.
    PoincareValue eval(const HalfIntegralForm& t, int k, const SiegelPoint& z, const TruncationParams& trunc) const;

    // p_T(T') by exact unit matching plus quadrature over X mod S_Gamma.
    FourierCoeff fourier_coeff(const HalfIntegralForm& t, const HalfIntegralForm& tp, int k,
                               const TruncationParams& trunc) const;

    // Diagonal Bergman kernel det(Y)^k B(Z, Z); requires k >= 2n+2. With
    // paper_normalization an extra a_{n,k}/2 is applied.
    BergmanValue bergman(int k, const SiegelPoint& z, const TruncationParams& trunc,
                         bool paper_normalization = false) const;

    // Independent geometric route for the same kernel (degree 1 only).
    BergmanValue bergman_geometric(int k, const SiegelPoint& z, const TruncationParams& trunc) const;

    LatticeSumCheck lattice_sum_check(int k, const RealSymMatrix& y) const;

    MajorantValue majorant(real_t s, const SiegelPoint& z, int height) const;

    SupSearchResult sup_search(int k, const SupSearchSpec& spec, const TruncationParams& trunc) const;

    GramRankResult gram_rank(const std::vector<HalfIntegralForm>& forms, int k, const TruncationParams& trunc) const;

    // |J(g,Z)| >= 1 - tol over the enumerated classes.
    bool in_fundamental_domain_approx(const SiegelPoint& z, int height, real_t tol = 1e-9) const;

    struct Impl;

private:
    std::unique_ptr<Impl> impl_;
};

// Both sides of the Lipschitz identity for the group's translation lattice.
LipschitzPair lipschitz_pair(const DualLatticeDescriptor& lattice, int k, const SiegelPoint& z,
                             const TruncationParams& trunc);

} // namespace sieglab

#endif
