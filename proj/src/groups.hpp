#ifndef SIEGLAB_GROUPS_HPP
#define SIEGLAB_GROUPS_HPP

#include <optional>
#include <string>
#include <vector>

#include "intmat.hpp"
#include "symplectic.hpp"

namespace sieglab {

enum class GroupFamily { Full, Gamma0, GammaUpper0, Gamma0Upper0, Gamma1, Principal };

std::string family_name(GroupFamily f);
GroupFamily family_from_name(const std::string& s);

// Congruence subgroup of Sp_n(Z): family + level, optionally conjugated.
// A descriptor with conjugator g denotes g^{-1} Gamma g.
class GroupDescriptor {
public:
    GroupDescriptor(int degree, GroupFamily family, long level);

    GroupDescriptor conjugated_by(const SymplecticElement& g) const;

    int degree() const { return degree_; }
    GroupFamily family() const { return family_; }
    long level() const { return level_; }
    bool has_conjugator() const { return conjugator_.has_value(); }
    const SymplecticElement& conjugator() const { return *conjugator_; }

    bool contains(const SymplecticElement& g) const;

    // True when the embedded unit group U_Gamma is all of GL_n(Z).
    bool units_are_full_gl() const;

    std::string describe() const;

private:
    bool base_contains(const SymplecticElement& g) const;

    int degree_;
    GroupFamily family_;
    long level_;
    std::optional<SymplecticElement> conjugator_;
};

struct CuspData {
    IntMatrix widths;  // n x n symmetric, positive entries n_ij
    long omega;        // lcm of the n_ij
    Int lattice_index; // prod_{i<=j} n_ij
};

// n_ij = least t >= 1 (a divisor of N) with n(t E_ij) in the group.
CuspData cusp_width_config(const GroupDescriptor& group);

// Basis of the translation lattice S_Gamma = {S symmetric : n(S) in Gamma},
// its index in Sym_n(Z), and the entrywise widths. Membership in the dual
// lattice is decided by exact trace pairing against the generators.
class DualLatticeDescriptor {
public:
    explicit DualLatticeDescriptor(const GroupDescriptor& group);
    static DualLatticeDescriptor full_lattice(int degree); // S = Sym_n(Z)

    int degree() const { return degree_; }
    const std::vector<IntMatrix>& generators() const { return generators_; }
    const Int& index() const { return index_; } // |Sym_n(Z) : S_Gamma|
    long omega() const { return omega_; }

    bool contains(const RatSymMatrix& t) const; // T in Lambda*_Gamma

private:
    DualLatticeDescriptor() = default;
    int degree_ = 0;
    std::vector<IntMatrix> generators_;
    Int index_ = 1;
    long omega_ = 1;
};

// All U in GL_n(Z) with tr(U^t U) <= norm_bound and m(U) in the group,
// ordered by (norm, lexicographic entries).
std::vector<IntMatrix> unit_group_elements(const GroupDescriptor& group, long norm_bound);

struct CosetClass {
    IntMatrix C, D;
    SymplecticElement rep;            // completion of (C, D) in Sp_n(Z)
    std::vector<IntMatrix> offsets;   // S mod S_Gamma with n(S) * rep in the group
};

// Classes of Gamma_{0,inf} \ Gamma whose pair fits in the height box, plus
// the parabolic class (0, 1_n) which is always reported. Degrees 1 and 2.
std::vector<CosetClass> enumerate_cosets(const GroupDescriptor& group, int height);

} // namespace sieglab

#endif
