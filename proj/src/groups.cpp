#include "groups.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <map>
#include <numeric>

namespace sieglab {

namespace {

std::vector<std::pair<int, int>> sym_coords(int n) {
    std::vector<std::pair<int, int>> c;
    for (int i = 0; i < n; ++i) c.emplace_back(i, i);
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j) c.emplace_back(i, j);
    return c;
}

IntMatrix sym_from_coords(int n, const std::vector<Int>& v) {
    auto coords = sym_coords(n);
    IntMatrix s(n, n);
    for (size_t k = 0; k < coords.size(); ++k) {
        auto [i, j] = coords[k];
        s.at(i, j) = v[k];
        s.at(j, i) = v[k];
    }
    return s;
}

std::vector<Int> coords_of_sym(const IntMatrix& s) {
    auto coords = sym_coords(s.rows());
    std::vector<Int> v;
    v.reserve(coords.size());
    for (auto [i, j] : coords) v.push_back(s.at(i, j));
    return v;
}

bool congruent_zero(const IntMatrix& m, long n) {
    for (int i = 0; i < m.rows(); ++i)
        for (int j = 0; j < m.cols(); ++j)
            if (mod_floor(m.at(i, j), n) != 0) return false;
    return true;
}

bool congruent_identity(const IntMatrix& m, long n) {
    for (int i = 0; i < m.rows(); ++i)
        for (int j = 0; j < m.cols(); ++j)
            if (mod_floor(m.at(i, j) - (i == j ? 1 : 0), n) != 0) return false;
    return true;
}

std::vector<long> divisors_sorted(long n) {
    std::vector<long> d;
    for (long t = 1; t <= n; ++t)
        if (n % t == 0) d.push_back(t);
    return d;
}

} // namespace

std::string family_name(GroupFamily f) {
    switch (f) {
        case GroupFamily::Full: return "full";
        case GroupFamily::Gamma0: return "gamma0";
        case GroupFamily::GammaUpper0: return "gamma_upper0";
        case GroupFamily::Gamma0Upper0: return "gamma0_upper0";
        case GroupFamily::Gamma1: return "gamma1";
        case GroupFamily::Principal: return "principal";
    }
    return "?";
}

GroupFamily family_from_name(const std::string& s) {
    if (s == "full" || s == "sp") return GroupFamily::Full;
    if (s == "gamma0") return GroupFamily::Gamma0;
    if (s == "gamma_upper0" || s == "gamma^0") return GroupFamily::GammaUpper0;
    if (s == "gamma0_upper0" || s == "gamma0^0") return GroupFamily::Gamma0Upper0;
    if (s == "gamma1") return GroupFamily::Gamma1;
    if (s == "principal" || s == "gamma") return GroupFamily::Principal;
    throw parameter_error("unknown group family: " + s);
}

GroupDescriptor::GroupDescriptor(int degree, GroupFamily family, long level)
    : degree_(degree), family_(family), level_(level) {
    if (degree < 1) throw structural_error("GroupDescriptor: degree must be >= 1");
    if (level < 1) throw structural_error("GroupDescriptor: level must be >= 1");
    if (level == 1) family_ = GroupFamily::Full; // level one forces the full group
    if (family_ == GroupFamily::Full) level_ = 1;
}

GroupDescriptor GroupDescriptor::conjugated_by(const SymplecticElement& g) const {
    if (g.degree() != degree_) throw structural_error("conjugated_by: degree mismatch");
    GroupDescriptor r = *this;
    if (conjugator_)
        r.conjugator_ = *conjugator_ * g; // g^{-1}(h^{-1} Gamma h)g = (hg)^{-1} Gamma (hg)
    else
        r.conjugator_ = g;
    return r;
}

bool GroupDescriptor::base_contains(const SymplecticElement& g) const {
    long n = level_;
    switch (family_) {
        case GroupFamily::Full: return true;
        case GroupFamily::Gamma0: return congruent_zero(g.C(), n);
        case GroupFamily::GammaUpper0: return congruent_zero(g.B(), n);
        case GroupFamily::Gamma0Upper0: return congruent_zero(g.B(), n) && congruent_zero(g.C(), n);
        case GroupFamily::Gamma1: return congruent_zero(g.C(), n) && congruent_identity(g.A(), n);
        case GroupFamily::Principal:
            return congruent_zero(g.B(), n) && congruent_zero(g.C(), n) && congruent_identity(g.A(), n) &&
                   congruent_identity(g.D(), n);
    }
    return false;
}

bool GroupDescriptor::contains(const SymplecticElement& g) const {
    if (g.degree() != degree_) throw structural_error("contains: degree mismatch");
    if (!conjugator_) return base_contains(g);
    // Descriptor denotes h^{-1} Gamma h: test h g h^{-1} against the base family.
    return GroupDescriptor(degree_, family_, level_).base_contains(*conjugator_ * g * conjugator_->inverse());
}

bool GroupDescriptor::units_are_full_gl() const {
    if (conjugator_) return false;
    return family_ == GroupFamily::Full || family_ == GroupFamily::Gamma0 ||
           family_ == GroupFamily::GammaUpper0 || family_ == GroupFamily::Gamma0Upper0;
}

std::string GroupDescriptor::describe() const {
    std::string s = family_name(family_) + "(" + std::to_string(level_) + "), degree " + std::to_string(degree_);
    if (conjugator_) s += ", conjugated";
    return s;
}

CuspData cusp_width_config(const GroupDescriptor& group) {
    int n = group.degree();
    long lev = group.level();
    CuspData out;
    out.widths = IntMatrix(n, n);
    auto divs = divisors_sorted(lev);
    long omega = 1;
    Int index = 1;
    for (int i = 0; i < n; ++i)
        for (int j = i; j < n; ++j) {
            IntMatrix e(n, n);
            e.at(i, j) = 1;
            e.at(j, i) = 1;
            long width = lev;
            for (long t : divs) {
                IntMatrix s(n, n);
                for (int p = 0; p < n; ++p)
                    for (int q = 0; q < n; ++q) s.at(p, q) = e.at(p, q) * t;
                if (group.contains(SymplecticElement::translation(s))) { width = t; break; }
            }
            out.widths.at(i, j) = width;
            out.widths.at(j, i) = width;
            omega = std::lcm(omega, width);
            index *= width;
        }
    out.omega = omega;
    out.lattice_index = index;
    return out;
}

DualLatticeDescriptor::DualLatticeDescriptor(const GroupDescriptor& group) {
    degree_ = group.degree();
    int n = degree_;
    long lev = group.level();
    auto coords = sym_coords(n);
    int m = static_cast<int>(coords.size());

    std::vector<std::vector<Int>> found;
    bool closed_form = !group.has_conjugator();
    if (closed_form) {
        long scale = 1;
        switch (group.family()) {
            case GroupFamily::Full:
            case GroupFamily::Gamma0:
            case GroupFamily::Gamma1: scale = 1; break;
            case GroupFamily::GammaUpper0:
            case GroupFamily::Gamma0Upper0:
            case GroupFamily::Principal: scale = lev; break;
        }
        for (int k = 0; k < m; ++k) {
            std::vector<Int> v(m, 0);
            v[k] = scale;
            found.push_back(v);
        }
    } else {
        // Scan S mod N; the lattice contains N * Sym_n(Z).
        std::vector<Int> v(m, 0);
        std::vector<long> idx(m, 0);
        while (true) {
            for (int k = 0; k < m; ++k) v[k] = idx[k];
            IntMatrix s = sym_from_coords(n, v);
            if (group.contains(SymplecticElement::translation(s))) found.push_back(v);
            int k = 0;
            for (; k < m; ++k) {
                if (++idx[k] < lev) break;
                idx[k] = 0;
            }
            if (k == m) break;
        }
        for (int k = 0; k < m; ++k) {
            std::vector<Int> w(m, 0);
            w[k] = lev;
            found.push_back(w);
        }
    }

    IntMatrix rows(static_cast<int>(found.size()), m);
    for (size_t r = 0; r < found.size(); ++r)
        for (int k = 0; k < m; ++k) rows.at(static_cast<int>(r), k) = found[r][k];
    IntMatrix h = hnf_row(rows);

    index_ = 1;
    for (int r = 0; r < m; ++r) {
        std::vector<Int> v(m);
        bool zero = true;
        for (int k = 0; k < m; ++k) {
            v[k] = h.at(r, k);
            if (v[k] != 0) zero = false;
        }
        if (zero) throw structural_error("DualLatticeDescriptor: translation lattice has deficient rank");
        generators_.push_back(sym_from_coords(n, v));
        index_ *= h.at(r, r);
    }
    CuspData cd = cusp_width_config(group);
    omega_ = cd.omega;
}

DualLatticeDescriptor DualLatticeDescriptor::full_lattice(int degree) {
    return DualLatticeDescriptor(GroupDescriptor(degree, GroupFamily::Full, 1));
}

bool DualLatticeDescriptor::contains(const RatSymMatrix& t) const {
    if (t.dim() != degree_) throw structural_error("DualLatticeDescriptor::contains: dimension mismatch");
    for (const auto& s : generators_) {
        Rat tr = t.trace_pair(s);
        if (boost::multiprecision::denominator(tr) != 1) return false;
    }
    return true;
}

std::vector<IntMatrix> unit_group_elements(const GroupDescriptor& group, long norm_bound) {
    int n = group.degree();
    if (norm_bound < n) throw parameter_error("unit_group_elements: norm bound below the minimal unit norm");
    std::vector<IntMatrix> out;
    // Column-by-column backtracking with a norm budget; each remaining column
    // needs at least 1.
    std::vector<long> col(n, 0);
    IntMatrix u(n, n);
    long r = static_cast<long>(std::sqrt(static_cast<double>(norm_bound))) + 1;

    std::vector<std::vector<long>> col_candidates;
    {
        std::vector<long> v(n, -r);
        while (true) {
            long norm = 0;
            for (long x : v) norm += x * x;
            if (norm >= 1 && norm <= norm_bound) col_candidates.push_back(v);
            int k = 0;
            for (; k < n; ++k) {
                if (++v[k] <= r) break;
                v[k] = -r;
            }
            if (k == n) break;
        }
    }
    std::sort(col_candidates.begin(), col_candidates.end());

    std::vector<int> chosen(n, -1);
    std::vector<long> norms;
    norms.reserve(col_candidates.size());
    for (auto& v : col_candidates) {
        long s = 0;
        for (long x : v) s += x * x;
        norms.push_back(s);
    }

    std::function<void(int, long)> rec = [&](int j, long budget) {
        if (j == n) {
            Int det = u.det();
            if (det != 1 && det != -1) return;
            if (!group.contains(SymplecticElement::unit(u))) return;
            out.push_back(u);
            return;
        }
        for (size_t ci = 0; ci < col_candidates.size(); ++ci) {
            if (norms[ci] > budget - (n - 1 - j)) continue;
            for (int i = 0; i < n; ++i) u.at(i, j) = col_candidates[ci][i];
            rec(j + 1, budget - norms[ci]);
        }
        for (int i = 0; i < n; ++i) u.at(i, j) = 0;
    };
    rec(0, norm_bound);

    std::sort(out.begin(), out.end(), [](const IntMatrix& x, const IntMatrix& y) {
        Int nx = (x.transpose() * x).trace(), ny = (y.transpose() * y).trace();
        if (nx != ny) return nx < ny;
        for (int i = 0; i < x.rows(); ++i)
            for (int j = 0; j < x.cols(); ++j) {
                if (x.at(i, j) != y.at(i, j)) return x.at(i, j) < y.at(i, j);
            }
        return false;
    });
    return out;
}

namespace {

// Solve U * M = Mp exactly over Q for square U; returns U when it is integral.
std::optional<IntMatrix> left_factor(const IntMatrix& m, const IntMatrix& mp) {
    int n = m.rows(), w = m.cols();
    // Transposed system: M^t U^t = Mp^t, solved column by column via exact
    // Gaussian elimination on the augmented rational matrix.
    std::vector<std::vector<Rat>> aug(w, std::vector<Rat>(n + n));
    for (int i = 0; i < w; ++i) {
        for (int j = 0; j < n; ++j) aug[i][j] = Rat(m.at(j, i));
        for (int j = 0; j < n; ++j) aug[i][n + j] = Rat(mp.at(j, i));
    }
    int row = 0;
    std::vector<int> pivot_cols;
    for (int c = 0; c < n && row < w; ++c) {
        int piv = -1;
        for (int i = row; i < w; ++i)
            if (aug[i][c] != 0) { piv = i; break; }
        if (piv < 0) continue;
        std::swap(aug[row], aug[piv]);
        Rat pv = aug[row][c];
        for (int j = 0; j < 2 * n; ++j) aug[row][j] /= pv;
        for (int i = 0; i < w; ++i) {
            if (i == row) continue;
            Rat f = aug[i][c];
            if (f == 0) continue;
            for (int j = 0; j < 2 * n; ++j) aug[i][j] -= f * aug[row][j];
        }
        pivot_cols.push_back(c);
        ++row;
    }
    if (static_cast<int>(pivot_cols.size()) != n) return std::nullopt; // rank defect
    // Consistency: rows beyond the pivots must be zero on the RHS.
    for (int i = row; i < w; ++i)
        for (int j = n; j < 2 * n; ++j)
            if (aug[i][j] != 0) return std::nullopt;
    IntMatrix u(n, n);
    for (int r = 0; r < n; ++r) {
        int c = pivot_cols[r];
        for (int j = 0; j < n; ++j) {
            Rat v = aug[r][n + j];
            if (boost::multiprecision::denominator(v) != 1) return std::nullopt;
            u.at(j, c) = boost::multiprecision::numerator(v);
        }
    }
    return u;
}

IntMatrix join_pair(const IntMatrix& c, const IntMatrix& d) {
    int n = c.rows();
    IntMatrix m(n, 2 * n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            m.at(i, j) = c.at(i, j);
            m.at(i, j + n) = d.at(i, j);
        }
    return m;
}

} // namespace

std::vector<CosetClass> enumerate_cosets(const GroupDescriptor& group, int height) {
    int n = group.degree();
    if (n > 2) throw capability_error("enumerate_cosets: degrees 1 and 2 only");
    if (height < 0) throw parameter_error("enumerate_cosets: height must be >= 0");
    long lev = group.level();
    DualLatticeDescriptor lattice(group);
    auto coords = sym_coords(n);
    int m = static_cast<int>(coords.size());

    bool fast_dedupe = group.units_are_full_gl();
    std::map<std::string, size_t> seen;
    std::vector<CosetClass> classes;
    std::vector<IntMatrix> reps_joined;

    // Reduce the offset coordinates into the fundamental box of S_Gamma. The
    // generators are upper-triangular in HNF order, so reducing coordinates
    // in increasing order leaves earlier ones untouched.
    auto reduce_offset = [&](IntMatrix s) {
        auto v = coords_of_sym(s);
        const auto& gens = lattice.generators();
        for (int k = 0; k < m; ++k) {
            Int piv = coords_of_sym(gens[k])[k];
            Int q = (v[k] - mod_floor(v[k], piv)) / piv;
            if (q != 0) {
                auto g = coords_of_sym(gens[k]);
                for (int t = 0; t < m; ++t) v[t] -= q * g[t];
            }
        }
        return sym_from_coords(n, v);
    };

    auto try_add = [&](const IntMatrix& c, const IntMatrix& d) {
        if (!is_coprime_symmetric_pair(c, d)) return;
        if (fast_dedupe) {
            std::string key = hnf_row(join_pair(c, d)).to_string();
            auto it = seen.find(key);
            if (it != seen.end()) return;
            seen[key] = SIZE_MAX; // tombstone until the class is admitted
        } else {
            IntMatrix joined = join_pair(c, d);
            for (const auto& rj : reps_joined) {
                auto u = left_factor(rj, joined);
                if (!u) continue;
                Int det = u->det();
                if ((det == 1 || det == -1) && group.contains(SymplecticElement::unit(*u)))
                    return; // same class under the group's unit action
            }
        }
        SymplecticElement rep = complete_pair(c, d);
        // Offsets: S over a full residue system mod N in S-coordinates.
        std::vector<IntMatrix> offsets;
        std::vector<long> idx(m, 0);
        while (true) {
            std::vector<Int> v(m);
            for (int k = 0; k < m; ++k) v[k] = idx[k];
            IntMatrix s = sym_from_coords(n, v);
            if (group.contains(SymplecticElement::translation(s) * rep)) {
                IntMatrix red = reduce_offset(s);
                bool dup = false;
                for (const auto& o : offsets)
                    if (o == red) { dup = true; break; }
                if (!dup) offsets.push_back(red);
            }
            int k = 0;
            for (; k < m; ++k) {
                if (++idx[k] < lev) break;
                idx[k] = 0;
            }
            if (k == m) break;
        }
        if (offsets.empty()) return; // pair does not occur in the group
        if (fast_dedupe) seen[hnf_row(join_pair(c, d)).to_string()] = classes.size();
        reps_joined.push_back(join_pair(c, d));
        classes.push_back(CosetClass{c, d, rep, std::move(offsets)});
    };

    // The parabolic class first.
    try_add(IntMatrix::zero(n, n), IntMatrix::identity(n));

    long h = height;
    std::vector<long> e(static_cast<size_t>(2) * n * n, -h);
    if (h > 0) {
        while (true) {
            IntMatrix c(n, n), d(n, n);
            size_t k = 0;
            for (int i = 0; i < n; ++i)
                for (int j = 0; j < n; ++j) c.at(i, j) = e[k++];
            for (int i = 0; i < n; ++i)
                for (int j = 0; j < n; ++j) d.at(i, j) = e[k++];
            try_add(c, d);
            size_t t = 0;
            for (; t < e.size(); ++t) {
                if (++e[t] <= h) break;
                e[t] = -h;
            }
            if (t == e.size()) break;
        }
    }
    return classes;
}

} // namespace sieglab
