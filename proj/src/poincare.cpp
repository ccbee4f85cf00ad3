#include "poincare.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <mutex>

#include "kahan.hpp"
#include "parallel.hpp"
#include "reduction.hpp"

namespace sieglab {

namespace {

// ---- tiny complex 2x2 helpers (row-major arrays, n <= 2) ----

struct C2 {
    cplx a[4];
};

inline cplx det2(const C2& m, int n) {
    if (n == 1) return m.a[0];
    return m.a[0] * m.a[3] - m.a[1] * m.a[2];
}

inline C2 mul2(const C2& x, const C2& y, int n) {
    C2 r{};
    if (n == 1) {
        r.a[0] = x.a[0] * y.a[0];
        return r;
    }
    r.a[0] = x.a[0] * y.a[0] + x.a[1] * y.a[2];
    r.a[1] = x.a[0] * y.a[1] + x.a[1] * y.a[3];
    r.a[2] = x.a[2] * y.a[0] + x.a[3] * y.a[2];
    r.a[3] = x.a[2] * y.a[1] + x.a[3] * y.a[3];
    return r;
}

inline C2 inv2(const C2& m, int n, const cplx& det) {
    C2 r{};
    if (n == 1) {
        r.a[0] = cplx(1, 0) / det;
        return r;
    }
    r.a[0] = m.a[3] / det;
    r.a[1] = -m.a[1] / det;
    r.a[2] = -m.a[2] / det;
    r.a[3] = m.a[0] / det;
    return r;
}

inline cplx ipow(const cplx& z, int k) {
    // z^k for integer k via exp/log; exact for integer exponents.
    if (k == 0) return {1, 0};
    cplx l = std::log(z);
    return std::exp(static_cast<real_t>(k) * l);
}

inline real_t lambda_min_2x2(real_t a, real_t b, real_t d, int n) {
    // symmetric (a b; b d)
    if (n == 1) return a;
    real_t tr = a + d;
    real_t disc = std::sqrt(std::max<real_t>(0, (a - d) * (a - d) + 4 * b * b));
    return (tr - disc) / 2;
}

// e(w) = exp(2 pi i w) for complex w.
inline cplx e_of(const cplx& w) {
    real_t mag = std::exp(-kTwoPi * w.imag());
    real_t ph = kTwoPi * w.real();
    return {mag * std::cos(ph), mag * std::sin(ph)};
}

// ---- int64 pair filtering for the degree-2 coset box ----

inline long long gcd_ll(long long a, long long b) {
    if (a < 0) a = -a;
    if (b < 0) b = -b;
    while (b) {
        long long t = a % b;
        a = b;
        b = t;
    }
    return a;
}

// Row HNF of a 2x4 int64 matrix, canonical under left GL_2(Z).
inline std::array<long long, 8> hnf_2x4(std::array<long long, 8> m) {
    int pivot_row = 0;
    for (int col = 0; col < 4 && pivot_row < 2; ++col) {
        if (pivot_row == 0 && m[col] == 0 && m[4 + col] != 0)
            for (int j = 0; j < 4; ++j) std::swap(m[j], m[4 + j]);
        if (pivot_row == 0 && m[col] == 0) continue;
        if (pivot_row == 1 && m[4 + col] == 0) continue;
        if (pivot_row == 0) {
            // gcd step between the two rows in this column.
            while (m[4 + col] != 0) {
                long long q = m[col] / m[4 + col];
                for (int j = 0; j < 4; ++j) {
                    long long t = m[j] - q * m[4 + j];
                    m[j] = m[4 + j];
                    m[4 + j] = t;
                }
            }
            if (m[col] < 0)
                for (int j = 0; j < 4; ++j) m[j] = -m[j];
        } else {
            if (m[4 + col] < 0)
                for (int j = 4; j < 8; ++j) m[j] = -m[j];
            long long p = m[4 + col];
            long long r = m[col] % p;
            if (r < 0) r += p;
            long long q = (m[col] - r) / p;
            if (q != 0)
                for (int j = 0; j < 4; ++j) m[j] -= q * m[4 + j];
        }
        ++pivot_row;
    }
    return m;
}

} // namespace

TruncationParams TruncationParams::defaults(int degree) {
    TruncationParams t;
    t.coset_height = degree == 1 ? 48 : 2;
    t.quadrature_grid = degree == 1 ? 32 : 8;
    t.tail_tol = 1e-12;
    t.c_max = 2000;
    return t;
}

TruncationParams TruncationParams::doubled() const {
    TruncationParams t = *this;
    if (t.coset_height > 0) t.coset_height *= 2;
    if (t.lattice_trace_bound > 0) t.lattice_trace_bound *= 2;
    if (t.quadrature_grid > 0) t.quadrature_grid *= 2;
    t.c_max *= 2;
    t.tail_tol /= 16;
    return t;
}

real_t LipschitzPair::relative_gap() const {
    real_t denom = std::max(std::abs(lhs), std::abs(rhs));
    if (denom == 0) return 0;
    return std::abs(lhs - rhs) / denom;
}

// ---- engine internals ----

struct EvalClass {
    real_t a[4], b[4], c[4], d[4]; // gamma blocks, row-major n x n
    int shell = 0;                 // max |entry| of the bottom pair
    bool identity = false;
};

struct ClassTable {
    int height = 0;
    std::vector<EvalClass> classes; // identity class first
};

struct Freq {
    real_t f00, f11, f01x2;
    real_t trf;
    real_t sign; // det(U)^k
};

struct PerClassGeometry {
    cplx jk;      // J(gamma, Z)^{-k}
    real_t absjk;
    cplx w00, w01, w11; // gamma<Z>, symmetric
    real_t lam;   // lambda_min(Im gamma<Z>)
    int shell;
    bool identity;
};

struct PoincareEngine::Impl {
    GroupDescriptor group;
    DualLatticeDescriptor lattice;
    int n;
    long level;
    real_t s_index; // |Sym : S_Gamma|
    long omega;

    mutable std::mutex mu;
    mutable std::map<int, ClassTable> tables;
    mutable std::vector<IntMatrix> units;
    mutable long units_bound = -1;

    explicit Impl(GroupDescriptor g) : group(std::move(g)), lattice(group), n(group.degree()), level(group.level()) {
        if (n > 2) throw capability_error("PoincareEngine: degrees 1 and 2 only");
        s_index = to_double(lattice.index());
        omega = lattice.omega();
    }

    const ClassTable& table(int height) const;
    const std::vector<IntMatrix>& unit_list(long bound) const;

    std::vector<Freq> build_freqs(const HalfIntegralForm& t, int k, long bound) const;
    long freq_norm_bound(const HalfIntegralForm& t, real_t lam_floor, real_t abs_tol) const;

    std::vector<PerClassGeometry> geometry(int k, const SiegelPoint& z, const ClassTable& tab) const;

    // Sum over one class of the unit block; adds a crude bound for the
    // skipped part to `tail`.
    cplx class_sum(const PerClassGeometry& g, const std::vector<Freq>& freqs, real_t abs_tol, real_t& tail) const;

    PoincareValue eval_abs(const HalfIntegralForm& t, int k, const SiegelPoint& z, const TruncationParams& trunc,
                           real_t abs_tol, const std::vector<Freq>* freqs_opt,
                           const std::vector<PerClassGeometry>* geo_opt) const;

    RealSymMatrix grid_x(const std::vector<int>& idx, int m_per_dim) const;
};

const ClassTable& PoincareEngine::Impl::table(int height) const {
    std::lock_guard<std::mutex> lock(mu);
    auto it = tables.find(height);
    if (it != tables.end()) return it->second;

    ClassTable tab;
    tab.height = height;

    auto push_class = [&](const IntMatrix& cm, const IntMatrix& dm, int shell) {
        SymplecticElement g0 = complete_pair(cm, dm);
        // Find a translate n(S) g0 inside the group; offsets live mod N.
        int m = n * (n + 1) / 2;
        std::vector<long> idx(m, 0);
        bool found = false;
        SymplecticElement gamma = g0;
        while (true) {
            IntMatrix s(n, n);
            int k = 0;
            for (int i = 0; i < n; ++i) s.at(i, i) = idx[k++];
            for (int i = 0; i < n; ++i)
                for (int j = i + 1; j < n; ++j) {
                    s.at(i, j) = idx[k];
                    s.at(j, i) = idx[k];
                    ++k;
                }
            SymplecticElement cand = SymplecticElement::translation(s) * g0;
            if (group.contains(cand)) {
                gamma = cand;
                found = true;
                break;
            }
            int t = 0;
            for (; t < m; ++t) {
                if (++idx[t] < level) break;
                idx[t] = 0;
            }
            if (t == m) break;
        }
        if (!found) return false;
        EvalClass ec{};
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) {
                ec.a[i * n + j] = to_double(gamma.A().at(i, j));
                ec.b[i * n + j] = to_double(gamma.B().at(i, j));
                ec.c[i * n + j] = to_double(gamma.C().at(i, j));
                ec.d[i * n + j] = to_double(gamma.D().at(i, j));
            }
        ec.shell = shell;
        ec.identity = (shell == 0);
        tab.classes.push_back(ec);
        return true;
    };

    // Identity class.
    push_class(IntMatrix::zero(n, n), IntMatrix::identity(n), 0);

    bool gl_units = group.units_are_full_gl();
    if (n == 1) {
        bool minus_one = group.contains(SymplecticElement::unit(-IntMatrix::identity(1)));
        for (int c = 1; c <= height; ++c)
            for (int d = -height; d <= height; ++d) {
                if (gcd_ll(c, d) != 1) continue;
                IntMatrix cm(1, 1), dm(1, 1);
                cm.at(0, 0) = c;
                dm.at(0, 0) = d;
                int shell = std::max(c, std::abs(d));
                push_class(cm, dm, shell);
                if (!minus_one) {
                    // -(c, d) is then a distinct coset.
                    cm.at(0, 0) = -c;
                    dm.at(0, 0) = -d;
                    push_class(cm, dm, shell);
                }
            }
    } else {
        if (!gl_units)
            throw capability_error("PoincareEngine: degree-2 evaluation needs the full unit group (use full or Gamma_0/Gamma^0 families)");
        std::map<std::array<long long, 8>, bool> seen;
        long h = height;
        std::array<long long, 8> e{};
        e.fill(-h);
        if (h > 0)
            while (true) {
                const long long* c = e.data();
                const long long* d = e.data() + 4;
                bool czero = (c[0] == 0 && c[1] == 0 && c[2] == 0 && c[3] == 0);
                if (!czero) {
                    // CD^t symmetric.
                    if (c[0] * d[2] + c[1] * d[3] == c[2] * d[0] + c[3] * d[1]) {
                        // gcd of the six 2x2 minors of (C D).
                        long long g = 0;
                        const long long cols[4][2] = {{c[0], c[2]}, {c[1], c[3]}, {d[0], d[2]}, {d[1], d[3]}};
                        for (int p = 0; p < 4 && g != 1; ++p)
                            for (int q = p + 1; q < 4; ++q) {
                                long long minor = cols[p][0] * cols[q][1] - cols[p][1] * cols[q][0];
                                g = gcd_ll(g, minor);
                                if (g == 1) break;
                            }
                        if (g == 1) {
                            auto key = hnf_2x4(e);
                            if (!seen.count(key)) {
                                IntMatrix cm(2, 2), dm(2, 2);
                                cm.at(0, 0) = c[0];
                                cm.at(0, 1) = c[1];
                                cm.at(1, 0) = c[2];
                                cm.at(1, 1) = c[3];
                                dm.at(0, 0) = d[0];
                                dm.at(0, 1) = d[1];
                                dm.at(1, 0) = d[2];
                                dm.at(1, 1) = d[3];
                                long long shell = 0;
                                for (long long v : e) shell = std::max(shell, std::abs(v));
                                seen[key] = push_class(cm, dm, static_cast<int>(shell));
                            }
                        }
                    }
                }
                int t = 0;
                for (; t < 8; ++t) {
                    if (++e[t] <= h) break;
                    e[t] = -h;
                }
                if (t == 8) break;
            }
    }
    auto [pos, ok] = tables.emplace(height, std::move(tab));
    (void)ok;
    return pos->second;
}

const std::vector<IntMatrix>& PoincareEngine::Impl::unit_list(long bound) const {
    std::lock_guard<std::mutex> lock(mu);
    if (bound > units_bound) {
        units = unit_group_elements(group, bound);
        units_bound = bound;
    }
    return units;
}

long PoincareEngine::Impl::freq_norm_bound(const HalfIntegralForm& t, real_t lam_floor, real_t abs_tol) const {
    real_t lam_t = std::max<real_t>(1e-9, to_double(t.min_eigenvalue_lower_bound()));
    real_t target = std::max<real_t>(1e-300, abs_tol * 1e-3);
    real_t s = std::log(1 / target) / (kTwoPi * lam_t * std::max<real_t>(lam_floor, 1e-6));
    long bound = static_cast<long>(s) + n + 2;
    return std::min<long>(std::max<long>(bound, n + 2), 2048);
}

std::vector<Freq> PoincareEngine::Impl::build_freqs(const HalfIntegralForm& t, int k, long bound) const {
    const auto& us = unit_list(bound);
    real_t t00 = 0, t01 = 0, t11 = 0;
    t00 = to_double(t.gram2().at(0, 0)) / (2.0 * t.omega());
    if (n == 2) {
        t01 = to_double(t.gram2().at(0, 1)) / (2.0 * t.omega());
        t11 = to_double(t.gram2().at(1, 1)) / (2.0 * t.omega());
    }
    std::vector<Freq> freqs;
    freqs.reserve(us.size());
    for (const auto& u : us) {
        long norm = static_cast<long>((u.transpose() * u).trace());
        if (norm > bound) continue;
        Freq f{};
        if (n == 1) {
            real_t uu = to_double(u.at(0, 0));
            f.f00 = t00 * uu * uu;
            f.trf = f.f00;
        } else {
            real_t u00 = to_double(u.at(0, 0)), u01 = to_double(u.at(0, 1));
            real_t u10 = to_double(u.at(1, 0)), u11 = to_double(u.at(1, 1));
            // F = U T U^t
            real_t r0 = u00 * t00 + u01 * t01, r1 = u00 * t01 + u01 * t11;
            real_t s0 = u10 * t00 + u11 * t01, s1 = u10 * t01 + u11 * t11;
            f.f00 = r0 * u00 + r1 * u01;
            f.f01x2 = 2 * (r0 * u10 + r1 * u11);
            f.f11 = s0 * u10 + s1 * u11;
            f.trf = f.f00 + f.f11;
        }
        bool neg = u.det() < 0;
        f.sign = (neg && (k % 2)) ? -1.0 : 1.0;
        freqs.push_back(f);
    }
    std::sort(freqs.begin(), freqs.end(), [](const Freq& x, const Freq& y) {
        if (x.trf != y.trf) return x.trf < y.trf;
        if (x.f00 != y.f00) return x.f00 < y.f00;
        return x.f01x2 < y.f01x2;
    });
    return freqs;
}

std::vector<PerClassGeometry> PoincareEngine::Impl::geometry(int k, const SiegelPoint& z, const ClassTable& tab) const {
    std::vector<PerClassGeometry> out(tab.classes.size());
    C2 zc{};
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) zc.a[i * n + j] = cplx(z.X().at(i, j), z.Y().at(i, j));
    for (size_t ci = 0; ci < tab.classes.size(); ++ci) {
        const EvalClass& ec = tab.classes[ci];
        C2 den{}, num{};
        for (int i = 0; i < n * n; ++i) {
            den.a[i] = 0;
            num.a[i] = 0;
        }
        // den = C Z + D, num = A Z + B
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) {
                cplx sden(ec.d[i * n + j], 0), snum(ec.b[i * n + j], 0);
                for (int p = 0; p < n; ++p) {
                    sden += ec.c[i * n + p] * zc.a[p * n + j];
                    snum += ec.a[i * n + p] * zc.a[p * n + j];
                }
                den.a[i * n + j] = sden;
                num.a[i * n + j] = snum;
            }
        cplx det = det2(den, n);
        PerClassGeometry g{};
        g.jk = ipow(det, -k);
        g.absjk = std::abs(g.jk);
        C2 w = mul2(num, inv2(den, n, det), n);
        g.w00 = w.a[0];
        if (n == 2) {
            g.w01 = (w.a[1] + w.a[2]) / static_cast<real_t>(2);
            g.w11 = w.a[3];
            g.lam = lambda_min_2x2(g.w00.imag(), g.w01.imag(), g.w11.imag(), 2);
        } else {
            g.lam = g.w00.imag();
        }
        g.shell = ec.shell;
        g.identity = ec.identity;
        out[ci] = g;
    }
    return out;
}

cplx PoincareEngine::Impl::class_sum(const PerClassGeometry& g, const std::vector<Freq>& freqs, real_t abs_tol,
                                     real_t& tail) const {
    KahanCSum acc;
    real_t lam = std::max<real_t>(g.lam, 1e-12);
    size_t i = 0;
    for (; i < freqs.size(); ++i) {
        const Freq& f = freqs[i];
        real_t envelope = g.absjk * std::exp(-kTwoPi * lam * f.trf);
        if (envelope < abs_tol * 1e-2 && i > 0) break;
        cplx w = f.f00 * g.w00 + f.f11 * g.w11 + f.f01x2 * g.w01;
        acc.add(f.sign * e_of(w));
    }
    if (i < freqs.size()) {
        tail += 10 * g.absjk * std::exp(-kTwoPi * lam * freqs[i].trf);
    } else if (!freqs.empty()) {
        // Ran off the enumerated unit list; bound the rest by the last shell.
        tail += 10 * g.absjk * std::exp(-kTwoPi * lam * freqs.back().trf);
    }
    return g.jk * acc.value();
}

PoincareValue PoincareEngine::Impl::eval_abs(const HalfIntegralForm& t, int k, const SiegelPoint& z,
                                             const TruncationParams& trunc, real_t abs_tol,
                                             const std::vector<Freq>* freqs_opt,
                                             const std::vector<PerClassGeometry>* geo_opt) const {
    int height = trunc.coset_height > 0 ? trunc.coset_height : TruncationParams::defaults(n).coset_height;
    const ClassTable& tab = table(height);
    std::vector<PerClassGeometry> geo_local;
    const std::vector<PerClassGeometry>* geo = geo_opt;
    if (!geo) {
        geo_local = geometry(k, z, tab);
        geo = &geo_local;
    }
    std::vector<Freq> freqs_local;
    const std::vector<Freq>* freqs = freqs_opt;
    if (!freqs) {
        real_t lam_floor = 1e9;
        for (const auto& g : *geo) lam_floor = std::min(lam_floor, std::max<real_t>(g.lam, 1e-9));
        freqs_local = build_freqs(t, k, freq_norm_bound(t, lam_floor, abs_tol));
        freqs = &freqs_local;
    }

    KahanCSum acc;
    real_t tail = 0;
    std::map<int, real_t> shell_abs;
    for (const auto& g : *geo) {
        real_t class_tail = 0;
        cplx v = class_sum(g, *freqs, abs_tol, class_tail);
        tail += class_tail;
        acc.add(static_cast<real_t>(0.5) * v);
        shell_abs[g.shell] += std::abs(v) / 2;
    }
    // Geometric extrapolation of the coset shells beyond the box.
    if (shell_abs.size() >= 3) {
        auto it = shell_abs.rbegin();
        real_t last = it->second;
        ++it;
        real_t prev = it->second;
        if (prev > 0 && last > 0) {
            real_t r = std::min<real_t>(last / prev, 0.9);
            tail += last * r / (1 - r);
        } else {
            tail += last;
        }
    }
    return {acc.value(), tail};
}

RealSymMatrix PoincareEngine::Impl::grid_x(const std::vector<int>& idx, int m_per_dim) const {
    RealSymMatrix x(n);
    const auto& gens = lattice.generators();
    for (size_t g = 0; g < gens.size(); ++g) {
        real_t frac = static_cast<real_t>(idx[g]) / m_per_dim;
        for (int i = 0; i < n; ++i)
            for (int j = i; j < n; ++j) x.set(i, j, x.at(i, j) + frac * to_double(gens[g].at(i, j)));
    }
    return x;
}

// ---- public surface ----

PoincareEngine::PoincareEngine(GroupDescriptor group) : impl_(std::make_unique<Impl>(std::move(group))) {}
PoincareEngine::~PoincareEngine() = default;

const GroupDescriptor& PoincareEngine::group() const { return impl_->group; }
const DualLatticeDescriptor& PoincareEngine::lattice() const { return impl_->lattice; }

PoincareValue PoincareEngine::eval(const HalfIntegralForm& t, int k, const SiegelPoint& z,
                                   const TruncationParams& trunc) const {
    int n = impl_->n;
    if (t.degree() != n || z.degree() != n) throw structural_error("poincare eval: dimension mismatch");
    if (k <= 2 * n + 1) throw convergence_error("poincare eval: weight must exceed 2n+1 for absolute convergence");
    if (!t.is_positive_definite()) throw domain_error("poincare eval: T must be positive definite");
    if (!impl_->lattice.contains(t.rational()))
        throw domain_error("poincare eval: T is not in the dual lattice of the group");
    return impl_->eval_abs(t, k, z, trunc, trunc.tail_tol, nullptr, nullptr);
}

FourierCoeff PoincareEngine::fourier_coeff(const HalfIntegralForm& t, const HalfIntegralForm& tp, int k,
                                           const TruncationParams& trunc) const {
    int n = impl_->n;
    if (t.degree() != n || tp.degree() != n) throw structural_error("fourier_coeff: dimension mismatch");
    if (k <= 2 * n + 1) throw convergence_error("fourier_coeff: weight must exceed 2n+1");

    // Exact unit-matching block.
    long need = required_unit_norm_bound(t, tp);
    auto units = unit_group_elements(impl_->group, need);
    real_t main = 0;
    for (const auto& u : units) {
        if (u.transpose() * t.gram2() * u == tp.gram2() && t.omega() == tp.omega()) {
            bool neg = u.det() < 0;
            main += (neg && (k % 2)) ? -0.5 : 0.5;
        }
    }

    // Quadrature of the c != 0 block on a grid over X mod S_Gamma.
    real_t trp = to_double(tp.trace());
    real_t scale = static_cast<real_t>(impl_->omega);
    real_t y1 = std::min<real_t>(1.6, std::max<real_t>(1.02, 27.0 / (kTwoPi * std::max<real_t>(trp * scale, 0.25))));
    real_t y0 = scale * y1;

    int m_per_dim = trunc.quadrature_grid > 0 ? trunc.quadrature_grid : TruncationParams::defaults(n).quadrature_grid;
    int dims = n * (n + 1) / 2;
    long points = 1;
    for (int i = 0; i < dims; ++i) points *= m_per_dim;

    int height = trunc.coset_height > 0 ? trunc.coset_height : TruncationParams::defaults(n).coset_height;
    const ClassTable& tab = impl_->table(height);

    real_t amp = std::exp(kTwoPi * y0 * trp);
    real_t abs_tol = trunc.tail_tol / std::max<real_t>(amp, 1);

    // Conservative unit cap from a sample of the geometry.
    RealSymMatrix y0m = RealSymMatrix::scaled_identity(n, y0);
    SiegelPoint z_sample(RealSymMatrix(n), y0m);
    auto geo_sample = impl_->geometry(k, z_sample, tab);
    real_t lam_floor = 1e9;
    for (const auto& g : geo_sample) lam_floor = std::min(lam_floor, std::max<real_t>(g.lam, 1e-9));
    auto freqs = impl_->build_freqs(t, k, impl_->freq_norm_bound(t, lam_floor * 0.5, abs_tol));

    std::vector<cplx> slot(static_cast<size_t>(points));
    std::vector<real_t> slot_tail(static_cast<size_t>(points), 0);
    parallel_for(static_cast<size_t>(points), [&](size_t pi) {
        std::vector<int> idx(dims);
        long rem = static_cast<long>(pi);
        for (int d = 0; d < dims; ++d) {
            idx[d] = static_cast<int>(rem % m_per_dim);
            rem /= m_per_dim;
        }
        RealSymMatrix x = impl_->grid_x(idx, m_per_dim);
        SiegelPoint z(x, y0m);
        auto geo = impl_->geometry(k, z, tab);
        KahanCSum acc;
        real_t tail = 0;
        for (const auto& g : geo) {
            if (g.identity) continue; // exact block handles the theta part
            cplx v = impl_->class_sum(g, freqs, abs_tol, tail);
            acc.add(static_cast<real_t>(0.5) * v);
        }
        // e(-tr(T' X))
        real_t phase = -kTwoPi * tp.trace_pair(x);
        cplx rot(std::cos(phase), std::sin(phase));
        slot[pi] = acc.value() * rot;
        slot_tail[pi] = tail;
    });
    KahanCSum mean;
    real_t tail_max = 0;
    for (long i = 0; i < points; ++i) {
        mean.add(slot[i]);
        tail_max = std::max(tail_max, slot_tail[i]);
    }
    cplx quad = mean.value() / static_cast<real_t>(points);

    // Shell trend of the coset box for the amplified tail estimate.
    real_t coset_tail = 0;
    {
        auto geo = geo_sample;
        std::map<int, real_t> shell_abs;
        for (const auto& g : geo)
            if (!g.identity) shell_abs[g.shell] += g.absjk;
        if (!shell_abs.empty()) {
            real_t last = shell_abs.rbegin()->second;
            real_t r = 0.5;
            if (shell_abs.size() >= 2) {
                auto it = shell_abs.rbegin();
                real_t l2 = (++it)->second;
                if (l2 > 0) r = std::min<real_t>(last / l2, 0.9);
            }
            coset_tail = last * r / (1 - r);
        }
    }

    cplx rest = amp * quad;
    FourierCoeff out;
    out.main_term = main;
    out.value = main + rest.real();
    out.imag_residual = std::abs(rest.imag());
    out.y0 = y0;
    real_t roundoff = amp * 1e-15 * std::sqrt(static_cast<real_t>(points));
    real_t alias = amp * std::exp(-kTwoPi * y0 * std::max<real_t>(m_per_dim - trp * scale, 1));
    out.tail = amp * (tail_max + coset_tail) + roundoff + alias;
    if (out.imag_residual > std::max<real_t>(1e-6, 10 * out.tail))
        throw parameter_error("fourier_coeff: imaginary residual above tolerance; raise the grid size");
    return out;
}

BergmanValue PoincareEngine::bergman(int k, const SiegelPoint& z, const TruncationParams& trunc,
                                     bool paper_normalization) const {
    int n = impl_->n;
    if (z.degree() != n) throw structural_error("bergman: dimension mismatch");
    if (k < 2 * n + 2) throw domain_error("bergman: weight must be at least 2n+2");

    const RealSymMatrix& y = z.Y();
    real_t ktilde = k - (n + 1) / 2.0;
    real_t bound = trunc.lattice_trace_bound > 0 ? trunc.lattice_trace_bound : n * ktilde / kTwoPi + 12;
    FormEnumeration forms = enumerate_forms(impl_->lattice, y, bound);
    if (forms.forms.empty()) {
        return {0, -std::numeric_limits<real_t>::infinity(), 0, 0, false};
    }

    // Log-scale envelope per form.
    std::vector<real_t> lw(forms.forms.size());
    real_t l0 = -std::numeric_limits<real_t>::infinity();
    for (size_t i = 0; i < forms.forms.size(); ++i) {
        const auto& t = forms.forms[i];
        lw[i] = ktilde * std::log(to_double(t.det())) - kTwoPi * t.trace_pair(y);
        l0 = std::max(l0, lw[i]);
    }

    int height = trunc.coset_height > 0 ? trunc.coset_height : TruncationParams::defaults(n).coset_height;
    const ClassTable& tab = impl_->table(height);
    auto geo = impl_->geometry(k, z, tab);
    real_t lam_floor = 1e9;
    for (const auto& g : geo) lam_floor = std::min(lam_floor, std::max<real_t>(g.lam, 1e-9));

    // Pre-extend the unit list once so the parallel section is read-only.
    {
        long worst = impl_->n + 2;
        for (size_t i = 0; i < forms.forms.size(); ++i) {
            real_t abs_tol = trunc.tail_tol * std::exp(l0 - lw[i]);
            worst = std::max(worst, impl_->freq_norm_bound(forms.forms[i], lam_floor, abs_tol));
        }
        impl_->unit_list(worst);
    }

    std::vector<cplx> slot(forms.forms.size());
    std::vector<real_t> slot_tail(forms.forms.size(), 0);
    parallel_for(forms.forms.size(), [&](size_t i) {
        const auto& t = forms.forms[i];
        real_t abs_tol = trunc.tail_tol * std::min<real_t>(std::exp(l0 - lw[i]), 1e30);
        auto freqs = impl_->build_freqs(t, k, impl_->freq_norm_bound(t, lam_floor, abs_tol));
        KahanCSum acc;
        real_t tail = 0;
        for (const auto& g : geo) {
            cplx v = impl_->class_sum(g, freqs, abs_tol, tail);
            acc.add(static_cast<real_t>(0.5) * v);
        }
        // e(-tr(T Zbar)) with the decay folded into lw: remaining phase e(-tr(T X)).
        real_t phase = -kTwoPi * t.trace_pair(z.X());
        cplx rot(std::cos(phase), std::sin(phase));
        real_t w = std::exp(lw[i] - l0);
        slot[i] = w * acc.value() * rot;
        slot_tail[i] = w * tail;
    });

    KahanCSum acc;
    KahanSum tail_acc;
    for (size_t i = 0; i < forms.forms.size(); ++i) {
        acc.add(slot[i]);
        tail_acc.add(slot_tail[i]);
    }
    // Boundary-shell estimate of the discarded T-tail.
    real_t t_tail = 0;
    {
        real_t edge = 0;
        for (size_t i = 0; i < forms.forms.size(); ++i)
            if (forms.forms[i].trace_pair(y) > bound - 1.0) edge += std::exp(lw[i] - l0);
        t_tail = 2 * edge; // the envelope decays at least geometrically past the cut
    }

    SpectralConstants sc = spectral_constants(n, k);
    real_t lscale = k * std::log(y.det()) - sc.log_c - std::log(impl_->s_index) + l0;
    if (paper_normalization) lscale += sc.log_a - std::log(static_cast<real_t>(2));

    cplx total = acc.value();
    BergmanValue out;
    out.value = std::exp(lscale) * total.real();
    out.imag_residual = std::exp(lscale) * std::abs(total.imag());
    out.tail = std::exp(lscale) * (tail_acc.value() + t_tail);
    real_t mag = std::abs(total);
    out.log_value = mag > 0 ? lscale + std::log(mag) : -std::numeric_limits<real_t>::infinity();
    out.truncation_failure = out.value < -(out.tail + 1e-13 * std::exp(lscale));
    return out;
}

BergmanValue PoincareEngine::bergman_geometric(int k, const SiegelPoint& z, const TruncationParams& trunc) const {
    int n = impl_->n;
    if (n != 1) throw capability_error("bergman_geometric: implemented for degree 1");
    if (k < 2 * n + 2) throw domain_error("bergman_geometric: weight must be at least 2n+2");
    int height = trunc.coset_height > 0 ? trunc.coset_height : TruncationParams::defaults(n).coset_height;
    const ClassTable& tab = impl_->table(height);
    auto geo = impl_->geometry(k, z, tab);
    const auto& units = impl_->unit_list(64);

    // sum over classes and units of J^{-k} det(U)^k * S-box sum of
    // det(U^t W U - Zbar + S)^{-k}, S in S_Gamma.
    cplx zbar(z.X().at(0, 0), -z.Y().at(0, 0));
    real_t step = to_double(impl_->lattice.generators()[0].at(0, 0));
    KahanCSum acc;
    for (const auto& g : geo) {
        for (const auto& u : units) {
            real_t uu = to_double(u.at(0, 0));
            if (std::abs(uu) > 8) continue;
            real_t sign = (uu < 0 && (k % 2)) ? -1.0 : 1.0;
            cplx w = g.w00 * uu * uu - zbar;
            KahanCSum box;
            long l = 4000;
            for (long m = -l; m <= l; ++m) box.add(ipow(w + m * step, -k));
            acc.add(static_cast<real_t>(0.5) * sign * g.jk * box.value());
        }
    }
    SpectralConstants sc = spectral_constants(n, k);
    // det(Y)^k (b/c) * sum; b is complex, the result should be real.
    cplx b = sc.b_phase * std::exp(sc.log_abs_b - sc.log_c);
    cplx total = std::pow(z.Y().at(0, 0), k) * b * acc.value();
    BergmanValue out;
    out.value = total.real();
    out.imag_residual = std::abs(total.imag());
    out.log_value = std::log(std::abs(total));
    out.tail = 0;
    out.truncation_failure = false;
    return out;
}

LatticeSumCheck PoincareEngine::lattice_sum_check(int k, const RealSymMatrix& y) const {
    int n = impl_->n;
    if (!is_minkowski_reduced(y)) throw domain_error("lattice_sum_check: Y must be Minkowski reduced");
    real_t cn = std::pow(std::sqrt(3.0) / 2, n) * 0.99;
    if (y.det() < cn) throw domain_error("lattice_sum_check: det(Y) below the fundamental-domain floor");
    real_t ktilde = k - (n + 1) / 2.0;
    real_t bound = 2.2 * n * ktilde / kTwoPi + 16;
    FormEnumeration forms = enumerate_forms(impl_->lattice, y, bound);
    real_t l0 = -std::numeric_limits<real_t>::infinity();
    std::vector<real_t> lw(forms.forms.size());
    for (size_t i = 0; i < forms.forms.size(); ++i) {
        lw[i] = ktilde * std::log(to_double(forms.forms[i].det())) - kTwoPi * forms.forms[i].trace_pair(y);
        l0 = std::max(l0, lw[i]);
    }
    KahanSum acc;
    for (size_t i = 0; i < forms.forms.size(); ++i) acc.add(std::exp(lw[i] - l0));
    SpectralConstants sc = spectral_constants(n, k);
    real_t log_raw = l0 + std::log(std::max<real_t>(acc.value(), 1e-300)) - sc.log_abs_b - std::log(impl_->s_index);
    LatticeSumCheck out;
    out.raw = std::exp(log_raw);
    out.scaled = std::exp(log_raw + k * std::log(y.det()));
    out.ratio = std::exp(log_raw + k * std::log(y.det()) - n * (n + 1) / 4.0 * std::log(static_cast<real_t>(k)));
    return out;
}

MajorantValue PoincareEngine::majorant(real_t s, const SiegelPoint& z, int height) const {
    int n = impl_->n;
    if (s <= n + 1) throw convergence_error("majorant: s must exceed n+1");
    const ClassTable& tab = impl_->table(height);
    C2 zc{};
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) zc.a[i * n + j] = cplx(z.X().at(i, j), z.Y().at(i, j));
    KahanSum acc;
    std::map<int, real_t> shell_abs;
    for (const auto& ec : tab.classes) {
        C2 den{};
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) {
                cplx v(ec.d[i * n + j], 0);
                for (int p = 0; p < n; ++p) v += ec.c[i * n + p] * zc.a[p * n + j];
                den.a[i * n + j] = v;
            }
        real_t term = std::pow(std::abs(det2(den, n)), -s);
        acc.add(term);
        shell_abs[ec.shell] += term;
    }
    MajorantValue out;
    out.value = acc.value();
    out.classes = tab.classes.size();
    out.tail_trend = 0;
    if (shell_abs.size() >= 3) {
        auto it = shell_abs.rbegin();
        real_t last = it->second;
        real_t prev = (++it)->second;
        if (prev > 0) {
            real_t r = std::min<real_t>(last / prev, 0.95);
            out.tail_trend = last * r / (1 - r);
        }
    }
    return out;
}

bool PoincareEngine::in_fundamental_domain_approx(const SiegelPoint& z, int height, real_t tol) const {
    const ClassTable& tab = impl_->table(height);
    auto geo = impl_->geometry(1, z, tab);
    for (const auto& g : geo) {
        // |J|^{-1} > 1 + tol means |J| < 1 - tol (roughly): compare directly.
        if (g.absjk > 1 + tol) return false; // k == 1: absjk = |J|^{-1}
    }
    return true;
}

SupSearchResult PoincareEngine::sup_search(int k, const SupSearchSpec& spec, const TruncationParams& trunc) const {
    int n = impl_->n;
    real_t ymin = spec.y_min > 0 ? spec.y_min : static_cast<real_t>(k) / (8 * kPi);
    real_t ymax = spec.y_max > 0 ? spec.y_max : static_cast<real_t>(k) / (2 * kPi);
    real_t floor_y = n == 1 ? 0.867 : 0.87;
    ymin = std::max(ymin, floor_y);
    if (ymax <= ymin) ymax = ymin * 2;

    std::vector<RealSymMatrix> xs;
    for (int xi = 0; xi < std::max(1, spec.x_count); ++xi) {
        real_t frac = spec.x_count > 1 ? 0.5 * xi / (spec.x_count - 1) : 0.0;
        RealSymMatrix x(n);
        for (int i = 0; i < n; ++i)
            for (int j = i; j < n; ++j) x.set(i, j, frac);
        xs.push_back(x);
    }

    auto value_at = [&](real_t yv, int xi) {
        RealSymMatrix y = RealSymMatrix::scaled_identity(n, yv);
        SiegelPoint z(xs[xi], y);
        if (n == 1) {
            real_t xv = xs[xi].at(0, 0);
            if (xv * xv + yv * yv < 1 - 1e-12) return -std::numeric_limits<real_t>::infinity();
        }
        BergmanValue b = bergman(k, z, trunc);
        return b.log_value;
    };

    struct Node {
        real_t y;
        int xi;
        real_t logv;
    };
    std::vector<Node> nodes;
    for (int yi = 0; yi < spec.y_count; ++yi) {
        real_t f = spec.y_count > 1 ? static_cast<real_t>(yi) / (spec.y_count - 1) : 0.5;
        real_t yv = ymin * std::pow(ymax / ymin, f);
        for (int xi = 0; xi < static_cast<int>(xs.size()); ++xi) nodes.push_back({yv, xi, 0});
    }
    std::vector<real_t> vals(nodes.size());
    // Warm the caches once, then the sweep is read-mostly.
    value_at(nodes.front().y, 0);
    for (size_t i = 0; i < nodes.size(); ++i) vals[i] = value_at(nodes[i].y, nodes[i].xi);

    size_t best = 0;
    for (size_t i = 1; i < nodes.size(); ++i)
        if (vals[i] > vals[best]) best = i;

    SupSearchResult out;
    out.grid_value = vals[best];
    out.argmax_y = nodes[best].y;
    out.argmax_x_index = nodes[best].xi;
    real_t ystep = std::pow(ymax / ymin, 1.0 / std::max(1, spec.y_count - 1));
    out.boundary_warning = nodes[best].y <= ymin * 1.0001 || nodes[best].y >= ymax / 1.0001;

    // Golden-section ascent in y around the grid argmax.
    real_t lo = std::max(floor_y, nodes[best].y / ystep);
    real_t hi = nodes[best].y * ystep;
    const real_t gr = 0.6180339887498949;
    real_t a = lo, b = hi;
    real_t x1 = b - gr * (b - a), x2 = a + gr * (b - a);
    real_t f1 = value_at(x1, nodes[best].xi), f2 = value_at(x2, nodes[best].xi);
    for (int it = 0; it < spec.refine_iters; ++it) {
        if (f1 < f2) {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + gr * (b - a);
            f2 = value_at(x2, nodes[best].xi);
        } else {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - gr * (b - a);
            f1 = value_at(x1, nodes[best].xi);
        }
    }
    real_t fy = std::max(f1, f2);
    out.log_refined = std::max(fy, out.grid_value);
    out.refined_value = std::exp(out.log_refined);
    out.argmax_y = f1 > f2 ? x1 : x2;
    return out;
}

GramRankResult PoincareEngine::gram_rank(const std::vector<HalfIntegralForm>& forms, int k,
                                         const TruncationParams& trunc) const {
    size_t h = forms.size();
    // Pairwise inequivalence under the unit group.
    for (size_t i = 0; i < h; ++i)
        for (size_t j = i + 1; j < h; ++j) {
            long need = required_unit_norm_bound(forms[i], forms[j]);
            auto units = unit_group_elements(impl_->group, need);
            if (automorphism_count(forms[i], forms[j], units, need) != 0)
                throw parameter_error("gram_rank: forms are unit-equivalent");
        }
    GramRankResult out;
    out.matrix.assign(h, std::vector<real_t>(h, 0));
    for (size_t j = 0; j < h; ++j)
        for (size_t i = 0; i < h; ++i) out.matrix[i][j] = fourier_coeff(forms[j], forms[i], k, trunc).value;

    bool dominant = true;
    for (size_t i = 0; i < h && dominant; ++i) {
        real_t off = 0;
        for (size_t j = 0; j < h; ++j)
            if (j != i) off += std::abs(out.matrix[i][j]);
        if (std::abs(out.matrix[i][i]) <= off) dominant = false;
    }
    if (dominant) {
        out.status = GramRankResult::Status::NonsingularDominant;
        out.nonsingular = true;
        return out;
    }
    // Conditioned determinant fallback.
    std::vector<std::vector<real_t>> m = out.matrix;
    real_t det = 1, scale = 1;
    for (size_t i = 0; i < h; ++i) {
        real_t rown = 0;
        for (size_t j = 0; j < h; ++j) rown = std::max(rown, std::abs(m[i][j]));
        scale *= std::max<real_t>(rown, 1e-300);
    }
    for (size_t c = 0; c < h; ++c) {
        size_t piv = c;
        for (size_t i = c + 1; i < h; ++i)
            if (std::abs(m[i][c]) > std::abs(m[piv][c])) piv = i;
        if (m[piv][c] == 0) {
            det = 0;
            break;
        }
        if (piv != c) {
            std::swap(m[piv], m[c]);
            det = -det;
        }
        det *= m[c][c];
        for (size_t i = c + 1; i < h; ++i) {
            real_t f = m[i][c] / m[c][c];
            for (size_t j = c; j < h; ++j) m[i][j] -= f * m[c][j];
        }
    }
    if (std::abs(det) > 1e-6 * scale) {
        out.status = GramRankResult::Status::NonsingularDeterminant;
        out.nonsingular = true;
    } else {
        out.status = GramRankResult::Status::Indeterminate;
        out.nonsingular = false;
    }
    return out;
}

LipschitzPair lipschitz_pair(const DualLatticeDescriptor& lattice, int k, const SiegelPoint& z,
                             const TruncationParams& trunc) {
    int n = lattice.degree();
    if (z.degree() != n) throw structural_error("lipschitz_pair: dimension mismatch");
    if (k <= n) throw convergence_error("lipschitz_pair: k must exceed n");

    LipschitzPair out;

    // Left side: sum over S in S_Gamma of det(Z + S)^{-k}, box-truncated by
    // shells in lattice coordinates.
    {
        const auto& gens = lattice.generators();
        int dims = static_cast<int>(gens.size());
        KahanCSum acc;
        real_t prev_shell = 0, last_shell = 0;
        long l = 0;
        C2 zc{};
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) zc.a[i * n + j] = cplx(z.X().at(i, j), z.Y().at(i, j));
        long lmax = n == 1 ? 100000 : 121;
        for (l = 0;; ++l) {
            // Enumerate coordinate vectors with max-norm exactly l.
            KahanCSum shell;
            std::vector<long> c(dims, -l);
            if (l == 0) c.assign(dims, 0);
            while (true) {
                bool on_shell = false;
                for (long v : c)
                    if (std::abs(v) == l) on_shell = true;
                if (l == 0) on_shell = true;
                if (on_shell) {
                    C2 m = zc;
                    for (int g = 0; g < dims; ++g)
                        if (c[g] != 0)
                            for (int i = 0; i < n; ++i)
                                for (int j = 0; j < n; ++j)
                                    m.a[i * n + j] += static_cast<real_t>(c[g]) * to_double(gens[g].at(i, j));
                    shell.add(ipow(det2(m, n), -k));
                }
                int t = 0;
                for (; t < dims; ++t) {
                    if (++c[t] <= l) break;
                    c[t] = -l;
                }
                if (t == dims) break;
                if (l == 0) break;
            }
            acc.add(shell.value());
            prev_shell = last_shell;
            last_shell = std::abs(shell.value());
            real_t cur = std::abs(acc.value());
            if (l >= 3 && last_shell < trunc.tail_tol * std::max<real_t>(cur, 1e-300)) break;
            if (l >= lmax) break;
        }
        out.lhs = acc.value();
        real_t r = prev_shell > 0 ? std::min<real_t>(last_shell / prev_shell, 0.95) : 0.5;
        out.lhs_tail = last_shell * r / (1 - r);
    }

    // Right side: (b^{-1}/|S|) sum over T in Lambda_Gamma of det(T)^{k-(n+1)/2} e(tr T Z).
    {
        SpectralConstants sc = spectral_constants(n, k);
        cplx inv_b = std::conj(sc.b_phase) * std::exp(-sc.log_abs_b);
        real_t ktilde = k - (n + 1) / 2.0;
        real_t lam = z.Y().min_eigenvalue();
        real_t bound = std::max<real_t>(8, (ktilde * n / kTwoPi + 30)) ;
        FormEnumeration forms = enumerate_forms(lattice, z.Y(), bound);
        KahanCSum acc;
        real_t last_env = 0;
        for (const auto& t : forms.forms) {
            real_t env = ktilde * std::log(to_double(t.det())) - kTwoPi * t.trace_pair(z.Y());
            real_t phase = kTwoPi * t.trace_pair(z.X());
            cplx term = std::exp(env) * cplx(std::cos(phase), std::sin(phase));
            acc.add(term);
            if (t.trace_pair(z.Y()) > bound - 1) last_env = std::max(last_env, std::exp(env));
        }
        cplx total = inv_b / to_double(lattice.index()) * acc.value();
        out.rhs = total;
        out.rhs_tail = std::abs(inv_b) / to_double(lattice.index()) * last_env * 20;
        (void)lam;
    }
    return out;
}

} // namespace sieglab
