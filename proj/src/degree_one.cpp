#include "degree_one.hpp"

#include <algorithm>
#include <cmath>

#include "bessel.hpp"
#include "kahan.hpp"
#include "parallel.hpp"

namespace sieglab {

namespace {

long gcd_l(long a, long b) {
    if (a < 0) a = -a;
    if (b < 0) b = -b;
    while (b) {
        long t = a % b;
        a = b;
        b = t;
    }
    return a;
}

// x with d*x = 1 mod c (c >= 1, gcd(d, c) = 1).
long inv_mod(long d, long c) {
    long r0 = c, r1 = ((d % c) + c) % c;
    long s0 = 0, s1 = 1;
    while (r1 != 0) {
        long q = r0 / r1;
        long t = r0 - q * r1;
        r0 = r1;
        r1 = t;
        t = s0 - q * s1;
        s0 = s1;
        s1 = t;
    }
    return ((s0 % c) + c) % c;
}

bool width_one_fast_path(const GroupDescriptor& g) {
    if (g.has_conjugator()) return false;
    return g.family() == GroupFamily::Full || g.family() == GroupFamily::Gamma0;
}

long cusp_omega(const GroupDescriptor& g) { return cusp_width_config(g).omega; }

// Divisor-count sieve for the tail bound.
std::vector<int> divisor_counts(long up_to) {
    std::vector<int> d(static_cast<size_t>(up_to) + 1, 0);
    for (long i = 1; i <= up_to; ++i)
        for (long j = i; j <= up_to; j += i) ++d[static_cast<size_t>(j)];
    return d;
}

// Weil-shape envelope for one modulus, used only in tail estimates.
real_t term_bound(long c, long omega, long m, long n, int dc) {
    real_t x = 4 * kPi * std::sqrt(static_cast<real_t>(m) * n) / (static_cast<real_t>(c) * omega);
    real_t j1 = std::min<real_t>(0.6, x / 2);
    real_t weil = dc * std::sqrt(static_cast<real_t>(c) * omega) *
                  std::sqrt(static_cast<real_t>(gcd_l(gcd_l(m, n), c * omega)));
    return 4 * kPi / omega * std::sqrt(static_cast<real_t>(n) / m) * weil / c * j1;
}

} // namespace

std::vector<DSetEntry> d_set(const GroupDescriptor& group, long c) {
    if (group.degree() != 1) throw capability_error("d_set: degree-1 descriptors only");
    if (c < 1) throw parameter_error("d_set: c must be >= 1");
    long omega = cusp_omega(group);
    long lev = group.level();
    std::vector<DSetEntry> out;
    for (long d = 0; d < c * omega; ++d) {
        if (gcd_l(c, d) != 1) continue;
        // Complete (c, d) to an integer unimodular matrix: a d - b c = 1.
        Int x, y;
        Int g = ext_gcd(Int(d), Int(c), x, y);
        if (g != 1) continue;
        long a0 = static_cast<long>(x);  // a0 * d - (-y) * c = 1
        long b0 = static_cast<long>(-y);
        // Scan unipotent left-translates n(t) g0; membership is periodic mod N.
        for (long t = 0; t < lev; ++t) {
            IntMatrix am(1, 1), bm(1, 1), cm(1, 1), dm(1, 1);
            am.at(0, 0) = a0 + t * c;
            bm.at(0, 0) = b0 + t * d;
            cm.at(0, 0) = c;
            dm.at(0, 0) = d;
            SymplecticElement cand(am, bm, cm, dm);
            if (group.contains(cand)) {
                long modulus = c * omega;
                out.push_back({d, static_cast<long>(mod_floor(Int(a0 + t * c), modulus))});
                break;
            }
        }
    }
    return out;
}

cplx kloosterman(const GroupDescriptor& group, long m, long n, long c) {
    long omega = cusp_omega(group);
    auto ds = d_set(group, c);
    KahanCSum acc;
    real_t denom = static_cast<real_t>(c) * omega;
    for (const auto& e : ds) {
        real_t ph = kTwoPi * (static_cast<real_t>(m) * e.dbar + static_cast<real_t>(n) * e.d) / denom;
        acc.add({std::cos(ph), std::sin(ph)});
    }
    return acc.value();
}

namespace {

// One c-sweep accumulating sum_c S(m,n;c)/c J_1(4 pi sqrt(mn)/(c omega)) for
// all 1 <= m, n <= size at once.
struct SweepResult {
    std::vector<std::vector<cplx>> sums; // [m-1][n-1]
};

SweepResult kloosterman_bessel_sweep(const GroupDescriptor& group, int size, long c_max, long omega) {
    bool fast = width_one_fast_path(group);
    long lev = group.level();
    std::vector<long> cs;
    for (long c = 1; c <= c_max; ++c) {
        if (fast && c % lev != 0) continue;
        cs.push_back(c);
    }
    size_t chunks = (cs.size() + 15) / 16;
    std::vector<SweepResult> slot(chunks);
    parallel_for(chunks, [&](size_t ch) {
        SweepResult local;
        local.sums.assign(size, std::vector<cplx>(size, {0, 0}));
        std::vector<cplx> table;
        for (size_t i = ch * 16; i < std::min(cs.size(), (ch + 1) * 16); ++i) {
            long c = cs[i];
            long modulus = c * omega;
            table.resize(static_cast<size_t>(modulus));
            for (long j = 0; j < modulus; ++j) {
                real_t ph = kTwoPi * j / modulus;
                table[static_cast<size_t>(j)] = {std::cos(ph), std::sin(ph)};
            }
            std::vector<DSetEntry> ds;
            if (fast) {
                for (long d = 0; d < c; ++d)
                    if (gcd_l(d, c) == 1) ds.push_back({d, inv_mod(d, c)});
            } else {
                ds = d_set(group, c);
            }
            // S(m,n;c) for the whole block, then the Bessel weight.
            std::vector<std::vector<cplx>> s(size, std::vector<cplx>(size, {0, 0}));
            for (const auto& e : ds)
                for (long m = 1; m <= size; ++m) {
                    long md = (m * e.dbar) % modulus;
                    for (long n = 1; n <= size; ++n) {
                        long idx = (md + n * e.d) % modulus;
                        s[m - 1][n - 1] += table[static_cast<size_t>(idx)];
                    }
                }
            for (long m = 1; m <= size; ++m)
                for (long n = 1; n <= size; ++n) {
                    real_t x = 4 * kPi * std::sqrt(static_cast<real_t>(m) * n) / modulus;
                    local.sums[m - 1][n - 1] += s[m - 1][n - 1] / static_cast<real_t>(c) * bessel_j1(x);
                }
        }
        slot[ch] = std::move(local);
    });
    SweepResult out;
    out.sums.assign(size, std::vector<cplx>(size, {0, 0}));
    for (size_t ch = 0; ch < chunks; ++ch)
        for (int m = 0; m < size; ++m)
            for (int n = 0; n < size; ++n) out.sums[m][n] += slot[ch].sums[m][n];
    return out;
}

real_t weight2_tail(const GroupDescriptor& group, long m, long n, long c_max, long omega) {
    bool fast = width_one_fast_path(group);
    long lev = group.level();
    auto dc = divisor_counts(2 * c_max);
    real_t oct = 0;
    for (long c = c_max + 1; c <= 2 * c_max; ++c) {
        if (fast && c % lev != 0) continue;
        oct += term_bound(c, omega, m, n, dc[static_cast<size_t>(c)]);
    }
    return 4 * oct; // sum of octaves of a ~c^{-3/2} envelope
}

} // namespace

Weight2Coeff weight2_coeff(const GroupDescriptor& group, long m, long n, long c_max, real_t tol) {
    if (group.degree() != 1) throw capability_error("weight2_coeff: degree-1 descriptors only");
    if (m < 1 || n < 1) throw parameter_error("weight2_coeff: m, n must be positive");
    long omega = cusp_omega(group);
    real_t tail = weight2_tail(group, m, n, c_max, omega);
    if (tail > tol) {
        long suggested = static_cast<long>(c_max * std::pow(tail / tol, 2.0)) + 1;
        throw parameter_error("weight2_coeff: c-tail bound " + std::to_string(static_cast<double>(tail)) +
                              " above tolerance; raise cMax to about " + std::to_string(suggested));
    }
    int size = static_cast<int>(std::max(m, n));
    SweepResult sweep = kloosterman_bessel_sweep(group, size, c_max, omega);
    cplx csum = sweep.sums[m - 1][n - 1];
    real_t value = (m == n ? 2.0 : 0.0) -
                   4 * kPi / omega * std::sqrt(static_cast<real_t>(n) / m) * csum.real();
    return {value, tail};
}

GramMatrix petersson_gram(const GroupDescriptor& group, int size, long c_max) {
    if (group.degree() != 1) throw capability_error("petersson_gram: degree-1 descriptors only");
    long omega = cusp_omega(group);
    SweepResult sweep = kloosterman_bessel_sweep(group, size, c_max, omega);
    GramMatrix gm;
    gm.size = size;
    gm.omega = omega;
    gm.entries.assign(size, std::vector<real_t>(size, 0));
    gm.tails.assign(size, std::vector<real_t>(size, 0));
    for (long m = 1; m <= size; ++m)
        for (long n = 1; n <= size; ++n) {
            real_t p = (m == n ? 2.0 : 0.0) -
                       4 * kPi / omega * std::sqrt(static_cast<real_t>(n) / m) * sweep.sums[m - 1][n - 1].real();
            real_t entry = 2.0 / (static_cast<real_t>(omega) * omega) *
                           std::sqrt(static_cast<real_t>(m) / n) * p;
            gm.entries[m - 1][n - 1] = entry;
            gm.tails[m - 1][n - 1] = 2.0 / (static_cast<real_t>(omega) * omega) *
                                     std::sqrt(static_cast<real_t>(m) / n) *
                                     weight2_tail(group, m, n, c_max, omega);
        }
    for (int i = 0; i < size; ++i)
        for (int j = 0; j < size; ++j)
            gm.asymmetry = std::max(gm.asymmetry, std::abs(gm.entries[i][j] - gm.entries[j][i]));
    std::vector<real_t> sym(static_cast<size_t>(size) * size);
    for (int i = 0; i < size; ++i)
        for (int j = 0; j < size; ++j)
            sym[static_cast<size_t>(i) * size + j] = (gm.entries[i][j] + gm.entries[j][i]) / 2;
    gm.eigen = jacobi_eigen(sym, size);
    return gm;
}

namespace {

struct SplitMix {
    std::uint64_t s;
    std::uint64_t next() {
        s += 0x9e3779b97f4a7c15ULL;
        std::uint64_t z = s;
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }
    real_t uniform() { return static_cast<real_t>(next() >> 11) * 0x1.0p-53; }
    // Box-Muller, fully deterministic across platforms.
    real_t gauss() {
        real_t u1 = std::max<real_t>(uniform(), 1e-18);
        real_t u2 = uniform();
        return std::sqrt(-2 * std::log(u1)) * std::cos(kTwoPi * u2);
    }
};

} // namespace

LargeSieveResult large_sieve_check(const GramMatrix& gram, long level, int trials, std::uint64_t seed) {
    int k = gram.size;
    real_t omega = static_cast<real_t>(gram.omega);
    real_t denom = (std::log(static_cast<real_t>(k)) + static_cast<real_t>(k) / (level * omega)) / (omega * omega);
    SplitMix rng{seed};
    LargeSieveResult out;
    out.seed = seed;
    for (int t = 0; t < trials; ++t) {
        std::vector<cplx> a(static_cast<size_t>(k));
        real_t norm2 = 0;
        for (int i = 0; i < k; ++i) {
            a[static_cast<size_t>(i)] = {rng.gauss(), rng.gauss()};
            norm2 += std::norm(a[static_cast<size_t>(i)]);
        }
        // a^H M a (real for symmetric M with complex a).
        real_t quad = 0;
        for (int i = 0; i < k; ++i)
            for (int j = 0; j < k; ++j)
                quad += (std::conj(a[static_cast<size_t>(i)]) * a[static_cast<size_t>(j)]).real() *
                        gram.entries[i][j];
        real_t ratio = quad / (denom * norm2);
        out.ratios.push_back(ratio);
        out.max_ratio = std::max(out.max_ratio, ratio);
    }
    return out;
}

LargeSieveResult large_sieve_check(const GroupDescriptor& group, int size, int trials, long c_max,
                                   std::uint64_t seed) {
    GramMatrix gm = petersson_gram(group, size, c_max);
    return large_sieve_check(gm, group.level(), trials, seed);
}

Weight2Coeff petersson_oracle(int k, long m, long n, const GroupDescriptor& group, long c_max) {
    if (k < 4 || k % 2 != 0) throw parameter_error("petersson_oracle: k must be even and >= 4");
    if (group.degree() != 1) throw capability_error("petersson_oracle: degree-1 descriptors only");
    long omega = cusp_omega(group);
    if (omega != 1) throw capability_error("petersson_oracle: width-one groups only (full or Gamma_0)");
    bool fast = width_one_fast_path(group);
    long lev = group.level();
    real_t sign = (k / 2) % 2 == 0 ? 1.0 : -1.0;
    KahanSum acc;
    real_t last = 0;
    for (long c = 1; c <= c_max; ++c) {
        if (fast && c % lev != 0) continue;
        real_t x = 4 * kPi * std::sqrt(static_cast<real_t>(m) * n) / c;
        real_t j = bessel_jn(k - 1, x);
        cplx s;
        if (fast) {
            KahanCSum sc;
            for (long d = 0; d < c; ++d) {
                if (gcd_l(d, c) != 1) continue;
                real_t ph = kTwoPi * (static_cast<real_t>(m) * inv_mod(d, c) + static_cast<real_t>(n) * d) / c;
                sc.add({std::cos(ph), std::sin(ph)});
            }
            s = sc.value();
        } else {
            s = kloosterman(group, m, n, c);
        }
        real_t term = 2 * kPi * sign * std::pow(static_cast<real_t>(n) / m, (k - 1) / 2.0) * s.real() / c * j;
        acc.add(term);
        last = std::abs(term);
    }
    real_t value = (m == n ? 1.0 : 0.0) + acc.value();
    return {value, 4 * last + 1e-15};
}

} // namespace sieglab
