#pragma once

/**
 * @file kloosterman.hpp
 * @brief Kloosterman-type sums A_k(n) for p(n) and for the cubic partition
 *        function.
 *
 * Every summand is a root of unity whose angle is assembled exactly as a
 * rational multiple of pi; only the final e^{i pi theta} is rounded.
 */

#include "cubicpart/modular_forms.hpp"
#include "cubicpart/real.hpp"

#include <cmath>
#include <complex>
#include <cstdint>
#include <deque>
#include <initializer_list>
#include <mutex>
#include <numeric>
#include <stdexcept>
#include <vector>

namespace cubicpart {

enum class KloostermanClass { classical, cubic_odd, cubic_0mod4, cubic_2mod4 };

/// How the unit factor in front of each cubic summand is read:
/// e^{(1 - delta) pi i / 2} (r = 1), or e^{pi i} on every term.
enum class UnitFactorReading { from_delta, uniform_minus_one };

struct KloostermanValue {
    std::int64_t k = 1;
    std::int64_t n = 0;
    KloostermanClass cls = KloostermanClass::classical;
    Complex value;
    std::int64_t term_count = 0;
    long bits = 0;
};

inline KloostermanClass cubic_class_of(std::int64_t k) {
    switch (congruence_class_of(k)) {
        case CongruenceClass::odd: return KloostermanClass::cubic_odd;
        case CongruenceClass::zero_mod_4: return KloostermanClass::cubic_0mod4;
        case CongruenceClass::two_mod_4: return KloostermanClass::cubic_2mod4;
    }
    return KloostermanClass::cubic_odd;
}

/// Phase of the cubic summand for h/k, without the e^{-2 pi i n h/k} factor,
/// assembled from the table columns (matrix, delta, G):
///   eps_F(M)^{-1} * unit * e^{-2 pi i alpha h / k} * e^{-i (1 - alpha_beta) G}.
inline UnitPhase cubic_term_phase(const CuspParamRow& row,
                                  UnitFactorReading reading = UnitFactorReading::from_delta) {
    const CuspData& g = cusp_data(2);
    const CuspData& beta = cusp_data(row.beta);
    UnitPhase ph = f_multiplier(row.matrix).inverse();
    if (reading == UnitFactorReading::uniform_minus_one)
        ph *= UnitPhase(Rational(1));
    else
        ph *= UnitPhase(Rational(1 - row.delta, 2));
    ph *= UnitPhase(Rational(-2) * g.alpha * row.h / row.k);
    ph *= UnitPhase(-(1 - beta.alpha) * row.G_over_pi);
    return ph;
}

/// Same summand rebuilt from the general definitions: sigma solved from its
/// two defining equations, delta from the sign of sigma, G from
/// -2 pi sigma q_beta (c P_g + d) / (k c_beta), and Omega with r = 1.
/// Returns Omega_{h,k} * e^{-i nu G} for nu = 1.
inline UnitPhase zuckerman_term_phase(const CuspParamRow& row) {
    const CuspData& g = cusp_data(2);
    const CuspData& beta = cusp_data(row.beta);
    const auto sigma_opt = solve_sigma(row.matrix, row.h, row.k, row.beta);
    if (!sigma_opt) throw std::logic_error("zuckerman_term_phase: sigma equations inconsistent");
    const Integer sigma = *sigma_opt;
    const int delta = sigma > 0 ? -1 : 1;
    const Rational cusp_factor = Rational(row.matrix.c) * g.point + Rational(row.matrix.d);  // c P_g + d
    const Rational k(row.k);
    Rational G_over_pi = Rational(-2) / (k * Rational(beta.width)) * Rational(sigma * beta.q) * cusp_factor;
    G_over_pi.canonicalize();

    const int r = 1;
    UnitPhase omega = f_multiplier(row.matrix).inverse();
    omega *= UnitPhase(Rational((1 - delta) * r, 2));
    Rational inner = g.alpha * row.h + Rational(sigma * beta.q) * cusp_factor * beta.alpha / Rational(beta.width);
    omega *= UnitPhase(Rational(-2) / k * inner);

    const int nu = 1;
    return omega * UnitPhase(-nu * G_over_pi);
}

/// Classical summand phase s(m, k).
inline UnitPhase classical_term_phase(std::int64_t m, std::int64_t k) {
    return UnitPhase(dedekind_sum(m, k));
}

namespace detail {

inline UnitPhase kloosterman_phase(std::int64_t n, std::int64_t h, std::int64_t k) {
    return UnitPhase(Rational(Integer(-2) * n * h, Integer(k)));
}

template <class PhaseOf>
KloostermanValue accumulate(std::int64_t k, std::int64_t n, KloostermanClass cls, long bits, PhaseOf phase_of) {
    if (k < 1) throw std::domain_error("Kloosterman sum: k must be positive");
    KloostermanValue out;
    out.k = k;
    out.n = n;
    out.cls = cls;
    out.bits = bits;
    out.value = Complex(bits);
    for (std::int64_t h = 0; h < k; ++h) {
        if (std::gcd(h, k) != 1) continue;
        const UnitPhase ph = phase_of(h) * kloosterman_phase(n, h, k);
        out.value += unit_pi(ph.theta(), bits);
        ++out.term_count;
    }
    return out;
}

}  // namespace detail

/// A_k(n) = sum_{0 <= m < k, (m,k) = 1} exp(pi i (s(m,k) - 2 n m / k)).
inline KloostermanValue A_classical(std::int64_t k, std::int64_t n, long bits) {
    return detail::accumulate(k, n, KloostermanClass::classical, bits,
                              [k](std::int64_t m) { return classical_term_phase(m, k); });
}

/// Classical A_k(n) by Selberg's formula, in double precision:
///   A_k(n) = sqrt(k/3) sum_{l mod 2k, (3l^2+l)/2 = -n (mod k)} (-1)^l cos(pi (6l+1) / (6k)).
/// O(k) integer steps and only a handful of cosines; used by the fast path.
inline double A_classical_selberg(std::int64_t k, std::int64_t n) {
    if (k < 1) throw std::domain_error("A_classical_selberg: k must be positive");
    std::int64_t target = (-n) % k;
    if (target < 0) target += k;
    double acc = 0.0;
    std::int64_t pent = 0;  // (3l^2 + l)/2 mod k
    for (std::int64_t l = 0; l < 2 * k; ++l) {
        if (pent == target) {
            const double c = std::cos(M_PI * static_cast<double>(6 * l + 1) / static_cast<double>(6 * k));
            acc += (l % 2) ? -c : c;
        }
        pent = (pent + 3 * l + 2) % k;
    }
    return std::sqrt(static_cast<double>(k) / 3.0) * acc;
}

/// Cubic A_k(n) from the closed-form summands of the parameter table.
inline KloostermanValue A_cubic(std::int64_t k, std::int64_t n, long bits, unsigned lift = 0,
                                UnitFactorReading reading = UnitFactorReading::from_delta) {
    return detail::accumulate(k, n, cubic_class_of(k), bits, [k, lift, reading](std::int64_t h) {
        return cubic_term_phase(gamma0_2_row(h, k, lift), reading);
    });
}

/// Cubic A_k(n) rebuilt from Omega_{h,k} and G_{h,k} (independent of the
/// table's delta and G columns).
inline KloostermanValue A_cubic_via_zuckerman(std::int64_t k, std::int64_t n, long bits, unsigned lift = 0) {
    return detail::accumulate(k, n, cubic_class_of(k), bits, [k, lift](std::int64_t h) {
        return zuckerman_term_phase(gamma0_2_row(h, k, lift));
    });
}

/// Summand phases of one A_k with a common denominator:
/// theta_h = numerators[i] / denominator for h = residues[i].
struct PhaseRow {
    std::int64_t k = 1;
    std::vector<std::int64_t> residues;
    std::vector<std::int64_t> numerators;
    std::int64_t denominator = 1;

    std::size_t size() const { return residues.size(); }

    /// Exact angle of summand i at Kloosterman argument n, as t / (den k) in
    /// units of pi with 0 <= t < 2 den k.
    std::pair<std::int64_t, std::int64_t> angle(std::size_t i, std::int64_t n) const {
        const __int128 modulus = static_cast<__int128>(2) * denominator * k;
        __int128 t = static_cast<__int128>(numerators[i]) * k -
                     static_cast<__int128>(2) * n * residues[i] * denominator;
        t %= modulus;
        if (t < 0) t += modulus;
        return {static_cast<std::int64_t>(t), denominator * k};
    }
};

enum class KloostermanFamily { classical, cubic };

namespace detail {

using i128 = __int128;

inline i128 gcd128(i128 a, i128 b) {
    if (a < 0) a = -a;
    if (b < 0) b = -b;
    while (b != 0) {
        if ((a >> 63) == 0 && (b >> 63) == 0)
            return std::gcd(static_cast<std::uint64_t>(a), static_cast<std::uint64_t>(b));
        const i128 r = a % b;
        a = b;
        b = r;
    }
    return a;
}

/// Exact angle num/den (units of pi) reduced modulo 2, in machine integers.
struct SmallPhase {
    i128 num = 0;
    i128 den = 1;

    SmallPhase() = default;
    SmallPhase(i128 n, i128 d) : num(n), den(d) { reduce(); }

    SmallPhase& operator+=(const SmallPhase& o) {
        const i128 g = gcd128(den, o.den);
        num = num * (o.den / g) + o.num * (den / g);
        den = den / g * o.den;
        reduce();
        return *this;
    }
    SmallPhase operator-() const { return {-num, den}; }

    void reduce() {
        if (den < 0) {
            den = -den;
            num = -num;
        }
        const i128 g = gcd128(num, den);
        if (g > 1) {
            num /= g;
            den /= g;
        }
        const i128 m = 2 * den;
        num %= m;
        if (num < 0) num += m;
    }
};

inline SmallPhase small_phase(const Rational& q) {
    if (!q.get_num().fits_slong_p() || !q.get_den().fits_slong_p())
        throw std::overflow_error("small_phase: rational too large");
    return {q.get_num().get_si(), q.get_den().get_si()};
}

/// 12 k s(h, k), an integer, via the reciprocity law in machine integers:
/// 12hk s(h,k) = h^2 + k^2 + 1 - 3hk - k * (12 h s(k mod h, h)).
/// Intermediate values stay below about k^3.
inline std::int64_t dedekind_sum_scaled(std::int64_t h, std::int64_t k) {
    h %= k;
    if (h < 0) h += k;
    if (k == 1) return 0;
    if (h == 1) return (k - 1) * (k - 2);
    const std::int64_t inner = dedekind_sum_scaled(k % h, h);
    const std::int64_t num = h * h + k * k + 1 - 3 * h * k - k * inner;
    return num / h;
}

/// Unreduced fraction num/den with den > 0.
struct Frac {
    i128 num;
    std::int64_t den;
};

/// eta multiplier angle, machine-integer version.
inline Frac eta_theta_small(std::int64_t a, std::int64_t b, std::int64_t c, std::int64_t d) {
    if (c < 0 || (c == 0 && d < 0)) {
        a = -a;
        b = -b;
        c = -c;
        d = -d;
    }
    if (c == 0) return {b, 12};
    std::int64_t dm = d % c;
    if (dm < 0) dm += c;
    return {static_cast<i128>(a) + d - dedekind_sum_scaled(dm, c), 12 * c};
}

/// Sum of fractions reduced modulo 2.
inline SmallPhase sum_mod2(std::initializer_list<Frac> parts) {
    std::int64_t L = 1;
    for (const auto& f : parts) L = std::lcm(L, f.den);
    i128 num = 0;
    const i128 m = 2 * static_cast<i128>(L);
    for (const auto& f : parts) num = (num + (f.num % m) * (L / f.den)) % m;
    return {num, L};
}

inline std::int64_t inverse_mod_small(std::int64_t a, std::int64_t m) {
    if (m == 1) return 1;
    std::int64_t r0 = ((a % m) + m) % m, r1 = m, s0 = 1, s1 = 0;
    while (r1 != 0) {
        const std::int64_t q = r0 / r1;
        std::int64_t t = r0 - q * r1;
        r0 = r1;
        r1 = t;
        t = s0 - q * s1;
        s0 = s1;
        s1 = t;
    }
    if (r0 != 1) throw std::logic_error("inverse_mod_small: not invertible");
    s0 %= m;
    if (s0 <= 0) s0 += m;
    return s0;
}

/// Machine-integer twin of cubic_term_phase(gamma0_2_row(h, k)), minimal solutions.
inline SmallPhase cubic_term_phase_small(std::int64_t h_in, std::int64_t k_in, UnitFactorReading reading) {
    const std::int64_t h = h_in, k = k_in;
    std::int64_t a, b, c, d;
    int delta;
    i128 G_num, G_den;  // G / pi, not reduced mod 2
    if (k == 1) {
        a = 1; b = 0; c = 2; d = 1;
        delta = 1;
        G_num = 2;
        G_den = 1;
    } else {
        switch (congruence_class_of(k_in)) {
            case CongruenceClass::odd: {
                const std::int64_t x = inverse_mod_small(k - 2 * h, 4 * h);
                const std::int64_t t = (k - 2 * h) * x - 1;
                a = x; b = t / (4 * h); c = 2 * x + 4 * h; d = t / (2 * h) - 2 * h + k;
                delta = 1;
                G_num = x * k - 1 + 2 * k * h;
                G_den = 2 * k * h;
                break;
            }
            case CongruenceClass::zero_mod_4: {
                const std::int64_t x = inverse_mod_small(k / 2 - h, 2 * h);
                const std::int64_t t = (k / 2 - h) * x - 1;
                a = x; b = t / (2 * h); c = 2 * x + 2 * h; d = t / h + k / 2 - h;
                delta = 1;
                G_num = x * k - 2 + k * h;
                G_den = k * h;
                break;
            }
            default: {
                const std::int64_t x = inverse_mod_small(-k, h);
                a = h; b = (k - 2 * h) / 4; c = 4 * x; d = (k * x + 1) / h - 2 * x;
                delta = -1;
                G_num = -(4 * x * k + 4);
                G_den = k * h;
                break;
            }
        }
    }
    static const SmallPhase ag = small_phase(cusp_data(2).alpha);
    static const SmallPhase ab1 = small_phase(1 - cusp_data(1).alpha);
    static const SmallPhase ab2 = small_phase(1 - cusp_data(2).alpha);
    const SmallPhase& ab = k_in % 4 == 2 ? ab1 : ab2;
    // eps_F^{-1} = eps(a,b,c,d) eps(a,2b,c/2,d)
    return sum_mod2({eta_theta_small(a, b, c, d), eta_theta_small(a, 2 * b, c / 2, d),
                     reading == UnitFactorReading::uniform_minus_one ? Frac{1, 1} : Frac{1 - delta, 2},
                     Frac{-2 * ag.num * h, static_cast<std::int64_t>(ag.den * k)},
                     Frac{-ab.num * G_num, static_cast<std::int64_t>(ab.den * G_den)}});
}

}  // namespace detail

inline PhaseRow assemble_phase_row(std::int64_t k, std::vector<std::int64_t> residues,
                                   const std::vector<detail::SmallPhase>& thetas) {
    PhaseRow row;
    row.k = k;
    row.residues = std::move(residues);
    detail::i128 den = 1;
    for (const auto& t : thetas) den = den / detail::gcd128(den, t.den) * t.den;
    if (den * 2 * k > (static_cast<detail::i128>(1) << 62))
        throw std::overflow_error("assemble_phase_row: common denominator too large");
    row.denominator = static_cast<std::int64_t>(den);
    for (const auto& t : thetas) row.numerators.push_back(static_cast<std::int64_t>(t.num * (den / t.den)));
    return row;
}

/// Phase row from the exact (GMP) path: gamma0_2_row, f_multiplier,
/// dedekind_sum.
inline PhaseRow build_phase_row_exact(KloostermanFamily family, std::int64_t k, UnitFactorReading reading) {
    std::vector<std::int64_t> residues;
    std::vector<detail::SmallPhase> thetas;
    for (std::int64_t h = 0; h < k; ++h) {
        if (std::gcd(h, k) != 1) continue;
        residues.push_back(h);
        thetas.push_back(detail::small_phase(family == KloostermanFamily::classical
                                                 ? classical_term_phase(h, k).theta()
                                                 : cubic_term_phase(gamma0_2_row(h, k), reading).theta()));
    }
    return assemble_phase_row(k, std::move(residues), thetas);
}

/// Same row computed in machine integers; identical to build_phase_row_exact.
inline PhaseRow build_phase_row(KloostermanFamily family, std::int64_t k, UnitFactorReading reading) {
    if (k < 1) throw std::domain_error("build_phase_row: k must be positive");
    std::vector<std::int64_t> residues;
    std::vector<detail::SmallPhase> thetas;
    for (std::int64_t h = 0; h < k; ++h) {
        if (std::gcd(h, k) != 1) continue;
        residues.push_back(h);
        if (family == KloostermanFamily::classical)
            thetas.emplace_back(detail::dedekind_sum_scaled(h, k), 12 * static_cast<detail::i128>(k));
        else
            thetas.push_back(detail::cubic_term_phase_small(h, k, reading));
    }
    return assemble_phase_row(k, std::move(residues), thetas);
}

/// Lazily built, append-only cache of PhaseRows for k = 1, 2, ...
/// Safe for concurrent readers; rows never move once built.
class PhaseTable {
public:
    explicit PhaseTable(KloostermanFamily family, UnitFactorReading reading = UnitFactorReading::from_delta)
        : family_(family), reading_(reading) {}

    const PhaseRow& row(std::int64_t k) const {
        if (k < 1) throw std::domain_error("PhaseTable: k must be positive");
        std::lock_guard<std::mutex> lock(mu_);
        while (static_cast<std::int64_t>(rows_.size()) < k)
            rows_.push_back(build_phase_row(family_, static_cast<std::int64_t>(rows_.size()) + 1, reading_));
        return rows_[static_cast<std::size_t>(k - 1)];
    }

private:
    KloostermanFamily family_;
    UnitFactorReading reading_;
    mutable std::mutex mu_;
    mutable std::deque<PhaseRow> rows_;
};

inline const PhaseTable& shared_phase_table(KloostermanFamily family,
                                            UnitFactorReading reading = UnitFactorReading::from_delta) {
    static const PhaseTable classical(KloostermanFamily::classical);
    static const PhaseTable cubic_delta(KloostermanFamily::cubic, UnitFactorReading::from_delta);
    static const PhaseTable cubic_uniform(KloostermanFamily::cubic, UnitFactorReading::uniform_minus_one);
    if (family == KloostermanFamily::classical) return classical;
    return reading == UnitFactorReading::from_delta ? cubic_delta : cubic_uniform;
}

/// sum_i e^{i pi theta_i(n)} at `bits` of precision.
inline Complex sum_phases(const PhaseRow& row, std::int64_t n, long bits) {
    Complex acc(bits);
    const Real pi_w = pi(bits + 16);
    Complex z(bits);
    for (std::size_t i = 0; i < row.size(); ++i) {
        auto [t, d] = row.angle(i, n);
        Real angle = pi_w * static_cast<long>(t);
        angle /= static_cast<long>(d);
        mpfr_sin_cos(z.im.get(), z.re.get(), angle.get(), MPFR_RNDN);
        acc += z;
    }
    return acc;
}

/// Double-precision version for summands whose weight is small.
inline std::complex<double> sum_phases_fast(const PhaseRow& row, std::int64_t n) {
    double re = 0.0, im = 0.0;
    for (std::size_t i = 0; i < row.size(); ++i) {
        auto [t, d] = row.angle(i, n);
        // fold into (-1, 1] to keep the double argument small
        double x = static_cast<double>(t) / static_cast<double>(d);
        if (x > 1.0) x -= 2.0;
        const double a = M_PI * x;
        re += std::cos(a);
        im += std::sin(a);
    }
    return {re, im};
}

}  // namespace cubicpart
