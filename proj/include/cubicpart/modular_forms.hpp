#pragma once

/**
 * @file modular_forms.hpp
 * @brief Dedekind sums, the eta multiplier system, the multiplier of
 *        F(tau) = 1 / (eta(tau) eta(2 tau)) on Gamma_0(2), and the
 *        Gamma_0(2) cusp-parameter table used by the circle method.
 *
 * Everything here is exact: phases are rationals theta standing for
 * e^{i pi theta}, reduced into [0, 2).
 */

#include <gmpxx.h>

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>

namespace cubicpart {

using Integer = mpz_class;
using Rational = mpq_class;

namespace detail {

inline Rational make_rational(const Integer& num, const Integer& den) {
    Rational q(num, den);
    q.canonicalize();
    return q;
}

/// floor division for Integer with positive divisor
inline Integer floor_div(const Integer& a, const Integer& b) {
    Integer q;
    mpz_fdiv_q(q.get_mpz_t(), a.get_mpz_t(), b.get_mpz_t());
    return q;
}

inline Integer mod_floor(const Integer& a, const Integer& m) {
    Integer r;
    mpz_fdiv_r(r.get_mpz_t(), a.get_mpz_t(), m.get_mpz_t());
    return r;
}

inline Integer gcd(const Integer& a, const Integer& b) {
    Integer g;
    mpz_gcd(g.get_mpz_t(), a.get_mpz_t(), b.get_mpz_t());
    return g;
}

/// Smallest x in [1, m] with a*x = 1 (mod m). For m = 1 this is 1.
inline Integer min_positive_inverse(const Integer& a, const Integer& m) {
    if (m == 1) return 1;
    Integer inv;
    if (mpz_invert(inv.get_mpz_t(), a.get_mpz_t(), m.get_mpz_t()) == 0)
        throw std::logic_error("min_positive_inverse: no inverse (gcd != 1)");
    inv = mod_floor(inv, m);
    if (inv == 0) inv = m;
    return inv;
}

inline Integer exact_div(const Integer& a, const Integer& b) {
    if (!mpz_divisible_p(a.get_mpz_t(), b.get_mpz_t()))
        throw std::logic_error("exact_div: non-integral table entry " + a.get_str() + "/" + b.get_str());
    Integer q;
    mpz_divexact(q.get_mpz_t(), a.get_mpz_t(), b.get_mpz_t());
    return q;
}

}  // namespace detail

/// e^{i pi theta} with theta exact and kept in [0, 2).
class UnitPhase {
public:
    UnitPhase() = default;
    explicit UnitPhase(Rational theta) : theta_(std::move(theta)) { reduce(); }

    const Rational& theta() const { return theta_; }

    UnitPhase& operator*=(const UnitPhase& o) {
        theta_ += o.theta_;
        reduce();
        return *this;
    }
    friend UnitPhase operator*(UnitPhase a, const UnitPhase& b) { return a *= b; }
    UnitPhase inverse() const { return UnitPhase(-theta_); }
    UnitPhase pow(long e) const { return UnitPhase(theta_ * e); }

    friend bool operator==(const UnitPhase& a, const UnitPhase& b) { return a.theta_ == b.theta_; }

private:
    void reduce() {
        theta_.canonicalize();
        const Integer two_den = 2 * theta_.get_den();
        theta_ = detail::make_rational(detail::mod_floor(theta_.get_num(), two_den), theta_.get_den());
    }

    Rational theta_{0};
};

/// Element of SL_2(Z).
struct MoebiusMap {
    Integer a, b, c, d;

    Integer det() const { return a * d - b * c; }

    static MoebiusMap make(Integer a, Integer b, Integer c, Integer d) {
        MoebiusMap m{std::move(a), std::move(b), std::move(c), std::move(d)};
        if (m.det() != 1) throw std::domain_error("MoebiusMap: determinant must be 1");
        return m;
    }

    friend MoebiusMap operator*(const MoebiusMap& x, const MoebiusMap& y) {
        return {x.a * y.a + x.b * y.c, x.a * y.b + x.b * y.d, x.c * y.a + x.d * y.c, x.c * y.b + x.d * y.d};
    }
    friend bool operator==(const MoebiusMap& x, const MoebiusMap& y) {
        return x.a == y.a && x.b == y.b && x.c == y.c && x.d == y.d;
    }
};

/// s(h, k) via the reciprocity law, O(log k) rational steps.
inline Rational dedekind_sum(const Integer& h_in, const Integer& k_in) {
    if (k_in <= 0) throw std::domain_error("dedekind_sum: k must be positive");
    if (detail::gcd(h_in, k_in) != 1) throw std::domain_error("dedekind_sum: gcd(h, k) != 1");
    Rational acc = 0;
    int sign = 1;
    Integer h = detail::mod_floor(h_in, k_in);
    Integer k = k_in;
    // s(h,k) = -1/4 + (h/k + k/h + 1/(hk))/12 - s(k mod h, h)
    while (h != 0 && k != 1) {
        Rational step = Rational(-1, 4) +
                        (detail::make_rational(h, k) + detail::make_rational(k, h) +
                         detail::make_rational(1, h * k)) / 12;
        if (sign > 0) acc += step; else acc -= step;
        sign = -sign;
        Integer r = detail::mod_floor(k, h);
        k = h;
        h = r;
    }
    acc.canonicalize();
    return acc;
}

/// Normalize (a,b,c,d) so that c >= 0, and d = 1 when c = 0. Negating all
/// four entries describes the same Moebius map.
inline MoebiusMap normalize_sign(MoebiusMap m) {
    if (m.c < 0 || (m.c == 0 && m.d < 0)) {
        m.a = -m.a;
        m.b = -m.b;
        m.c = -m.c;
        m.d = -m.d;
    }
    return m;
}

/// Multiplier of eta: eta(m tau) = eps * sqrt(-i(c tau + d)) * eta(tau).
inline UnitPhase eta_epsilon(const MoebiusMap& m_in) {
    if (m_in.det() != 1) throw std::domain_error("eta_epsilon: determinant must be 1");
    const MoebiusMap m = normalize_sign(m_in);
    if (m.c == 0) return UnitPhase(detail::make_rational(m.b, 12));
    return UnitPhase(detail::make_rational(m.a + m.d, 12 * m.c) - dedekind_sum(m.d, m.c));
}

/// Multiplier of F = 1/(eta(tau) eta(2 tau)) on Gamma_0(2):
/// F(m tau) = eps * (-i(c tau + d))^{-1} * F(tau), with the matrix first
/// normalized as in eta_epsilon.
inline UnitPhase f_multiplier(const MoebiusMap& m_in) {
    if (m_in.det() != 1) throw std::domain_error("f_multiplier: determinant must be 1");
    if (!mpz_even_p(m_in.c.get_mpz_t())) throw std::domain_error("f_multiplier: matrix not in Gamma_0(2)");
    const MoebiusMap m = normalize_sign(m_in);
    const MoebiusMap half{m.a, 2 * m.b, m.c / 2, m.d};
    return (eta_epsilon(m) * eta_epsilon(half)).inverse();
}

/// A complex number r * e^{i pi theta} whose modulus is stored through its
/// exact square.
struct PolarConstant {
    Rational modulus_squared;
    UnitPhase phase;
};

/// Cusp record for Gamma_0(2): P_1 = 0 with width 2, P_2 = 1/2 with width 4.
struct CuspData {
    int index = 0;
    Rational point;        // P_g = p_g / q_g
    Integer p, q;
    Integer width;         // c_g
    Rational alpha;        // 0 <= alpha_g < 1
    PolarConstant principal_part;  // a_{-1}^{(g)}
    int principal_order = 1;       // mu_g
};

inline const CuspData& cusp_data(int g) {
    static const CuspData cusp1{1, Rational(0), 0, 1, 2, Rational(7, 8),
                                {Rational(1, 2), UnitPhase(Rational(-1, 2))}, 1};
    static const CuspData cusp2{2, Rational(1, 2), 1, 2, 4, Rational(7, 8),
                                {Rational(4), UnitPhase(Rational(9, 8))}, 1};
    if (g == 1) return cusp1;
    if (g == 2) return cusp2;
    throw std::out_of_range("cusp_data: Gamma_0(2) has cusps 1 and 2 only");
}

/// Generator of the stabilizer of P_g: 1/(tau' - P_g) = 1/(tau - P_g) + c_g.
inline MoebiusMap cusp_stabilizer(int g) {
    const CuspData& cd = cusp_data(g);
    const Rational P = cd.point;
    const Rational c = cd.width;
    const Rational a = c * P + 1;
    const Rational b = -c * P * P;
    const Rational d = 1 - c * P;
    auto as_int = [](const Rational& x) {
        if (x.get_den() != 1) throw std::logic_error("cusp_stabilizer: non-integral entry");
        return x.get_num();
    };
    return MoebiusMap::make(as_int(a), as_int(b), cd.width, as_int(d));
}

/// alpha_g from eps * e^{i pi/2} = e^{-2 pi i alpha_g}, eps the F multiplier
/// of the cusp stabilizer.
inline Rational cusp_alpha(int g) {
    const UnitPhase eps = f_multiplier(cusp_stabilizer(g)) * UnitPhase(Rational(1, 2));
    // e^{i pi theta} = e^{-2 pi i alpha}  =>  alpha = -theta/2 mod 1
    Rational alpha = -eps.theta() / 2;
    Integer fl = detail::floor_div(alpha.get_num(), alpha.get_den());
    alpha -= fl;
    alpha.canonicalize();
    return alpha;
}

enum class CongruenceClass { odd, zero_mod_4, two_mod_4 };

inline CongruenceClass congruence_class_of(std::int64_t k) {
    if (k % 2) return CongruenceClass::odd;
    return k % 4 == 0 ? CongruenceClass::zero_mod_4 : CongruenceClass::two_mod_4;
}

inline std::string to_string(CongruenceClass c) {
    switch (c) {
        case CongruenceClass::odd: return "odd";
        case CongruenceClass::zero_mod_4: return "zero_mod_4";
        case CongruenceClass::two_mod_4: return "two_mod_4";
    }
    return "?";
}

/// Parameters attached to the Farey fraction h/k for the expansion at the
/// cusp 1/2 (g = 2).
struct CuspParamRow {
    std::int64_t h = 0;
    std::int64_t k = 1;
    CongruenceClass congruence_class = CongruenceClass::odd;
    Integer inverse_h;      // h', h'' or h''' depending on the class
    MoebiusMap matrix;
    int beta = 2;
    int sigma = -1;
    int delta = 1;
    Rational G_over_pi;     // G_{h,k}^{(2)} / pi
};

/**
 * Row of the Gamma_0(2) parameter table for 0 <= h < k, gcd(h,k) = 1.
 *
 * `lift` replaces the minimal positive congruence solution x by x + lift*M,
 * M being the modulus of the congruence; the resulting row is equally valid.
 *
 * The Farey point 0/1 has P = infinity, which (1, 0; 2, 1) sends to P_2 = 1/2;
 * its row is filled from that matrix directly (sigma = -1, G = 2 pi).
 */
inline CuspParamRow gamma0_2_row(std::int64_t h_in, std::int64_t k_in, unsigned lift = 0) {
    if (k_in < 1) throw std::domain_error("gamma0_2_row: k must be positive");
    if (h_in < 0 || h_in >= k_in) throw std::domain_error("gamma0_2_row: need 0 <= h < k");
    const Integer h = h_in;
    const Integer k = k_in;
    if (detail::gcd(h, k) != 1) throw std::domain_error("gamma0_2_row: gcd(h, k) != 1");

    CuspParamRow row;
    row.h = h_in;
    row.k = k_in;
    row.congruence_class = congruence_class_of(k_in);

    if (k_in == 1) {
        row.inverse_h = 1;
        row.matrix = MoebiusMap::make(1, 0, 2, 1);
        row.beta = 2;
        row.sigma = -1;
        row.delta = 1;
        row.G_over_pi = 2;
        return row;
    }

    using detail::exact_div;
    switch (row.congruence_class) {
        case CongruenceClass::odd: {
            // (k - 2h) x = 1 (mod 4h)
            const Integer M = 4 * h;
            const Integer x = detail::min_positive_inverse(detail::mod_floor(k - 2 * h, M), M) + lift * M;
            const Integer t = (k - 2 * h) * x - 1;
            row.inverse_h = x;
            row.matrix = MoebiusMap::make(x, exact_div(t, 4 * h), 2 * x + 4 * h, exact_div(t, 2 * h) - 2 * h + k);
            row.beta = 2;
            row.sigma = -1;
            row.delta = 1;
            row.G_over_pi = detail::make_rational(x * k - 1, 2 * k * h) + 1;
            break;
        }
        case CongruenceClass::zero_mod_4: {
            // (k/2 - h) x = 1 (mod 2h)
            const Integer M = 2 * h;
            const Integer half_k = k / 2;
            const Integer x = detail::min_positive_inverse(detail::mod_floor(half_k - h, M), M) + lift * M;
            const Integer t = (half_k - h) * x - 1;
            row.inverse_h = x;
            row.matrix = MoebiusMap::make(x, exact_div(t, 2 * h), 2 * x + 2 * h, exact_div(t, h) + half_k - h);
            row.beta = 2;
            row.sigma = -2;
            row.delta = 1;
            row.G_over_pi = detail::make_rational(x * k - 2, k * h) + 1;
            break;
        }
        case CongruenceClass::two_mod_4: {
            // k x = -1 (mod h)
            const Integer M = h;
            const Integer x = detail::min_positive_inverse(detail::mod_floor(-k, M), M) + lift * M;
            row.inverse_h = x;
            row.matrix = MoebiusMap::make(h, exact_div(k - 2 * h, 4), 4 * x, exact_div(k * x + 1, h) - 2 * x);
            row.beta = 1;
            row.sigma = 4;
            row.delta = -1;
            row.G_over_pi = -detail::make_rational(4 * x * k + 4, k * h);
            break;
        }
    }
    return row;
}

/**
 * sigma from its defining equations for the cusp g = 2:
 *   a((c_g/q_g) p_g h - k) + b c_g h = sigma p_beta
 *   c((c_g/q_g) p_g h - k) + d c_g h = sigma q_beta
 * Returns nullopt when the two equations are inconsistent.
 */
inline std::optional<Integer> solve_sigma(const MoebiusMap& m, std::int64_t h, std::int64_t k, int beta) {
    const CuspData& g = cusp_data(2);
    const CuspData& b = cusp_data(beta);
    const Integer X = detail::exact_div(g.width * g.p, g.q) * h - k;
    const Integer lhs1 = m.a * X + m.b * g.width * h;
    const Integer lhs2 = m.c * X + m.d * g.width * h;
    if (!mpz_divisible_p(lhs2.get_mpz_t(), b.q.get_mpz_t())) return std::nullopt;
    const Integer sigma = lhs2 / b.q;
    if (lhs1 != sigma * b.p) return std::nullopt;
    return sigma;
}

}  // namespace cubicpart
