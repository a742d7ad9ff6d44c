#pragma once

/**
 * @file numerics.hpp
 * @brief Precision policy and the modified Bessel function I_nu.
 *
 * Two evaluation routes for I_nu with integer order:
 *  - the ascending series sum_m (z/2)^{2m+nu} / (m! (m+nu)!), used by the
 *    exact-formula engine; its tail is bounded a posteriori;
 *  - the Hankel expansion e^z / sqrt(2 pi z) sum_k (-1)^k a_k(nu) / z^k,
 *    used only for asymptotic comparisons.
 */

#include "cubicpart/real.hpp"

#include <cmath>
#include <cstdint>
#include <stdexcept>

namespace cubicpart {

struct PrecisionConfig {
    long mantissa_bits = 128;
    long truncation_K = 16;
    double round_tolerance = 1e-6;

    void validate() const {
        if (mantissa_bits < 64) throw std::invalid_argument("mantissa_bits must be >= 64");
        if (truncation_K < 1) throw std::invalid_argument("truncation_K must be >= 1");
        if (!(round_tolerance > 0)) throw std::invalid_argument("round_tolerance must be positive");
    }
};

/// ceil(pi sqrt(n) / ln 2) + 64 + ceil(log2(K+1)) bits: enough headroom to
/// resolve an integer of size ~e^{pi sqrt n} to well below the rounding
/// tolerance.
inline PrecisionConfig required_precision(std::uint64_t n, long K) {
    if (K < 1) throw std::invalid_argument("K must be >= 1");
    const double growth = M_PI * std::sqrt(static_cast<double>(n)) / M_LN2;
    long bits = static_cast<long>(std::ceil(growth - 1e-12)) + 64;
    bits += static_cast<long>(std::ceil(std::log2(static_cast<double>(K) + 1.0) - 1e-12));
    PrecisionConfig cfg;
    cfg.mantissa_bits = std::max(bits, 65L);
    cfg.truncation_K = K;
    return cfg;
}

enum class BesselMethod { ascending_series, asymptotic };

struct BesselResult {
    unsigned nu = 0;
    Real z;
    Real value;
    BesselMethod method = BesselMethod::ascending_series;
    Real tail_bound;  // relative to value (absolute when value is 0)
};

struct SeriesSum {
    Real value;
    Real tail_bound;  // absolute
};

/// sum_{j>=0} y^j / (j! (j+nu)!) for any real y (negative y gives the J-type
/// alternating series). I_nu(z) = (z/2)^nu * reduced_bessel_series(nu, z^2/4).
///
/// Truncates once the next term is below 2^{-bits-8} of the partial sum and
/// the term ratio has dropped under 1/2, so the remaining tail is bounded by
/// twice the first omitted term.
inline SeriesSum reduced_bessel_series(unsigned nu, const Real& y, long bits) {
    const long work = bits + 16;
    Real term(1L, work);
    for (unsigned i = 2; i <= nu; ++i) term /= static_cast<long>(i);
    Real sum = term;
    Real ay = abs(y);
    const Real rel = exp2i(-(bits + 8), work);
    for (long j = 1;; ++j) {
        term *= y;
        term /= j * static_cast<long>(j + nu);
        sum += term;
        // ratio of the next term to this one
        Real ratio = ay / (static_cast<long>(j + 1) * static_cast<long>(j + 1 + nu));
        Real next = abs(term) * ratio;
        if (ratio < Real(0.5, work) && next <= abs(sum) * rel) {
            return {sum, next * 2L};
        }
        if (j > 1000000) throw std::runtime_error("bessel series failed to converge");
    }
}

/// I_nu(z) by the ascending series. The working precision is raised by
/// ceil(z / ln 2) bits internally.
inline BesselResult bessel_I(unsigned nu, const Real& z, const PrecisionConfig& prec) {
    if (z.sign() < 0) throw std::domain_error("bessel_I: z must be non-negative");
    const long bits = prec.mantissa_bits;
    const long extra = static_cast<long>(std::ceil(z.to_double() / M_LN2));
    const long work = bits + extra;
    Real zw(work);
    mpfr_set(zw.get(), z.get(), MPFR_RNDN);
    Real half = zw / 2L;
    SeriesSum s = reduced_bessel_series(nu, half * half, work);
    Real scale(1L, work);
    for (unsigned i = 0; i < nu; ++i) scale *= half;
    BesselResult out;
    out.nu = nu;
    out.z = z;
    out.value = s.value * scale;
    out.tail_bound = s.value.sign() > 0 ? s.tail_bound / s.value : s.tail_bound * scale;
    out.method = BesselMethod::ascending_series;
    mpfr_prec_round(out.value.get(), bits, MPFR_RNDN);
    return out;
}

/// a_k(nu) = prod_{j=1}^{k} (4 nu^2 - (2j-1)^2) / (8^k k!), exact.
inline mpq_class hankel_coefficient(unsigned k, unsigned nu) {
    mpz_class num = 1;
    mpz_class den = 1;
    const long mu = 4L * nu * nu;
    for (unsigned j = 1; j <= k; ++j) {
        const long odd = 2L * j - 1;
        num *= mu - odd * odd;
        den *= 8L * j;
    }
    mpq_class q(num, den);
    q.canonicalize();
    return q;
}

/// e^z / sqrt(2 pi z) * sum_{k < num_terms} (-1)^k a_k(nu) / z^k.
/// Requires z >= 2 nu^2 (and z > 0).
inline BesselResult bessel_I_asymptotic(unsigned nu, const Real& z, unsigned num_terms, long bits = 0) {
    if (bits <= 0) bits = std::max<long>(z.bits(), 64);
    if (z.sign() <= 0 || z < Real(2.0 * nu * nu, 64))
        throw std::domain_error("bessel_I_asymptotic: z below applicability guard 2*nu^2");
    if (num_terms == 0) throw std::invalid_argument("bessel_I_asymptotic: num_terms must be >= 1");
    Real zw(bits);
    mpfr_set(zw.get(), z.get(), MPFR_RNDN);
    Real poly(0L, bits);
    Real zpow(1L, bits);
    for (unsigned k = 0; k < num_terms; ++k) {
        Real c(hankel_coefficient(k, nu), bits);
        if (k % 2) c = -c;
        poly += c / zpow;
        zpow *= zw;
    }
    Real lead = exp(zw) / sqrt(pi(bits) * 2L * zw);
    BesselResult out;
    out.nu = nu;
    out.z = z;
    out.value = lead * poly;
    out.method = BesselMethod::asymptotic;
    // first omitted term relative to the leading factor
    out.tail_bound = abs(Real(hankel_coefficient(num_terms, nu), bits)) / zpow;
    return out;
}

}  // namespace cubicpart
