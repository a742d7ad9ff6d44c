#pragma once

/**
 * @file real.hpp
 * @brief Arbitrary-precision real and complex scalars on top of MPFR.
 *
 * `Real` owns one `mpfr_t`. Binary operations produce a result whose
 * precision is the larger of the two operand precisions; all rounding is
 * round-to-nearest.
 */

#include <mpfr.h>
#include <gmpxx.h>

#include <algorithm>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <utility>

namespace cubicpart {

class Real {
public:
    static constexpr mpfr_prec_t default_bits = 64;

    explicit Real(mpfr_prec_t bits = default_bits) {
        mpfr_init2(v_, bits);
        mpfr_set_zero(v_, 1);
    }
    Real(double x, mpfr_prec_t bits) {
        mpfr_init2(v_, bits);
        mpfr_set_d(v_, x, MPFR_RNDN);
    }
    Real(long x, mpfr_prec_t bits) {
        mpfr_init2(v_, bits);
        mpfr_set_si(v_, x, MPFR_RNDN);
    }
    Real(const mpz_class& x, mpfr_prec_t bits) {
        mpfr_init2(v_, bits);
        mpfr_set_z(v_, x.get_mpz_t(), MPFR_RNDN);
    }
    Real(const mpq_class& x, mpfr_prec_t bits) {
        mpfr_init2(v_, bits);
        mpfr_set_q(v_, x.get_mpq_t(), MPFR_RNDN);
    }

    Real(const Real& o) {
        mpfr_init2(v_, mpfr_get_prec(o.v_));
        mpfr_set(v_, o.v_, MPFR_RNDN);
    }
    Real(Real&& o) noexcept {
        // Steal the limbs and leave `o` as a valid minimal-precision zero.
        v_[0] = o.v_[0];
        mpfr_init2(o.v_, MPFR_PREC_MIN);
        mpfr_set_zero(o.v_, 1);
    }
    Real& operator=(const Real& o) {
        if (this != &o) {
            mpfr_set_prec(v_, mpfr_get_prec(o.v_));
            mpfr_set(v_, o.v_, MPFR_RNDN);
        }
        return *this;
    }
    Real& operator=(Real&& o) noexcept {
        if (this != &o) mpfr_swap(v_, o.v_);
        return *this;
    }
    ~Real() { mpfr_clear(v_); }

    mpfr_prec_t bits() const { return mpfr_get_prec(v_); }
    mpfr_srcptr get() const { return v_; }
    mpfr_ptr get() { return v_; }

    double to_double() const { return mpfr_get_d(v_, MPFR_RNDN); }
    bool is_finite() const { return mpfr_number_p(v_) != 0; }
    int sign() const { return mpfr_sgn(v_); }

    /// Nearest integer (ties away from zero).
    mpz_class round() const {
        mpz_class out;
        Real t(bits());
        mpfr_round(t.v_, v_);
        mpfr_get_z(out.get_mpz_t(), t.v_, MPFR_RNDN);
        return out;
    }

    /// Scientific notation with `digits` significant digits.
    std::string to_string(int digits = 20) const {
        char* buf = nullptr;
        mpfr_asprintf(&buf, "%.*Rg", std::max(1, digits), v_);
        std::string s(buf);
        mpfr_free_str(buf);
        return s;
    }

    Real& operator+=(const Real& o) { grow(o); mpfr_add(v_, v_, o.v_, MPFR_RNDN); return *this; }
    Real& operator-=(const Real& o) { grow(o); mpfr_sub(v_, v_, o.v_, MPFR_RNDN); return *this; }
    Real& operator*=(const Real& o) { grow(o); mpfr_mul(v_, v_, o.v_, MPFR_RNDN); return *this; }
    Real& operator/=(const Real& o) { grow(o); mpfr_div(v_, v_, o.v_, MPFR_RNDN); return *this; }
    Real& operator*=(long s) { mpfr_mul_si(v_, v_, s, MPFR_RNDN); return *this; }
    Real& operator/=(long s) { mpfr_div_si(v_, v_, s, MPFR_RNDN); return *this; }

    friend Real operator+(Real a, const Real& b) { return a += b; }
    friend Real operator-(Real a, const Real& b) { return a -= b; }
    friend Real operator*(Real a, const Real& b) { return a *= b; }
    friend Real operator/(Real a, const Real& b) { return a /= b; }
    friend Real operator*(Real a, long s) { return a *= s; }
    friend Real operator/(Real a, long s) { return a /= s; }
    friend Real operator-(Real a) {
        mpfr_neg(a.v_, a.v_, MPFR_RNDN);
        return a;
    }

    friend bool operator<(const Real& a, const Real& b) { return mpfr_less_p(a.v_, b.v_) != 0; }
    friend bool operator>(const Real& a, const Real& b) { return mpfr_greater_p(a.v_, b.v_) != 0; }
    friend bool operator<=(const Real& a, const Real& b) { return mpfr_lessequal_p(a.v_, b.v_) != 0; }
    friend bool operator>=(const Real& a, const Real& b) { return mpfr_greaterequal_p(a.v_, b.v_) != 0; }
    friend bool operator==(const Real& a, const Real& b) { return mpfr_equal_p(a.v_, b.v_) != 0; }

private:
    void grow(const Real& o) {
        if (o.bits() > bits()) mpfr_prec_round(v_, o.bits(), MPFR_RNDN);
    }

    mpfr_t v_;
};

namespace detail {
template <class F>
Real unary(const Real& x, F f) {
    Real r(x.bits());
    f(r.get(), x.get(), MPFR_RNDN);
    return r;
}
}  // namespace detail

inline Real pi(mpfr_prec_t bits) {
    Real r(bits);
    mpfr_const_pi(r.get(), MPFR_RNDN);
    return r;
}
inline Real log2_const(mpfr_prec_t bits) {
    Real r(bits);
    mpfr_const_log2(r.get(), MPFR_RNDN);
    return r;
}

inline Real exp(const Real& x) { return detail::unary(x, mpfr_exp); }
inline Real log(const Real& x) { return detail::unary(x, mpfr_log); }
inline Real sqrt(const Real& x) { return detail::unary(x, mpfr_sqrt); }
inline Real abs(const Real& x) { return detail::unary(x, mpfr_abs); }
inline Real sinh(const Real& x) { return detail::unary(x, mpfr_sinh); }
inline Real cosh(const Real& x) { return detail::unary(x, mpfr_cosh); }
inline Real sin(const Real& x) { return detail::unary(x, mpfr_sin); }
inline Real cos(const Real& x) { return detail::unary(x, mpfr_cos); }
inline Real max(const Real& a, const Real& b) { return a < b ? b : a; }

inline Real pow(const Real& x, const Real& y) {
    Real r(std::max(x.bits(), y.bits()));
    mpfr_pow(r.get(), x.get(), y.get(), MPFR_RNDN);
    return r;
}

/// 2^e at the given precision.
inline Real exp2i(long e, mpfr_prec_t bits) {
    Real r(bits);
    mpfr_set_ui_2exp(r.get(), 1, e, MPFR_RNDN);
    return r;
}

/// Distance from x to the nearest integer.
inline Real distance_to_integer(const Real& x) {
    Real r(x.bits());
    mpfr_round(r.get(), x.get());
    return abs(x - r);
}

struct Complex {
    Real re;
    Real im;

    explicit Complex(mpfr_prec_t bits = Real::default_bits) : re(bits), im(bits) {}
    Complex(Real r, Real i) : re(std::move(r)), im(std::move(i)) {}

    mpfr_prec_t bits() const { return std::max(re.bits(), im.bits()); }

    Complex& operator+=(const Complex& o) {
        re += o.re;
        im += o.im;
        return *this;
    }
    Complex& operator-=(const Complex& o) {
        re -= o.re;
        im -= o.im;
        return *this;
    }
    Complex& operator*=(const Real& s) {
        re *= s;
        im *= s;
        return *this;
    }
    friend Complex operator+(Complex a, const Complex& b) { return a += b; }
    friend Complex operator-(Complex a, const Complex& b) { return a -= b; }
    friend Complex operator*(Complex a, const Real& s) { return a *= s; }
    friend Complex operator*(const Complex& a, const Complex& b) {
        return {a.re * b.re - a.im * b.im, a.re * b.im + a.im * b.re};
    }
    friend Complex operator/(const Complex& a, const Complex& b) {
        Real den = b.re * b.re + b.im * b.im;
        return {(a.re * b.re + a.im * b.im) / den, (a.im * b.re - a.re * b.im) / den};
    }
};

inline Real abs(const Complex& z) {
    Real r(z.bits());
    mpfr_hypot(r.get(), z.re.get(), z.im.get(), MPFR_RNDN);
    return r;
}

/// e^{iπ·num/den} for an exact rational angle (in units of π).
inline Complex unit_pi(const mpq_class& turns_of_pi, mpfr_prec_t bits) {
    // Reduce modulo 2 exactly so the argument handed to MPFR is small.
    mpz_class two_den = 2 * turns_of_pi.get_den();
    mpz_class num = turns_of_pi.get_num() % two_den;
    if (num < 0) num += two_den;
    mpq_class reduced(num, turns_of_pi.get_den());
    reduced.canonicalize();
    Real angle = pi(bits + 8) * Real(reduced, bits + 8);
    Complex z(bits);
    mpfr_sin_cos(z.im.get(), z.re.get(), angle.get(), MPFR_RNDN);
    return z;
}

}  // namespace cubicpart
