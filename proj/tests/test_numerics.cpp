#include "cubicpart/numerics.hpp"

#include <gtest/gtest.h>

using namespace cubicpart;

namespace {

PrecisionConfig bits(long b) {
    PrecisionConfig c;
    c.mantissa_bits = b;
    return c;
}

Real rel_diff(const Real& a, const Real& b) { return abs(a - b) / abs(b); }

}  // namespace

TEST(Precision, Validation) {
    PrecisionConfig c;
    EXPECT_NO_THROW(c.validate());
    c.mantissa_bits = 63;
    EXPECT_THROW(c.validate(), std::invalid_argument);
    c.mantissa_bits = 64;
    c.truncation_K = 0;
    EXPECT_THROW(c.validate(), std::invalid_argument);
    c.truncation_K = 1;
    c.round_tolerance = 0;
    EXPECT_THROW(c.validate(), std::invalid_argument);
}

TEST(Precision, RequiredPrecisionExamples) {
    EXPECT_EQ(required_precision(0, 1).mantissa_bits, 65);
    EXPECT_EQ(required_precision(100, 10).mantissa_bits, 114);
    const long big = required_precision(10000, 1).mantissa_bits;
    EXPECT_GE(big, 517);
    EXPECT_LE(big, 519);
    EXPECT_EQ(required_precision(100, 10).truncation_K, 10);
    EXPECT_THROW(required_precision(1, 0), std::invalid_argument);
}

TEST(Precision, RequiredPrecisionIsMonotone) {
    long prev = 0;
    for (std::uint64_t n = 0; n <= 5000; n += 7) {
        const long b = required_precision(n, 16).mantissa_bits;
        EXPECT_GE(b, prev);
        prev = b;
    }
}

TEST(Bessel, ZeroAndSmallArgument) {
    const BesselResult at0 = bessel_I(2, Real(0L, 128), bits(128));
    EXPECT_EQ(at0.value.sign(), 0);
    const Real z(1e-4, 128);
    const BesselResult small = bessel_I(2, z, bits(128));
    const Real ratio = small.value / (z * z / 8L);
    EXPECT_LT(abs(ratio - Real(1L, 128)), Real(1e-8, 64));
}

TEST(Bessel, KnownValue) {
    // I_2(1) = 0.13574766976703828118...
    EXPECT_NEAR(bessel_I(2, Real(1L, 128), bits(128)).value.to_double(), 0.13574766976703828, 1e-16);
    // I_0(1) = 1.26606587775200833559...
    EXPECT_NEAR(bessel_I(0, Real(1L, 128), bits(128)).value.to_double(), 1.2660658777520084, 1e-15);
}

TEST(Bessel, ThreeTermRecurrence) {
    const long b = 200;
    for (double zd : {0.5, 5.0, 50.0, 200.0}) {
        const Real z(zd, b);
        const Real lhs = bessel_I(1, z, bits(b)).value - bessel_I(3, z, bits(b)).value;
        const Real rhs = bessel_I(2, z, bits(b)).value * 4L / z;
        EXPECT_LT(rel_diff(lhs, rhs), Real(1e-30, b)) << zd;
    }
}

TEST(Bessel, ResultInvariants) {
    for (unsigned nu : {0u, 1u, 2u, 3u})
        for (double zd : {0.0, 0.1, 3.0, 40.0, 300.0}) {
            const BesselResult r = bessel_I(nu, Real(zd, 128), bits(128));
            EXPECT_GE(r.value.sign(), 0);
            EXPECT_EQ(r.method, BesselMethod::ascending_series);
            EXPECT_EQ(r.nu, nu);
            EXPECT_LT(r.tail_bound, exp2i(-64, 64)) << nu << " " << zd;
        }
    EXPECT_THROW(bessel_I(2, Real(-1L, 64), bits(64)), std::domain_error);
}

TEST(Bessel, StrictlyIncreasing) {
    Real prev = bessel_I(2, Real(0L, 128), bits(128)).value;
    for (int i = 1; i <= 400; ++i) {
        const Real cur = bessel_I(2, Real(0.25 * i, 128), bits(128)).value;
        EXPECT_GT(cur, prev) << i;
        prev = cur;
    }
}

TEST(Bessel, PrecisionStability) {
    for (double zd : {0.7, 9.0, 60.0, 150.0}) {
        const Real lo = bessel_I(2, Real(zd, 512), bits(128)).value;
        const Real hi = bessel_I(2, Real(zd, 512), bits(256)).value;
        EXPECT_LT(rel_diff(lo, hi), exp2i(-128 + 8, 256)) << zd;
    }
}

TEST(ReducedSeries, NegativeArgumentAlternates) {
    // sum (-1)^j / (j! (j+2)!) = J_2(2)/1 = 0.35283402861563771915...
    const SeriesSum s = reduced_bessel_series(2, Real(-1L, 128), 128);
    EXPECT_NEAR(s.value.to_double(), 0.35283402861563772, 1e-16);
    EXPECT_LT(s.tail_bound, exp2i(-120, 64));
}

TEST(Hankel, Coefficients) {
    for (unsigned nu = 0; nu < 5; ++nu) EXPECT_EQ(hankel_coefficient(0, nu), mpq_class(1));
    EXPECT_EQ(hankel_coefficient(1, 2), mpq_class(15, 8));
    EXPECT_EQ(hankel_coefficient(2, 2), mpq_class(105, 128));
    EXPECT_EQ(hankel_coefficient(4, 2), mpq_class(10395, 32768));
    EXPECT_EQ(hankel_coefficient(3, 1), mpq_class(105, 1024));
    EXPECT_EQ(hankel_coefficient(2, 3), mpq_class(945, 128));
}

TEST(Asymptotic, TwoTermForm) {
    for (double zd : {20.0, 77.0, 300.0}) {
        const Real z(zd, 128);
        const BesselResult r = bessel_I_asymptotic(2, z, 2, 128);
        const Real lead = exp(z) / sqrt(pi(128) * 2L * z);
        const Real want = lead * (Real(1L, 128) - Real(15L, 128) / (z * 8L));
        EXPECT_LT(rel_diff(r.value, want), exp2i(-120, 64));
        EXPECT_EQ(r.method, BesselMethod::asymptotic);
    }
}

TEST(Asymptotic, OneTermIsLeadingFactor) {
    const Real z(50L, 128);
    const BesselResult r = bessel_I_asymptotic(2, z, 1, 128);
    EXPECT_EQ(r.value, exp(z) / sqrt(pi(128) * 2L * z));
}

TEST(Asymptotic, AgreesWithSeriesAtHundred) {
    const Real z(100L, 256);
    const Real series = bessel_I(2, z, bits(256)).value;
    const Real asym = bessel_I_asymptotic(2, z, 4, 256).value;
    EXPECT_LT(rel_diff(asym, series), Real(1e-3, 64));
}

TEST(Asymptotic, ErrorWithinFourTimesFirstOmittedTerm) {
    for (unsigned nu : {1u, 2u, 3u})
        for (double zd : {20.0, 50.0, 100.0, 200.0})
            for (unsigned terms : {2u, 3u, 4u}) {
                const Real z(zd, 256);
                const Real series = bessel_I(nu, z, bits(256)).value;
                const Real asym = bessel_I_asymptotic(nu, z, terms, 256).value;
                Real bound = abs(Real(hankel_coefficient(terms, nu), 256)) * 4L;
                for (unsigned i = 0; i < terms; ++i) bound /= z;
                EXPECT_LT(rel_diff(asym, series), bound) << nu << " " << zd << " " << terms;
            }
}

TEST(Asymptotic, Guard) {
    EXPECT_THROW(bessel_I_asymptotic(2, Real(7.9, 64), 2), std::domain_error);
    EXPECT_THROW(bessel_I_asymptotic(2, Real(0L, 64), 2), std::domain_error);
    EXPECT_THROW(bessel_I_asymptotic(2, Real(10L, 64), 0), std::invalid_argument);
    EXPECT_NO_THROW(bessel_I_asymptotic(2, Real(8L, 64), 2));
}
