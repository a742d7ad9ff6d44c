#include "cubicpart/asymptotics.hpp"
#include "cubicpart/numerics.hpp"

#include <gtest/gtest.h>

using namespace cubicpart;

namespace {

constexpr long kBits = 256;

mpz_class a(std::int64_t n) {
    static const PartitionTable p = p_table(20000);
    return cubic_value(static_cast<std::size_t>(n), p);
}

Real ratio_to_leading(std::int64_t n) {
    return Real(a(n), kBits) / leading_asymptotic(n, kBits);
}

}  // namespace

TEST(Leading, RatioAtTwoThousand) {
    const double r = ratio_to_leading(2000).to_double();
    EXPECT_GE(r, 0.98);
    EXPECT_LE(r, 1.0);
    // 1 - 15/(8 z) with z = pi sqrt(2000 - 1/8)
    const double z = M_PI * std::sqrt(2000.0 - 0.125);
    EXPECT_NEAR(r, 1.0 - 15.0 / (8.0 * z), 2e-3);
}

TEST(Leading, RatioIncreasesTowardOne) {
    double prev = 0;
    for (std::int64_t n : {500L, 1000L, 2000L, 5000L}) {
        const double r = ratio_to_leading(n).to_double();
        EXPECT_GT(r, prev) << n;
        EXPECT_LT(r, 1.0) << n;
        prev = r;
    }
}

TEST(Leading, DeviationBoundedByBesselCorrection) {
    for (std::int64_t n : {1000L, 2000L, 5000L}) {
        const double dev = std::abs(ratio_to_leading(n).to_double() - 1.0);
        const double bound = 15.0 / (8.0 * M_PI * std::sqrt(static_cast<double>(n) - 0.125)) + 0.01;
        EXPECT_LT(dev, bound) << n;
    }
}

TEST(Leading, OneTermBesselSubstitution) {
    for (std::int64_t n : {10L, 37L, 1000L}) {
        const Real N(mpq_class(8 * n - 1, 8), kBits);
        const Real z = pi(kBits) * sqrt(N);
        const Real via_bessel =
            pi(kBits) / (sqrt(Real(2L, kBits)) * 4L * N) * bessel_I_asymptotic(2, z, 1, kBits).value;
        const Real direct = leading_asymptotic(n, kBits);
        EXPECT_LT(abs(via_bessel - direct) / direct, exp2i(-(kBits - 8), 64)) << n;
    }
    EXPECT_THROW(leading_asymptotic(0), std::domain_error);
}

TEST(LogExpansion, Coefficient) {
    const double c = inverse_sqrt_coefficient().to_double();
    EXPECT_NEAR(c, 15.0 / (8.0 * M_PI) + M_PI / 16.0, 1e-15);
    EXPECT_NEAR(c, 0.7932, 1e-4);
}

TEST(LogExpansion, OrderZeroAtOne) {
    const Real v = log_expansion(1, 0, kBits);
    const Real want = pi(kBits) - log(Real(8L, kBits));
    EXPECT_LT(abs(v - want), exp2i(-(kBits - 8), 64));
    EXPECT_THROW(log_expansion(0, 0), std::domain_error);
    EXPECT_THROW(log_expansion(10, 2), std::invalid_argument);
}

TEST(LogExpansion, OrderOneIsCloserAtTenThousand) {
    const Real la = log_of(a(10000), kBits);
    EXPECT_LT(abs(la - log_expansion(10000, 1, kBits)), abs(la - log_expansion(10000, 0, kBits)));
}

TEST(LogExpansion, ExactLogBracketed) {
    for (std::int64_t n : {1000L, 2000L, 5000L, 10000L, 20000L}) {
        const Real la = log_of(a(n), kBits);
        EXPECT_LT(log_expansion(n, 1, kBits), la) << n;
        EXPECT_LT(la, log_expansion(n, 0, kBits)) << n;
    }
}

TEST(Scan, ResidualStructure) {
    const auto scan = conjecture_residual_scan({100, 1000, 10000});
    ASSERT_EQ(scan.size(), 3u);
    for (std::size_t i = 0; i < scan.size(); ++i) {
        EXPECT_TRUE(scan[i].residual.is_finite());
        EXPECT_EQ(scan[i].expansion_order, 1);
        EXPECT_EQ(abs(scan[i].residual - (scan[i].exact_log - scan[i].predicted)).sign(), 0);
        if (i) {
            EXPECT_LT(abs(scan[i].residual), abs(scan[i - 1].residual));
            EXPECT_LT(abs(scan[i].scaled_by_sqrt_n), abs(scan[i - 1].scaled_by_sqrt_n));
        }
    }
}

TEST(Scan, InverseNRemainder) {
    const auto scan = conjecture_residual_scan({5000, 20000});
    const double a = scan[0].scaled_by_n.to_double(), b = scan[1].scaled_by_n.to_double();
    ASSERT_GT(a * b, 0.0);
    EXPECT_LT(std::max(a, b) / std::min(a, b), 1.5);
}

TEST(Scan, ResidualDecreasesOnGeometricGrid) {
    const auto scan = conjecture_residual_scan({125, 250, 500, 1000, 2000, 4000, 8000, 16000});
    for (std::size_t i = 1; i < scan.size(); ++i) EXPECT_LT(abs(scan[i].residual), abs(scan[i - 1].residual));
}

TEST(Scan, Preconditions) {
    EXPECT_TRUE(conjecture_residual_scan({}).empty());
    EXPECT_THROW(conjecture_residual_scan({99, 200}), std::domain_error);
    EXPECT_THROW(conjecture_residual_scan({200, 100}), std::invalid_argument);
    EXPECT_THROW(conjecture_residual_scan({200, 200}), std::invalid_argument);
}

TEST(C2Estimate, StableWithErrorBar) {
    const auto scan = conjecture_residual_scan({2500, 5000, 10000, 20000});
    const CoefficientEstimate e = estimate_c2(scan);
    EXPECT_TRUE(std::isfinite(e.value));
    EXPECT_GE(e.error_bar, 0.0);
    // the estimate sits near the plateau of n r(n)
    EXPECT_NEAR(e.value, scan.back().scaled_by_n.to_double(), 0.01);
    EXPECT_THROW(estimate_c2({scan.front()}), std::invalid_argument);
}

TEST(LogOf, Errors) {
    EXPECT_THROW(log_of(mpz_class(0), 64), std::domain_error);
    EXPECT_EQ(log_of(mpz_class(1), 64).sign(), 0);
}
