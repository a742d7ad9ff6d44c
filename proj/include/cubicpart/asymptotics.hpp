#pragma once

// Asymptotic growth of a(n) and the log-expansion
//   log a(n) = pi sqrt n - (5/4) log n - log 8 - (15/(8 pi) + pi/16) / sqrt n + r(n).
// Exact logs always come from the series oracle, never from the exact formula.

#include "cubicpart/real.hpp"
#include "cubicpart/series_oracle.hpp"

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <vector>

namespace cubicpart {

/// e^{pi sqrt(n - 1/8)} / (8 (n - 1/8)^{5/4}).
inline Real leading_asymptotic(std::int64_t n, long bits = 128) {
    if (n < 1) throw std::domain_error("leading_asymptotic: n must be >= 1");
    const Real N(mpq_class(8 * n - 1, 8), bits);
    const Real root = sqrt(N);
    return exp(pi(bits) * root) / (sqrt(root) * N * 8L);
}

/// 15/(8 pi) + pi/16.
inline Real inverse_sqrt_coefficient(long bits = 128) {
    const Real p = pi(bits);
    return Real(15L, bits) / (p * 8L) + p / 16L;
}

inline Real log_expansion(std::int64_t n, int order, long bits = 128) {
    if (n < 1) throw std::domain_error("log_expansion: n must be >= 1");
    if (order != 0 && order != 1) throw std::invalid_argument("log_expansion: order must be 0 or 1");
    const Real x(static_cast<long>(n), bits);
    const Real root = sqrt(x);
    Real out = pi(bits) * root - log(x) * Real(1.25, bits) - log(Real(8L, bits));
    if (order == 1) out -= inverse_sqrt_coefficient(bits) / root;
    return out;
}

inline Real log_of(const mpz_class& v, long bits) {
    if (v <= 0) throw std::domain_error("log_of: value must be positive");
    return log(Real(v, bits));
}

struct AsymptoticReport {
    std::int64_t n = 0;
    Real exact_log;
    Real predicted;
    Real residual;
    int expansion_order = 1;
    Real scaled_by_n;        // n * r(n)
    Real scaled_by_sqrt_n;   // sqrt(n) * r(n)
};

/// Residuals of the order-1 log-expansion on an ascending grid of n >= 100.
inline std::vector<AsymptoticReport> conjecture_residual_scan(const std::vector<std::int64_t>& grid, long bits = 256) {
    if (grid.empty()) return {};
    for (std::size_t i = 0; i < grid.size(); ++i) {
        if (grid[i] < 100) throw std::domain_error("conjecture_residual_scan: grid points must be >= 100");
        if (i && grid[i] <= grid[i - 1]) throw std::invalid_argument("conjecture_residual_scan: grid must ascend");
    }
    const PartitionTable p = p_table(static_cast<std::size_t>(grid.back()));
    std::vector<AsymptoticReport> out;
    for (std::int64_t n : grid) {
        AsymptoticReport r;
        r.n = n;
        r.expansion_order = 1;
        r.exact_log = log_of(cubic_value(static_cast<std::size_t>(n), p), bits);
        r.predicted = log_expansion(n, 1, bits);
        r.residual = r.exact_log - r.predicted;
        r.scaled_by_n = r.residual * static_cast<long>(n);
        r.scaled_by_sqrt_n = r.residual * sqrt(Real(static_cast<long>(n), bits));
        out.push_back(std::move(r));
    }
    return out;
}

struct CoefficientEstimate {
    double value = 0;
    double error_bar = 0;
};

/**
 * Estimate of c_2 in r(n) = c_2/n + c_3/n^{3/2} + ... from n r(n) on a grid.
 * Each consecutive pair (n1, n2) gives a Richardson value eliminating the
 * n^{-1/2} term; the estimate is the last one and the error bar the spread
 * between the last two (or between the last value and the raw n r(n) when
 * only one pair exists).
 */
inline CoefficientEstimate estimate_c2(const std::vector<AsymptoticReport>& scan) {
    if (scan.size() < 2) throw std::invalid_argument("estimate_c2: need at least two grid points");
    std::vector<double> rich;
    for (std::size_t i = 1; i < scan.size(); ++i) {
        const double n1 = static_cast<double>(scan[i - 1].n), n2 = static_cast<double>(scan[i].n);
        const double f1 = scan[i - 1].scaled_by_n.to_double(), f2 = scan[i].scaled_by_n.to_double();
        // f(n) = c + d / sqrt(n)  =>  c = (sqrt(n2) f2 - sqrt(n1) f1) / (sqrt(n2) - sqrt(n1))
        rich.push_back((std::sqrt(n2) * f2 - std::sqrt(n1) * f1) / (std::sqrt(n2) - std::sqrt(n1)));
    }
    CoefficientEstimate e;
    e.value = rich.back();
    e.error_bar = rich.size() >= 2 ? std::abs(rich.back() - rich[rich.size() - 2])
                                   : std::abs(rich.back() - scan.back().scaled_by_n.to_double());
    return e;
}

}  // namespace cubicpart
