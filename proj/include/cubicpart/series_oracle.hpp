#pragma once

// Exact coefficient tables for
//   sum p(n) q^n = 1 / prod (1 - q^n)
//   sum a(n) q^n = 1 / prod (1 - q^n)(1 - q^{2n}).

#include <gmpxx.h>

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace cubicpart {

enum class PartitionKind { ordinary, even_parts, cubic };

inline std::string to_string(PartitionKind kind) {
    switch (kind) {
        case PartitionKind::ordinary: return "ordinary";
        case PartitionKind::even_parts: return "even_parts";
        case PartitionKind::cubic: return "cubic";
    }
    return "?";
}

inline PartitionKind parse_partition_kind(const std::string& s) {
    if (s == "ordinary" || s == "partition") return PartitionKind::ordinary;
    if (s == "even_parts") return PartitionKind::even_parts;
    if (s == "cubic") return PartitionKind::cubic;
    throw std::invalid_argument("unknown partition kind: " + s);
}

struct PartitionTable {
    PartitionKind kind = PartitionKind::ordinary;
    std::vector<mpz_class> values;

    std::size_t max_index() const { return values.empty() ? 0 : values.size() - 1; }
    const mpz_class& operator[](std::size_t n) const { return values.at(n); }
};

/// p(0..N) by Euler's pentagonal recurrence.
inline PartitionTable p_table(std::size_t N) {
    PartitionTable t;
    t.kind = PartitionKind::ordinary;
    t.values.assign(N + 1, 0);
    t.values[0] = 1;
    for (std::size_t n = 1; n <= N; ++n) {
        mpz_class acc = 0;
        for (std::size_t j = 1;; ++j) {
            const std::size_t g1 = j * (3 * j - 1) / 2;
            if (g1 > n) break;
            const bool plus = j % 2 == 1;
            if (plus) acc += t.values[n - g1]; else acc -= t.values[n - g1];
            const std::size_t g2 = j * (3 * j + 1) / 2;
            if (g2 <= n) {
                if (plus) acc += t.values[n - g2]; else acc -= t.values[n - g2];
            }
        }
        t.values[n] = acc;
    }
    return t;
}

/// Partitions into even parts: p(n/2) for even n, 0 otherwise.
inline PartitionTable even_parts_table(const PartitionTable& p, std::size_t N) {
    if (p.kind != PartitionKind::ordinary || p.max_index() < N / 2)
        throw std::invalid_argument("even_parts_table: ordinary table too short");
    PartitionTable t;
    t.kind = PartitionKind::even_parts;
    t.values.assign(N + 1, 0);
    for (std::size_t n = 0; n <= N; n += 2) t.values[n] = p.values[n / 2];
    return t;
}

/// a(n) = sum_{2j <= n} p(j) p(n - 2j), using a precomputed ordinary table.
inline mpz_class cubic_value(std::size_t n, const PartitionTable& p) {
    if (p.kind != PartitionKind::ordinary || p.max_index() < n)
        throw std::invalid_argument("cubic_value: ordinary table too short");
    mpz_class acc = 0;
    for (std::size_t j = 0; 2 * j <= n; ++j) acc += p.values[j] * p.values[n - 2 * j];
    return acc;
}

/// a(0..N) by convolving p with the even-part table.
inline PartitionTable cubic_table(std::size_t N) {
    const PartitionTable p = p_table(N);
    PartitionTable t;
    t.kind = PartitionKind::cubic;
    t.values.resize(N + 1);
    for (std::size_t n = 0; n <= N; ++n) t.values[n] = cubic_value(n, p);
    return t;
}

inline PartitionTable make_table(PartitionKind kind, std::size_t N) {
    switch (kind) {
        case PartitionKind::ordinary: return p_table(N);
        case PartitionKind::even_parts: return even_parts_table(p_table(N / 2), N);
        case PartitionKind::cubic: return cubic_table(N);
    }
    throw std::invalid_argument("make_table: bad kind");
}

struct CongruenceReport {
    std::size_t checked_count = 0;
    std::optional<std::size_t> first_failure;
};

/// Checks values[offset + step*n] == 0 (mod modulus) over the whole table.
inline CongruenceReport check_congruence(const PartitionTable& table, std::size_t step, std::size_t offset,
                                         unsigned long modulus) {
    if (step == 0) throw std::invalid_argument("check_congruence: step must be positive");
    if (modulus == 0) throw std::invalid_argument("check_congruence: modulus must be positive");
    if (offset >= step) throw std::invalid_argument("check_congruence: offset must be < step");
    CongruenceReport r;
    if (table.values.empty()) return r;
    for (std::size_t i = offset; i <= table.max_index(); i += step) {
        ++r.checked_count;
        if (!mpz_divisible_ui_p(table.values[i].get_mpz_t(), modulus)) {
            r.first_failure = i;
            break;
        }
    }
    return r;
}

}  // namespace cubicpart
