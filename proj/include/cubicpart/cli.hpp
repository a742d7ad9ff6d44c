#pragma once

// Command-line front end. `run` never calls exit(); it returns
// 0 (success), 1 (verification failure) or 2 (usage / invalid input).

#include "cubicpart/asymptotics.hpp"
#include "cubicpart/rademacher.hpp"
#include "cubicpart/series_oracle.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <atomic>
#include <chrono>
#include <iomanip>
#include <mutex>
#include <ostream>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

namespace cubicpart::cli {

enum class Format { human, json, csv };

struct Field {
    std::string key;
    std::string text;
    bool quoted = true;  // JSON string vs bare literal
};

using Row = std::vector<Field>;

inline Field str_field(std::string key, std::string text) { return {std::move(key), std::move(text), true}; }
inline Field int_field(std::string key, long long v) { return {std::move(key), std::to_string(v), false}; }
inline Field bool_field(std::string key, bool v) { return {std::move(key), v ? "true" : "false", false}; }

/// Result of one command: rows of a uniform schema plus summary fields.
struct Output {
    std::string command;
    std::vector<Row> rows;
    Row summary;
    int exit_code = 0;
    // human mode: print only this field of each row, joined by `human_join`
    std::string human_value_key;
    std::string human_join = "\n";
};

inline std::string csv_escape(const std::string& s) {
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out += '"';
        out += c;
    }
    return out + "\"";
}

inline nlohmann::ordered_json to_json(const Row& row) {
    nlohmann::ordered_json j = nlohmann::ordered_json::object();
    for (const auto& f : row) {
        if (f.quoted) j[f.key] = f.text;
        else j[f.key] = nlohmann::ordered_json::parse(f.text);
    }
    return j;
}

inline void emit(const Output& o, Format fmt, double elapsed, std::ostream& out, std::ostream& err) {
    std::ostringstream t;
    t << std::setprecision(3) << std::fixed << elapsed;
    switch (fmt) {
        case Format::json: {
            for (const auto& r : o.rows) {
                auto j = to_json(r);
                j["command"] = o.command;
                out << j.dump() << "\n";
            }
            auto s = to_json(o.summary);
            nlohmann::ordered_json rec;
            rec["command"] = o.command;
            rec["summary"] = s;
            rec["timing"] = {{"elapsed_seconds", t.str()}};
            out << rec.dump() << "\n";
            break;
        }
        case Format::csv: {
            if (!o.rows.empty()) {
                for (std::size_t i = 0; i < o.rows.front().size(); ++i)
                    out << (i ? "," : "") << csv_escape(o.rows.front()[i].key);
                out << "\n";
                for (const auto& r : o.rows) {
                    for (std::size_t i = 0; i < r.size(); ++i) out << (i ? "," : "") << csv_escape(r[i].text);
                    out << "\n";
                }
            }
            for (const auto& f : o.summary) out << "# " << f.key << "=" << f.text << "\n";
            out << "# elapsed_seconds=" << t.str() << "\n";
            break;
        }
        case Format::human: {
            if (!o.human_value_key.empty()) {
                bool first = true;
                for (const auto& r : o.rows)
                    for (const auto& f : r)
                        if (f.key == o.human_value_key) {
                            out << (first ? "" : o.human_join) << f.text;
                            first = false;
                        }
                out << "\n";
            } else {
                for (const auto& r : o.rows) {
                    for (std::size_t i = 0; i < r.size(); ++i) out << (i ? "  " : "") << r[i].key << "=" << r[i].text;
                    out << "\n";
                }
            }
            for (const auto& f : o.summary) (o.human_value_key.empty() ? out : err) << f.key << ": " << f.text << "\n";
            err << "elapsed: " << t.str() << " s\n";
            break;
        }
    }
}

/// Runs f(i) for i in [0, count) on `threads` workers; results land by index.
template <class F>
void parallel_for(std::size_t count, unsigned threads, F f) {
    threads = std::max(1u, std::min<unsigned>(threads, static_cast<unsigned>(std::max<std::size_t>(count, 1))));
    if (threads == 1) {
        for (std::size_t i = 0; i < count; ++i) f(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    std::exception_ptr failure;
    std::mutex failure_mu;
    for (unsigned t = 0; t < threads; ++t)
        pool.emplace_back([&] {
            for (;;) {
                const std::size_t i = next.fetch_add(1);
                if (i >= count) return;
                try {
                    f(i);
                } catch (...) {
                    std::lock_guard<std::mutex> lock(failure_mu);
                    if (!failure) failure = std::current_exception();
                }
            }
        });
    for (auto& th : pool) th.join();
    if (failure) std::rethrow_exception(failure);
}

inline Row report_fields(const ExactEvalReport& r, int digits) {
    return {int_field("n", r.n),
            str_field("value", r.rounded.get_str()),
            bool_field("certified", r.certified),
            int_field("K_used", r.K_used),
            int_field("precision_bits", r.precision_used),
            str_field("distance_to_integer", r.distance_to_integer.to_string(std::min(digits, 6))),
            str_field("imag_magnitude", r.imag_magnitude.to_string(std::min(digits, 6)))};
}

inline Output cmd_single(Target target, std::int64_t n, bool oracle_only, bool compare, int digits) {
    Output o;
    o.command = target == Target::cubic ? "cubic" : "partition";
    o.human_value_key = "value";
    if (target == Target::ordinary && n < 1 && !oracle_only)
        throw std::invalid_argument("partition: the exact formula needs n >= 1");
    if (n < 0) throw std::invalid_argument("n must be non-negative");
    const auto N = static_cast<std::size_t>(n);
    const mpz_class oracle = (oracle_only || compare)
                                 ? (target == Target::cubic ? cubic_table(N).values[N] : p_table(N).values[N])
                                 : mpz_class(0);
    if (oracle_only) {
        o.rows.push_back({int_field("n", n), str_field("value", oracle.get_str()), str_field("method", "oracle")});
        return o;
    }
    const ExactEvalReport rep = adaptive_certify(n, target);
    Row row = report_fields(rep, digits);
    row.push_back(str_field("method", "exact"));
    if (compare) {
        const bool match = rep.certified && rep.rounded == oracle;
        row.push_back(str_field("oracle", oracle.get_str()));
        row.push_back(bool_field("match", match));
        if (!match) o.exit_code = 1;
    }
    if (!rep.certified) {
        o.exit_code = 1;
        o.summary.push_back(str_field("diagnostics", rep.diagnostics));
    }
    o.rows.push_back(std::move(row));
    return o;
}

inline Output cmd_table(PartitionKind kind, std::size_t to) {
    Output o;
    o.command = "table";
    o.human_value_key = "value";
    o.human_join = ",";
    const PartitionTable t = make_table(kind, to);
    for (std::size_t n = 0; n <= to; ++n)
        o.rows.push_back({int_field("n", static_cast<long long>(n)), str_field("value", t.values[n].get_str())});
    o.summary.push_back(str_field("kind", to_string(kind)));
    return o;
}

inline Output cmd_verify(Target target, std::int64_t to, unsigned threads, int digits) {
    Output o;
    o.command = "verify";
    const std::int64_t from = target == Target::cubic ? 0 : 1;
    if (to < from) throw std::invalid_argument("verify: --to out of range");
    const auto N = static_cast<std::size_t>(to);
    const PartitionTable oracle = target == Target::cubic ? cubic_table(N) : p_table(N);
    const auto count = static_cast<std::size_t>(to - from + 1);
    std::vector<Row> rows(count);
    std::vector<char> ok(count, 0);
    parallel_for(count, threads, [&](std::size_t i) {
        const std::int64_t n = from + static_cast<std::int64_t>(i);
        const ExactEvalReport rep = adaptive_certify(n, target);
        const bool match = rep.certified && rep.rounded == oracle.values[static_cast<std::size_t>(n)];
        Row row = report_fields(rep, digits);
        row.push_back(str_field("oracle", oracle.values[static_cast<std::size_t>(n)].get_str()));
        row.push_back(bool_field("match", match));
        rows[i] = std::move(row);
        ok[i] = match;
    });
    o.rows = std::move(rows);
    const auto mismatches = static_cast<long long>(std::count(ok.begin(), ok.end(), 0));
    o.summary = {str_field("target", to_string(target)), int_field("checked", static_cast<long long>(count)),
                 int_field("mismatches", mismatches)};
    if (mismatches) o.exit_code = 1;
    return o;
}

inline Output cmd_congruence(PartitionKind kind, std::size_t step, std::size_t offset, unsigned long mod,
                             std::size_t to) {
    Output o;
    o.command = "congruence";
    const PartitionTable t = make_table(kind, to);
    const CongruenceReport r = check_congruence(t, step, offset, mod);
    o.rows.push_back({str_field("kind", to_string(kind)), int_field("step", static_cast<long long>(step)),
                      int_field("offset", static_cast<long long>(offset)),
                      int_field("modulus", static_cast<long long>(mod)), int_field("to", static_cast<long long>(to)),
                      int_field("checked", static_cast<long long>(r.checked_count)),
                      str_field("first_failure", r.first_failure ? std::to_string(*r.first_failure) : "none")});
    if (r.first_failure) o.exit_code = 1;
    return o;
}

inline Output cmd_convergence(Target target, std::int64_t n, long terms, int digits) {
    Output o;
    o.command = "convergence";
    if (terms < 1) throw std::invalid_argument("convergence: --terms must be >= 1");
    PrecisionConfig cfg = required_precision(static_cast<std::uint64_t>(std::max<std::int64_t>(n, 0)), terms);
    const ExactEvalReport rep = SeriesEvaluator(target, n).evaluate(cfg);
    for (std::size_t j = 0; j < rep.partial_sums.size(); ++j) {
        const Complex& s = rep.partial_sums[j];
        o.rows.push_back({int_field("k", static_cast<long long>(j + 1)), str_field("partial_re", s.re.to_string(digits)),
                          str_field("partial_im", s.im.to_string(std::min(digits, 6))),
                          str_field("distance_to_integer", distance_to_integer(s.re).to_string(std::min(digits, 6)))});
    }
    o.summary = {int_field("n", n), str_field("target", to_string(target)), str_field("rounded", rep.rounded.get_str()),
                 bool_field("certified", rep.certified), int_field("precision_bits", rep.precision_used)};
    return o;
}

inline Output cmd_conjecture(const std::vector<std::int64_t>& grid, int digits) {
    Output o;
    o.command = "conjecture";
    const auto scan = conjecture_residual_scan(grid);
    for (const auto& r : scan)
        o.rows.push_back({int_field("n", r.n), str_field("log_a", r.exact_log.to_string(digits)),
                          str_field("predicted", r.predicted.to_string(digits)),
                          str_field("residual", r.residual.to_string(std::min(digits, 12))),
                          str_field("n_residual", r.scaled_by_n.to_string(std::min(digits, 12))),
                          str_field("sqrt_n_residual", r.scaled_by_sqrt_n.to_string(std::min(digits, 12)))});
    o.summary.push_back(str_field("inverse_sqrt_coefficient", inverse_sqrt_coefficient().to_string(digits)));
    if (scan.size() >= 2) {
        const auto e = estimate_c2(scan);
        std::ostringstream v, b;
        v << std::setprecision(6) << e.value;
        b << std::setprecision(2) << e.error_bar;
        o.summary.push_back(str_field("c2_estimate", v.str()));
        o.summary.push_back(str_field("c2_error_bar", b.str()));
    }
    return o;
}

inline Output cmd_calibrate(std::int64_t max_n) {
    Output o;
    o.command = "calibrate";
    const CalibrationResult r = calibrate_conventions(max_n);
    o.rows.push_back({str_field("convention", r.flags.describe()),
                      bool_field("matches_frozen", r.flags == ConventionFlags::calibrated()),
                      int_field("candidates", static_cast<long long>(r.candidates)),
                      int_field("passed_screen", static_cast<long long>(r.screened_survivors))});
    if (!(r.flags == ConventionFlags::calibrated())) o.exit_code = 1;
    return o;
}

inline std::vector<std::int64_t> parse_grid(const std::string& s) {
    std::vector<std::int64_t> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ',')) {
        std::size_t pos = 0;
        const long long v = std::stoll(item, &pos);
        if (pos != item.size()) throw std::invalid_argument("bad grid entry: " + item);
        out.push_back(v);
    }
    if (out.empty()) throw std::invalid_argument("empty grid");
    return out;
}

inline int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"Cubic partition numbers a(n) and p(n): exact formulas, series oracle, asymptotics"};
    app.require_subcommand(1);
    app.fallthrough();  // global flags may follow the subcommand
    int digits = 30;
    bool json = false, csv = false;
    unsigned threads = 1;
    app.add_option("--digits", digits, "significant digits for real-valued output")->check(CLI::Range(1, 10000));
    auto* json_opt = app.add_flag("--json", json, "one JSON object per line");
    app.add_flag("--csv", csv, "CSV with header row")->excludes(json_opt);
    app.add_option("--threads", threads, "worker threads")->check(CLI::Range(1u, 1024u));

    std::int64_t n = 0;
    bool oracle = false, compare = false;
    auto* cubic = app.add_subcommand("cubic", "certified a(n) via the exact formula");
    auto* partition = app.add_subcommand("partition", "certified p(n) via Rademacher's series");
    for (auto* sc : {cubic, partition}) {
        sc->add_option("n", n, "index")->required();
        auto* o1 = sc->add_flag("--oracle", oracle, "use the series oracle instead");
        sc->add_flag("--compare", compare, "run both and require equality")->excludes(o1);
    }

    std::string kind = "cubic";
    std::size_t to = 0;
    auto* table = app.add_subcommand("table", "oracle table dump");
    table->add_option("--kind", kind)->check(CLI::IsMember({"cubic", "ordinary", "even_parts"}));
    table->add_option("--to", to)->required();

    std::int64_t verify_to = 0;
    auto* verify = app.add_subcommand("verify", "exact formula vs oracle sweep");
    verify->add_option("--to", verify_to)->required()->check(CLI::NonNegativeNumber);
    verify->add_option("--kind", kind)->check(CLI::IsMember({"cubic", "ordinary"}));

    std::size_t step = 1, offset = 0;
    unsigned long mod = 1;
    auto* congruence = app.add_subcommand("congruence", "check values[offset + step*n] = 0 (mod m)");
    congruence->add_option("--kind", kind)->check(CLI::IsMember({"cubic", "ordinary", "even_parts"}));
    congruence->add_option("--step", step)->required()->check(CLI::PositiveNumber);
    congruence->add_option("--offset", offset)->required();
    congruence->add_option("--mod", mod)->required()->check(CLI::PositiveNumber);
    congruence->add_option("--to", to)->required();

    long terms = 16;
    auto* convergence = app.add_subcommand("convergence", "partial sums of the exact formula");
    convergence->add_option("n", n)->required();
    convergence->add_option("--terms", terms)->required()->check(CLI::PositiveNumber);
    convergence->add_option("--kind", kind)->check(CLI::IsMember({"cubic", "ordinary"}));

    std::string grid;
    auto* conjecture = app.add_subcommand("conjecture", "log-expansion residual scan");
    conjecture->add_option("--grid", grid, "comma-separated ascending n >= 100")->required();

    std::int64_t max_n = 30;
    auto* calibrate = app.add_subcommand("calibrate", "re-run the convention calibration");
    calibrate->add_option("--max-n", max_n)->check(CLI::Range(30, 100000));

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? 0 : 2;
    }

    const Format fmt = json ? Format::json : csv ? Format::csv : Format::human;
    const auto t0 = std::chrono::steady_clock::now();
    Output o;
    try {
        if (cubic->parsed()) o = cmd_single(Target::cubic, n, oracle, compare, digits);
        else if (partition->parsed()) o = cmd_single(Target::ordinary, n, oracle, compare, digits);
        else if (table->parsed()) o = cmd_table(parse_partition_kind(kind), to);
        else if (verify->parsed()) o = cmd_verify(kind == "ordinary" ? Target::ordinary : Target::cubic, verify_to, threads, digits);
        else if (congruence->parsed()) o = cmd_congruence(parse_partition_kind(kind), step, offset, mod, to);
        else if (convergence->parsed())
            o = cmd_convergence(kind == "ordinary" ? Target::ordinary : Target::cubic, n, terms, digits);
        else if (conjecture->parsed()) o = cmd_conjecture(parse_grid(grid), digits);
        else if (calibrate->parsed()) o = cmd_calibrate(max_n);
    } catch (const std::invalid_argument& e) {
        err << "error: " << e.what() << "\n" << app.help();
        return 2;
    } catch (const std::domain_error& e) {
        err << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return 1;
    }
    const double elapsed = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    emit(o, fmt, elapsed, out, err);
    return o.exit_code;
}

}  // namespace cubicpart::cli
