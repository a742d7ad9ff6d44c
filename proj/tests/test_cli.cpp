#include "cubicpart/cli.hpp"

#include <gtest/gtest.h>

#include <sstream>

namespace {

struct Result {
    int code;
    std::string out;
    std::string err;
};

Result run(std::vector<std::string> args) {
    args.insert(args.begin(), "cubicpart");
    std::vector<const char*> argv;
    for (const auto& a : args) argv.push_back(a.c_str());
    std::ostringstream out, err;
    const int code = cubicpart::cli::run(static_cast<int>(argv.size()), argv.data(), out, err);
    return {code, out.str(), err.str()};
}

std::vector<std::string> lines(const std::string& s) {
    std::vector<std::string> v;
    std::istringstream is(s);
    for (std::string line; std::getline(is, line);) v.push_back(line);
    return v;
}

/// JSON records without the trailing summary/timing record.
std::vector<nlohmann::json> json_rows(const std::string& s) {
    std::vector<nlohmann::json> rows;
    for (const auto& line : lines(s)) {
        auto j = nlohmann::json::parse(line);
        if (!j.contains("summary")) rows.push_back(std::move(j));
    }
    return rows;
}

}  // namespace

TEST(Cli, CubicThree) {
    const Result r = run({"cubic", "3"});
    EXPECT_EQ(r.code, 0);
    EXPECT_EQ(r.out, "4\n");
}

TEST(Cli, TableFirstSeven) {
    const Result r = run({"table", "--kind", "cubic", "--to", "6"});
    EXPECT_EQ(r.code, 0);
    EXPECT_EQ(r.out, "1,1,3,4,9,12,23\n");
    EXPECT_EQ(run({"table", "--kind", "ordinary", "--to", "5"}).out, "1,1,2,3,5,7\n");
}

TEST(Cli, VerifySweepSucceeds) {
    const Result r = run({"--csv", "verify", "--to", "200"});
    EXPECT_EQ(r.code, 0) << r.err;
    EXPECT_NE(r.out.find("# mismatches=0"), std::string::npos);
    EXPECT_NE(r.out.find("# checked=201"), std::string::npos);
}

TEST(Cli, PartitionCompare) {
    const Result r = run({"--json", "partition", "100", "--compare"});
    EXPECT_EQ(r.code, 0) << r.err;
    const auto rows = json_rows(r.out);
    ASSERT_EQ(rows.size(), 1u);
    EXPECT_EQ(rows[0]["value"], "190569292");
    EXPECT_EQ(rows[0]["oracle"], "190569292");
    EXPECT_EQ(rows[0]["match"], true);
    EXPECT_EQ(rows[0]["certified"], true);
}

TEST(Cli, OracleFlag) {
    const Result r = run({"cubic", "30", "--oracle"});
    EXPECT_EQ(r.code, 0);
    EXPECT_EQ(r.out, "46092\n");
    EXPECT_EQ(run({"partition", "0", "--oracle"}).out, "1\n");
}

TEST(Cli, CongruenceExitCodes) {
    const Result ok = run({"--json", "congruence", "--kind", "cubic", "--step", "3", "--offset", "2", "--mod", "3",
                           "--to", "2000"});
    EXPECT_EQ(ok.code, 0);
    const auto rows = json_rows(ok.out);
    ASSERT_EQ(rows.size(), 1u);
    EXPECT_EQ(rows[0]["checked"], 667);
    EXPECT_EQ(rows[0]["first_failure"], "none");
    const Result p5 = run({"congruence", "--kind", "ordinary", "--step", "5", "--offset", "4", "--mod", "5", "--to",
                           "2000"});
    EXPECT_EQ(p5.code, 0);
    const Result bad = run({"congruence", "--kind", "cubic", "--step", "3", "--offset", "1", "--mod", "3", "--to",
                            "50"});
    EXPECT_EQ(bad.code, 1);
}

TEST(Cli, UsageErrorsExitTwo) {
    EXPECT_EQ(run({}).code, 2);
    EXPECT_EQ(run({"bogus"}).code, 2);
    EXPECT_EQ(run({"table", "--kind", "cubic"}).code, 2);
    EXPECT_EQ(run({"table", "--kind", "pairs", "--to", "3"}).code, 2);
    EXPECT_EQ(run({"--json", "--csv", "cubic", "3"}).code, 2);
    EXPECT_EQ(run({"cubic", "three"}).code, 2);
    EXPECT_EQ(run({"partition", "0"}).code, 2);
    EXPECT_EQ(run({"conjecture", "--grid", "50,100"}).code, 2);
    EXPECT_EQ(run({"conjecture", "--grid", "100,x"}).code, 2);
    EXPECT_EQ(run({"congruence", "--step", "3", "--offset", "3", "--mod", "3", "--to", "9"}).code, 2);
    EXPECT_EQ(run({"--threads", "0", "cubic", "3"}).code, 2);
    EXPECT_EQ(run({"--help"}).code, 0);
}

TEST(Cli, JsonAndCsvCarryIdenticalStrings) {
    const Result j = run({"--json", "--digits", "12", "verify", "--to", "40"});
    const Result c = run({"--csv", "--digits", "12", "verify", "--to", "40"});
    ASSERT_EQ(j.code, 0);
    ASSERT_EQ(c.code, 0);
    const auto rows = json_rows(j.out);
    auto csv = lines(c.out);
    ASSERT_EQ(rows.size(), 41u);
    const auto header = csv[0];
    std::vector<std::string> keys;
    {
        std::istringstream is(header);
        for (std::string k; std::getline(is, k, ',');) keys.push_back(k);
    }
    for (std::size_t i = 0; i < rows.size(); ++i) {
        std::istringstream is(csv[i + 1]);
        std::size_t col = 0;
        for (std::string cell; std::getline(is, cell, ','); ++col) {
            const auto& v = rows[i][keys[col]];
            const std::string js = v.is_string() ? v.get<std::string>() : v.dump();
            EXPECT_EQ(js, cell) << keys[col] << " row " << i;
        }
        EXPECT_EQ(col, keys.size());
    }
}

TEST(Cli, ThreadCountDoesNotChangeResults) {
    const Result one = run({"--json", "verify", "--to", "80", "--threads", "1"});
    const Result four = run({"--json", "verify", "--to", "80", "--threads", "4"});
    ASSERT_EQ(one.code, 0);
    ASSERT_EQ(four.code, 0);
    const auto a = json_rows(one.out), b = json_rows(four.out);
    ASSERT_EQ(a.size(), b.size());
    for (std::size_t i = 0; i < a.size(); ++i) EXPECT_EQ(a[i].dump(), b[i].dump()) << i;
}

TEST(Cli, RecordsRoundTrip) {
    const Result first = run({"--json", "cubic", "57"});
    ASSERT_EQ(first.code, 0);
    const auto rows = json_rows(first.out);
    ASSERT_EQ(rows.size(), 1u);
    const std::string n = rows[0]["n"].dump();
    const Result again = run({"--json", rows[0]["command"].get<std::string>(), n});
    EXPECT_EQ(json_rows(again.out)[0].dump(), rows[0].dump());
}

TEST(Cli, SummaryAndTiming) {
    const Result r = run({"--json", "table", "--kind", "cubic", "--to", "3"});
    const auto all = lines(r.out);
    ASSERT_EQ(all.size(), 5u);
    const auto last = nlohmann::json::parse(all.back());
    EXPECT_EQ(last["command"], "table");
    EXPECT_EQ(last["summary"]["kind"], "cubic");
    EXPECT_TRUE(last["timing"].contains("elapsed_seconds"));
    EXPECT_NE(run({"cubic", "3"}).err.find("elapsed"), std::string::npos);
}

TEST(Cli, ConvergenceRows) {
    const Result r = run({"--json", "convergence", "50", "--terms", "8"});
    EXPECT_EQ(r.code, 0);
    const auto rows = json_rows(r.out);
    ASSERT_EQ(rows.size(), 8u);
    EXPECT_EQ(rows[0]["k"], 1);
    EXPECT_EQ(rows[7]["k"], 8);
    const auto last = nlohmann::json::parse(lines(r.out).back());
    EXPECT_EQ(last["summary"]["rounded"], "3741741");
}

TEST(Cli, ConjectureScan) {
    const Result r = run({"--json", "conjecture", "--grid", "100,1000,10000"});
    EXPECT_EQ(r.code, 0) << r.err;
    const auto rows = json_rows(r.out);
    ASSERT_EQ(rows.size(), 3u);
    EXPECT_EQ(rows[2]["n"], 10000);
    const auto last = nlohmann::json::parse(lines(r.out).back());
    EXPECT_TRUE(last["summary"].contains("c2_estimate"));
    EXPECT_TRUE(last["summary"].contains("c2_error_bar"));
}

TEST(Cli, GlobalFlagsInEitherPosition) {
    const Result before = run({"--json", "table", "--to", "4"});
    const Result after = run({"table", "--to", "4", "--json"});
    EXPECT_EQ(json_rows(before.out).size(), 5u);
    EXPECT_EQ(json_rows(after.out).size(), 5u);
}

TEST(Cli, GridParsing) {
    EXPECT_EQ(cubicpart::cli::parse_grid("100,200"), (std::vector<std::int64_t>{100, 200}));
    EXPECT_THROW(cubicpart::cli::parse_grid(""), std::invalid_argument);
    EXPECT_THROW(cubicpart::cli::parse_grid("1e3"), std::invalid_argument);
}
