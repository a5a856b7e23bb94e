#include "meanlab/construction.hpp"

#include "meanlab/errors.hpp"
#include "meanlab/parallel.hpp"

#include <doctest.h>

#include <set>

using namespace meanlab;

namespace {

Schedule greedy6() {
    static Schedule s = synthesize_schedule(builtin_generator("thue-morse-shifted"), 6);
    return s;
}

// Independent oracle: per-constraint pass/fail from the raw definitions,
// written against Rat comparisons rather than the library's bound solving.
struct OracleInstance {
    ConstraintKind kind;
    int p, q;
    bool pass;
    bool operator<(const OracleInstance& o) const {
        return std::tie(kind, p, q, pass) < std::tie(o.kind, o.p, o.q, o.pass);
    }
    bool operator==(const OracleInstance& o) const {
        return kind == o.kind && p == o.p && q == o.q && pass == o.pass;
    }
};

std::set<OracleInstance> oracle_instances(const std::vector<std::int64_t>& gaps) {
    int levels = static_cast<int>(gaps.size());
    std::vector<std::int64_t> len{2};
    for (int m = 1; m <= levels; ++m)
        len.push_back(2 * len.back() + 2 * gaps[static_cast<std::size_t>(m - 1)] + m);
    auto d = [&](int m) {
        return len[static_cast<std::size_t>(m - 1)] + 2 * gaps[static_cast<std::size_t>(m - 1)] + m;
    };
    auto c = [&](int m) { return len[static_cast<std::size_t>(m - 1)] + m; };
    std::set<OracleInstance> out;
    for (int m = 1; m <= levels; ++m)
        out.insert({ConstraintKind::gap_dominates_block, m, 0,
                    gaps[static_cast<std::size_t>(m - 1)] > 3 * len[static_cast<std::size_t>(m - 1)]});
    for (int q = 2; q <= levels; ++q)
        for (int p = 1; p < q; ++p)
            out.insert({ConstraintKind::pair_ratio, p, q,
                        Rat(gaps[static_cast<std::size_t>(q - 1)], d(p)) > Rat(q, p)});
    for (int m = 2; m <= levels; ++m)
        out.insert({ConstraintKind::ratio_decreasing, m - 1, m,
                    Rat(c(m - 1), d(m - 1)) > Rat(c(m), d(m))});
    return out;
}

std::set<OracleInstance> report_instances(const ValidationReport& r) {
    std::set<OracleInstance> out;
    for (const auto& inst : r.instances) out.insert({inst.kind, inst.p, inst.q, inst.pass});
    return out;
}

} // namespace

TEST_CASE("greedy schedule synthesis") {
    auto one = synthesize_schedule(builtin_generator("thue-morse-shifted"), 1);
    CHECK(one.gaps == std::vector<std::int64_t>{7});

    auto two = synthesize_schedule(builtin_generator("thue-morse-shifted"), 2);
    CHECK(two.gaps == std::vector<std::int64_t>{7, 58});

    auto s = greedy6();
    CHECK(s.gaps == std::vector<std::int64_t>{7, 58, 469, 3760, 30091, 240742});
    CHECK(block_lengths(s) ==
          std::vector<std::int64_t>{2, 19, 156, 1253, 10030, 80247, 641984});

    auto report = validate_schedule(s);
    CHECK(report.all_pass);
    CHECK(report.extendable_to_level >= 7);
}

TEST_CASE("validator agrees with the constraint oracle") {
    auto s = greedy6();
    CHECK(report_instances(validate_schedule(s, 0)) == oracle_instances(s.gaps));

    // perturbed schedules, one gap lowered to the boundary: the failure
    // set must match the oracle exactly, and the binding constraint at the
    // perturbed level (k > 3|A| throughout this schedule) must be in it.
    // Lowering an early gap shrinks every later block, so downstream
    // ratio-decrease instances may flip along with it; the oracle decides.
    for (int m = 1; m <= 6; ++m) {
        Schedule p = s;
        p.gaps[static_cast<std::size_t>(m - 1)] -= 1;
        auto rep = validate_schedule(p, 0);
        CHECK_FALSE(rep.all_pass);
        auto oracle = oracle_instances(p.gaps);
        CHECK(report_instances(rep) == oracle);
        bool gap_failed = false;
        for (const auto& inst : rep.instances)
            if (!inst.pass)
                gap_failed |= inst.kind == ConstraintKind::gap_dominates_block &&
                              inst.p == m;
        CHECK(gap_failed);
    }
}

TEST_CASE("validator rejects undersized gaps") {
    Schedule bad;
    bad.base = builtin_generator("thue-morse-shifted");
    bad.levels = 2;
    bad.gaps = {1, 1};
    auto rep = validate_schedule(bad, 0);
    CHECK_FALSE(rep.all_pass);
    bool k1_failed = false;
    for (const auto& inst : rep.instances)
        if (inst.kind == ConstraintKind::gap_dominates_block && inst.p == 1)
            k1_failed = !inst.pass;
    CHECK(k1_failed);

    // (7, 35): pair ratio 35 > 2 * 17 = 34 passes, k_2 > 57 fails
    Schedule b2;
    b2.base = builtin_generator("thue-morse-shifted");
    b2.levels = 2;
    b2.gaps = {7, 35};
    auto rep2 = validate_schedule(b2, 0);
    CHECK_FALSE(rep2.all_pass);
    for (const auto& inst : rep2.instances) {
        if (inst.kind == ConstraintKind::pair_ratio) CHECK(inst.pass);
        if (inst.kind == ConstraintKind::gap_dominates_block && inst.p == 2)
            CHECK_FALSE(inst.pass);
    }
}

TEST_CASE("block construction") {
    auto s = greedy6();
    CHECK(build_block(s, 1).word.to_ascii() == "11");
    auto a2 = build_block(s, 2);
    CHECK(a2.word.to_ascii() == "1100000001000000011");
    CHECK(build_block(s, 3).word.size() == 156);

    // prefix tower: A_n heads A_{n+1}
    FiniteWord prev = build_block(s, 1).word;
    for (int n = 2; n <= 6; ++n) {
        FiniteWord cur = build_block(s, n).word;
        CHECK(cur.subword(0, prev.size()) == prev);
        prev = cur;
    }

    // boundary metadata tiles the block exactly
    auto spans = build_block(s, 4).boundaries;
    std::vector<int> covered(1253, 0);
    for (const auto& span : spans)
        for (std::int64_t t = span.begin; t < span.begin + span.length; ++t)
            covered[static_cast<std::size_t>(t)] += 1;
    for (int c : covered) CHECK(c == 1);
}

TEST_CASE("length and ones recurrences") {
    auto s = greedy6();
    std::vector<std::size_t> expected_ones{2, 5, 12, 26, 55, 113};
    for (int n = 1; n <= 6; ++n) {
        auto block = build_block(s, n);
        CHECK(ones_count(block.word) == expected_ones[static_cast<std::size_t>(n - 1)]);
        if (n < 6) {
            auto next = build_block(s, n + 1);
            CHECK(next.word.size() ==
                  2 * block.word.size() + 2 * static_cast<std::size_t>(s.gaps[static_cast<std::size_t>(n - 1)]) +
                      static_cast<std::size_t>(n));
            CHECK(ones_count(next.word) ==
                  2 * ones_count(block.word) + ones_count(s.base.prefix(n)));
        }
    }
}

TEST_CASE("the construction point") {
    auto s = greedy6();
    auto x = theorem4_point(s);
    CHECK(x.prefix(2).to_ascii() == "11");
    CHECK(x.prefix(19) == build_block(s, 2).word);
    auto lengths = block_lengths(s);
    for (int n = 1; n < 6; ++n)
        CHECK(x.symbol_at(lengths[static_cast<std::size_t>(n - 1)]) == 0);
    // beyond the top block only zeros
    CHECK(x.symbol_at(lengths[5] + 12345) == 0);
}

TEST_CASE("first absent level") {
    auto s = greedy6();
    auto n = first_absent_level(s, 10000);
    REQUIRE(n.has_value());
    CHECK(*n == 2); // "11" occurs in shifted Thue-Morse; A_2 contains 0^7

    Schedule ones_base;
    ones_base.base = builtin_generator("ones");
    ones_base.levels = 2;
    ones_base.gaps = {7, 58};
    auto n1 = first_absent_level(ones_base, 1000);
    REQUIRE(n1.has_value());
    CHECK(*n1 == 2);

    Schedule alt;
    alt.base = PointGenerator::eventually_periodic(FiniteWord(""), FiniteWord("10"));
    alt.levels = 2;
    alt.gaps = {7, 58};
    auto n2 = first_absent_level(alt, 1000);
    REQUIRE(n2.has_value());
    CHECK(*n2 == 1); // "11" never occurs in (10)^infinity
}

TEST_CASE("claim 1 holds on the greedy schedule") {
    auto s = greedy6();
    for (auto [n, m] : std::vector<std::pair<int, int>>{{2, 2}, {2, 3}, {3, 4}, {4, 4}}) {
        auto rep = check_claim1(s, n, m);
        CHECK(rep.all_pass());
        CHECK(rep.checks ==
              static_cast<std::int64_t>(build_block(s, n).word.size()) +
                  2 * s.gaps[static_cast<std::size_t>(m - 1)] + m);
    }
}

TEST_CASE("claim 1 reports violations for broken gaps") {
    Schedule bad;
    bad.base = builtin_generator("thue-morse-shifted");
    bad.levels = 2;
    bad.gaps = {7, 1};
    auto rep = check_claim1(bad, 1, 2);
    CHECK_FALSE(rep.all_pass());
    REQUIRE_FALSE(rep.violations.empty());
    // W = 11 0 11 0, d_1 = 17, c_1 = 3; at i = 5 ones = 4 > 3
    bool found = false;
    for (const auto& row : rep.violations) found |= row.i == 5 && row.lhs == 4;
    CHECK(found);
}

TEST_CASE("claim 2 holds on the greedy schedule") {
    auto s = greedy6();
    auto x = theorem4_point(s);
    std::int64_t L = block_lengths(s)[3]; // |A_4|
    auto rep = check_claim2(s, 2, x, L);
    CHECK(rep.all_pass());
    CHECK(rep.checks > 0);

    // spot-check one row against a direct count
    auto prefix = x.prefix(L);
    std::int64_t i0 = 137, j0 = 500; // second A_2 copy
    std::size_t o = 0;
    for (std::int64_t t = i0; t < j0; ++t) o += prefix[static_cast<std::size_t>(t)] == 1;
    std::int64_t d2 = 19 + 2 * 58 + 2, c2 = 21;
    CHECK(Rat(static_cast<std::int64_t>(o)) <= Rat((j0 - i0 + d2) * c2, d2));

    CHECK_THROWS_AS(check_claim2(s, 1, x, L), Error); // below first_absent_level
}

TEST_CASE("claim scans are thread-count independent") {
    auto s = greedy6();
    auto r1 = check_claim1(s, 2, 3, 1);
    auto r4 = check_claim1(s, 2, 3, 4);
    CHECK(r1.checks == r4.checks);
    CHECK(r1.violations.size() == r4.violations.size());
    CHECK(r1.tightest.i == r4.tightest.i);
    CHECK(r1.tightest.lhs == r4.tightest.lhs);

    auto x = theorem4_point(s);
    auto c1 = check_claim2(s, 2, x, 2000, 10000, 1);
    auto c4 = check_claim2(s, 2, x, 2000, 10000, 4);
    CHECK(c1.checks == c4.checks);
    CHECK(c1.tightest.i == c4.tightest.i);
    CHECK(c1.tightest.j == c4.tightest.j);
}

TEST_CASE("schedule error paths") {
    CHECK_THROWS_AS(synthesize_schedule(builtin_generator("zeros"), 2), Error);
    CHECK_THROWS_AS(synthesize_schedule(builtin_generator("thue-morse"), 2), Error);
    CHECK_THROWS_AS(synthesize_schedule(builtin_generator("thue-morse-shifted"), 12,
                                        /*prefix_budget=*/100000),
                    Error);
    auto s = greedy6();
    CHECK_THROWS_AS(build_block(s, 7), Error);
    CHECK_THROWS_AS(build_block(s, 6, /*prefix_budget=*/1000), Error);
}

TEST_CASE("gap slack scales the schedule") {
    auto s = synthesize_schedule(builtin_generator("thue-morse-shifted"), 3,
                                 std::int64_t{1} << 33, 3, 2);
    CHECK(s.gaps[0] == 10); // ceil-ish of 7 * 3/2
    CHECK(validate_schedule(s).all_pass);
}
