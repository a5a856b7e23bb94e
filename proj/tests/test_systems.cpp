#include "meanlab/systems.hpp"

#include "meanlab/errors.hpp"
#include "meanlab/words.hpp"

#include <doctest.h>

#include <string>

using namespace meanlab;

namespace {

// Independent Thue-Morse oracle: iterate the substitution on strings.
std::string tm_by_iteration(int rounds) {
    std::string s = "0";
    for (int r = 0; r < rounds; ++r) {
        std::string next;
        for (char c : s) next += (c == '0') ? "01" : "10";
        s = std::move(next);
    }
    return s;
}

} // namespace

TEST_CASE("eventually periodic generator") {
    auto g = PointGenerator::eventually_periodic(FiniteWord(""), FiniteWord("01"));
    CHECK(g.symbol_at(5) == 1);
    CHECK(g.prefix(6).to_ascii() == "010101");

    auto h = PointGenerator::eventually_periodic(FiniteWord("110"), FiniteWord("0"));
    CHECK(h.prefix(6).to_ascii() == "110000");
}

TEST_CASE("thue-morse substitution fixed point") {
    auto g = builtin_generator("thue-morse");
    CHECK(g.prefix(8).to_ascii() == "01101001");
    CHECK(g.prefix(1024).to_ascii() == tm_by_iteration(10));

    auto shifted = builtin_generator("thue-morse-shifted");
    CHECK(shifted.symbol_at(0) == 1);
    CHECK(shifted.prefix(19).to_ascii() == tm_by_iteration(10).substr(1, 19));
}

TEST_CASE("substitution preconditions") {
    // not prolongable: image of seed does not start with the seed
    CHECK_THROWS_AS(PointGenerator::substitution_fixed_point(
                        {{0, FiniteWord("10")}, {1, FiniteWord("01")}}, 0),
                    Error);
    // non-expanding seed image
    CHECK_THROWS_AS(PointGenerator::substitution_fixed_point({{0, FiniteWord("0")}}, 0),
                    Error);
}

TEST_CASE("prefix consistency under shift (property)") {
    SplitMix64 rng(77);
    auto g = builtin_generator("thue-morse");
    auto s = g.shifted(1);
    for (int trial = 0; trial < 200; ++trial) {
        std::int64_t i = static_cast<std::int64_t>(rng.below(5000));
        CHECK(s.symbol_at(i) == g.symbol_at(i + 1));
    }
    // prefix(L1) is a prefix of prefix(L2)
    auto p1 = g.prefix(100).to_ascii();
    auto p2 = g.prefix(400).to_ascii();
    CHECK(p2.substr(0, 100) == p1);
}

TEST_CASE("shift metric") {
    auto x = PointGenerator::explicit_prefix(FiniteWord("1000000000"));
    auto y = PointGenerator::explicit_prefix(FiniteWord("1100000000"));
    auto d = shift_distance(x, y, 10);
    CHECK(d.value == Rat(1, 2));
    CHECK(d.error_bound == 0);
    CHECK(d.first_difference == 2);

    auto same = shift_distance(x, x, 10);
    CHECK(same.value == 0);
    CHECK(same.error_bound == 0);

    // agreement through K = 100 gives 0 with bound 1/101
    std::vector<std::uint8_t> sym(200, 0);
    sym[100] = 1;
    auto z = PointGenerator::explicit_prefix(FiniteWord::from_symbols(sym));
    auto zeros = builtin_generator("zeros");
    auto far = shift_distance(z, zeros, 100);
    CHECK(far.value == 0);
    CHECK(far.error_bound == Rat(1, 101));
    auto seen = shift_distance(z, zeros, 150);
    CHECK(seen.value == Rat(1, 101));
}

TEST_CASE("metric axioms on random pairs (property)") {
    SplitMix64 rng(13);
    const std::int64_t K = 32;
    for (int trial = 0; trial < 300; ++trial) {
        std::vector<std::uint8_t> a(K + 1), b(K + 1), c(K + 1);
        for (std::int64_t i = 0; i <= K; ++i) {
            a[static_cast<std::size_t>(i)] = rng.next() & 1;
            b[static_cast<std::size_t>(i)] = rng.next() & 1;
            c[static_cast<std::size_t>(i)] = rng.next() & 1;
        }
        auto x = PointGenerator::explicit_prefix(FiniteWord::from_symbols(a));
        auto y = PointGenerator::explicit_prefix(FiniteWord::from_symbols(b));
        auto z = PointGenerator::explicit_prefix(FiniteWord::from_symbols(c));
        auto dxy = shift_distance(x, y, K).value;
        auto dyx = shift_distance(y, x, K).value;
        auto dyz = shift_distance(y, z, K).value;
        auto dxz = shift_distance(x, z, K).value;
        CHECK(dxy == dyx);
        CHECK(dxz <= dxy + dyz);
        CHECK(dxy <= 1);
    }
}

TEST_CASE("sturmian rational coding") {
    // alpha = 1/3, phase 0: {i/3} in [0, 2/3) -> 0; symbols: 0,0,1 repeating
    auto g = PointGenerator::sturmian_rational(1, 3, Rat(0));
    CHECK(g.prefix(9).to_ascii() == "001001001");
}

TEST_CASE("golden sturmian balance and factors") {
    auto g = builtin_generator("golden-sturmian");
    auto prefix = g.prefix(10000);
    // balance: ones counts of equal-length factors differ by at most 1
    for (std::size_t n : {3, 7, 13}) {
        auto fs = factors(prefix, n);
        std::size_t lo = n + 1, hi = 0;
        for (const auto& f : fs) {
            std::size_t o = ones_count(f);
            lo = std::min(lo, o);
            hi = std::max(hi, o);
        }
        CHECK(hi - lo <= 1);
    }
    auto f13 = factors(prefix, 13);
    CHECK(f13.size() == 14); // Sturmian complexity n + 1
}

TEST_CASE("tent step examples") {
    auto p = TentStickPoint::baseline(Rat(1, 4));
    CHECK(tent_step(p).coordinate == Rat(1, 2));

    auto s = TentStickPoint::stick(2, Rat(1, 8));
    CHECK(tent_step(s).coordinate == Rat(1, 4));
    CHECK(tent_step(s).branch == 2);

    auto fixed = TentStickPoint::stick(5, Rat(0));
    CHECK(tent_step(fixed).coordinate == 0);
}

TEST_CASE("tent dyadics reach zero") {
    SplitMix64 rng(3);
    for (int trial = 0; trial < 50; ++trial) {
        int m = 1 + static_cast<int>(rng.below(12));
        std::int64_t den = std::int64_t{1} << m;
        std::int64_t num = static_cast<std::int64_t>(rng.below(static_cast<std::uint64_t>(den)));
        auto p = TentStickPoint::baseline(Rat(num, den));
        for (int step = 0; step < m + 2; ++step) p = tent_step(p);
        CHECK(p.coordinate == 0);
    }
}

TEST_CASE("tent orbits keep their denominator") {
    auto p = TentStickPoint::baseline(Rat(3, 10));
    for (int step = 0; step < 100; ++step) {
        p = tent_step(p);
        CHECK(rat_den(p.coordinate) <= 10);
    }
    // sticks stabilize at k * q
    auto s = TentStickPoint::stick(3, Rat(3, 10));
    for (int step = 0; step < 100; ++step) {
        s = tent_step(s);
        CHECK(rat_den(s.coordinate) <= 30);
    }
}

TEST_CASE("euclidean distances in the stick space") {
    auto b0 = TentStickPoint::baseline(Rat(0));
    auto b1 = TentStickPoint::baseline(Rat(1));
    CHECK(euclidean_distance(b0, b1) == doctest::Approx(1.0));

    auto top = TentStickPoint::stick(1, Rat(1));
    auto bottom = TentStickPoint::stick(1, Rat(0));
    CHECK(euclidean_distance(top, bottom) == doctest::Approx(1.0));
    CHECK(euclidean_distance(bottom, b0) == doctest::Approx(1.0));

    CHECK(same_branch_distance(top, bottom) == 1);
    CHECK_THROWS_AS(same_branch_distance(top, b0), Error);

    // triangle inequality on random embedded triples
    SplitMix64 rng(9);
    for (int trial = 0; trial < 200; ++trial) {
        auto rnd = [&rng]() {
            int br = static_cast<int>(rng.below(4)); // 0..3
            std::int64_t den = 64;
            std::int64_t num = static_cast<std::int64_t>(rng.below(65));
            Rat c(num, den);
            if (br == 0) return TentStickPoint::baseline(c);
            return TentStickPoint::stick(br, c / br);
        };
        auto a = rnd(), b = rnd(), c = rnd();
        CHECK(euclidean_distance(a, c) <=
              euclidean_distance(a, b) + euclidean_distance(b, c) + 1e-12);
    }
}

TEST_CASE("resolution limits") {
    auto g = PointGenerator::explicit_prefix(FiniteWord("0101"));
    CHECK(g.resolution() == 4);
    CHECK_THROWS_AS(g.symbol_at(4), Error);
    CHECK_THROWS_AS(g.prefix(5), Error);
    CHECK(g.shifted(2).prefix(2).to_ascii() == "01");
}
