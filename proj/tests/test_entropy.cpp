#include "meanlab/entropy.hpp"

#include "meanlab/errors.hpp"
#include "meanlab/words.hpp"

#include <doctest.h>

#include <cmath>
#include <set>

using namespace meanlab;

TEST_CASE("complete factor prefix gives log 2") {
    auto g = builtin_generator("debruijn3");
    auto curve = complexity_curve(g, g.resolution(), 3);
    CHECK(curve.p == std::vector<std::int64_t>{2, 4, 8});
    for (int n = 1; n <= 3; ++n)
        CHECK(curve.h_at(n) == doctest::Approx(std::log(2.0)).epsilon(1e-13));
    auto summary = entropy_report(curve);
    CHECK_FALSE(summary.zero_entropy_consistent);
}

TEST_CASE("sturmian complexity is n + 1") {
    auto g = builtin_generator("golden-sturmian");
    auto curve = complexity_curve(g, 10000, 20);
    for (int n = 1; n <= 20; ++n) CHECK(curve.p_at(n) == n + 1);
    auto summary = entropy_report(curve);
    CHECK(summary.h_at_nmax == doctest::Approx(std::log(21.0) / 20));
    CHECK(summary.last_quartile_slope < 0.08); // d/dn ln(n+1) ~ 1/n at n ~ 18
}

TEST_CASE("constant point has a flat curve") {
    auto g = builtin_generator("zeros");
    auto curve = complexity_curve(g, 5000, 10);
    for (int n = 1; n <= 10; ++n) {
        CHECK(curve.p_at(n) == 1);
        CHECK(curve.h_at(n) == 0.0);
    }
    auto summary = entropy_report(curve);
    CHECK(summary.zero_entropy_consistent);
    CHECK(summary.last_quartile_slope == doctest::Approx(0.0));
}

TEST_CASE("thue-morse factor counts") {
    auto g = builtin_generator("thue-morse");
    auto curve = complexity_curve(g, 20000, 8);
    CHECK(curve.p_at(1) == 2);
    CHECK(curve.p_at(2) == 4);
    CHECK(curve.p_at(3) == 6); // cube-freeness removes 000 and 111
}

TEST_CASE("counts agree with the set-of-factors oracle") {
    auto g = builtin_generator("thue-morse");
    auto prefix = g.prefix(700);
    auto curve = complexity_curve(g, 700, 9);
    for (int n = 1; n <= 9; ++n)
        CHECK(curve.p_at(n) ==
              static_cast<std::int64_t>(factors(prefix, static_cast<std::size_t>(n)).size()));
}

TEST_CASE("subadditivity of factor counts (property)") {
    SplitMix64 rng(31);
    for (int trial = 0; trial < 20; ++trial) {
        std::vector<std::uint8_t> sym;
        std::int64_t len = 200 + static_cast<std::int64_t>(rng.below(400));
        for (std::int64_t i = 0; i < len; ++i)
            sym.push_back(static_cast<std::uint8_t>(rng.next() & 1));
        auto g = PointGenerator::explicit_prefix(FiniteWord::from_symbols(sym));
        auto curve = complexity_curve(g, len, 12);
        for (int m = 1; m <= 6; ++m)
            for (int n = 1; n <= 6; ++n)
                CHECK(curve.p_at(m + n) <= curve.p_at(m) * curve.p_at(n));
    }
}

TEST_CASE("monotone refinement in L (property)") {
    auto g = builtin_generator("golden-sturmian");
    auto small = complexity_curve(g, 500, 12);
    auto large = complexity_curve(g, 2000, 12);
    for (int n = 1; n <= 12; ++n) CHECK(large.p_at(n) >= small.p_at(n));
}

TEST_CASE("curve invariants p(n+1) <= 2 p(n) and window cap") {
    auto g = builtin_generator("thue-morse");
    auto curve = complexity_curve(g, 3000, 14);
    for (int n = 1; n < 14; ++n) CHECK(curve.p_at(n + 1) <= 2 * curve.p_at(n));
    for (int n = 1; n <= 14; ++n) {
        CHECK(curve.p_at(n) <= curve.prefix_length - n + 1);
        CHECK(curve.h_at(n) <= std::log(2.0) + 1e-12);
        CHECK(curve.h_at(n) >= 0.0);
    }
}

TEST_CASE("thread-count independence") {
    auto g = builtin_generator("thue-morse");
    auto one = complexity_curve(g, 50000, 16, 1);
    auto four = complexity_curve(g, 50000, 16, 4);
    CHECK(one.p == four.p);
}

TEST_CASE("entropy error paths") {
    auto g = builtin_generator("debruijn3");
    CHECK_THROWS_AS(complexity_curve(g, 100, 3), Error);  // beyond resolution
    CHECK_THROWS_AS(complexity_curve(g, 8, 9), Error);    // n_max > L
}
