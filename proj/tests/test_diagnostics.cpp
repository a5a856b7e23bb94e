#include "meanlab/diagnostics.hpp"

#include "meanlab/construction.hpp"
#include "meanlab/errors.hpp"
#include "meanlab/io.hpp"

#include <nlohmann/json.hpp>

#include <doctest.h>

using namespace meanlab;

namespace {

// Independent oracle: window means by direct summation over all lengths.
Rat brute_window_max(const std::vector<Rat>& steps, std::int64_t W) {
    std::int64_t N = static_cast<std::int64_t>(steps.size());
    bool first = true;
    Rat best;
    for (std::int64_t L = W; L <= N; ++L)
        for (std::int64_t M = 0; M + L <= N; ++M) {
            Rat sum = 0;
            for (std::int64_t t = M; t < M + L; ++t) sum += steps[static_cast<std::size_t>(t)];
            Rat v = sum / L;
            if (first || v > best) best = v;
            first = false;
        }
    return best;
}

std::vector<Rat> random_steps(SplitMix64& rng, std::int64_t n) {
    std::vector<Rat> steps;
    for (std::int64_t i = 0; i < n; ++i) {
        std::uint64_t den = 1 + rng.below(9);
        std::uint64_t num = rng.below(den + 1);
        steps.emplace_back(static_cast<std::int64_t>(num), static_cast<std::int64_t>(den));
    }
    return steps;
}

} // namespace

TEST_CASE("profile of a single differing step") {
    auto x = builtin_generator("zeros");
    auto y = PointGenerator::eventually_periodic(FiniteWord("1"), FiniteWord("0"));
    auto p = birkhoff_profile(x, y, 200, 50);
    CHECK(p.f(1) == 1);
    CHECK(p.f(4) == Rat(1, 4));
    CHECK(p.f(200) == Rat(1, 200));
    auto tail = tail_limsup(p, 100);
    CHECK(tail.max_value == Rat(1, 100));
    CHECK(tail.min_value == Rat(1, 200));
}

TEST_CASE("profile of identical and antipodal orbits") {
    auto x = builtin_generator("zeros");
    auto p = birkhoff_profile(x, x, 100, 20);
    CHECK(p.f(100) == 0);
    CHECK(p.error_bound(100) == Rat(1, 21)); // every step is a truncated zero

    auto a = builtin_generator("alternating");          // 0101...
    auto b = a.shifted(1);                              // 1010...
    auto q = birkhoff_profile(a, b, 100, 20);
    CHECK(q.f(100) == 1); // disagreement at the first symbol forever
    auto tail = tail_limsup(q, 10);
    CHECK(tail.max_value == 1);
    CHECK(tail.min_value == 1);
}

TEST_CASE("averaging stability (property)") {
    SplitMix64 rng(15);
    for (int trial = 0; trial < 25; ++trial) {
        auto steps = random_steps(rng, 40 + static_cast<std::int64_t>(rng.below(60)));
        auto p = BirkhoffProfile::from_steps(steps, 1.0);
        for (std::int64_t n = 1; n < p.horizon; ++n) {
            Rat diff = p.f(n + 1) - p.f(n);
            if (diff < 0) diff = -diff;
            CHECK(diff <= Rat(1) / (n + 1));
        }
    }
}

TEST_CASE("banach window max matches the brute-force oracle (property)") {
    SplitMix64 rng(99);
    for (int trial = 0; trial < 30; ++trial) {
        std::int64_t n = 10 + static_cast<std::int64_t>(rng.below(70));
        std::int64_t W = 1 + static_cast<std::int64_t>(rng.below(static_cast<std::uint64_t>(n)));
        auto steps = random_steps(rng, n);
        auto p = BirkhoffProfile::from_steps(steps, 1.0);
        CHECK(banach_profile(p, W).value == brute_window_max(steps, W));
    }
}

TEST_CASE("banach dominates the Cesaro mean (property)") {
    SplitMix64 rng(42);
    for (int trial = 0; trial < 40; ++trial) {
        std::int64_t n = 20 + static_cast<std::int64_t>(rng.below(100));
        std::int64_t W = 1 + static_cast<std::int64_t>(rng.below(static_cast<std::uint64_t>(n)));
        auto p = BirkhoffProfile::from_steps(random_steps(rng, n), 1.0);
        CHECK(banach_profile(p, W).value >= p.f(n));
    }
}

TEST_CASE("banach vs cesaro separation on the burst sequence") {
    // steps 1 on [2^k, 2^k + k), else 0
    const std::int64_t N = 1000000;
    std::vector<Rat> steps(static_cast<std::size_t>(N), Rat(0));
    for (int k = 1; (std::int64_t{1} << k) < N; ++k) {
        std::int64_t base = std::int64_t{1} << k;
        for (std::int64_t i = base; i < std::min(N, base + k); ++i)
            steps[static_cast<std::size_t>(i)] = 1;
    }
    auto p = BirkhoffProfile::from_steps(std::move(steps), 1.0);
    auto banach = banach_profile(p, 19);
    CHECK(banach.value == 1); // whole window inside the k = 19 burst

    auto tail = tail_limsup(p, 100000);
    // counts stall at 1+..+16 = 136 until the burst at 2^17, so the tail
    // max sits at the tail start itself
    CHECK(tail.max_value == Rat(136, 100000));
    CHECK(tail.max_value <= Rat(1, 100));
}

TEST_CASE("triangle transfer with resolution slack (property)") {
    SplitMix64 rng(1234);
    const std::int64_t N = 60, K = 16, N0 = 10;
    for (int trial = 0; trial < 60; ++trial) {
        std::vector<std::uint8_t> a, b, c;
        for (std::int64_t i = 0; i < N + K; ++i) {
            a.push_back(rng.next() & 1);
            b.push_back(rng.next() & 1);
            c.push_back(rng.next() & 1);
        }
        auto x = PointGenerator::explicit_prefix(FiniteWord::from_symbols(a));
        auto y = PointGenerator::explicit_prefix(FiniteWord::from_symbols(b));
        auto z = PointGenerator::explicit_prefix(FiniteWord::from_symbols(c));
        auto txz = tail_limsup(birkhoff_profile(x, z, N, K), N0).max_value;
        auto txy = tail_limsup(birkhoff_profile(x, y, N, K), N0).max_value;
        auto tyz = tail_limsup(birkhoff_profile(y, z, N, K), N0).max_value;
        CHECK(txz <= txy + tyz + Rat(3, K + 1));
    }
}

TEST_CASE("cesaro tail is shift-stable (property)") {
    auto s = synthesize_schedule(builtin_generator("thue-morse-shifted"), 5);
    auto x = theorem4_point(s);
    const std::int64_t N = 600, K = 30, N0 = 200;
    auto base = tail_limsup(birkhoff_profile(x, x.shifted(137), N, K), N0).max_value;
    for (std::int64_t k : {1, 3, 9}) {
        auto shifted = tail_limsup(
            birkhoff_profile(x.shifted(k), x.shifted(137 + k), N, K), N0).max_value;
        Rat drift = shifted - base;
        if (drift < 0) drift = -drift;
        CHECK(drift <= Rat(2 * k, N0));
    }
}

TEST_CASE("mean-equi scan: eventually constant point") {
    auto sys = MetricSystem::symbolic(builtin_generator("zeros"));
    ScanParams params;
    params.epsilon = Rat(1, 5);
    params.grid = {Rat(1, 8)};
    params.horizon = 400;
    params.tail_start = 100;
    params.resolution = 30;
    params.samples = 5;
    params.sample_scan_length = 5000;
    auto rep = mean_equi_scan(sys, params);
    CHECK(rep.verdict == Verdict::consistent);
    for (const auto& pair : rep.pairs) CHECK(pair.tail_max == 0);
}

TEST_CASE("mean-equi scan: construction point at the absent level") {
    auto s = synthesize_schedule(builtin_generator("thue-morse-shifted"), 6);
    auto sys = MetricSystem::symbolic(theorem4_point(s));
    ScanParams params;
    params.epsilon = Rat(1, 5);
    params.grid = {Rat(1, 19)}; // delta = 1/|A_2|
    params.horizon = 2000;
    params.tail_start = 500;
    params.resolution = 50;
    params.samples = 6;
    params.sample_scan_length = 100000;
    auto rep = mean_equi_scan(sys, params);
    CHECK(rep.verdict == Verdict::consistent);
    REQUIRE(!rep.grid.empty());
    CHECK(rep.grid[0].worst < Rat(1, 5));
    CHECK(rep.pairs.size() == 15); // 6 samples -> 15 pairs
}

TEST_CASE("mean-equi scan: random tails separate") {
    auto sys = MetricSystem::symbolic(builtin_generator("zeros"));
    ScanParams params;
    params.epsilon = Rat(1, 10);
    params.grid = {Rat(1, 4), Rat(1, 16)};
    params.horizon = 300;
    params.tail_start = 50;
    params.resolution = 24;
    params.samples = 6;
    params.seed = 2024;
    params.sampler = SamplerKind::random_tail;
    auto rep = mean_equi_scan(sys, params);
    CHECK(rep.verdict == Verdict::inconsistent);
    bool witnessed = false;
    for (const auto& pair : rep.pairs) witnessed |= pair.witness;
    CHECK(witnessed);
}

TEST_CASE("mean-sens scan: tent baseline finds witnesses, shifts of zeros do not") {
    auto tent = MetricSystem::tent(TentStickPoint::baseline(Rat(3, 10)));
    ScanParams params;
    params.delta = Rat(1, 10);
    params.grid = {Rat(1, 1000)};
    params.horizon = 2000;
    params.tail_start = 500;
    params.samples = 30;
    params.seed = 7;
    auto rep = mean_sens_scan(tent, params);
    CHECK(rep.verdict == Verdict::consistent);
    CHECK(rep.arith_mode == ArithMode::exact);

    auto zeros = MetricSystem::symbolic(builtin_generator("zeros"));
    params.samples = 4;
    params.resolution = 20;
    params.sample_scan_length = 4000;
    auto rep0 = mean_sens_scan(zeros, params);
    CHECK(rep0.verdict == Verdict::inconclusive); // all samples equal x
}

TEST_CASE("mean-sens scan: stick constants scale like 1/k") {
    ScanParams params;
    params.delta = Rat(1, 100);
    params.grid = {Rat(1, 1000)};
    params.horizon = 1500;
    params.tail_start = 300;
    params.samples = 20;
    params.seed = 3;
    Rat w1, w5;
    {
        auto sys = MetricSystem::tent(TentStickPoint::stick(1, Rat(3, 10)));
        auto rep = mean_sens_scan(sys, params);
        CHECK(rep.verdict == Verdict::consistent);
        w1 = rep.grid[0].worst;
    }
    {
        auto sys = MetricSystem::tent(TentStickPoint::stick(5, Rat(3, 50)));
        auto rep = mean_sens_scan(sys, params);
        w5 = rep.grid[0].worst;
    }
    CHECK(w1 > 0);
    CHECK(w5 > 0);
    CHECK(w5 < w1);
    CHECK(5 * w5 >= w1 / 3);
    CHECK(5 * w5 <= 3 * w1);
}

TEST_CASE("banach mean scan on a Sturmian point") {
    auto sys = MetricSystem::symbolic(builtin_generator("golden-sturmian"));
    ScanParams params;
    params.epsilon = Rat(3, 10);
    params.grid = {Rat(1, 25)};
    params.horizon = 4000;
    params.tail_start = 800;
    params.window_floor = 400;
    params.resolution = 60;
    params.samples = 5;
    params.sample_scan_length = 200000;
    auto rep = banach_mean_scan(sys, false, params);
    CHECK(rep.verdict == Verdict::consistent);
    for (const auto& pair : rep.pairs) {
        REQUIRE(pair.banach.has_value());
        CHECK(pair.banach->value < Rat(3, 10));
        CHECK(pair.banach->value >= pair.tail_max - Rat(1, 10)); // window max dominates late means
    }
}

TEST_CASE("banach vs cesaro gap on the construction point") {
    auto s = synthesize_schedule(builtin_generator("thue-morse-shifted"), 6);
    auto x = theorem4_point(s);
    // the pair (x, shift to the second A_2 copy) stays close in Cesaro
    // terms but a window aligned with a base block separates them
    auto profile = birkhoff_profile(x, x.shifted(137), 6000, 60);
    auto tail = tail_limsup(profile, 3000);
    auto windowed = banach_profile(profile, 300);
    CHECK(windowed.value > tail.max_value);
}

TEST_CASE("proximality scans") {
    ScanParams params;
    params.horizon = 500;
    params.resolution = 40;
    params.window_floor = 50;
    params.grid = {Rat(1, 2), Rat(1, 8)};

    auto zeros = builtin_generator("zeros");
    auto sys = MetricSystem::symbolic(zeros);
    auto same = proximality_scan(sys, zeros, false, params);
    CHECK(same.verdict == Verdict::consistent);
    CHECK(*same.min_distance == 0);
    for (const auto& [eps, est] : same.far_time_densities) CHECK(est.value == 0);

    auto a = builtin_generator("alternating");
    auto sysA = MetricSystem::symbolic(a);
    auto distal = proximality_scan(sysA, a.shifted(1), false, params);
    CHECK(distal.verdict == Verdict::inconsistent);
    CHECK(*distal.min_distance == 1);

    auto s = synthesize_schedule(builtin_generator("thue-morse-shifted"), 6);
    auto sysX = MetricSystem::symbolic(theorem4_point(s));
    auto prox = proximality_scan(sysX, zeros, false, params);
    CHECK(prox.verdict == Verdict::consistent); // long 0-runs bring the orbits together

    auto banach_same = proximality_scan(sys, zeros, true, params);
    CHECK(banach_same.verdict == Verdict::consistent);
}

TEST_CASE("return time sets") {
    auto a = builtin_generator("alternating"); // (01)^inf
    auto F = return_time_set(a, FiniteWord("01"), 100);
    auto elems = F.elements_below(100);
    REQUIRE(elems.size() == 50);
    for (std::size_t i = 0; i < elems.size(); ++i)
        CHECK(elems[i] == static_cast<std::int64_t>(2 * i));

    auto tm = builtin_generator("thue-morse");
    auto R = return_time_set(tm, tm.prefix(4), 10000);
    auto gap = syndetic_gap(R, 10000);
    REQUIRE(gap.max_gap.has_value());
    CHECK_FALSE(gap.unbounded_within_horizon); // minimality: bounded return gaps

    auto none = return_time_set(a, FiniteWord("11"), 100);
    CHECK(none.elements_below(100).empty());
}

TEST_CASE("ip witness from construction return times") {
    auto s = synthesize_schedule(builtin_generator("thue-morse-shifted"), 6);
    auto x = theorem4_point(s);
    auto A2 = build_block(s, 2).word;
    auto F = return_time_set(x, A2, 100000);
    auto w = ip_witness(F, 2, 100000);
    REQUIRE(w.has_value());
    CHECK(*w == std::vector<std::int64_t>{137, 1097}); // 137 + 1097 = 1234, all returns
}

TEST_CASE("cyclic cover bound") {
    std::vector<CoverCell> small(100, CoverCell{Rat(1, 200), true});
    auto ok = cover_bme_bound(small, Rat(1, 100), Rat(1, 2));
    CHECK(ok.accepted);
    CHECK(ok.bound == Rat(1, 100) * 2); // (1 + 2 * 1/2) * epsilon

    // exactly ceil(eps n) large cells: hypothesis boundary fails
    std::vector<CoverCell> mixed(100, CoverCell{Rat(1, 200), true});
    for (int i = 0; i < 5; ++i) mixed[static_cast<std::size_t>(i)].diameter = Rat(1, 10);
    auto rejected = cover_bme_bound(mixed, Rat(1, 20), Rat(1, 2));
    CHECK_FALSE(rejected.accepted);
    CHECK(rejected.large_cells == 5);

    CHECK_THROWS_AS(cover_bme_bound({}, Rat(1, 10), Rat(1, 2)), Error);
}

TEST_CASE("rotation arc cover") {
    auto cover = rotation_arc_cover(3, 7);
    CHECK(cover.size() == 7);
    for (const auto& cell : cover) {
        CHECK(cell.verified_cyclic);
        CHECK(cell.diameter == Rat(1, 7));
    }
    auto bound = cover_bme_bound(cover, Rat(2, 7), Rat(1, 2));
    CHECK(bound.accepted);
    CHECK(bound.all_verified);
    CHECK(bound.bound == Rat(4, 7));
}

TEST_CASE("scan reports are deterministic") {
    auto tent = MetricSystem::tent(TentStickPoint::baseline(Rat(3, 10)));
    ScanParams params;
    params.delta = Rat(1, 10);
    params.grid = {Rat(1, 500)};
    params.horizon = 400;
    params.tail_start = 100;
    params.samples = 8;
    params.seed = 555;
    auto a = diagnostic_report_to_json(mean_sens_scan(tent, params)).dump();
    auto b = diagnostic_report_to_json(mean_sens_scan(tent, params)).dump();
    CHECK(a == b);
}

TEST_CASE("sampler exhaustion is an error") {
    auto g = PointGenerator::explicit_prefix(FiniteWord("10010010"));
    auto sys = MetricSystem::symbolic(g);
    ScanParams params;
    params.epsilon = Rat(1, 5);
    params.grid = {Rat(1, 4)};
    params.horizon = 4;
    params.tail_start = 2;
    params.resolution = 2;
    params.samples = 50;
    params.sample_scan_length = 8;
    CHECK_THROWS_AS(mean_equi_scan(sys, params), Error);
}
