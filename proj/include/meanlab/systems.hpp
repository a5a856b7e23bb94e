#pragma once

#include "meanlab/rational.hpp"
#include "meanlab/words.hpp"

#include <array>
#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace meanlab {

// A deterministic rule producing the i-th symbol (0-based) of an infinite
// sequence. Prefix-consistent: prefix(L1) is a prefix of prefix(L2) for
// L1 <= L2, and the same rule + index always yields the same symbol.
// Values are immutable after construction; concurrent reads are safe.
class PointGenerator {
public:
    PointGenerator() = default;

    static PointGenerator eventually_periodic(FiniteWord preperiod, FiniteWord period);

    // Fixed point of an expanding substitution from `seed`; the image of
    // the seed must start with the seed. `shift` drops that many leading
    // symbols, which is how the shifted Thue-Morse base is expressed.
    static PointGenerator substitution_fixed_point(
        std::map<std::uint8_t, FiniteWord> rules, std::uint8_t seed,
        std::int64_t shift = 0);

    // Coding of rotation by alpha = p/q with phase x0: symbol 0 on
    // [0, 1 - alpha), 1 on [1 - alpha, 1). Exact rational arithmetic.
    static PointGenerator sturmian_rational(std::int64_t p, std::int64_t q, Rat phase);

    // Same coding with alpha, phase given as 128-bit binary fixed point
    // (value = frac / 2^128). Exact integer arithmetic mod 2^128.
    static PointGenerator sturmian_fixed_point(unsigned __int128 alpha_frac,
                                               unsigned __int128 phase_frac,
                                               std::string label = "");

    // alpha = (sqrt(5) - 1) / 2, phase 0.
    static PointGenerator golden_sturmian();

    static PointGenerator explicit_prefix(FiniteWord word);

    // The stored word followed by 0^infinity (the Theorem-4 point shape).
    static PointGenerator word_then_zeros(FiniteWord word, std::string label = "");

    bool valid() const noexcept { return impl_ != nullptr; }

    std::uint8_t symbol_at(std::int64_t i) const;

    // Materialized first L symbols; throws resolution-exceeded beyond the
    // rule's reach.
    FiniteWord prefix(std::int64_t L) const;

    // Symbols [0, L) as a raw span; the buffer stays alive as long as this
    // generator (scans compare slices of one shared buffer).
    std::span<const std::uint8_t> prefix_span(std::int64_t L) const;

    std::int64_t resolution() const;
    std::uint8_t alphabet_size() const;

    // View of the same sequence shifted k steps (the shift map iterated k
    // times); shares the underlying rule.
    PointGenerator shifted(std::int64_t k) const;
    std::int64_t shift_offset() const;

    // True when both views share one rule object at one offset: the two
    // sequences are equal by construction, not merely up to resolution.
    bool same_rule_as(const PointGenerator& other) const {
        return impl_ == other.impl_ && offset_ == other.offset_;
    }

    std::string describe() const;

    struct Impl; // rule implementations live in systems.cpp

private:
    explicit PointGenerator(std::shared_ptr<const Impl> impl, std::int64_t offset = 0);
    std::shared_ptr<const Impl> impl_;
    std::int64_t offset_ = 0;
};

// d(x, y) = 1/i with i the least 1-based differing position, probed through
// resolution K: exact value with error bound 0 when the prefixes differ at
// some i <= K, else 0 with error bound 1/(K+1).
struct ShiftDistance {
    Rat value;
    Rat error_bound;
    std::int64_t first_difference = 0; // 1-based; 0 = none found within K
};

ShiftDistance shift_distance(const PointGenerator& x, const PointGenerator& y,
                             std::int64_t K);

// The stick example: baseline [0,1] x {0} carrying the tent map, plus for
// each k >= 1 a vertical stick {-1/k} x [0, 1/k] carrying the tent map
// conjugated by scaling. Branch 0 is the baseline, branch k >= 1 stick k.
// Coordinates are exact rationals whenever the inputs are; tent iteration
// never grows denominators (T(p/q) = (q - |q - 2p|)/q), so exact orbits of
// any length are cheap. A float64 mode exists for non-rational input and
// is tagged; float tent orbits collapse to 0 within ~60 steps, so exact
// mode is the default everywhere.
struct TentStickPoint {
    int branch = 0;
    bool exact = true;
    Rat coordinate;      // exact mode
    double coord_f = 0;  // float mode

    static TentStickPoint baseline(Rat x);
    static TentStickPoint stick(int k, Rat height);
    static TentStickPoint baseline_f(double x);
    static TentStickPoint stick_f(int k, double height);
};

// One step of the system map: baseline (x,0) -> (T x, 0) with
// T(x) = 1 - |1 - 2x|; stick k height h -> (1/k) T(k h). Branch preserved.
TentStickPoint tent_step(const TentStickPoint& p);

// Planar Euclidean distance between the embedded points: baseline at
// (x, 0), stick k at (-1/k, h).
double euclidean_distance(const TentStickPoint& p, const TentStickPoint& q);

// Exact distance for points on one branch (|Δcoordinate|); requires exact
// mode and equal branches.
Rat same_branch_distance(const TentStickPoint& p, const TentStickPoint& q);

// Diameter of the truncated stick space with sticks k <= k_max: the
// farthest pair is baseline (1,0) vs stick-1 top (-1,1).
double tent_space_diameter();

// Abstract (X, d, T) handle the diagnostics and the CLI dispatch on.
class MetricSystem {
public:
    enum class Kind { symbolic, tent_stick };

    static MetricSystem symbolic(PointGenerator origin);
    static MetricSystem tent(TentStickPoint origin, int k_max = 64);

    Kind kind() const noexcept { return kind_; }
    double diameter() const noexcept { return diameter_; }
    const PointGenerator& origin_generator() const;
    const TentStickPoint& origin_tent() const;
    int stick_truncation() const noexcept { return k_max_; }

private:
    Kind kind_ = Kind::symbolic;
    double diameter_ = 1.0;
    int k_max_ = 64;
    PointGenerator generator_;
    TentStickPoint tent_point_;
};

// Named generators for CLI flags (--base, --predicate style shortcuts).
PointGenerator builtin_generator(const std::string& name);
std::vector<std::string> builtin_generator_names();

} // namespace meanlab
