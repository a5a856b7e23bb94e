#pragma once

#include "meanlab/rational.hpp"
#include "meanlab/systems.hpp"
#include "meanlab/words.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace meanlab {

// The block-recursive construction: A_1 = 11 and
// A_{n+1} = A_n 0^{k_n} B_n 0^{k_n} A_n, with B_n the length-n prefix of a
// minimal base point y starting with symbol 1. A Schedule fixes the base
// and the gap sequence k_1..k_levels.
//
// Gap constraints (checked with exact integer/rational arithmetic):
//   (a) k_m > 3 |A_m|                                   for every m
//   (b) p * k_q > q * (|A_p| + 2 k_p + p)               for all p < q
//   (c) r_m = (|A_m| + m)/(|A_m| + 2 k_m + m) strictly decreasing
struct Schedule {
    PointGenerator base;            // supplies B_n = y_0..y_{n-1}
    std::vector<std::int64_t> gaps; // k_1..k_levels
    int levels = 0;
};

// |A_1|, ..., |A_{levels+1}| under the length recurrence
// |A_{m+1}| = 2|A_m| + 2 k_m + m. Index j holds |A_{j+1}|.
std::vector<std::int64_t> block_lengths(const Schedule& s);

// Greedy-minimal schedule: each k_m is the least integer passing (a), (b)
// for q = m against all p < m, and (c). Throws base-word error when the
// base does not start with 1, budget error when |A_{levels}| would exceed
// prefix_budget. slack_num/slack_den >= 1 scales every greedy gap up, for
// experiments with generous gaps.
Schedule synthesize_schedule(PointGenerator base, int levels,
                             std::int64_t prefix_budget = std::int64_t{1} << 33,
                             std::int64_t slack_num = 1, std::int64_t slack_den = 1);

enum class ConstraintKind { gap_dominates_block, pair_ratio, ratio_decreasing };

const char* constraint_kind_name(ConstraintKind kind);

struct ConstraintInstance {
    ConstraintKind kind;
    int p = 0; // first index (or the level for kind (a))
    int q = 0; // second index; 0 when not applicable
    Rat lhs;
    Rat rhs;
    bool strict = true;
    bool pass = false;
    std::string render() const;
};

struct ValidationReport {
    bool all_pass = false;
    std::vector<ConstraintInstance> instances;
    // Levels the schedule was mechanically extended to (greedy) without
    // breaking the prefix budget: a finite certificate that the infinite
    // constraint family stays satisfiable from here.
    int extendable_to_level = 0;
};

ValidationReport validate_schedule(const Schedule& s, int forward_budget = 2,
                                   std::int64_t prefix_budget = std::int64_t{1} << 33);

// Canonical segment decomposition of A_n.
struct BlockSpan {
    enum class Part { block, zeros, base_prefix } part;
    int level = 0;        // which A_m / B_m / k_m the segment came from
    std::int64_t begin = 0;
    std::int64_t length = 0;
};

struct ConstructionPrefix {
    int level = 0;
    FiniteWord word; // equal to A_level
    std::vector<BlockSpan> boundaries;
};

// Builds A_n with boundary metadata. |A_n| satisfies the recurrence
// exactly; throws budget error past the prefix budget.
ConstructionPrefix build_block(const Schedule& s, int n,
                               std::int64_t prefix_budget = std::int64_t{1} << 33);

// x = lim A_n 0^infinity: the top block followed by zeros. Prefixes are
// consistent across levels since each A_n heads A_{n+1}.
PointGenerator theorem4_point(const Schedule& s,
                              std::int64_t prefix_budget = std::int64_t{1} << 33);

// Smallest n <= levels such that A_n does not occur in the base prefix of
// length scan_length; heuristic evidence only (absence in a prefix), which
// is how the reports phrase it. nullopt when every level occurs.
std::optional<int> first_absent_level(const Schedule& s, std::int64_t scan_length);

// One checked inequality instance that failed, or the tightest margin row.
struct ClaimRow {
    int level_n = 0;
    int level_m = 0;       // claim 1 only; -1 for claim 2 rows
    std::int64_t i = 0;    // 1-based prefix length (claim 1) / occurrence (claim 2)
    std::int64_t j = -1;   // claim 2 only; 1-based exclusive end
    std::int64_t lhs = 0;  // ones count, scaled by the common denominator
    Int rhs_num;
    Int rhs_den;
    bool pass = true;
};

struct ClaimReport {
    int claim = 0;
    std::int64_t checks = 0;
    std::vector<ClaimRow> violations;
    ClaimRow tightest; // minimal rhs - lhs margin among passing rows
    bool all_pass() const { return violations.empty(); }
};

// Claim 1: with W = A_n 0^{k_m} B_m 0^{k_m}, for every 1 <= i <= |W|,
//   ones(W[1..i]) <= max{1, i / (|A_n| + 2 k_n + n)} * (|A_n| + n),
// compared exactly as ones * d_n <= max(d_n, i) * c_n. Requires n <= m.
ClaimReport check_claim1(const Schedule& s, int n, int m, unsigned threads = 1);

// Claim 2: for every occurrence i of A_n in x's length-L prefix and every
// j with i + |A_n| < j <= L,
//   ones(x[i..j-1]) <= ((j - i)/(|A_n| + 2 k_n + n) + 1) * (|A_n| + n).
// Requires n >= first_absent_level (the claim's hypothesis); the base is
// scanned to base_scan_length to establish that level.
ClaimReport check_claim2(const Schedule& s, int n, const PointGenerator& x,
                         std::int64_t L, std::int64_t base_scan_length = 10000,
                         unsigned threads = 1);

} // namespace meanlab
