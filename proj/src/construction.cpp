#include "meanlab/construction.hpp"

#include "meanlab/errors.hpp"
#include "meanlab/parallel.hpp"

#include <algorithm>
#include <sstream>

namespace meanlab {

namespace {

void check_base(const PointGenerator& base) {
    require(base.valid(), Errc::base_word, "schedule has no base generator");
    require(base.symbol_at(0) == 1, Errc::base_word,
            "base point must start with symbol 1");
}

// d_n and c_n of the claims: d = |A_n| + 2 k_n + n, c = |A_n| + n.
std::int64_t block_denominator(const std::vector<std::int64_t>& lengths,
                               const std::vector<std::int64_t>& gaps, int n) {
    return lengths[static_cast<std::size_t>(n - 1)] + 2 * gaps[static_cast<std::size_t>(n - 1)] + n;
}

std::int64_t block_numerator(const std::vector<std::int64_t>& lengths, int n) {
    return lengths[static_cast<std::size_t>(n - 1)] + n;
}

} // namespace

std::vector<std::int64_t> block_lengths(const Schedule& s) {
    require(static_cast<int>(s.gaps.size()) >= s.levels, Errc::precondition,
            "schedule must carry a gap per level");
    std::vector<std::int64_t> lengths;
    lengths.push_back(2); // |A_1|
    for (int m = 1; m <= s.levels; ++m) {
        std::int64_t prev = lengths.back();
        lengths.push_back(2 * prev + 2 * s.gaps[static_cast<std::size_t>(m - 1)] + m);
    }
    return lengths;
}

Schedule synthesize_schedule(PointGenerator base, int levels, std::int64_t prefix_budget,
                             std::int64_t slack_num, std::int64_t slack_den) {
    require(levels >= 1, Errc::precondition, "levels must be >= 1");
    require(slack_num >= slack_den && slack_den >= 1, Errc::precondition,
            "gap slack must be >= 1");
    check_base(base);

    Schedule s;
    s.base = std::move(base);
    s.levels = levels;
    std::vector<std::int64_t> lengths{2};

    for (int m = 1; m <= levels; ++m) {
        std::int64_t A_m = lengths.back();
        // (a) k > 3 |A_m|
        std::int64_t bound = 3 * A_m + 1;
        // (b) p * k > m * (|A_p| + 2 k_p + p) for every p < m
        for (int p = 1; p < m; ++p) {
            std::int64_t need =
                static_cast<std::int64_t>(m) *
                (lengths[static_cast<std::size_t>(p - 1)] + 2 * s.gaps[static_cast<std::size_t>(p - 1)] + p);
            bound = std::max(bound, need / p + 1);
        }
        // (c) r_m < r_{m-1}: (A_m + m) * den_prev < num_prev * (A_m + 2k + m)
        if (m > 1) {
            std::int64_t num_prev = block_numerator(lengths, m - 1);
            std::int64_t den_prev = block_denominator(lengths, s.gaps, m - 1);
            // 2k * num_prev > (A_m + m) * (den_prev - num_prev)
            Int need = Int(A_m + m) * (den_prev - num_prev);
            Int k_min = need / (2 * Int(num_prev)) + 1;
            bound = std::max(bound, k_min.convert_to<std::int64_t>());
        }
        std::int64_t k = bound;
        if (slack_num > slack_den) {
            Int scaled = Int(k) * slack_num / slack_den;
            k = scaled.convert_to<std::int64_t>();
        }
        s.gaps.push_back(k);
        std::int64_t next_len = 2 * A_m + 2 * k + m;
        require(next_len <= prefix_budget, Errc::budget_exceeded,
                "|A_" + std::to_string(m + 1) + "| = " + std::to_string(next_len) +
                    " exceeds the prefix budget");
        lengths.push_back(next_len);
    }

    auto report = validate_schedule(s, 0, prefix_budget);
    require(report.all_pass, Errc::internal, "synthesized schedule failed validation");
    return s;
}

const char* constraint_kind_name(ConstraintKind kind) {
    switch (kind) {
        case ConstraintKind::gap_dominates_block: return "gap>3|A|";
        case ConstraintKind::pair_ratio:          return "pair-ratio";
        case ConstraintKind::ratio_decreasing:    return "ratio-decreasing";
    }
    return "unknown";
}

std::string ConstraintInstance::render() const {
    std::ostringstream os;
    os << constraint_kind_name(kind) << "(";
    if (q > 0)
        os << "p=" << p << ",q=" << q;
    else
        os << "m=" << p;
    os << "): " << rat_to_string(lhs) << (strict ? " > " : " >= ") << rat_to_string(rhs)
       << " -> " << (pass ? "pass" : "FAIL");
    return os.str();
}

ValidationReport validate_schedule(const Schedule& s, int forward_budget,
                                   std::int64_t prefix_budget) {
    ValidationReport report;
    if (s.levels < 1 || static_cast<int>(s.gaps.size()) < s.levels || !s.base.valid()) {
        report.all_pass = false;
        return report;
    }
    check_base(s.base);
    auto lengths = block_lengths(s);

    bool ok = true;
    for (int m = 1; m <= s.levels; ++m) {
        ConstraintInstance inst;
        inst.kind = ConstraintKind::gap_dominates_block;
        inst.p = m;
        inst.lhs = Rat(s.gaps[static_cast<std::size_t>(m - 1)]);
        inst.rhs = Rat(3 * lengths[static_cast<std::size_t>(m - 1)]);
        inst.pass = inst.lhs > inst.rhs;
        ok &= inst.pass;
        report.instances.push_back(inst);
    }
    for (int q = 2; q <= s.levels; ++q) {
        for (int p = 1; p < q; ++p) {
            ConstraintInstance inst;
            inst.kind = ConstraintKind::pair_ratio;
            inst.p = p;
            inst.q = q;
            inst.lhs = Rat(s.gaps[static_cast<std::size_t>(q - 1)],
                           block_denominator(lengths, s.gaps, p));
            inst.rhs = Rat(q, p);
            inst.pass = inst.lhs > inst.rhs;
            ok &= inst.pass;
            report.instances.push_back(inst);
        }
    }
    for (int m = 2; m <= s.levels; ++m) {
        ConstraintInstance inst;
        inst.kind = ConstraintKind::ratio_decreasing;
        inst.p = m - 1;
        inst.q = m;
        // r_{m-1} > r_m
        inst.lhs = Rat(block_numerator(lengths, m - 1), block_denominator(lengths, s.gaps, m - 1));
        inst.rhs = Rat(block_numerator(lengths, m), block_denominator(lengths, s.gaps, m));
        inst.pass = inst.lhs > inst.rhs;
        ok &= inst.pass;
        report.instances.push_back(inst);
    }
    report.all_pass = ok;

    // Mechanical greedy extension: how far the family provably continues
    // within the prefix budget.
    report.extendable_to_level = s.levels;
    if (ok && forward_budget > 0) {
        Schedule ext = s;
        std::vector<std::int64_t> ext_lengths = lengths;
        for (int step = 0; step < forward_budget; ++step) {
            int m = ext.levels + 1;
            std::int64_t A_m = ext_lengths[static_cast<std::size_t>(m - 1)];
            std::int64_t bound = 3 * A_m + 1;
            for (int p = 1; p < m; ++p) {
                std::int64_t need =
                    static_cast<std::int64_t>(m) * (ext_lengths[static_cast<std::size_t>(p - 1)] +
                                                    2 * ext.gaps[static_cast<std::size_t>(p - 1)] + p);
                bound = std::max(bound, need / p + 1);
            }
            std::int64_t num_prev = block_numerator(ext_lengths, m - 1);
            std::int64_t den_prev = block_denominator(ext_lengths, ext.gaps, m - 1);
            Int need_c = Int(A_m + m) * (den_prev - num_prev);
            bound = std::max(bound, (need_c / (2 * Int(num_prev)) + 1).convert_to<std::int64_t>());
            std::int64_t next_len = 2 * A_m + 2 * bound + m;
            if (next_len > prefix_budget) break;
            ext.gaps.push_back(bound);
            ext.levels = m;
            ext_lengths.push_back(next_len);
            report.extendable_to_level = m;
        }
    }
    return report;
}

ConstructionPrefix build_block(const Schedule& s, int n, std::int64_t prefix_budget) {
    require(n >= 1 && n <= s.levels, Errc::precondition,
            "level must satisfy 1 <= n <= schedule levels");
    check_base(s.base);
    auto lengths = block_lengths(s);
    require(lengths[static_cast<std::size_t>(n - 1)] <= prefix_budget, Errc::budget_exceeded,
            "|A_" + std::to_string(n) + "| exceeds the prefix budget");

    ConstructionPrefix out;
    out.level = n;

    FiniteWord block("11");
    out.boundaries.push_back({BlockSpan::Part::block, 1, 0, 2});
    for (int m = 1; m < n; ++m) {
        std::int64_t k = s.gaps[static_cast<std::size_t>(m - 1)];
        FiniteWord B = s.base.prefix(m);
        std::int64_t base_off = static_cast<std::int64_t>(block.size());
        std::vector<BlockSpan> prev = out.boundaries;

        std::vector<Segment> segs;
        segs.push_back(Segment::of(block));
        segs.push_back(Segment::zeros(static_cast<std::size_t>(k)));
        segs.push_back(Segment::of(B));
        segs.push_back(Segment::zeros(static_cast<std::size_t>(k)));
        segs.push_back(Segment::of(block));
        FiniteWord next = concat_segments(segs);

        out.boundaries.push_back({BlockSpan::Part::zeros, m, base_off, k});
        out.boundaries.push_back(
            {BlockSpan::Part::base_prefix, m, base_off + k, static_cast<std::int64_t>(m)});
        out.boundaries.push_back({BlockSpan::Part::zeros, m, base_off + k + m, k});
        std::int64_t second_copy = base_off + 2 * k + m;
        for (const BlockSpan& span : prev)
            out.boundaries.push_back(
                {span.part, span.level, span.begin + second_copy, span.length});
        block = std::move(next);
    }
    require(static_cast<std::int64_t>(block.size()) == lengths[static_cast<std::size_t>(n - 1)],
            Errc::internal, "length recurrence violated during construction");
    out.word = std::move(block);
    return out;
}

PointGenerator theorem4_point(const Schedule& s, std::int64_t prefix_budget) {
    auto top = build_block(s, s.levels, prefix_budget);
    return PointGenerator::word_then_zeros(
        std::move(top.word), "theorem4(levels=" + std::to_string(s.levels) + ")");
}

std::optional<int> first_absent_level(const Schedule& s, std::int64_t scan_length) {
    check_base(s.base);
    require(scan_length >= 1, Errc::precondition, "scan length must be positive");
    require(s.base.resolution() >= scan_length, Errc::resolution_exceeded,
            "base resolution below the requested scan length");
    auto y = s.base.prefix_span(scan_length);
    for (int n = 1; n <= s.levels; ++n) {
        auto block = build_block(s, n);
        if (static_cast<std::int64_t>(block.word.size()) > scan_length) return n;
        if (occurrences(block.word.symbols(), y).empty()) return n;
    }
    return std::nullopt;
}

namespace {

// All claim comparisons are o * d <= bound * c with every factor below
// 2^31 at desk scale, so the hot loops stay in int64; rows materialize
// cpp_ints only when kept.
void require_int64_safe(std::int64_t a, std::int64_t b) {
    require(a < (std::int64_t{1} << 31) && b < (std::int64_t{1} << 31), Errc::budget_exceeded,
            "claim scan operands exceed the 64-bit fast path");
}

} // namespace

ClaimReport check_claim1(const Schedule& s, int n, int m, unsigned threads) {
    require(n >= 1 && n <= m && m <= s.levels, Errc::precondition,
            "claim 1 requires 1 <= n <= m <= levels");
    auto lengths = block_lengths(s);
    const std::int64_t d_n = block_denominator(lengths, s.gaps, n);
    const std::int64_t c_n = block_numerator(lengths, n);
    const std::int64_t k_m = s.gaps[static_cast<std::size_t>(m - 1)];

    FiniteWord A_n = build_block(s, n).word;
    FiniteWord B_m = s.base.prefix(m);
    std::vector<Segment> segs{Segment::of(A_n), Segment::zeros(static_cast<std::size_t>(k_m)),
                              Segment::of(B_m), Segment::zeros(static_cast<std::size_t>(k_m))};
    FiniteWord W = concat_segments(segs);
    require(static_cast<std::int64_t>(W.size()) ==
                lengths[static_cast<std::size_t>(n - 1)] + 2 * k_m + m,
            Errc::internal, "claim-1 word has unexpected length");
    require_int64_safe(static_cast<std::int64_t>(W.size()) + d_n, c_n);

    // prefix ones counts
    std::vector<std::int64_t> ones(W.size() + 1, 0);
    for (std::size_t t = 0; t < W.size(); ++t) ones[t + 1] = ones[t] + (W[t] == 1);

    auto make_row = [&](std::int64_t i, std::int64_t o, bool pass) {
        ClaimRow row;
        row.level_n = n;
        row.level_m = m;
        row.i = i;
        row.lhs = o;
        row.rhs_num = Int(std::max(d_n, i)) * c_n;
        row.rhs_den = d_n;
        row.pass = pass;
        return row;
    };

    struct ChunkResult {
        std::vector<ClaimRow> violations;
        bool seen = false;
        std::int64_t best_margin = 0, best_i = 0, best_o = 0;
        std::int64_t checks = 0;
    };
    auto scan = [&](std::size_t begin, std::size_t end) {
        ChunkResult r;
        for (std::size_t idx = begin; idx < end; ++idx) {
            std::int64_t i = static_cast<std::int64_t>(idx) + 1; // 1-based prefix length
            std::int64_t o = ones[idx + 1];
            std::int64_t lhs = o * d_n;
            std::int64_t rhs = std::max(d_n, i) * c_n;
            ++r.checks;
            if (lhs > rhs) {
                r.violations.push_back(make_row(i, o, false));
            } else if (!r.seen || rhs - lhs < r.best_margin) {
                r.seen = true;
                r.best_margin = rhs - lhs;
                r.best_i = i;
                r.best_o = o;
            }
        }
        return r;
    };

    auto chunks = parallel_map_chunks<ChunkResult>(W.size(), threads, scan);
    ClaimReport report;
    report.claim = 1;
    bool seen = false;
    std::int64_t best_margin = 0, best_i = 0, best_o = 0;
    for (auto& c : chunks) {
        report.checks += c.checks;
        report.violations.insert(report.violations.end(), c.violations.begin(),
                                 c.violations.end());
        if (c.seen && (!seen || c.best_margin < best_margin)) {
            seen = true;
            best_margin = c.best_margin;
            best_i = c.best_i;
            best_o = c.best_o;
        }
    }
    if (seen) report.tightest = make_row(best_i, best_o, true);
    return report;
}

ClaimReport check_claim2(const Schedule& s, int n, const PointGenerator& x, std::int64_t L,
                         std::int64_t base_scan_length, unsigned threads) {
    require(n >= 1 && n <= s.levels, Errc::precondition, "level out of range");
    auto absent = first_absent_level(s, base_scan_length);
    require(absent.has_value() && n >= *absent, Errc::precondition,
            "claim 2 requires n >= first_absent_level (hypothesis of the claim)");
    require(L >= 1 && L <= x.resolution(), Errc::resolution_exceeded,
            "scan length exceeds the point's resolution");

    auto lengths = block_lengths(s);
    const std::int64_t d_n = block_denominator(lengths, s.gaps, n);
    const std::int64_t c_n = block_numerator(lengths, n);
    FiniteWord A_n = build_block(s, n).word;
    const std::int64_t block_len = static_cast<std::int64_t>(A_n.size());

    auto text = x.prefix_span(L);
    std::vector<std::int64_t> ones(static_cast<std::size_t>(L) + 1, 0);
    for (std::int64_t t = 0; t < L; ++t)
        ones[static_cast<std::size_t>(t) + 1] =
            ones[static_cast<std::size_t>(t)] + (text[static_cast<std::size_t>(t)] == 1);

    auto occ = occurrences(A_n.symbols(), text);
    require_int64_safe(L + d_n, c_n);

    auto make_row = [&](std::int64_t i0, std::int64_t j0, std::int64_t o, bool pass) {
        ClaimRow row;
        row.level_n = n;
        row.level_m = -1;
        row.i = i0 + 1; // 1-based at the report boundary
        row.j = j0 + 1;
        row.lhs = o;
        row.rhs_num = Int(j0 - i0 + d_n) * c_n;
        row.rhs_den = d_n;
        row.pass = pass;
        return row;
    };

    struct ChunkResult {
        std::vector<ClaimRow> violations;
        bool seen = false;
        std::int64_t best_margin = 0, best_i = 0, best_j = 0, best_o = 0;
        std::int64_t checks = 0;
    };
    auto scan = [&](std::size_t begin, std::size_t end) {
        ChunkResult r;
        for (std::size_t oi = begin; oi < end; ++oi) {
            std::int64_t i0 = static_cast<std::int64_t>(occ[oi]);
            for (std::int64_t j0 = i0 + block_len + 1; j0 <= L; ++j0) {
                std::int64_t o = ones[static_cast<std::size_t>(j0)] -
                                 ones[static_cast<std::size_t>(i0)];
                // o * d_n <= (j - i + d_n) * c_n
                std::int64_t lhs = o * d_n;
                std::int64_t rhs = (j0 - i0 + d_n) * c_n;
                ++r.checks;
                if (lhs > rhs) {
                    r.violations.push_back(make_row(i0, j0, o, false));
                } else if (!r.seen || rhs - lhs < r.best_margin) {
                    r.seen = true;
                    r.best_margin = rhs - lhs;
                    r.best_i = i0;
                    r.best_j = j0;
                    r.best_o = o;
                }
            }
        }
        return r;
    };

    auto chunks = parallel_map_chunks<ChunkResult>(occ.size(), threads, scan);
    ClaimReport report;
    report.claim = 2;
    bool seen = false;
    std::int64_t best_margin = 0, best_i = 0, best_j = 0, best_o = 0;
    for (auto& c : chunks) {
        report.checks += c.checks;
        report.violations.insert(report.violations.end(), c.violations.begin(),
                                 c.violations.end());
        if (c.seen && (!seen || c.best_margin < best_margin)) {
            seen = true;
            best_margin = c.best_margin;
            best_i = c.best_i;
            best_j = c.best_j;
            best_o = c.best_o;
        }
    }
    if (seen) report.tightest = make_row(best_i, best_j, best_o, true);
    return report;
}

} // namespace meanlab
