#pragma once

#include "meanlab/rational.hpp"

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace meanlab {

// A subset of the non-negative integers, either a sorted finite list or a
// membership predicate, always with an explicit horizon H. Every derived
// statistic records the horizon it was computed from.
class IndexSet {
public:
    static IndexSet from_sorted(std::vector<std::int64_t> elements, std::int64_t horizon);
    static IndexSet from_predicate(std::function<bool(std::int64_t)> member,
                                   std::int64_t horizon, std::string name = "");

    std::int64_t horizon() const noexcept { return horizon_; }
    const std::string& name() const noexcept { return name_; }

    bool contains(std::int64_t i) const;

    // counts[j] = #(F ∩ [0, j)) for j = 0..n; the O(1)-per-window backbone
    // of every scan below.
    std::vector<std::int64_t> prefix_counts(std::int64_t n) const;

    // Elements of F ∩ [0, n), ascending.
    std::vector<std::int64_t> elements_below(std::int64_t n) const;

private:
    IndexSet() = default;
    std::optional<std::vector<std::int64_t>> elements_; // sorted, duplicate-free
    std::function<bool(std::int64_t)> member_;
    std::int64_t horizon_ = 0;
    std::string name_;
};

enum class DensityKind { upper, lower, banach_upper, banach_lower };

const char* density_kind_name(DensityKind kind);

struct DensityEstimate {
    Rat value;                    // exact rational in [0, 1]
    DensityKind kind = DensityKind::upper;
    std::int64_t horizon = 0;
    std::int64_t window_floor = 0; // Banach kinds only
};

// Finite-horizon limsup surrogate: max over n in [ceil(N/2), N] of
// #(F ∩ [0, n)) / n. The back-half range washes out transient prefixes.
DensityEstimate upper_density(const IndexSet& F, std::int64_t N);

// Same range, min instead of max.
DensityEstimate lower_density(const IndexSet& F, std::int64_t N);

// Max over all windows [M, M+L) ⊆ [0, N) with L >= W of #(F ∩ window)/L.
// A window of length >= 2W splits into halves of length >= W, one of which
// does at least as well (mediant inequality), so the scan over lengths in
// [W, 2W) is exact, not a heuristic.
DensityEstimate banach_upper_density(const IndexSet& F, std::int64_t N, std::int64_t W);

DensityEstimate banach_lower_density(const IndexSet& F, std::int64_t N, std::int64_t W);

struct SyndeticGapReport {
    // max over gaps between consecutive elements of F ∩ [0, N), including
    // the leading gap from 0; absent when the intersection is empty
    std::optional<std::int64_t> max_gap;
    std::int64_t trailing_gap = 0; // from the last element to N-1
    // heuristic: the open trailing gap already exceeds every closed one
    bool unbounded_within_horizon = false;
};

SyndeticGapReport syndetic_gap(const IndexSet& F, std::int64_t N);

// Bounded search for p_1 < ... < p_k with every nonempty subset sum in F.
// Tuples are sum-dominated (p_{m+1} > p_1 + ... + p_m), which keeps the
// 2^k - 1 subset sums distinct; requires k <= 5 and all sums <= horizon.
// Soundness: a returned tuple was verified by exhaustive subset-sum
// membership. Absence is a value, not an error.
std::optional<std::vector<std::int64_t>> ip_witness(const IndexSet& F, int k,
                                                    std::int64_t bound);

// Named predicate sets for the CLI (--predicate).
IndexSet builtin_index_set(const std::string& name, std::int64_t horizon);
std::vector<std::string> builtin_index_set_names();

} // namespace meanlab
