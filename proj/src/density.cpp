#include "meanlab/density.hpp"

#include "meanlab/errors.hpp"

#include <algorithm>

namespace meanlab {

IndexSet IndexSet::from_sorted(std::vector<std::int64_t> elements, std::int64_t horizon) {
    require(horizon >= 0, Errc::precondition, "horizon must be non-negative");
    require(std::is_sorted(elements.begin(), elements.end()), Errc::precondition,
            "index set list form must be sorted");
    require(std::adjacent_find(elements.begin(), elements.end()) == elements.end(),
            Errc::precondition, "index set list form must be duplicate-free");
    if (!elements.empty()) {
        require(elements.front() >= 0, Errc::precondition, "elements must be non-negative");
        require(elements.back() < horizon, Errc::horizon_exceeded,
                "element " + std::to_string(elements.back()) + " >= horizon " +
                    std::to_string(horizon));
    }
    IndexSet s;
    s.elements_ = std::move(elements);
    s.horizon_ = horizon;
    return s;
}

IndexSet IndexSet::from_predicate(std::function<bool(std::int64_t)> member,
                                  std::int64_t horizon, std::string name) {
    require(horizon >= 0, Errc::precondition, "horizon must be non-negative");
    require(static_cast<bool>(member), Errc::precondition, "null membership predicate");
    IndexSet s;
    s.member_ = std::move(member);
    s.horizon_ = horizon;
    s.name_ = std::move(name);
    return s;
}

bool IndexSet::contains(std::int64_t i) const {
    if (i < 0 || i >= horizon_) return false;
    if (elements_)
        return std::binary_search(elements_->begin(), elements_->end(), i);
    return member_(i);
}

std::vector<std::int64_t> IndexSet::prefix_counts(std::int64_t n) const {
    require(n >= 0 && n <= horizon_, Errc::horizon_exceeded,
            "prefix count range exceeds horizon");
    std::vector<std::int64_t> counts(static_cast<std::size_t>(n) + 1, 0);
    if (elements_) {
        for (std::int64_t e : *elements_) {
            if (e >= n) break;
            counts[static_cast<std::size_t>(e) + 1] = 1;
        }
        for (std::int64_t j = 1; j <= n; ++j)
            counts[static_cast<std::size_t>(j)] += counts[static_cast<std::size_t>(j) - 1];
    } else {
        for (std::int64_t j = 0; j < n; ++j)
            counts[static_cast<std::size_t>(j) + 1] =
                counts[static_cast<std::size_t>(j)] + (member_(j) ? 1 : 0);
    }
    return counts;
}

std::vector<std::int64_t> IndexSet::elements_below(std::int64_t n) const {
    require(n >= 0 && n <= horizon_, Errc::horizon_exceeded, "range exceeds horizon");
    std::vector<std::int64_t> out;
    if (elements_) {
        for (std::int64_t e : *elements_) {
            if (e >= n) break;
            out.push_back(e);
        }
    } else {
        for (std::int64_t i = 0; i < n; ++i)
            if (member_(i)) out.push_back(i);
    }
    return out;
}

const char* density_kind_name(DensityKind kind) {
    switch (kind) {
        case DensityKind::upper:        return "upper";
        case DensityKind::lower:        return "lower";
        case DensityKind::banach_upper: return "banach-upper";
        case DensityKind::banach_lower: return "banach-lower";
    }
    return "unknown";
}

namespace {

DensityEstimate prefix_window_extremum(const IndexSet& F, std::int64_t N, bool take_max) {
    require(N >= 1, Errc::precondition, "N must be positive");
    require(N <= F.horizon(), Errc::horizon_exceeded,
            "N exceeds the declared horizon of the index set");
    auto counts = F.prefix_counts(N);
    std::int64_t n_lo = (N + 1) / 2;
    // track the extremum as a cross-multiplied fraction; counts <= 10^6 so
    // 64-bit products are safe well past desk scale
    std::int64_t best_c = counts[static_cast<std::size_t>(n_lo)], best_n = n_lo;
    for (std::int64_t n = n_lo + 1; n <= N; ++n) {
        std::int64_t c = counts[static_cast<std::size_t>(n)];
        bool better = take_max ? (c * best_n > best_c * n) : (c * best_n < best_c * n);
        if (better) { best_c = c; best_n = n; }
    }
    DensityEstimate e;
    e.value = Rat(best_c, best_n);
    e.kind = take_max ? DensityKind::upper : DensityKind::lower;
    e.horizon = N;
    return e;
}

DensityEstimate banach_window_extremum(const IndexSet& F, std::int64_t N, std::int64_t W,
                                       bool take_max) {
    require(N >= 1 && W >= 1, Errc::precondition, "N and W must be positive");
    require(W <= N, Errc::window_error, "window floor W exceeds N");
    require(N <= F.horizon(), Errc::horizon_exceeded,
            "N exceeds the declared horizon of the index set");
    auto counts = F.prefix_counts(N);
    std::int64_t L_hi = std::min(N, 2 * W - 1);
    std::int64_t best_c = take_max ? 0 : 1, best_len = 1; // 0/1 resp. 1/1 sentinels
    for (std::int64_t L = W; L <= L_hi; ++L) {
        for (std::int64_t M = 0; M + L <= N; ++M) {
            std::int64_t c = counts[static_cast<std::size_t>(M + L)] -
                             counts[static_cast<std::size_t>(M)];
            bool better = take_max ? (c * best_len > best_c * L) : (c * best_len < best_c * L);
            if (better) {
                best_c = c;
                best_len = L;
                if (take_max && best_c == best_len) goto done;  // ratio 1, maximal
                if (!take_max && best_c == 0) goto done;        // ratio 0, minimal
            }
        }
    }
done:
    DensityEstimate e;
    e.value = Rat(best_c, best_len);
    e.kind = take_max ? DensityKind::banach_upper : DensityKind::banach_lower;
    e.horizon = N;
    e.window_floor = W;
    return e;
}

} // namespace

DensityEstimate upper_density(const IndexSet& F, std::int64_t N) {
    return prefix_window_extremum(F, N, true);
}

DensityEstimate lower_density(const IndexSet& F, std::int64_t N) {
    return prefix_window_extremum(F, N, false);
}

DensityEstimate banach_upper_density(const IndexSet& F, std::int64_t N, std::int64_t W) {
    return banach_window_extremum(F, N, W, true);
}

DensityEstimate banach_lower_density(const IndexSet& F, std::int64_t N, std::int64_t W) {
    return banach_window_extremum(F, N, W, false);
}

SyndeticGapReport syndetic_gap(const IndexSet& F, std::int64_t N) {
    require(N >= 1, Errc::precondition, "N must be positive");
    require(N <= F.horizon(), Errc::horizon_exceeded, "N exceeds horizon");
    auto elems = F.elements_below(N);
    SyndeticGapReport r;
    if (elems.empty()) {
        r.trailing_gap = N - 1;
        r.unbounded_within_horizon = true;
        return r;
    }
    std::int64_t g = elems.front(); // leading gap from 0
    std::int64_t prev = elems.front();
    for (std::size_t i = 1; i < elems.size(); ++i) {
        g = std::max(g, elems[i] - prev);
        prev = elems[i];
    }
    r.max_gap = g;
    r.trailing_gap = (N - 1) - elems.back();
    r.unbounded_within_horizon = r.trailing_gap > g;
    return r;
}

namespace {

bool extend_witness(const IndexSet& F, int k, std::int64_t bound,
                    std::vector<std::int64_t>& tuple,
                    std::vector<std::int64_t>& sums) {
    if (static_cast<int>(tuple.size()) == k) return true;
    std::int64_t partial = 0;
    for (std::int64_t p : tuple) partial += p;
    for (std::int64_t p = partial + 1; p <= bound; ++p) { // sum-dominated: p > sum so far
        bool ok = true;
        std::size_t old_count = sums.size();
        // new subset sums: p plus p + (every existing sum)
        if (p >= F.horizon() || !F.contains(p)) ok = false;
        for (std::size_t i = 0; ok && i < old_count; ++i) {
            std::int64_t s = sums[i] + p;
            if (s >= F.horizon() || !F.contains(s)) ok = false;
        }
        if (!ok) continue;
        sums.push_back(p);
        for (std::size_t i = 0; i < old_count; ++i) sums.push_back(sums[i] + p);
        tuple.push_back(p);
        if (extend_witness(F, k, bound, tuple, sums)) return true;
        tuple.pop_back();
        sums.resize(old_count);
    }
    return false;
}

} // namespace

std::optional<std::vector<std::int64_t>> ip_witness(const IndexSet& F, int k,
                                                    std::int64_t bound) {
    require(k >= 1 && k <= 5, Errc::precondition, "ip_witness supports 1 <= k <= 5");
    require(bound >= 1, Errc::precondition, "bound must be positive");
    std::vector<std::int64_t> tuple, sums;
    if (!extend_witness(F, k, bound, tuple, sums)) return std::nullopt;
    // exhaustive re-verification of all 2^k - 1 subset sums
    for (unsigned mask = 1; mask < (1u << k); ++mask) {
        std::int64_t s = 0;
        for (int i = 0; i < k; ++i)
            if (mask & (1u << i)) s += tuple[static_cast<std::size_t>(i)];
        require(F.contains(s), Errc::internal, "ip witness verification failed");
    }
    return tuple;
}

IndexSet builtin_index_set(const std::string& name, std::int64_t horizon) {
    if (name == "all")
        return IndexSet::from_predicate([](std::int64_t) { return true; }, horizon, name);
    if (name == "none")
        return IndexSet::from_predicate([](std::int64_t) { return false; }, horizon, name);
    if (name == "evens")
        return IndexSet::from_predicate([](std::int64_t i) { return i % 2 == 0; }, horizon,
                                        name);
    if (name == "odds")
        return IndexSet::from_predicate([](std::int64_t i) { return i % 2 == 1; }, horizon,
                                        name);
    if (name == "squares")
        return IndexSet::from_predicate(
            [](std::int64_t i) {
                std::int64_t r = static_cast<std::int64_t>(std::sqrt(double(i)));
                while (r * r > i) --r;
                while ((r + 1) * (r + 1) <= i) ++r;
                return r * r == i;
            },
            horizon, name);
    if (name == "pow2-bursts")
        // ∪_k [2^k, 2^k + k): vanishing upper density, upper Banach density 1
        return IndexSet::from_predicate(
            [](std::int64_t i) {
                for (int k = 1; (std::int64_t{1} << k) <= i; ++k) {
                    std::int64_t base = std::int64_t{1} << k;
                    if (i >= base && i < base + k) return true;
                }
                return false;
            },
            horizon, name);
    if (name.rfind("mult:", 0) == 0) {
        std::int64_t m = std::stoll(name.substr(5));
        require(m >= 1, Errc::schema, "mult:<k> requires k >= 1");
        return IndexSet::from_predicate([m](std::int64_t i) { return i % m == 0; }, horizon,
                                        name);
    }
    fail(Errc::schema, "unknown builtin index set: '" + name + "'");
}

std::vector<std::string> builtin_index_set_names() {
    return {"all", "none", "evens", "odds", "squares", "pow2-bursts", "mult:<k>"};
}

} // namespace meanlab
