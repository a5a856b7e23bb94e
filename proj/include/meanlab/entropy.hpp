#pragma once

#include "meanlab/systems.hpp"

#include <cstdint>
#include <vector>

namespace meanlab {

// Block-complexity counts p(n) of a length-L prefix and the per-n
// estimator h_est(n) = ln p(n) / n.
struct ComplexityCurve {
    std::int64_t prefix_length = 0;
    int n_max = 0;
    std::vector<std::int64_t> p;     // p[j] = p(j+1), exact counts
    std::vector<double> h_est;       // h_est[j] = ln p(j+1) / (j+1)
    // whether p(n_max) kept growing over the last doubling of L
    bool saturated = false;

    std::int64_t p_at(int n) const { return p[static_cast<std::size_t>(n - 1)]; }
    double h_at(int n) const { return h_est[static_cast<std::size_t>(n - 1)]; }
};

// Exact factor counts of the length-L prefix for n = 1..n_max. Counting
// packs factors into 64-bit codes (alphabet <= 4, n <= 32), so the counts
// are exact, not fingerprint estimates. The saturation probe recounts
// p(n_max) at L/2.
ComplexityCurve complexity_curve(const PointGenerator& g, std::int64_t L, int n_max,
                                 unsigned threads = 1);

struct EntropySummary {
    double h_at_nmax = 0;
    // least-squares slope of ln p(n) over the last quartile of n; tends to
    // the entropy for subshift languages and to 0 on zero-entropy data
    double last_quartile_slope = 0;
    double threshold = 0.02;
    bool zero_entropy_consistent = false; // h_est(n_max) < threshold
    bool saturated = false;
};

EntropySummary entropy_report(const ComplexityCurve& curve, double threshold = 0.02);

} // namespace meanlab
