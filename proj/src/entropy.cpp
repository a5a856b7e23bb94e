#include "meanlab/entropy.hpp"

#include "meanlab/errors.hpp"
#include "meanlab/words.hpp"

#include <cmath>

namespace meanlab {

ComplexityCurve complexity_curve(const PointGenerator& g, std::int64_t L, int n_max,
                                 unsigned threads) {
    require(L >= 1, Errc::precondition, "prefix length must be positive");
    require(n_max >= 1 && static_cast<std::int64_t>(n_max) <= L, Errc::precondition,
            "n_max must satisfy 1 <= n_max <= L");
    require(g.resolution() >= L, Errc::resolution_exceeded,
            "prefix length exceeds generator resolution");

    auto text = g.prefix_span(L);
    ComplexityCurve curve;
    curve.prefix_length = L;
    curve.n_max = n_max;
    curve.p.reserve(static_cast<std::size_t>(n_max));
    curve.h_est.reserve(static_cast<std::size_t>(n_max));
    for (int n = 1; n <= n_max; ++n) {
        std::int64_t count = static_cast<std::int64_t>(
            distinct_factor_count(text, static_cast<std::size_t>(n), g.alphabet_size(),
                                  threads));
        curve.p.push_back(count);
        curve.h_est.push_back(std::log(static_cast<double>(count)) / n);
    }

    // saturation probe: did the top count still grow over the last doubling?
    if (L >= 2 * n_max) {
        std::int64_t half = L / 2;
        std::int64_t at_half = static_cast<std::int64_t>(distinct_factor_count(
            text.subspan(0, static_cast<std::size_t>(half)),
            static_cast<std::size_t>(n_max), g.alphabet_size(), threads));
        curve.saturated = at_half == curve.p.back();
    }
    return curve;
}

EntropySummary entropy_report(const ComplexityCurve& curve, double threshold) {
    require(!curve.p.empty(), Errc::precondition, "empty complexity curve");
    EntropySummary s;
    s.threshold = threshold;
    s.h_at_nmax = curve.h_est.back();
    s.saturated = curve.saturated;
    s.zero_entropy_consistent = s.h_at_nmax < threshold;

    // least-squares slope of ln p(n) against n over the last quartile
    int n_max = curve.n_max;
    int start = std::max(1, n_max - std::max(1, n_max / 4));
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    int count = 0;
    for (int n = start; n <= n_max; ++n) {
        double x = n, y = std::log(static_cast<double>(curve.p_at(n)));
        sx += x; sy += y; sxx += x * x; sxy += x * y;
        ++count;
    }
    double denom = count * sxx - sx * sx;
    s.last_quartile_slope = denom != 0 ? (count * sxy - sx * sy) / denom : 0.0;
    return s;
}

} // namespace meanlab
