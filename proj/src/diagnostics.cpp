#include "meanlab/diagnostics.hpp"

#include "meanlab/errors.hpp"
#include "meanlab/words.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace meanlab {

const char* arith_mode_name(ArithMode mode) {
    return mode == ArithMode::exact ? "exact-rational" : "float64";
}

// ---------------------------------------------------------------------------
// Profiles

BirkhoffProfile BirkhoffProfile::from_steps(std::vector<Rat> steps, double diameter,
                                            std::int64_t resolution) {
    BirkhoffProfile p;
    p.mode = ArithMode::exact;
    p.horizon = static_cast<std::int64_t>(steps.size());
    p.resolution = resolution;
    p.diameter = diameter;
    p.per_term_error_bound = resolution > 0 ? Rat(1, resolution + 1) : Rat(0);

    Int den = 1;
    for (const Rat& s : steps) den = boost::multiprecision::lcm(den, rat_den(s));
    p.common_den = den;
    p.step_nums.reserve(steps.size());
    p.steps_f.reserve(steps.size());
    for (const Rat& s : steps) {
        p.step_nums.push_back(rat_num(s) * (den / rat_den(s)));
        p.steps_f.push_back(to_double(s));
    }
    p.uncertain_prefix.assign(steps.size() + 1, 0);
    return p;
}

BirkhoffProfile BirkhoffProfile::from_steps_f(std::vector<double> steps, double diameter) {
    BirkhoffProfile p;
    p.mode = ArithMode::float64;
    p.horizon = static_cast<std::int64_t>(steps.size());
    p.diameter = diameter;
    p.per_term_error_bound = 0;
    p.steps_f = std::move(steps);
    p.uncertain_prefix.assign(p.steps_f.size() + 1, 0);
    return p;
}

Rat BirkhoffProfile::f(std::int64_t n) const {
    require(n >= 1 && n <= horizon, Errc::precondition, "profile index out of range");
    if (mode == ArithMode::float64) return Rat(f_approx(n));
    Int sum = 0;
    for (std::int64_t i = 0; i < n; ++i) sum += step_nums[static_cast<std::size_t>(i)];
    return Rat(sum, common_den * n);
}

double BirkhoffProfile::f_approx(std::int64_t n) const {
    require(n >= 1 && n <= horizon, Errc::precondition, "profile index out of range");
    double sum = 0, comp = 0;
    for (std::int64_t i = 0; i < n; ++i) {
        double y = steps_f[static_cast<std::size_t>(i)] - comp;
        double t = sum + y;
        comp = (t - sum) - y;
        sum = t;
    }
    return sum / static_cast<double>(n);
}

Rat BirkhoffProfile::error_bound(std::int64_t n) const {
    require(n >= 1 && n <= horizon, Errc::precondition, "profile index out of range");
    if (resolution <= 0) return 0;
    return Rat(uncertain_prefix[static_cast<std::size_t>(n)], n * (resolution + 1));
}

BirkhoffProfile birkhoff_profile_from_buffer(std::span<const std::uint8_t> buf,
                                             std::int64_t a, std::int64_t b,
                                             std::int64_t N, std::int64_t K) {
    require(N >= 1 && K >= 1, Errc::precondition, "horizon and resolution must be positive");
    require(a >= 0 && b >= 0, Errc::precondition, "negative offsets");
    std::int64_t need = std::max(a, b) + N + K;
    require(need <= static_cast<std::int64_t>(buf.size()), Errc::resolution_exceeded,
            "buffer too short for the requested profile");

    BirkhoffProfile p;
    p.mode = ArithMode::exact;
    p.horizon = N;
    p.resolution = K;
    p.diameter = 1.0;
    p.per_term_error_bound = Rat(1, K + 1);
    p.common_den = lcm_upto(static_cast<unsigned>(K));

    // den / i for i = 1..K, computed once
    std::vector<Int> inv(static_cast<std::size_t>(K) + 1);
    for (std::int64_t i = 1; i <= K; ++i)
        inv[static_cast<std::size_t>(i)] = p.common_den / i;

    p.step_nums.reserve(static_cast<std::size_t>(N));
    p.steps_f.reserve(static_cast<std::size_t>(N));
    p.uncertain_prefix.assign(static_cast<std::size_t>(N) + 1, 0);

    const std::uint8_t* xa = buf.data() + a;
    const std::uint8_t* xb = buf.data() + b;
    std::int32_t uncertain = 0;
    for (std::int64_t t = 0; t < N; ++t) {
        std::int64_t diff = 0; // 1-based first difference, 0 = none within K
        for (std::int64_t s = 0; s < K; ++s) {
            if (xa[t + s] != xb[t + s]) {
                diff = s + 1;
                break;
            }
        }
        if (diff == 0) {
            p.step_nums.emplace_back(0);
            p.steps_f.push_back(0.0);
            ++uncertain;
        } else {
            p.step_nums.push_back(inv[static_cast<std::size_t>(diff)]);
            p.steps_f.push_back(1.0 / static_cast<double>(diff));
        }
        p.uncertain_prefix[static_cast<std::size_t>(t) + 1] = uncertain;
    }
    return p;
}

BirkhoffProfile birkhoff_profile(const PointGenerator& x, const PointGenerator& y,
                                 std::int64_t N, std::int64_t K) {
    require(x.resolution() >= N + K && y.resolution() >= N + K, Errc::resolution_exceeded,
            "point resolutions must reach N + K");
    // materialize both before taking spans: views sharing one rule grow a
    // common cache, and growth relocates earlier spans
    x.prefix_span(N + K);
    y.prefix_span(N + K);
    auto xs = x.prefix_span(N + K);
    auto ys = y.prefix_span(N + K);
    BirkhoffProfile p;
    p.mode = ArithMode::exact;
    p.horizon = N;
    p.resolution = K;
    p.diameter = 1.0;
    p.per_term_error_bound = Rat(1, K + 1);
    p.common_den = lcm_upto(static_cast<unsigned>(K));
    std::vector<Int> inv(static_cast<std::size_t>(K) + 1);
    for (std::int64_t i = 1; i <= K; ++i)
        inv[static_cast<std::size_t>(i)] = p.common_den / i;
    p.step_nums.reserve(static_cast<std::size_t>(N));
    p.steps_f.reserve(static_cast<std::size_t>(N));
    p.uncertain_prefix.assign(static_cast<std::size_t>(N) + 1, 0);
    std::int32_t uncertain = 0;
    for (std::int64_t t = 0; t < N; ++t) {
        std::int64_t diff = 0;
        for (std::int64_t s = 0; s < K; ++s) {
            if (xs[static_cast<std::size_t>(t + s)] != ys[static_cast<std::size_t>(t + s)]) {
                diff = s + 1;
                break;
            }
        }
        if (diff == 0) {
            p.step_nums.emplace_back(0);
            p.steps_f.push_back(0.0);
            ++uncertain;
        } else {
            p.step_nums.push_back(inv[static_cast<std::size_t>(diff)]);
            p.steps_f.push_back(1.0 / static_cast<double>(diff));
        }
        p.uncertain_prefix[static_cast<std::size_t>(t) + 1] = uncertain;
    }
    return p;
}

BirkhoffProfile tent_profile(const TentStickPoint& x, const TentStickPoint& y,
                             std::int64_t N) {
    require(N >= 1, Errc::precondition, "horizon must be positive");
    require(x.branch == y.branch, Errc::precondition,
            "tent profiles are taken within one branch");
    if (x.exact && y.exact) {
        std::vector<Rat> steps;
        steps.reserve(static_cast<std::size_t>(N));
        TentStickPoint a = x, b = y;
        for (std::int64_t t = 0; t < N; ++t) {
            steps.push_back(same_branch_distance(a, b));
            a = tent_step(a);
            b = tent_step(b);
        }
        return BirkhoffProfile::from_steps(std::move(steps), tent_space_diameter());
    }
    require(N <= 100000, Errc::precondition,
            "float-mode tent orbits are capped at 10^5 steps");
    std::vector<double> steps;
    steps.reserve(static_cast<std::size_t>(N));
    TentStickPoint a = x, b = y;
    auto coord = [](const TentStickPoint& p) {
        return p.exact ? to_double(p.coordinate) : p.coord_f;
    };
    for (std::int64_t t = 0; t < N; ++t) {
        steps.push_back(std::fabs(coord(a) - coord(b)));
        a = tent_step(a);
        b = tent_step(b);
    }
    return BirkhoffProfile::from_steps_f(std::move(steps), tent_space_diameter());
}

TailBracket tail_limsup(const BirkhoffProfile& profile, std::int64_t N0) {
    require(N0 >= 1 && N0 <= profile.horizon, Errc::precondition,
            "tail start must satisfy 1 <= N0 <= horizon");
    TailBracket out;
    if (profile.exact()) {
        Int sum = 0;
        Int best_max, best_min;
        std::int64_t n_max = 0, n_min = 0;
        for (std::int64_t n = 1; n <= profile.horizon; ++n) {
            sum += profile.step_nums[static_cast<std::size_t>(n - 1)];
            if (n < N0) continue;
            if (n_max == 0) {
                best_max = sum; n_max = n;
                best_min = sum; n_min = n;
                continue;
            }
            if (sum * n_max > best_max * n) { best_max = sum; n_max = n; }
            if (sum * n_min < best_min * n) { best_min = sum; n_min = n; }
        }
        out.max_value = Rat(best_max, profile.common_den * n_max);
        out.min_value = Rat(best_min, profile.common_den * n_min);
        out.arg_max = n_max;
        out.arg_min = n_min;
        return out;
    }
    double sum = 0, comp = 0, best_max = 0, best_min = 0;
    std::int64_t n_max = 0, n_min = 0;
    for (std::int64_t n = 1; n <= profile.horizon; ++n) {
        double yv = profile.steps_f[static_cast<std::size_t>(n - 1)] - comp;
        double tv = sum + yv;
        comp = (tv - sum) - yv;
        sum = tv;
        if (n < N0) continue;
        double f = sum / static_cast<double>(n);
        if (n_max == 0 || f > best_max) { best_max = f; n_max = n; }
        if (n_min == 0 || f < best_min) { best_min = f; n_min = n; }
    }
    out.max_value = Rat(best_max);
    out.min_value = Rat(best_min);
    out.arg_max = n_max;
    out.arg_min = n_min;
    return out;
}

BanachWindowValue banach_profile(const BirkhoffProfile& profile, std::int64_t W) {
    const std::int64_t N = profile.horizon;
    require(W >= 1 && W <= N, Errc::window_error,
            "window floor must satisfy 1 <= W <= horizon");

    // Kahan-compensated double prefix sums keep the pre-filter band tight
    std::vector<double> pd(static_cast<std::size_t>(N) + 1, 0.0);
    {
        double sum = 0, comp = 0;
        for (std::int64_t i = 0; i < N; ++i) {
            double y = profile.steps_f[static_cast<std::size_t>(i)] - comp;
            double t = sum + y;
            comp = (t - sum) - y;
            sum = t;
            pd[static_cast<std::size_t>(i) + 1] = sum;
        }
    }

    const std::int64_t L_hi = std::min(N, 2 * W - 1);
    double best_d = -1.0;
    for (std::int64_t L = W; L <= L_hi; ++L) {
        for (std::int64_t M = 0; M + L <= N; ++M) {
            double v = (pd[static_cast<std::size_t>(M + L)] - pd[static_cast<std::size_t>(M)]) /
                       static_cast<double>(L);
            if (v > best_d) best_d = v;
        }
    }

    BanachWindowValue out;
    if (!profile.exact()) {
        // locate the arg deterministically (first window achieving best)
        for (std::int64_t L = W; L <= L_hi; ++L)
            for (std::int64_t M = 0; M + L <= N; ++M) {
                double v = (pd[static_cast<std::size_t>(M + L)] -
                            pd[static_cast<std::size_t>(M)]) /
                           static_cast<double>(L);
                if (v == best_d) {
                    out.value = Rat(best_d);
                    out.window_start = M;
                    out.window_length = L;
                    return out;
                }
            }
        out.value = Rat(best_d);
        return out;
    }

    // exact confirmation pass over the candidate band
    std::vector<Int> pe(static_cast<std::size_t>(N) + 1);
    pe[0] = 0;
    for (std::int64_t i = 0; i < N; ++i)
        pe[static_cast<std::size_t>(i) + 1] =
            pe[static_cast<std::size_t>(i)] + profile.step_nums[static_cast<std::size_t>(i)];

    const double band = best_d - 1e-9 * std::max(1.0, std::fabs(best_d));
    Int best_num = -1;
    std::int64_t best_len = 1, best_start = 0;
    for (std::int64_t L = W; L <= L_hi; ++L) {
        for (std::int64_t M = 0; M + L <= N; ++M) {
            double v = (pd[static_cast<std::size_t>(M + L)] - pd[static_cast<std::size_t>(M)]) /
                       static_cast<double>(L);
            if (v < band) continue;
            Int num = pe[static_cast<std::size_t>(M + L)] - pe[static_cast<std::size_t>(M)];
            if (best_num < 0 || num * best_len > best_num * L) {
                best_num = num;
                best_len = L;
                best_start = M;
            }
        }
    }
    out.value = Rat(best_num, profile.common_den * best_len);
    out.window_start = best_start;
    out.window_length = best_len;
    return out;
}

// ---------------------------------------------------------------------------
// Scan plumbing

const char* scan_mode_name(ScanMode mode) {
    switch (mode) {
        case ScanMode::mean_equi:        return "mean-equi";
        case ScanMode::mean_sens:        return "mean-sens";
        case ScanMode::banach_mean_equi: return "banach-mean-equi";
        case ScanMode::banach_mean_sens: return "banach-mean-sens";
        case ScanMode::proximal:         return "proximal";
        case ScanMode::banach_proximal:  return "banach-proximal";
    }
    return "unknown";
}

ScanMode scan_mode_from_name(const std::string& name) {
    for (ScanMode m : {ScanMode::mean_equi, ScanMode::mean_sens, ScanMode::banach_mean_equi,
                       ScanMode::banach_mean_sens, ScanMode::proximal,
                       ScanMode::banach_proximal})
        if (name == scan_mode_name(m)) return m;
    fail(Errc::schema, "unknown scan mode: '" + name + "'");
}

const char* verdict_name(Verdict verdict) {
    switch (verdict) {
        case Verdict::consistent:   return "consistent";
        case Verdict::inconsistent: return "inconsistent";
        case Verdict::inconclusive: return "inconclusive";
    }
    return "unknown";
}

const char* sampler_kind_name(SamplerKind kind) {
    switch (kind) {
        case SamplerKind::orbit:       return "orbit";
        case SamplerKind::random_tail: return "random-tail";
        case SamplerKind::perturb:     return "perturb";
    }
    return "unknown";
}

namespace {

// Agreement length that certifies membership in B(x, r) under d = 1/i:
// matching the first m symbols forces d <= 1/(m+1) < r.
std::int64_t agreement_length(const Rat& radius) {
    require(radius > 0 && radius <= 1, Errc::precondition,
            "metric radius must lie in (0, 1]");
    Rat inv = 1 / radius; // need m + 1 > 1/r
    Int m = rat_num(inv) / rat_den(inv); // floor
    if (Rat(m) == inv) return m.convert_to<std::int64_t>();        // 1/r integral: m = 1/r
    return (m + 1).convert_to<std::int64_t>();                     // else ceil(1/r)
}

struct SymbolicSamples {
    std::vector<std::int64_t> offsets;            // orbit sampler
    std::vector<PointGenerator> points;           // random-tail sampler
    std::vector<std::string> labels;
};

SymbolicSamples draw_symbolic_samples(const PointGenerator& x, const Rat& radius,
                                      const ScanParams& params) {
    SymbolicSamples out;
    std::int64_t m = agreement_length(radius);
    if (params.sampler == SamplerKind::orbit) {
        // shifted returns: occurrences of x's length-m prefix in x itself,
        // i.e. orbit points inside the cylinder around x
        std::int64_t scan_len =
            std::min(params.sample_scan_length,
                     x.resolution() - (params.horizon + params.resolution));
        require(scan_len >= m, Errc::sampler_exhausted,
                "resolution leaves no room to search for samples");
        auto text = x.prefix_span(scan_len);
        auto pattern = x.prefix_span(m); // same buffer; subspan of text
        auto occ = occurrences(std::span<const std::uint8_t>(pattern.data(), pattern.size()),
                               text);
        for (std::size_t t = 0; t < occ.size() && static_cast<int>(out.offsets.size()) <
                                                      params.samples;
             ++t) {
            out.offsets.push_back(static_cast<std::int64_t>(occ[t]));
            out.labels.push_back("shift+" + std::to_string(occ[t]));
        }
        require(static_cast<int>(out.offsets.size()) >= params.samples,
                Errc::sampler_exhausted,
                "only " + std::to_string(out.offsets.size()) + " of " +
                    std::to_string(params.samples) +
                    " requested samples exist in the scanned prefix");
        return out;
    }
    // random-tail: prefix-matched points with seeded random suffixes; the
    // full-shift neighborhood rather than the orbit closure
    SplitMix64 rng(params.seed);
    std::int64_t tail_len = params.horizon + params.resolution;
    auto prefix = x.prefix_span(m);
    for (int s = 0; s < params.samples; ++s) {
        std::vector<std::uint8_t> symbols(prefix.begin(), prefix.end());
        symbols.reserve(static_cast<std::size_t>(m + tail_len));
        for (std::int64_t t = 0; t < tail_len; ++t)
            symbols.push_back(static_cast<std::uint8_t>(rng.next() & 1));
        out.points.push_back(
            PointGenerator::explicit_prefix(FiniteWord::from_symbols(std::move(symbols))));
        out.labels.push_back("random-tail#" + std::to_string(s));
    }
    return out;
}

std::vector<TentStickPoint> draw_tent_samples(const TentStickPoint& x, const Rat& radius,
                                              const ScanParams& params,
                                              std::vector<std::string>& labels) {
    require(x.exact, Errc::precondition,
            "tent sampling requires an exact-mode origin point");
    SplitMix64 rng(params.seed);
    std::vector<TentStickPoint> out;
    Rat range_hi = x.branch == 0 ? Rat(1) : Rat(1, x.branch);
    const std::int64_t den = std::int64_t{1} << 20;
    for (int s = 0; s < params.samples; ++s) {
        // u uniform in (0, 1] with denominator 2^20; alternate directions
        Rat u(static_cast<std::int64_t>(rng.below(den)) + 1, den);
        Rat offset = u * radius;
        Rat c = (s % 2 == 0) ? Rat(x.coordinate + offset) : Rat(x.coordinate - offset);
        if (c > range_hi) c = range_hi;
        if (c < 0) c = 0;
        out.push_back(x.branch == 0 ? TentStickPoint::baseline(c)
                                    : TentStickPoint::stick(x.branch, c));
        labels.push_back("coord=" + rat_to_string(c));
    }
    return out;
}

// Tail or Banach summary of one pair profile.
PairStat summarize_pair(const BirkhoffProfile& profile, const ScanParams& params,
                        bool banach, std::string label_a, std::string label_b,
                        const Rat& radius) {
    PairStat stat;
    stat.a = std::move(label_a);
    stat.b = std::move(label_b);
    stat.radius = radius;
    auto bracket = tail_limsup(profile, params.tail_start);
    stat.tail_max = bracket.max_value;
    stat.tail_min = bracket.min_value;
    stat.arg_max = bracket.arg_max;
    stat.error_bound = profile.error_bound(bracket.arg_max);
    if (banach) stat.banach = banach_profile(profile, params.window_floor);
    return stat;
}

// The value a scan compares against its threshold.
const Rat& scan_value(const PairStat& stat, bool banach) {
    return banach ? stat.banach->value : stat.tail_max;
}

} // namespace

namespace {

// Shared engine for the four equi/sens scans. `banach` switches the
// summary statistic; `sens` switches the quantifier structure.
DiagnosticReport mean_scan_engine(const MetricSystem& sys, bool sens, bool banach,
                                  const ScanParams& params) {
    DiagnosticReport report;
    report.mode = sens ? (banach ? ScanMode::banach_mean_sens : ScanMode::mean_sens)
                       : (banach ? ScanMode::banach_mean_equi : ScanMode::mean_equi);
    report.params = params;
    require(!params.grid.empty(), Errc::precondition, "scan grid must be non-empty");
    require(params.tail_start >= 1 && params.tail_start < params.horizon, Errc::precondition,
            "tail start must lie in [1, horizon)");

    const Rat& threshold = sens ? params.delta : params.epsilon;
    require(threshold > 0, Errc::precondition, "scan threshold must be positive");

    bool all_cells_ok = true;
    bool any_cell_ok = false;
    bool any_pairs = false;
    bool exact_everywhere = true;

    if (sys.kind() == MetricSystem::Kind::symbolic) {
        const PointGenerator& x = sys.origin_generator();
        report.system = x.describe();
        for (const Rat& radius : params.grid) {
            GridCell cell;
            cell.radius = radius;
            auto samples = draw_symbolic_samples(x, radius, params);
            if (report.sample_labels.empty()) report.sample_labels = samples.labels;

            std::vector<PairStat> cell_pairs;
            if (params.sampler == SamplerKind::orbit) {
                std::int64_t max_off = 0;
                for (std::int64_t o : samples.offsets) max_off = std::max(max_off, o);
                auto buf = x.prefix_span(max_off + params.horizon + params.resolution);
                if (sens) {
                    // witnesses are pairs (x, y) with y in B(x, radius)
                    for (std::size_t i = 1; i < samples.offsets.size(); ++i)
                        cell_pairs.push_back(summarize_pair(
                            birkhoff_profile_from_buffer(buf, samples.offsets[0],
                                                         samples.offsets[i], params.horizon,
                                                         params.resolution),
                            params, banach, samples.labels[0], samples.labels[i], radius));
                } else {
                    for (std::size_t i = 0; i < samples.offsets.size(); ++i)
                        for (std::size_t j = i + 1; j < samples.offsets.size(); ++j)
                            cell_pairs.push_back(summarize_pair(
                                birkhoff_profile_from_buffer(buf, samples.offsets[i],
                                                             samples.offsets[j],
                                                             params.horizon,
                                                             params.resolution),
                                params, banach, samples.labels[i], samples.labels[j],
                                radius));
                }
            } else {
                auto& pts = samples.points;
                if (sens) {
                    for (std::size_t i = 0; i < pts.size(); ++i)
                        cell_pairs.push_back(summarize_pair(
                            birkhoff_profile(x, pts[i], params.horizon, params.resolution),
                            params, banach, "x", samples.labels[i], radius));
                } else {
                    for (std::size_t i = 0; i < pts.size(); ++i)
                        for (std::size_t j = i + 1; j < pts.size(); ++j)
                            cell_pairs.push_back(summarize_pair(
                                birkhoff_profile(pts[i], pts[j], params.horizon,
                                                 params.resolution),
                                params, banach, samples.labels[i], samples.labels[j],
                                radius));
                }
            }

            cell.samples_used = static_cast<std::int64_t>(samples.offsets.size() +
                                                          samples.points.size());
            bool found_witness = false;
            bool first = true;
            for (auto& stat : cell_pairs) {
                const Rat& v = scan_value(stat, banach);
                if (first || v > cell.worst) cell.worst = v;
                first = false;
                if (sens && v > threshold && !found_witness) {
                    stat.witness = true;
                    found_witness = true;
                }
            }
            cell.satisfied = sens ? found_witness
                                  : (!cell_pairs.empty() && cell.worst < threshold);
            if (!sens && !cell.satisfied) {
                // mark the violating pair as the exact witness
                for (auto& stat : cell_pairs)
                    if (scan_value(stat, banach) >= threshold) {
                        stat.witness = true;
                        break;
                    }
            }
            report.pairs.insert(report.pairs.end(), cell_pairs.begin(), cell_pairs.end());
            any_pairs |= !cell_pairs.empty();
            all_cells_ok &= cell.satisfied;
            any_cell_ok |= cell.satisfied;
            report.grid.push_back(cell);
        }
        report.arith_mode = ArithMode::exact;
    } else {
        const TentStickPoint& x = sys.origin_tent();
        std::ostringstream os;
        os << "tent-stick(branch=" << x.branch << ",coord="
           << (x.exact ? rat_to_string(x.coordinate) : std::to_string((double)x.coord_f))
           << ")";
        report.system = os.str();
        for (const Rat& radius : params.grid) {
            GridCell cell;
            cell.radius = radius;
            std::vector<std::string> labels;
            auto pts = draw_tent_samples(x, radius, params, labels);
            if (report.sample_labels.empty()) report.sample_labels = labels;
            std::vector<PairStat> cell_pairs;
            if (sens) {
                for (std::size_t i = 0; i < pts.size(); ++i)
                    cell_pairs.push_back(
                        summarize_pair(tent_profile(x, pts[i], params.horizon), params,
                                       banach, "x", labels[i], radius));
            } else {
                for (std::size_t i = 0; i < pts.size(); ++i)
                    for (std::size_t j = i + 1; j < pts.size(); ++j)
                        cell_pairs.push_back(
                            summarize_pair(tent_profile(pts[i], pts[j], params.horizon),
                                           params, banach, labels[i], labels[j], radius));
            }
            cell.samples_used = static_cast<std::int64_t>(pts.size());
            bool found_witness = false;
            bool first = true;
            for (auto& stat : cell_pairs) {
                const Rat& v = scan_value(stat, banach);
                if (first || v > cell.worst) cell.worst = v;
                first = false;
                if (sens && v > threshold && !found_witness) {
                    stat.witness = true;
                    found_witness = true;
                }
            }
            cell.satisfied = sens ? found_witness
                                  : (!cell_pairs.empty() && cell.worst < threshold);
            if (!sens && !cell.satisfied)
                for (auto& stat : cell_pairs)
                    if (scan_value(stat, banach) >= threshold) {
                        stat.witness = true;
                        break;
                    }
            report.pairs.insert(report.pairs.end(), cell_pairs.begin(), cell_pairs.end());
            any_pairs |= !cell_pairs.empty();
            all_cells_ok &= cell.satisfied;
            any_cell_ok |= cell.satisfied;
            report.grid.push_back(cell);
            exact_everywhere &= x.exact;
        }
        report.arith_mode = exact_everywhere ? ArithMode::exact : ArithMode::float64;
    }

    if (sens) {
        // sensitivity: every neighborhood must produce a witness; absence of
        // a witness never refutes it at finite sample budgets
        report.verdict = all_cells_ok ? Verdict::consistent : Verdict::inconclusive;
    } else if (any_cell_ok) {
        report.verdict = Verdict::consistent;
    } else {
        report.verdict = any_pairs ? Verdict::inconsistent : Verdict::inconclusive;
    }
    return report;
}

} // namespace

DiagnosticReport mean_equi_scan(const MetricSystem& sys, const ScanParams& params) {
    return mean_scan_engine(sys, false, false, params);
}

DiagnosticReport mean_sens_scan(const MetricSystem& sys, const ScanParams& params) {
    return mean_scan_engine(sys, true, false, params);
}

DiagnosticReport banach_mean_scan(const MetricSystem& sys, bool sens,
                                  const ScanParams& params) {
    return mean_scan_engine(sys, sens, true, params);
}

// ---------------------------------------------------------------------------
// Proximality

namespace {

DiagnosticReport proximality_from_profile(const BirkhoffProfile& profile, bool banach,
                                          const ScanParams& params, std::string system) {
    DiagnosticReport report;
    report.mode = banach ? ScanMode::banach_proximal : ScanMode::proximal;
    report.params = params;
    report.system = std::move(system);
    report.arith_mode = profile.mode;
    require(!params.grid.empty(), Errc::precondition, "epsilon grid must be non-empty");

    // min over n <= N of d(T^n x, T^n y)
    std::int64_t arg_min = 0;
    bool have = false;
    Rat best;
    for (std::int64_t t = 0; t < profile.horizon; ++t) {
        Rat v = profile.exact()
                    ? Rat(profile.step_nums[static_cast<std::size_t>(t)], profile.common_den)
                    : Rat(profile.steps_f[static_cast<std::size_t>(t)]);
        if (!have || v < best) {
            best = v;
            arg_min = t;
            have = true;
        }
        if (best == 0) break;
    }
    report.min_distance = best;
    report.min_distance_at = arg_min;

    bool min_below_all = true;
    bool densities_below = true;
    for (const Rat& eps : params.grid) {
        std::vector<std::int64_t> far;
        for (std::int64_t t = 0; t < profile.horizon; ++t) {
            Rat v = profile.exact()
                        ? Rat(profile.step_nums[static_cast<std::size_t>(t)],
                              profile.common_den)
                        : Rat(profile.steps_f[static_cast<std::size_t>(t)]);
            if (v >= eps) far.push_back(t);
        }
        auto F = IndexSet::from_sorted(std::move(far), profile.horizon);
        auto est = banach_upper_density(F, profile.horizon,
                                        std::min(params.window_floor, profile.horizon));
        report.far_time_densities.emplace_back(eps, est);
        if (!(best < eps)) min_below_all = false;
        if (!(est.value < params.banach_density_threshold)) densities_below = false;
    }
    report.verdict = (banach ? densities_below : min_below_all) ? Verdict::consistent
                                                                : Verdict::inconsistent;
    return report;
}

} // namespace

DiagnosticReport proximality_scan(const MetricSystem& sys, const PointGenerator& y,
                                  bool banach, const ScanParams& params) {
    require(sys.kind() == MetricSystem::Kind::symbolic, Errc::precondition,
            "generator pair proximality requires a symbolic system");
    const PointGenerator& x = sys.origin_generator();
    auto profile = birkhoff_profile(x, y, params.horizon, params.resolution);
    return proximality_from_profile(profile, banach, params,
                                    x.describe() + " vs " + y.describe());
}

DiagnosticReport proximality_scan_tent(const MetricSystem& sys, const TentStickPoint& y,
                                       bool banach, const ScanParams& params) {
    require(sys.kind() == MetricSystem::Kind::tent_stick, Errc::precondition,
            "tent proximality requires a tent system");
    auto profile = tent_profile(sys.origin_tent(), y, params.horizon);
    return proximality_from_profile(profile, banach, params, "tent pair");
}

IndexSet return_time_set(const PointGenerator& x, const FiniteWord& w, std::int64_t N) {
    require(!w.empty(), Errc::precondition, "cylinder word must be non-empty");
    require(N >= 1, Errc::precondition, "N must be positive");
    std::int64_t need = N + static_cast<std::int64_t>(w.size());
    require(x.resolution() >= need, Errc::resolution_exceeded,
            "resolution must reach N + |w|");
    auto text = x.prefix_span(need - 1);
    auto occ = occurrences(w.symbols(), text);
    std::vector<std::int64_t> times;
    for (std::size_t o : occ) {
        if (static_cast<std::int64_t>(o) >= N) break;
        times.push_back(static_cast<std::int64_t>(o));
    }
    return IndexSet::from_sorted(std::move(times), N);
}

// ---------------------------------------------------------------------------
// Cyclic-cover bound

CoverBoundResult cover_bme_bound(std::span<const CoverCell> cover, const Rat& epsilon,
                                 const Rat& diam_x) {
    require(!cover.empty(), Errc::malformed_cover, "cover must be non-empty");
    require(epsilon > 0, Errc::precondition, "epsilon must be positive");
    CoverBoundResult out;
    out.all_verified = true;
    for (const CoverCell& cell : cover) {
        if (cell.diameter >= epsilon) ++out.large_cells;
        out.all_verified &= cell.verified_cyclic;
    }
    out.epsilon_n = epsilon * static_cast<std::int64_t>(cover.size());
    if (Rat(out.large_cells) < out.epsilon_n) {
        out.accepted = true;
        out.bound = (1 + 2 * diam_x) * epsilon;
    }
    return out;
}

std::vector<CoverCell> rotation_arc_cover(std::int64_t p, std::int64_t q) {
    require(q >= 1 && p >= 0 && p < q, Errc::precondition,
            "rotation must satisfy 0 <= p/q < 1");
    // arcs U_j = [j/q, (j+1)/q); in orbit order V_t = U_{t p mod q} the map
    // sends V_t onto V_{t+1} exactly: endpoints shift by p/q
    std::vector<CoverCell> cover;
    cover.reserve(static_cast<std::size_t>(q));
    for (std::int64_t t = 0; t < q; ++t) {
        std::int64_t j = (t * p) % q;
        std::int64_t j_next = ((t + 1) * p) % q;
        // T(U_j) = [j/q + p/q, (j+1)/q + p/q) mod 1 = U_{(j+p) mod q}
        bool verified = ((j + p) % q) == j_next;
        CoverCell cell;
        cell.diameter = Rat(1, q); // arc length; arc metric diameter for q >= 2
        cell.verified_cyclic = verified;
        cover.push_back(cell);
    }
    return cover;
}

} // namespace meanlab
