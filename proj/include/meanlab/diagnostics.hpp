#pragma once

#include "meanlab/density.hpp"
#include "meanlab/rational.hpp"
#include "meanlab/systems.hpp"

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace meanlab {

enum class ArithMode { exact, float64 };

const char* arith_mode_name(ArithMode mode);

// Per-step orbit distances d(T^i x, T^i y) for i = 0..horizon-1, held as
// exact numerators over one common denominator so means and window means
// are integer arithmetic. Float mode (tagged) exists for non-rational tent
// input only; exact and float values never mix in one comparison.
class BirkhoffProfile {
public:
    ArithMode mode = ArithMode::exact;
    std::int64_t horizon = 0;    // number of steps
    std::int64_t resolution = 0; // metric resolution K (symbolic); 0 otherwise
    double diameter = 1.0;
    Rat per_term_error_bound;    // 1/(K+1) symbolic, else 0

    Int common_den = 1;          // exact mode
    std::vector<Int> step_nums;  // exact mode: d_i = step_nums[i]/common_den
    std::vector<double> steps_f; // always populated

    // count of steps among the first n reported as 0 only because the two
    // prefixes agree through K
    std::vector<std::int32_t> uncertain_prefix;

    static BirkhoffProfile from_steps(std::vector<Rat> steps, double diameter,
                                      std::int64_t resolution = 0);
    static BirkhoffProfile from_steps_f(std::vector<double> steps, double diameter);

    bool exact() const noexcept { return mode == ArithMode::exact; }

    // f_n = (1/n) sum_{i<n} d_i, 1 <= n <= horizon; exact mode only.
    Rat f(std::int64_t n) const;
    double f_approx(std::int64_t n) const;

    // Bound on |true f_n - reported f_n| from metric truncation:
    // uncertain(n) / (n (K+1)).
    Rat error_bound(std::int64_t n) const;
};

// d(sigma^i x, sigma^i y) for i < N at metric resolution K; exact.
BirkhoffProfile birkhoff_profile(const PointGenerator& x, const PointGenerator& y,
                                 std::int64_t N, std::int64_t K);

// Same over a shared materialized buffer: the orbits are buf[a+i..] and
// buf[b+i..]; both windows plus K lookahead must fit in the buffer.
BirkhoffProfile birkhoff_profile_from_buffer(std::span<const std::uint8_t> buf,
                                             std::int64_t a, std::int64_t b,
                                             std::int64_t N, std::int64_t K);

// Tent orbits; exact when both points are exact-mode, tagged float64
// otherwise. Points must lie on one branch (diagnostic scans sample within
// a branch; cross-branch distances are irrational).
BirkhoffProfile tent_profile(const TentStickPoint& x, const TentStickPoint& y,
                             std::int64_t N);

// max and min of f_n over n in [N0, horizon]: the finite surrogate for the
// limsup, bracketed from below to expose oscillation.
struct TailBracket {
    Rat max_value;
    Rat min_value;
    std::int64_t arg_max = 0;
    std::int64_t arg_min = 0;
};

TailBracket tail_limsup(const BirkhoffProfile& profile, std::int64_t N0);

// max over windows [M, M+L) ⊆ [0, horizon) with L >= W of the window-mean
// distance. Exact: a double pre-filter (Kahan prefix sums) narrows the
// candidates, every surviving comparison is integer cross-multiplication,
// and window lengths reduce to [W, 2W) by the mediant splitting argument.
struct BanachWindowValue {
    Rat value;
    std::int64_t window_start = 0;
    std::int64_t window_length = 0;
};

BanachWindowValue banach_profile(const BirkhoffProfile& profile, std::int64_t W);

// ---------------------------------------------------------------------------
// Scans

enum class ScanMode {
    mean_equi,
    mean_sens,
    banach_mean_equi,
    banach_mean_sens,
    proximal,
    banach_proximal,
};

const char* scan_mode_name(ScanMode mode);
ScanMode scan_mode_from_name(const std::string& name);

enum class Verdict { consistent, inconsistent, inconclusive };

const char* verdict_name(Verdict verdict);

enum class SamplerKind { orbit, random_tail, perturb };

const char* sampler_kind_name(SamplerKind kind);

struct ScanParams {
    Rat epsilon;             // target of the scanned definition
    Rat delta;               // sensitivity constant (sens modes)
    std::vector<Rat> grid;   // delta grid (equi) / epsilon grid (sens, proximal)
    std::int64_t horizon = 10000;
    std::int64_t tail_start = 1000;
    std::int64_t window_floor = 100;   // Banach modes
    std::int64_t resolution = 200;     // metric resolution K (symbolic)
    int samples = 11;
    std::uint64_t seed = 0;
    SamplerKind sampler = SamplerKind::orbit;
    std::int64_t sample_scan_length = 1000000; // orbit sampler search range
    Rat banach_density_threshold = Rat(1, 20); // banach-proximal verdict cut
};

struct PairStat {
    std::string a, b;        // sample labels (shift offsets / coordinates)
    Rat radius;              // the delta or epsilon the pair was drawn for
    Rat tail_max, tail_min;
    std::int64_t arg_max = 0;
    std::optional<BanachWindowValue> banach;
    Rat error_bound;         // metric truncation bound at the tail max
    bool witness = false;    // this pair decided the verdict
};

struct GridCell {
    Rat radius;
    Rat worst;               // max tail (equi) / best witness value (sens)
    bool satisfied = false;  // the cell's clause of the definition held
    std::int64_t samples_used = 0;
};

struct DiagnosticReport {
    ScanMode mode = ScanMode::mean_equi;
    Verdict verdict = Verdict::inconclusive;
    ArithMode arith_mode = ArithMode::exact;
    ScanParams params;
    std::string system;      // origin description
    std::vector<std::string> sample_labels;
    std::vector<PairStat> pairs;
    std::vector<GridCell> grid;
    // proximality extras
    std::optional<Rat> min_distance;
    std::int64_t min_distance_at = 0;
    std::vector<std::pair<Rat, DensityEstimate>> far_time_densities;
    std::string notes;
};

// Mean-equicontinuity scan at x: for each delta in the grid, samples
// points of B(x, delta) (orbit returns for symbolic systems, coordinate
// perturbations for tent systems) and takes the max tail over all sampled
// pairs; consistent when some delta keeps every pair below epsilon.
DiagnosticReport mean_equi_scan(const MetricSystem& sys, const ScanParams& params);

// Mean-sensitivity scan at x: for each epsilon in the grid, looks for a
// sampled y in B(x, epsilon) with tail above delta; consistent when every
// epsilon admits a witness, inconclusive otherwise (samples cannot refute
// sensitivity).
DiagnosticReport mean_sens_scan(const MetricSystem& sys, const ScanParams& params);

// Same two scans with the windowed (Banach) mean in place of the Cesaro
// tail.
DiagnosticReport banach_mean_scan(const MetricSystem& sys, bool sens,
                                  const ScanParams& params);

// Proximality / Banach proximality of the pair (x, y): reports
// min_{n<=N} d(T^n x, T^n y) and, per grid epsilon, the Banach upper
// density of the far-time set {n : d >= epsilon}.
DiagnosticReport proximality_scan(const MetricSystem& sys, const PointGenerator& y,
                                  bool banach, const ScanParams& params);
DiagnosticReport proximality_scan_tent(const MetricSystem& sys, const TentStickPoint& y,
                                       bool banach, const ScanParams& params);

// Return times {n < N : x_[n, n+|w|) = w} of a symbolic point to the
// cylinder [w], as an IndexSet ready for the density module.
IndexSet return_time_set(const PointGenerator& x, const FiniteWord& w, std::int64_t N);

// ---------------------------------------------------------------------------
// Cyclic-cover bound

struct CoverCell {
    Rat diameter;
    bool verified_cyclic = false;
};

struct CoverBoundResult {
    bool accepted = false;
    Rat bound;               // (1 + 2 diamX) * epsilon when accepted
    std::int64_t large_cells = 0;
    Rat epsilon_n;           // epsilon * n, the hypothesis cut
    bool all_verified = false;
};

// If #{i : diam(U_i) >= epsilon} < epsilon * n, returns the Banach-mean
// modulus bound (1 + 2 diamX) * epsilon; otherwise rejects with the
// violating count. Cyclicity flags are taken on trust and echoed unless
// the cover came from rotation_arc_cover below.
CoverBoundResult cover_bme_bound(std::span<const CoverCell> cover, const Rat& epsilon,
                                 const Rat& diam_x);

// The natural q-arc cover of the circle rotation by p/q, relabeled in
// orbit order so T(U_i) ⊆ U_{i+1 mod q}; the inclusion is verified by
// exact arc-endpoint arithmetic, so the cells carry verified_cyclic=true.
std::vector<CoverCell> rotation_arc_cover(std::int64_t p, std::int64_t q);

} // namespace meanlab
