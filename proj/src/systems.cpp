#include "meanlab/systems.hpp"

#include "meanlab/errors.hpp"

#include <boost/multiprecision/cpp_int.hpp>

#include <cmath>
#include <mutex>
#include <sstream>

namespace meanlab {

namespace {
constexpr std::int64_t kUnboundedResolution = std::int64_t{1} << 60;
}

// ---------------------------------------------------------------------------
// PointGenerator implementations

struct PointGenerator::Impl {
    virtual ~Impl() = default;
    virtual std::uint8_t compute(std::int64_t i) const = 0;
    virtual std::int64_t resolution() const = 0;
    virtual std::uint8_t alphabet() const { return 2; }
    virtual std::string describe() const = 0;

    // Bulk fill of [begin, end); overridden where a streaming rule beats
    // per-index evaluation.
    virtual void fill(std::int64_t begin, std::int64_t end, std::uint8_t* out) const {
        for (std::int64_t i = begin; i < end; ++i) out[i - begin] = compute(i);
    }

    // Materialized prefix cache. Spans handed out stay valid until a longer
    // prefix is requested.
    mutable std::mutex cache_mutex;
    mutable std::vector<std::uint8_t> cache;

    std::span<const std::uint8_t> materialize(std::int64_t L) const {
        require(L >= 0, Errc::precondition, "negative prefix length");
        require(L <= resolution(), Errc::resolution_exceeded,
                "prefix length " + std::to_string(L) + " exceeds generator resolution");
        std::lock_guard<std::mutex> lock(cache_mutex);
        if (static_cast<std::int64_t>(cache.size()) < L) {
            std::int64_t old = static_cast<std::int64_t>(cache.size());
            cache.resize(static_cast<std::size_t>(L));
            fill(old, L, cache.data() + old);
        }
        return {cache.data(), static_cast<std::size_t>(L)};
    }
};

namespace {

struct EventuallyPeriodicImpl final : PointGenerator::Impl {
    FiniteWord pre, period;

    std::uint8_t compute(std::int64_t i) const override {
        auto p = static_cast<std::int64_t>(pre.size());
        if (i < p) return pre[static_cast<std::size_t>(i)];
        return period[static_cast<std::size_t>((i - p) % static_cast<std::int64_t>(period.size()))];
    }
    std::int64_t resolution() const override { return kUnboundedResolution; }
    std::uint8_t alphabet() const override { return period.alphabet_size(); }
    std::string describe() const override {
        return "eventually-periodic(\"" + pre.to_ascii() + "\",\"" + period.to_ascii() + "\")";
    }
};

struct SubstitutionImpl final : PointGenerator::Impl {
    std::map<std::uint8_t, FiniteWord> rules;
    std::uint8_t seed = 0;
    std::int64_t cap = 0;

    // Streaming fixed-point expansion: the tape starts as s(seed), which
    // already spells the images of position 0, and grows by appending
    // s(tape[read_pos]) for read_pos = 1, 2, ...
    mutable std::vector<std::uint8_t> tape;
    mutable std::size_t read_pos = 1;
    mutable std::mutex tape_mutex;

    void ensure(std::int64_t L) const {
        std::lock_guard<std::mutex> lock(tape_mutex);
        if (tape.empty()) {
            const FiniteWord& image = rules.at(seed);
            tape.assign(image.symbols().begin(), image.symbols().end());
        }
        while (static_cast<std::int64_t>(tape.size()) < L) {
            require(read_pos < tape.size(), Errc::precondition,
                    "substitution is not expanding");
            const FiniteWord& image = rules.at(tape[read_pos++]);
            tape.insert(tape.end(), image.symbols().begin(), image.symbols().end());
        }
    }

    std::uint8_t compute(std::int64_t i) const override {
        ensure(i + 1);
        return tape[static_cast<std::size_t>(i)];
    }
    void fill(std::int64_t begin, std::int64_t end, std::uint8_t* out) const override {
        ensure(end);
        std::copy(tape.begin() + begin, tape.begin() + end, out);
    }
    std::int64_t resolution() const override { return cap; }
    std::uint8_t alphabet() const override { return rules.begin()->second.alphabet_size(); }
    std::string describe() const override {
        std::ostringstream os;
        os << "substitution(";
        for (const auto& [sym, image] : rules)
            os << int(sym) << "->" << image.to_ascii() << ",";
        os << "seed=" << int(seed) << ")";
        return os.str();
    }
};

struct SturmianRationalImpl final : PointGenerator::Impl {
    std::int64_t p = 0, q = 1;       // alpha = p/q
    std::int64_t phase_num = 0, phase_den = 1;

    std::uint8_t compute(std::int64_t i) const override {
        // {phase + i p/q} < 1 - p/q over denominator q*phase_den, exactly
        unsigned __int128 den = static_cast<unsigned __int128>(q) *
                                static_cast<unsigned __int128>(phase_den);
        unsigned __int128 num = static_cast<unsigned __int128>(phase_num) *
                                    static_cast<unsigned __int128>(q) +
                                static_cast<unsigned __int128>(i % (q * phase_den)) *
                                    static_cast<unsigned __int128>(p) *
                                    static_cast<unsigned __int128>(phase_den);
        num %= den;
        unsigned __int128 threshold = static_cast<unsigned __int128>(q - p) *
                                      static_cast<unsigned __int128>(phase_den);
        return num < threshold ? 0 : 1;
    }
    std::int64_t resolution() const override { return kUnboundedResolution; }
    std::string describe() const override {
        return "sturmian(" + std::to_string(p) + "/" + std::to_string(q) + ",phase=" +
               std::to_string(phase_num) + "/" + std::to_string(phase_den) + ")";
    }
};

struct SturmianFixedImpl final : PointGenerator::Impl {
    unsigned __int128 alpha = 0, phase = 0; // fractions of 2^128
    std::string label;

    std::uint8_t compute(std::int64_t i) const override {
        // wraparound multiplication realizes {phase + i*alpha} exactly at
        // 2^-128 resolution
        unsigned __int128 frac = phase + static_cast<unsigned __int128>(i) * alpha;
        unsigned __int128 threshold = static_cast<unsigned __int128>(0) - alpha; // 1 - alpha
        return frac < threshold ? 0 : 1;
    }
    std::int64_t resolution() const override { return kUnboundedResolution; }
    std::string describe() const override {
        return label.empty() ? "sturmian(fixed-point-128)" : label;
    }
};

struct ExplicitImpl final : PointGenerator::Impl {
    FiniteWord word;
    std::uint8_t compute(std::int64_t i) const override {
        return word[static_cast<std::size_t>(i)];
    }
    void fill(std::int64_t begin, std::int64_t end, std::uint8_t* out) const override {
        std::copy(word.symbols().begin() + begin, word.symbols().begin() + end, out);
    }
    std::int64_t resolution() const override { return static_cast<std::int64_t>(word.size()); }
    std::uint8_t alphabet() const override { return word.alphabet_size(); }
    std::string describe() const override {
        return "explicit-prefix(|w|=" + std::to_string(word.size()) + ")";
    }
};

struct WordTailZerosImpl final : PointGenerator::Impl {
    FiniteWord word;
    std::string label;
    std::uint8_t compute(std::int64_t i) const override {
        return i < static_cast<std::int64_t>(word.size()) ? word[static_cast<std::size_t>(i)]
                                                          : 0;
    }
    void fill(std::int64_t begin, std::int64_t end, std::uint8_t* out) const override {
        std::int64_t w = static_cast<std::int64_t>(word.size());
        for (std::int64_t i = begin; i < end; ++i)
            out[i - begin] = i < w ? word[static_cast<std::size_t>(i)] : 0;
    }
    std::int64_t resolution() const override { return kUnboundedResolution; }
    std::uint8_t alphabet() const override { return word.alphabet_size(); }
    std::string describe() const override {
        return label.empty() ? "word-then-zeros(|w|=" + std::to_string(word.size()) + ")"
                             : label;
    }
};

} // namespace

PointGenerator::PointGenerator(std::shared_ptr<const Impl> impl, std::int64_t offset)
    : impl_(std::move(impl)), offset_(offset) {}

PointGenerator PointGenerator::eventually_periodic(FiniteWord preperiod, FiniteWord period) {
    require(!period.empty(), Errc::precondition, "period must be non-empty");
    require(preperiod.empty() || preperiod.alphabet_size() == period.alphabet_size(),
            Errc::alphabet_mismatch, "preperiod and period must share one alphabet");
    auto impl = std::make_shared<EventuallyPeriodicImpl>();
    impl->pre = std::move(preperiod);
    impl->period = std::move(period);
    return PointGenerator(impl);
}

PointGenerator PointGenerator::substitution_fixed_point(
    std::map<std::uint8_t, FiniteWord> rules, std::uint8_t seed, std::int64_t shift) {
    require(!rules.empty(), Errc::precondition, "substitution needs at least one rule");
    auto it = rules.find(seed);
    require(it != rules.end(), Errc::precondition, "no rule for the seed symbol");
    require(!it->second.empty() && it->second[0] == seed, Errc::precondition,
            "substitution must be prolongable: image of seed must start with the seed");
    require(it->second.size() >= 2, Errc::precondition,
            "substitution must be expanding on the seed");
    std::uint8_t alphabet = it->second.alphabet_size();
    for (const auto& [sym, image] : rules) {
        require(!image.empty(), Errc::precondition, "substitution images must be non-empty");
        require(image.alphabet_size() == alphabet, Errc::alphabet_mismatch,
                "substitution images must share one alphabet");
        require(sym < alphabet, Errc::alphabet_mismatch, "rule symbol outside alphabet");
    }
    require(shift >= 0, Errc::precondition, "shift must be non-negative");
    auto impl = std::make_shared<SubstitutionImpl>();
    impl->rules = std::move(rules);
    impl->seed = seed;
    impl->cap = std::int64_t{1} << 34; // materialization ceiling, not a rule limit
    PointGenerator g{std::shared_ptr<const Impl>(impl)};
    return shift == 0 ? g : g.shifted(shift);
}

PointGenerator PointGenerator::sturmian_rational(std::int64_t p, std::int64_t q, Rat phase) {
    require(q >= 1 && p >= 1 && p < q, Errc::precondition,
            "rational rotation number must satisfy 0 < p/q < 1");
    require(phase >= 0 && phase < 1, Errc::precondition, "phase must lie in [0, 1)");
    auto impl = std::make_shared<SturmianRationalImpl>();
    impl->p = p;
    impl->q = q;
    impl->phase_num = rat_num(phase).convert_to<std::int64_t>();
    impl->phase_den = rat_den(phase).convert_to<std::int64_t>();
    require(impl->phase_den <= (std::int64_t{1} << 31) && q <= (std::int64_t{1} << 31),
            Errc::precondition, "rotation denominators must fit 31 bits");
    return PointGenerator(impl);
}

PointGenerator PointGenerator::sturmian_fixed_point(unsigned __int128 alpha_frac,
                                                    unsigned __int128 phase_frac,
                                                    std::string label) {
    require(alpha_frac != 0, Errc::precondition, "alpha must be positive");
    auto impl = std::make_shared<SturmianFixedImpl>();
    impl->alpha = alpha_frac;
    impl->phase = phase_frac;
    impl->label = std::move(label);
    return PointGenerator(impl);
}

PointGenerator PointGenerator::golden_sturmian() {
    // alpha = (sqrt(5) - 1)/2 as a 2^-128 fixed-point value:
    // floor((isqrt(5 * 2^256) - 2^128) / 2)
    static const unsigned __int128 alpha = [] {
        Int root = boost::multiprecision::sqrt(Int(5) << 256); // floor(sqrt(5) * 2^128)
        Int frac = (root - (Int(1) << 128)) / 2;
        std::uint64_t lo = (frac & Int(0xffffffffffffffffULL)).convert_to<std::uint64_t>();
        std::uint64_t hi = (frac >> 64).convert_to<std::uint64_t>();
        return (static_cast<unsigned __int128>(hi) << 64) |
               static_cast<unsigned __int128>(lo);
    }();
    return sturmian_fixed_point(alpha, 0, "sturmian(golden)");
}

PointGenerator PointGenerator::explicit_prefix(FiniteWord word) {
    require(!word.empty(), Errc::precondition, "explicit prefix must be non-empty");
    auto impl = std::make_shared<ExplicitImpl>();
    impl->word = std::move(word);
    return PointGenerator(impl);
}

PointGenerator PointGenerator::word_then_zeros(FiniteWord word, std::string label) {
    auto impl = std::make_shared<WordTailZerosImpl>();
    impl->word = std::move(word);
    impl->label = std::move(label);
    return PointGenerator(impl);
}

std::uint8_t PointGenerator::symbol_at(std::int64_t i) const {
    require(valid(), Errc::internal, "empty generator");
    require(i >= 0 && i < resolution(), Errc::resolution_exceeded,
            "index " + std::to_string(i) + " exceeds generator resolution");
    return impl_->compute(offset_ + i);
}

FiniteWord PointGenerator::prefix(std::int64_t L) const {
    auto span = prefix_span(L);
    return FiniteWord::from_symbols(std::vector<std::uint8_t>(span.begin(), span.end()),
                                    alphabet_size());
}

std::span<const std::uint8_t> PointGenerator::prefix_span(std::int64_t L) const {
    require(valid(), Errc::internal, "empty generator");
    require(L <= resolution(), Errc::resolution_exceeded,
            "prefix length exceeds generator resolution");
    auto full = impl_->materialize(offset_ + L);
    return full.subspan(static_cast<std::size_t>(offset_), static_cast<std::size_t>(L));
}

std::int64_t PointGenerator::resolution() const {
    require(valid(), Errc::internal, "empty generator");
    return impl_->resolution() - offset_;
}

std::uint8_t PointGenerator::alphabet_size() const {
    require(valid(), Errc::internal, "empty generator");
    return impl_->alphabet();
}

PointGenerator PointGenerator::shifted(std::int64_t k) const {
    require(valid(), Errc::internal, "empty generator");
    require(k >= 0, Errc::precondition, "shift must be non-negative");
    require(k <= resolution(), Errc::resolution_exceeded, "shift exceeds resolution");
    return PointGenerator(impl_, offset_ + k);
}

std::int64_t PointGenerator::shift_offset() const { return offset_; }

std::string PointGenerator::describe() const {
    require(valid(), Errc::internal, "empty generator");
    std::string base = impl_->describe();
    if (offset_ == 0) return base;
    return "shift^" + std::to_string(offset_) + "(" + base + ")";
}

// ---------------------------------------------------------------------------
// Shift metric

ShiftDistance shift_distance(const PointGenerator& x, const PointGenerator& y,
                             std::int64_t K) {
    require(K >= 1, Errc::precondition, "resolution K must be positive");
    require(x.resolution() >= K && y.resolution() >= K, Errc::resolution_exceeded,
            "both generators must have resolution >= K");
    if (x.same_rule_as(y)) {
        // identical representation: distance 0 with no truncation error
        ShiftDistance d;
        d.value = 0;
        d.error_bound = 0;
        d.first_difference = 0;
        return d;
    }
    // materialize both first: when the views share one rule, the second
    // call may grow the shared cache and relocate an earlier span
    x.prefix_span(K);
    y.prefix_span(K);
    auto xs = x.prefix_span(K);
    auto ys = y.prefix_span(K);
    for (std::int64_t s = 0; s < K; ++s) {
        if (xs[static_cast<std::size_t>(s)] != ys[static_cast<std::size_t>(s)]) {
            ShiftDistance d;
            d.value = Rat(1, s + 1);
            d.error_bound = 0;
            d.first_difference = s + 1;
            return d;
        }
    }
    ShiftDistance d;
    d.value = 0;
    d.error_bound = Rat(1, K + 1);
    d.first_difference = 0;
    return d;
}

// ---------------------------------------------------------------------------
// Tent stick space

TentStickPoint TentStickPoint::baseline(Rat x) {
    require(x >= 0 && x <= 1, Errc::precondition, "baseline coordinate must lie in [0,1]");
    TentStickPoint p;
    p.branch = 0;
    p.exact = true;
    p.coordinate = std::move(x);
    return p;
}

TentStickPoint TentStickPoint::stick(int k, Rat height) {
    require(k >= 1, Errc::precondition, "stick index must be >= 1");
    require(height >= 0 && height <= Rat(1, k), Errc::precondition,
            "stick height must lie in [0, 1/k]");
    TentStickPoint p;
    p.branch = k;
    p.exact = true;
    p.coordinate = std::move(height);
    return p;
}

TentStickPoint TentStickPoint::baseline_f(double x) {
    require(x >= 0 && x <= 1, Errc::precondition, "baseline coordinate must lie in [0,1]");
    TentStickPoint p;
    p.branch = 0;
    p.exact = false;
    p.coord_f = x;
    return p;
}

TentStickPoint TentStickPoint::stick_f(int k, double height) {
    require(k >= 1, Errc::precondition, "stick index must be >= 1");
    require(height >= 0 && height <= 1.0 / k, Errc::precondition,
            "stick height must lie in [0, 1/k]");
    TentStickPoint p;
    p.branch = k;
    p.exact = false;
    p.coord_f = height;
    return p;
}

namespace {

Rat tent_map(const Rat& v) {
    Rat t = 1 - boost::multiprecision::abs(Rat(1 - 2 * v));
    return t;
}

double tent_map_f(double v) { return 1.0 - std::fabs(1.0 - 2.0 * v); }

} // namespace

TentStickPoint tent_step(const TentStickPoint& p) {
    TentStickPoint out = p;
    if (p.exact) {
        if (p.branch == 0) {
            out.coordinate = tent_map(p.coordinate);
        } else {
            out.coordinate = tent_map(p.coordinate * p.branch) / p.branch;
        }
    } else {
        if (p.branch == 0)
            out.coord_f = tent_map_f(p.coord_f);
        else
            out.coord_f = tent_map_f(p.coord_f * p.branch) / p.branch;
    }
    return out;
}

namespace {

double embed_x(const TentStickPoint& p) {
    if (p.branch == 0) return p.exact ? to_double(p.coordinate) : p.coord_f;
    return -1.0 / p.branch;
}

double embed_y(const TentStickPoint& p) {
    if (p.branch == 0) return 0.0;
    return p.exact ? to_double(p.coordinate) : p.coord_f;
}

} // namespace

double euclidean_distance(const TentStickPoint& p, const TentStickPoint& q) {
    if (p.branch == q.branch && p.exact && q.exact)
        return to_double(same_branch_distance(p, q));
    return std::hypot(embed_x(p) - embed_x(q), embed_y(p) - embed_y(q));
}

Rat same_branch_distance(const TentStickPoint& p, const TentStickPoint& q) {
    require(p.branch == q.branch, Errc::precondition,
            "exact distance requires points on one branch");
    require(p.exact && q.exact, Errc::precondition,
            "exact distance requires exact-mode points");
    return boost::multiprecision::abs(Rat(p.coordinate - q.coordinate));
}

double tent_space_diameter() { return std::hypot(2.0, 1.0); }

// ---------------------------------------------------------------------------
// MetricSystem facade

MetricSystem MetricSystem::symbolic(PointGenerator origin) {
    MetricSystem s;
    s.kind_ = Kind::symbolic;
    s.diameter_ = 1.0;
    s.generator_ = std::move(origin);
    return s;
}

MetricSystem MetricSystem::tent(TentStickPoint origin, int k_max) {
    require(k_max >= 1, Errc::precondition, "stick truncation must be >= 1");
    require(origin.branch <= k_max, Errc::precondition,
            "origin branch exceeds the stick truncation");
    MetricSystem s;
    s.kind_ = Kind::tent_stick;
    s.diameter_ = tent_space_diameter();
    s.k_max_ = k_max;
    s.tent_point_ = std::move(origin);
    return s;
}

const PointGenerator& MetricSystem::origin_generator() const {
    require(kind_ == Kind::symbolic, Errc::precondition, "not a symbolic system");
    return generator_;
}

const TentStickPoint& MetricSystem::origin_tent() const {
    require(kind_ == Kind::tent_stick, Errc::precondition, "not a tent system");
    return tent_point_;
}

// ---------------------------------------------------------------------------
// Builtins

PointGenerator builtin_generator(const std::string& name) {
    if (name == "thue-morse")
        return PointGenerator::substitution_fixed_point(
            {{0, FiniteWord("01")}, {1, FiniteWord("10")}}, 0);
    if (name == "thue-morse-shifted")
        return PointGenerator::substitution_fixed_point(
            {{0, FiniteWord("01")}, {1, FiniteWord("10")}}, 0, 1);
    if (name == "golden-sturmian") return PointGenerator::golden_sturmian();
    if (name == "zeros")
        return PointGenerator::eventually_periodic(FiniteWord(""), FiniteWord("0"));
    if (name == "ones")
        return PointGenerator::eventually_periodic(FiniteWord(""), FiniteWord("1"));
    if (name == "alternating")
        return PointGenerator::eventually_periodic(FiniteWord(""), FiniteWord("01"));
    if (name == "debruijn3")
        // all eight length-3 blocks appear: a complete factor prefix
        return PointGenerator::explicit_prefix(FiniteWord("0001011100"));
    fail(Errc::schema, "unknown builtin generator: '" + name + "'");
}

std::vector<std::string> builtin_generator_names() {
    return {"thue-morse", "thue-morse-shifted", "golden-sturmian",
            "zeros",      "ones",               "alternating",
            "debruijn3"};
}

} // namespace meanlab
