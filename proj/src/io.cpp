#include "meanlab/io.hpp"

#include "meanlab/errors.hpp"

#include <nlohmann/json.hpp>

#include <cstring>
#include <fstream>
#include <sstream>

namespace meanlab {

// ---------------------------------------------------------------------------
// Words

std::string word_to_text(const FiniteWord& w) { return w.to_ascii(); }

FiniteWord word_from_text(std::string_view text, std::uint8_t alphabet_size) {
    while (!text.empty() && (text.back() == '\n' || text.back() == '\r'))
        text.remove_suffix(1);
    return FiniteWord(text, alphabet_size);
}

namespace {
constexpr char kRleMagic[4] = {'M', 'L', 'W', '1'};

void put_u64_le(std::string& out, std::uint64_t v) {
    for (int i = 0; i < 8; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
}

std::uint64_t get_u64_le(const char* p) {
    std::uint64_t v = 0;
    for (int i = 0; i < 8; ++i)
        v |= static_cast<std::uint64_t>(static_cast<unsigned char>(p[i])) << (8 * i);
    return v;
}
} // namespace

std::string word_to_rle(const FiniteWord& w) {
    std::string out(kRleMagic, 4);
    out.push_back(static_cast<char>(w.alphabet_size()));
    std::size_t i = 0;
    while (i < w.size()) {
        std::uint8_t sym = w[i];
        std::size_t j = i;
        while (j < w.size() && w[j] == sym) ++j;
        out.push_back(static_cast<char>(sym));
        put_u64_le(out, j - i);
        i = j;
    }
    return out;
}

FiniteWord word_from_rle(std::string_view bytes) {
    require(bytes.size() >= 5 && std::memcmp(bytes.data(), kRleMagic, 4) == 0, Errc::io,
            "not an MLW1 run-length word file");
    std::uint8_t alphabet = static_cast<std::uint8_t>(bytes[4]);
    require((bytes.size() - 5) % 9 == 0, Errc::io, "truncated MLW1 payload");
    std::vector<std::uint8_t> symbols;
    for (std::size_t off = 5; off < bytes.size(); off += 9) {
        std::uint8_t sym = static_cast<std::uint8_t>(bytes[off]);
        std::uint64_t count = get_u64_le(bytes.data() + off + 1);
        symbols.insert(symbols.end(), count, sym);
    }
    return FiniteWord::from_symbols(std::move(symbols), alphabet);
}

// ---------------------------------------------------------------------------
// Generators and systems

ordered_json generator_to_json(const std::string& builtin_name) {
    return ordered_json{{"kind", "builtin"}, {"name", builtin_name}};
}

namespace {

unsigned __int128 fixed_point_from_rat(const Rat& r) {
    // floor(r * 2^128); r in [0, 1)
    Int scaled = (rat_num(r) << 128) / rat_den(r);
    std::uint64_t lo = (scaled & Int(0xffffffffffffffffULL)).convert_to<std::uint64_t>();
    std::uint64_t hi = (scaled >> 64).convert_to<std::uint64_t>();
    return (static_cast<unsigned __int128>(hi) << 64) | lo;
}

} // namespace

PointGenerator generator_from_json(const ordered_json& j) {
    require(j.is_object() && j.contains("kind") && j["kind"].is_string(), Errc::schema,
            "generator descriptor needs a string 'kind' (at $.kind)");
    std::string kind = j["kind"].get<std::string>();
    if (kind == "builtin") {
        require(j.contains("name"), Errc::schema, "builtin generator needs 'name'");
        return builtin_generator(j["name"].get<std::string>());
    }
    if (kind == "eventually-periodic") {
        std::string pre = j.value("preperiod", std::string());
        require(j.contains("period"), Errc::schema,
                "eventually-periodic needs 'period' (at $.period)");
        return PointGenerator::eventually_periodic(FiniteWord(pre),
                                                   FiniteWord(j["period"].get<std::string>()));
    }
    if (kind == "substitution") {
        require(j.contains("rules") && j["rules"].is_object(), Errc::schema,
                "substitution needs an object 'rules' (at $.rules)");
        std::uint8_t alphabet =
            static_cast<std::uint8_t>(j.value("alphabet_size", 2));
        std::map<std::uint8_t, FiniteWord> rules;
        for (auto it = j["rules"].begin(); it != j["rules"].end(); ++it) {
            require(it.key().size() == 1, Errc::schema, "rule keys are single symbols");
            rules.emplace(static_cast<std::uint8_t>(it.key()[0] - '0'),
                          FiniteWord(it.value().get<std::string>(), alphabet));
        }
        std::string seed = j.value("seed", std::string("0"));
        require(seed.size() == 1, Errc::schema, "seed is a single symbol");
        std::int64_t shift = j.value("shift", std::int64_t{0});
        return PointGenerator::substitution_fixed_point(
            std::move(rules), static_cast<std::uint8_t>(seed[0] - '0'), shift);
    }
    if (kind == "sturmian") {
        require(j.contains("alpha"), Errc::schema, "sturmian needs 'alpha' (at $.alpha)");
        Rat phase = rat_from_string(j.value("phase", std::string("0")));
        if (j["alpha"].is_string() && j["alpha"].get<std::string>() == "golden") {
            require(phase == 0, Errc::schema, "golden preset uses phase 0");
            return PointGenerator::golden_sturmian();
        }
        Rat alpha = rat_from_string(j["alpha"].get<std::string>());
        require(alpha > 0 && alpha < 1, Errc::schema, "alpha must lie in (0, 1)");
        if (j.value("exact_rational", true) && rat_den(alpha) < (Int(1) << 31)) {
            return PointGenerator::sturmian_rational(
                rat_num(alpha).convert_to<std::int64_t>(),
                rat_den(alpha).convert_to<std::int64_t>(), phase);
        }
        return PointGenerator::sturmian_fixed_point(fixed_point_from_rat(alpha),
                                                    fixed_point_from_rat(phase));
    }
    if (kind == "theorem4") {
        Schedule s = schedule_from_json(j);
        return theorem4_point(s);
    }
    if (kind == "explicit-prefix") {
        if (j.contains("symbols"))
            return PointGenerator::explicit_prefix(
                FiniteWord(j["symbols"].get<std::string>()));
        require(j.contains("path"), Errc::schema,
                "explicit-prefix needs 'symbols' or 'path'");
        std::filesystem::path p = j["path"].get<std::string>();
        std::string data = read_file(p);
        FiniteWord w = (data.size() >= 4 && std::memcmp(data.data(), "MLW1", 4) == 0)
                           ? word_from_rle(data)
                           : word_from_text(data);
        return PointGenerator::explicit_prefix(std::move(w));
    }
    fail(Errc::schema, "unknown generator kind: '" + kind + "' (at $.kind)");
}

PointGenerator load_generator(const std::filesystem::path& path) {
    return generator_from_json(ordered_json::parse(read_file(path)));
}

MetricSystem system_from_json(const ordered_json& j) {
    require(j.is_object() && j.contains("kind"), Errc::schema,
            "system descriptor needs 'kind' (at $.kind)");
    std::string kind = j["kind"].get<std::string>();
    if (kind == "tent-stick") {
        int branch = j.value("branch", 0);
        require(j.contains("coordinate"), Errc::schema,
                "tent-stick needs 'coordinate' (at $.coordinate)");
        Rat c = rat_from_string(j["coordinate"].get<std::string>());
        TentStickPoint p = branch == 0 ? TentStickPoint::baseline(c)
                                       : TentStickPoint::stick(branch, c);
        int k_max = j.value("stick_truncation", 64);
        return MetricSystem::tent(std::move(p), k_max);
    }
    return MetricSystem::symbolic(generator_from_json(j));
}

MetricSystem load_system(const std::filesystem::path& path) {
    return system_from_json(ordered_json::parse(read_file(path)));
}

ordered_json schedule_to_json(const Schedule& s, const ordered_json& base_descriptor) {
    ordered_json j;
    j["kind"] = "theorem4";
    j["base"] = base_descriptor;
    j["levels"] = s.levels;
    j["gaps"] = s.gaps;
    return j;
}

Schedule schedule_from_json(const ordered_json& j) {
    require(j.contains("levels"), Errc::schema, "schedule needs 'levels' (at $.levels)");
    PointGenerator base;
    if (j.contains("base")) {
        if (j["base"].is_string())
            base = builtin_generator(j["base"].get<std::string>());
        else
            base = generator_from_json(j["base"]);
    } else {
        base = builtin_generator("thue-morse-shifted");
    }
    int levels = j["levels"].get<int>();
    if (j.contains("gaps")) {
        Schedule s;
        s.base = std::move(base);
        s.levels = levels;
        s.gaps = j["gaps"].get<std::vector<std::int64_t>>();
        require(static_cast<int>(s.gaps.size()) >= levels, Errc::schema,
                "schedule carries fewer gaps than levels (at $.gaps)");
        return s;
    }
    std::int64_t slack_num = j.value("slack_num", std::int64_t{1});
    std::int64_t slack_den = j.value("slack_den", std::int64_t{1});
    return synthesize_schedule(std::move(base), levels, std::int64_t{1} << 33, slack_num,
                               slack_den);
}

Schedule load_schedule(const std::filesystem::path& path) {
    return schedule_from_json(ordered_json::parse(read_file(path)));
}

// ---------------------------------------------------------------------------
// Reports

namespace {

ordered_json rat_json(const Rat& r) {
    return ordered_json{{"exact", rat_to_string(r)}, {"approx", to_double(r)}};
}

} // namespace

ordered_json density_estimate_to_json(const DensityEstimate& e) {
    ordered_json j;
    j["kind"] = density_kind_name(e.kind);
    j["value"] = rat_json(e.value);
    j["horizon"] = e.horizon;
    if (e.kind == DensityKind::banach_upper || e.kind == DensityKind::banach_lower)
        j["window_floor"] = e.window_floor;
    return j;
}

ordered_json validation_report_to_json(const ValidationReport& r) {
    ordered_json j;
    j["all_pass"] = r.all_pass;
    j["extendable_to_level"] = r.extendable_to_level;
    ordered_json rows = ordered_json::array();
    for (const auto& inst : r.instances) {
        ordered_json row;
        row["constraint"] = constraint_kind_name(inst.kind);
        row["p"] = inst.p;
        if (inst.q > 0) row["q"] = inst.q;
        row["lhs"] = rat_to_string(inst.lhs);
        row["rhs"] = rat_to_string(inst.rhs);
        row["pass"] = inst.pass;
        rows.push_back(row);
    }
    j["instances"] = rows;
    return j;
}

ordered_json diagnostic_report_to_json(const DiagnosticReport& r) {
    ordered_json j;
    j["mode"] = scan_mode_name(r.mode);
    j["verdict"] = verdict_name(r.verdict);
    j["arithmetic"] = arith_mode_name(r.arith_mode);
    j["system"] = r.system;
    j["index_convention"] =
        "positions 0-based; metric first-difference indices 1-based";

    ordered_json params;
    params["epsilon"] = rat_to_string(r.params.epsilon);
    params["delta"] = rat_to_string(r.params.delta);
    ordered_json grid = ordered_json::array();
    for (const Rat& g : r.params.grid) grid.push_back(rat_to_string(g));
    params["grid"] = grid;
    params["horizon"] = r.params.horizon;
    params["tail_start"] = r.params.tail_start;
    params["window_floor"] = r.params.window_floor;
    params["resolution"] = r.params.resolution;
    params["samples"] = r.params.samples;
    params["seed"] = r.params.seed;
    params["sampler"] = sampler_kind_name(r.params.sampler);
    params["sample_scan_length"] = r.params.sample_scan_length;
    params["banach_density_threshold"] = rat_to_string(r.params.banach_density_threshold);
    j["parameters"] = params;

    j["sample_labels"] = r.sample_labels;

    ordered_json cells = ordered_json::array();
    for (const auto& cell : r.grid) {
        ordered_json c;
        c["radius"] = rat_to_string(cell.radius);
        c["worst"] = rat_json(cell.worst);
        c["satisfied"] = cell.satisfied;
        c["samples_used"] = cell.samples_used;
        cells.push_back(c);
    }
    j["grid"] = cells;

    ordered_json pairs = ordered_json::array();
    for (const auto& p : r.pairs) {
        ordered_json row;
        row["a"] = p.a;
        row["b"] = p.b;
        row["radius"] = rat_to_string(p.radius);
        row["tail_max"] = rat_json(p.tail_max);
        row["tail_min"] = rat_json(p.tail_min);
        row["tail_arg_max"] = p.arg_max;
        if (p.banach) {
            row["banach_max"] = rat_json(p.banach->value);
            row["banach_window"] =
                ordered_json{{"start", p.banach->window_start},
                             {"length", p.banach->window_length}};
        }
        row["error_bound"] = rat_to_string(p.error_bound);
        row["witness"] = p.witness;
        pairs.push_back(row);
    }
    j["pairs"] = pairs;

    if (r.min_distance) {
        j["min_distance"] = rat_json(*r.min_distance);
        j["min_distance_at"] = r.min_distance_at;
        ordered_json far = ordered_json::array();
        for (const auto& [eps, est] : r.far_time_densities) {
            ordered_json row;
            row["epsilon"] = rat_to_string(eps);
            row["banach_upper_density"] = density_estimate_to_json(est);
            far.push_back(row);
        }
        j["far_time_densities"] = far;
    }
    if (!r.notes.empty()) j["notes"] = r.notes;
    return j;
}

std::string diagnostic_report_to_csv(const DiagnosticReport& r) {
    // flat table, one row per sample pair; delta/epsilon carry radius and
    // threshold according to the scan's quantifier structure
    bool sens = r.mode == ScanMode::mean_sens || r.mode == ScanMode::banach_mean_sens;
    std::ostringstream os;
    os << "delta,epsilon,tail_max,tail_min,banach_max,verdict\n";
    for (const auto& p : r.pairs) {
        const Rat& delta = sens ? r.params.delta : p.radius;
        const Rat& eps = sens ? p.radius : r.params.epsilon;
        os << rat_to_string(delta) << ',' << rat_to_string(eps) << ','
           << rat_to_string(p.tail_max) << ',' << rat_to_string(p.tail_min) << ','
           << (p.banach ? rat_to_string(p.banach->value) : std::string()) << ','
           << verdict_name(r.verdict) << '\n';
    }
    return os.str();
}

std::string claim_reports_to_csv(std::span<const ClaimReport> reports) {
    // level_m is blank on claim-2 rows, j on claim-1 rows
    std::ostringstream os;
    os << "level_n,level_m,i,j,lhs,rhs_num,rhs_den,pass\n";
    auto emit = [&os](const ClaimRow& row) {
        os << row.level_n << ',';
        if (row.level_m >= 0) os << row.level_m;
        os << ',' << row.i << ',';
        if (row.j >= 0) os << row.j;
        os << ',' << row.lhs << ',' << row.rhs_num.str() << ',' << row.rhs_den.str() << ','
           << (row.pass ? 1 : 0) << '\n';
    };
    for (const ClaimReport& r : reports) {
        // tightest passing row first, then every violation
        if (r.checks > 0) emit(r.tightest);
        for (const ClaimRow& v : r.violations) emit(v);
    }
    return os.str();
}

std::string complexity_curve_to_csv(const ComplexityCurve& curve) {
    std::ostringstream os;
    os << "n,p_n,h_est\n";
    os.precision(17);
    for (int n = 1; n <= curve.n_max; ++n)
        os << n << ',' << curve.p_at(n) << ',' << curve.h_at(n) << '\n';
    return os.str();
}

// ---------------------------------------------------------------------------
// Files

void atomic_write(const std::filesystem::path& path, std::string_view content) {
    std::filesystem::path tmp = path;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        require(out.good(), Errc::io, "cannot open '" + tmp.string() + "' for writing");
        out.write(content.data(), static_cast<std::streamsize>(content.size()));
        require(out.good(), Errc::io, "short write to '" + tmp.string() + "'");
    }
    std::error_code ec;
    std::filesystem::rename(tmp, path, ec);
    require(!ec, Errc::io, "rename failed: " + ec.message());
}

std::string read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    require(in.good(), Errc::io, "cannot open '" + path.string() + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

} // namespace meanlab
