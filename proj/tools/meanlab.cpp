// meanlab — configuration-driven experiment runner for the symbolic
// dynamics laboratory: block construction, schedule validation, claim
// scans, density statistics, mean-equicontinuity/sensitivity diagnostics
// and block-complexity entropy estimates. Outputs are CSV/JSON, written
// atomically, byte-reproducible for a fixed config + seed.

#include "meanlab/construction.hpp"
#include "meanlab/density.hpp"
#include "meanlab/diagnostics.hpp"
#include "meanlab/entropy.hpp"
#include "meanlab/errors.hpp"
#include "meanlab/io.hpp"
#include "meanlab/parallel.hpp"
#include "meanlab/systems.hpp"

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include <iostream>
#include <optional>

using namespace meanlab;

namespace {

// Parse "a,b,c" of rationals.
std::vector<Rat> parse_grid(const std::string& csv) {
    std::vector<Rat> grid;
    std::size_t pos = 0;
    while (pos <= csv.size()) {
        std::size_t comma = csv.find(',', pos);
        std::string item = csv.substr(pos, comma == std::string::npos ? std::string::npos
                                                                      : comma - pos);
        if (!item.empty()) grid.push_back(rat_from_string(item));
        if (comma == std::string::npos) break;
        pos = comma + 1;
    }
    return grid;
}

// Parse "2..5" or "3".
std::pair<int, int> parse_level_range(const std::string& text) {
    auto dots = text.find("..");
    if (dots == std::string::npos) {
        int v = std::stoi(text);
        return {v, v};
    }
    return {std::stoi(text.substr(0, dots)), std::stoi(text.substr(dots + 2))};
}

ordered_json base_descriptor(const std::string& base) {
    if (base.size() > 5 && base.substr(base.size() - 5) == ".json")
        return ordered_json::parse(read_file(base));
    return generator_to_json(base);
}

PointGenerator base_generator(const std::string& base) {
    return generator_from_json(base_descriptor(base));
}

struct CommonOpts {
    int threads = 0;
    std::string out;
};

void write_or_print(const std::string& out, const std::string& content) {
    if (out.empty()) {
        std::cout << content;
        return;
    }
    atomic_write(out, content);
}

int run_construct(const std::string& base, int levels, const std::string& gaps_csv,
                  std::int64_t slack_num, std::int64_t slack_den, std::int64_t budget,
                  const CommonOpts& common, const std::string& schedule_out) {
    ordered_json base_json = base_descriptor(base);
    Schedule s;
    if (!gaps_csv.empty()) {
        s.base = generator_from_json(base_json);
        s.levels = levels;
        for (const Rat& g : parse_grid(gaps_csv))
            s.gaps.push_back(rat_num(g).convert_to<std::int64_t>());
        require(static_cast<int>(s.gaps.size()) >= levels, Errc::precondition,
                "need one gap per level");
    } else {
        s = synthesize_schedule(generator_from_json(base_json), levels, budget, slack_num,
                                slack_den);
    }
    auto report = validate_schedule(s);
    require(report.all_pass, Errc::precondition,
            "schedule fails its constraints; run `meanlab validate` for the report");
    auto block = build_block(s, levels, budget);
    std::string sidecar = schedule_out;
    if (!common.out.empty()) {
        atomic_write(common.out, word_to_rle(block.word));
        if (sidecar.empty()) sidecar = common.out + ".schedule.json";
    } else {
        std::cout << "A_" << levels << ": length " << block.word.size() << ", ones "
                  << ones_count(block.word) << "\n";
    }
    if (!sidecar.empty())
        atomic_write(sidecar, schedule_to_json(s, base_json).dump(2) + "\n");
    return 0;
}

int run_validate(const std::string& schedule_path, int forward_budget,
                 const CommonOpts& common) {
    Schedule s = load_schedule(schedule_path);
    auto report = validate_schedule(s, forward_budget);
    write_or_print(common.out, validation_report_to_json(report).dump(2) + "\n");
    return report.all_pass ? 0 : 1;
}

int run_claims(const std::string& schedule_path, const std::string& levels_range,
               int which, std::int64_t scan_length, std::int64_t base_scan,
               const CommonOpts& common) {
    Schedule s = load_schedule(schedule_path);
    auto [lo, hi] = parse_level_range(levels_range);
    require(lo >= 1 && hi <= s.levels && lo <= hi, Errc::precondition,
            "claim level range outside the schedule");
    unsigned threads = resolve_thread_count(common.threads);
    std::vector<ClaimReport> reports;
    bool all_pass = true;
    if (which == 1 || which == 0) {
        for (int n = lo; n <= hi; ++n)
            for (int m = n; m <= hi; ++m) {
                reports.push_back(check_claim1(s, n, m, threads));
                all_pass &= reports.back().all_pass();
            }
    }
    if (which == 2 || which == 0) {
        auto x = theorem4_point(s);
        auto absent = first_absent_level(s, base_scan);
        require(absent.has_value(), Errc::precondition,
                "no absent level found in the base prefix; claim 2 hypothesis unmet");
        std::int64_t L = scan_length;
        if (L == 0) L = static_cast<std::int64_t>(block_lengths(s)[static_cast<std::size_t>(
            std::min(s.levels, std::max(*absent + 2, 4)) - 1)]);
        for (int n = std::max(lo, *absent); n <= hi; ++n) {
            reports.push_back(check_claim2(s, n, x, L, base_scan, threads));
            all_pass &= reports.back().all_pass();
        }
    }
    write_or_print(common.out, claim_reports_to_csv(reports));
    return all_pass ? 0 : 1;
}

int run_density(const std::string& set_file, const std::string& predicate,
                const std::string& op, std::int64_t N, std::int64_t W, int ip_order,
                std::int64_t ip_bound, const CommonOpts& common) {
    require(set_file.empty() != predicate.empty(), Errc::precondition,
            "provide exactly one of --set-file / --predicate");
    IndexSet F = [&] {
        if (!predicate.empty()) return builtin_index_set(predicate, N);
        std::vector<std::int64_t> elems;
        std::istringstream in(read_file(set_file));
        std::int64_t v;
        while (in >> v) elems.push_back(v);
        return IndexSet::from_sorted(std::move(elems), N);
    }();

    ordered_json j;
    j["set"] = predicate.empty() ? set_file : predicate;
    j["N"] = N;
    if (op == "upper" || op == "lower" || op == "banach-upper" || op == "banach-lower") {
        DensityEstimate e;
        if (op == "upper") e = upper_density(F, N);
        else if (op == "lower") e = lower_density(F, N);
        else if (op == "banach-upper") e = banach_upper_density(F, N, W);
        else e = banach_lower_density(F, N, W);
        j["estimate"] = density_estimate_to_json(e);
    } else if (op == "syndetic-gap") {
        auto r = syndetic_gap(F, N);
        ordered_json g;
        if (r.max_gap) g["max_gap"] = *r.max_gap;
        g["trailing_gap"] = r.trailing_gap;
        g["unbounded_within_horizon"] = r.unbounded_within_horizon;
        j["syndetic_gap"] = g;
    } else if (op == "ip-witness") {
        auto w = ip_witness(F, ip_order, ip_bound);
        if (w)
            j["ip_witness"] = *w;
        else
            j["ip_witness"] = nullptr;
    } else {
        fail(Errc::schema, "unknown density op: '" + op + "'");
    }
    write_or_print(common.out, j.dump(2) + "\n");
    return 0;
}

int run_diagnose(const std::string& mode_name, const std::string& system_path,
                 const std::string& pair_path, ScanParams params, const std::string& level,
                 const std::string& csv_out, const CommonOpts& common) {
    ScanMode mode = scan_mode_from_name(mode_name);
    MetricSystem sys = load_system(system_path);
    std::string note;

    // level-driven delta for the construction scans: delta = 1/|A_n|
    if (!level.empty() && sys.kind() == MetricSystem::Kind::symbolic) {
        ordered_json desc = ordered_json::parse(read_file(system_path));
        require(desc.value("kind", std::string()) == std::string("theorem4"), Errc::schema,
                "--level applies to theorem4 systems only");
        Schedule s = schedule_from_json(desc);
        int n;
        if (level == "auto") {
            // smallest n with 2K(|A_n|+n)/(|A_n|+2k_n+n) < epsilon/4, the
            // level the construction's own argument picks; falls back to
            // the first level whose block is absent from the base when the
            // inequality is unattained at this K and epsilon
            auto lengths = block_lengths(s);
            std::optional<int> chosen;
            for (int cand = 1; cand <= s.levels; ++cand) {
                Rat lhs = Rat(2 * params.resolution) *
                          Rat(lengths[static_cast<std::size_t>(cand - 1)] + cand,
                              lengths[static_cast<std::size_t>(cand - 1)] +
                                  2 * s.gaps[static_cast<std::size_t>(cand - 1)] + cand);
                if (lhs < params.epsilon / 4) {
                    chosen = cand;
                    break;
                }
            }
            if (!chosen) {
                auto absent = first_absent_level(s, 10000);
                require(absent.has_value(), Errc::precondition,
                        "no usable scan level: blocks of every level occur in the base");
                chosen = *absent;
                note = "proof inequality 2K(|A_n|+n)/(|A_n|+2k_n+n) < eps/4 unattained "
                       "for this schedule at K=" +
                       std::to_string(params.resolution) +
                       "; scanning at first_absent_level n=" + std::to_string(*chosen);
            }
            n = *chosen;
        } else {
            n = std::stoi(level);
            require(n >= 1 && n <= s.levels, Errc::precondition, "--level out of range");
        }
        auto lengths = block_lengths(s);
        params.grid = {Rat(1, lengths[static_cast<std::size_t>(n - 1)])};
    }

    DiagnosticReport report;
    switch (mode) {
        case ScanMode::mean_equi:
            report = mean_equi_scan(sys, params);
            break;
        case ScanMode::mean_sens:
            report = mean_sens_scan(sys, params);
            break;
        case ScanMode::banach_mean_equi:
            report = banach_mean_scan(sys, false, params);
            break;
        case ScanMode::banach_mean_sens:
            report = banach_mean_scan(sys, true, params);
            break;
        case ScanMode::proximal:
        case ScanMode::banach_proximal: {
            require(!pair_path.empty(), Errc::precondition,
                    "proximality scans need --pair <system.json>");
            bool banach = mode == ScanMode::banach_proximal;
            if (sys.kind() == MetricSystem::Kind::symbolic) {
                report = proximality_scan(sys, load_generator(pair_path), banach, params);
            } else {
                MetricSystem other = load_system(pair_path);
                report = proximality_scan_tent(sys, other.origin_tent(), banach, params);
            }
            break;
        }
    }
    if (!note.empty()) report.notes = note;

    ordered_json j = diagnostic_report_to_json(report);
    j["config"] = ordered_json{{"command", "diagnose"},
                               {"mode", mode_name},
                               {"system", system_path},
                               {"pair", pair_path},
                               {"level", level}};
    write_or_print(common.out, j.dump(2) + "\n");
    if (!csv_out.empty()) atomic_write(csv_out, diagnostic_report_to_csv(report));
    return 0;
}

int run_entropy(const std::string& system_path, std::int64_t L, int n_max,
                double threshold, const CommonOpts& common) {
    PointGenerator g = load_generator(system_path);
    unsigned threads = resolve_thread_count(common.threads);
    auto curve = complexity_curve(g, L, n_max, threads);
    auto summary = entropy_report(curve, threshold);
    std::ostringstream os;
    os << complexity_curve_to_csv(curve);
    os.precision(17);
    os << "# h_est(n_max)=" << summary.h_at_nmax
       << " last_quartile_slope=" << summary.last_quartile_slope
       << " zero_entropy_consistent=" << (summary.zero_entropy_consistent ? 1 : 0)
       << " saturated=" << (curve.saturated ? 1 : 0) << " L=" << L << "\n";
    write_or_print(common.out, os.str());
    return 0;
}

int run_report(const std::string& in_path, const CommonOpts& common) {
    ordered_json j = ordered_json::parse(read_file(in_path));
    require(j.contains("pairs"), Errc::schema, "not a diagnostic report (at $.pairs)");
    std::string mode = j.value("mode", std::string());
    bool sens = mode == "mean-sens" || mode == "banach-mean-sens";
    std::string threshold_delta = j["parameters"].value("delta", std::string());
    std::string threshold_eps = j["parameters"].value("epsilon", std::string());
    std::ostringstream os;
    os << "delta,epsilon,tail_max,tail_min,banach_max,verdict\n";
    for (const auto& p : j["pairs"]) {
        std::string radius = p.value("radius", std::string());
        os << (sens ? threshold_delta : radius) << ','
           << (sens ? radius : threshold_eps) << ','
           << p["tail_max"].value("exact", std::string()) << ','
           << p["tail_min"].value("exact", std::string()) << ','
           << (p.contains("banach_max") ? p["banach_max"].value("exact", std::string())
                                        : std::string())
           << ',' << j.value("verdict", std::string()) << '\n';
    }
    write_or_print(common.out, os.str());
    return 0;
}

// `meanlab run --config cfg.json [overrides...]` expands the config into
// ordinary subcommand arguments; overrides come after, and the take-last
// option policy makes explicit flags win over the file.
std::vector<std::string> expand_run_config(int argc, char** argv) {
    std::vector<std::string> args;
    if (argc < 2 || std::string(argv[1]) != "run") {
        for (int i = 1; i < argc; ++i) args.emplace_back(argv[i]);
        return args;
    }
    std::string config_path;
    std::vector<std::string> overrides;
    for (int i = 2; i < argc; ++i) {
        std::string a = argv[i];
        if (a == "--config") {
            require(i + 1 < argc, Errc::schema, "--config needs a path");
            config_path = argv[++i];
        } else {
            overrides.push_back(a);
        }
    }
    require(!config_path.empty(), Errc::schema, "run requires --config <file.json>");
    ordered_json cfg = ordered_json::parse(read_file(config_path));
    require(cfg.is_object() && cfg.contains("command") && cfg["command"].is_string(),
            Errc::schema, "config needs a string 'command' (at $.command)");
    std::string command = cfg["command"].get<std::string>();
    const char* known[] = {"construct", "validate", "claims", "diagnose",
                           "density",   "entropy",  "report"};
    bool ok = false;
    for (const char* k : known) ok |= command == k;
    require(ok, Errc::schema, "unknown command '" + command + "' (at $.command)");
    args.push_back(command);
    if (cfg.contains("args")) {
        require(cfg["args"].is_object(), Errc::schema,
                "'args' must be an object of flag values (at $.args)");
        for (auto it = cfg["args"].begin(); it != cfg["args"].end(); ++it) {
            args.push_back("--" + it.key());
            const auto& v = it.value();
            require(!v.is_object() && !v.is_array() && !v.is_null(), Errc::schema,
                    "flag values must be scalars (at $.args." + it.key() + ")");
            args.push_back(v.is_string() ? v.get<std::string>() : v.dump());
        }
    }
    for (auto& o : overrides) args.push_back(o);
    return args;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"meanlab: symbolic-dynamics laboratory"};
    app.option_defaults()->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
    app.require_subcommand(1);
    CommonOpts common;
    app.add_option("--threads", common.threads,
                   "worker threads (default: MEANLAB_THREADS or 1)");

    // construct
    auto* construct = app.add_subcommand("construct", "build the block-recursive point");
    std::string base = "thue-morse-shifted";
    int levels = 6;
    std::string gaps_csv, schedule_out;
    std::int64_t slack_num = 1, slack_den = 1, budget = std::int64_t{1} << 33;
    construct->add_option("--base", base, "builtin name or descriptor .json");
    construct->add_option("--levels", levels, "construction depth")->required();
    construct->add_option("--gaps", gaps_csv, "explicit k_1,k_2,... (skips synthesis)");
    construct->add_option("--gap-slack-num", slack_num, "gap slack numerator");
    construct->add_option("--gap-slack-den", slack_den, "gap slack denominator");
    construct->add_option("--budget", budget, "prefix length budget");
    construct->add_option("--out", common.out, "write A_levels in MLW1 run-length form");
    construct->add_option("--schedule-out", schedule_out, "write the schedule JSON sidecar");

    // validate
    auto* validate = app.add_subcommand("validate", "check schedule constraints");
    std::string schedule_path;
    int forward_budget = 2;
    validate->add_option("--schedule", schedule_path, "schedule JSON")->required();
    validate->add_option("--forward-budget", forward_budget,
                         "greedy extension levels to certify");
    validate->add_option("--out", common.out, "write the validation report JSON");

    // claims
    auto* claims = app.add_subcommand("claims", "exhaustive claim inequality scans");
    std::string levels_range = "2..5";
    int which_claim = 0;
    std::int64_t scan_length = 0, base_scan = 10000;
    claims->add_option("--schedule", schedule_path, "schedule JSON")->required();
    claims->add_option("--levels", levels_range, "range n..m of levels");
    claims->add_option("--claim", which_claim, "1, 2, or 0 for both");
    claims->add_option("--scan-length", scan_length,
                       "claim-2 prefix length (default |A_{min(levels, absent+2)}|)");
    claims->add_option("--base-scan", base_scan, "base prefix scanned for absent levels");
    claims->add_option("--out", common.out, "write the claims CSV");

    // density
    auto* density = app.add_subcommand("density", "window statistics of integer sets");
    std::string set_file, predicate, density_op = "upper";
    std::int64_t N = 1000000, W = 1000, ip_bound = 100000;
    int ip_order = 2;
    density->add_option("--set-file", set_file, "one integer per line, sorted");
    density->add_option("--predicate", predicate, "builtin set name");
    density->add_option("--op", density_op,
                        "upper|lower|banach-upper|banach-lower|syndetic-gap|ip-witness");
    density->add_option("-N,--horizon", N, "horizon");
    density->add_option("--window", W, "window floor (Banach ops)");
    density->add_option("--ip-order", ip_order, "witness order k <= 5");
    density->add_option("--ip-bound", ip_bound, "search bound for ip-witness");
    density->add_option("--out", common.out, "write the JSON report");

    // diagnose
    auto* diagnose = app.add_subcommand("diagnose", "equicontinuity/sensitivity scans");
    std::string mode_name = "mean-equi", system_path, pair_path, level, csv_out;
    std::string epsilon = "1/5", delta = "1/10", grid_csv, sampler_name = "orbit";
    ScanParams params;
    diagnose->add_option("--mode", mode_name,
                         "mean-equi|mean-sens|banach-mean-equi|banach-mean-sens|"
                         "proximal|banach-proximal");
    diagnose->add_option("--system", system_path, "system descriptor JSON")->required();
    diagnose->add_option("--pair", pair_path, "second point (proximality modes)");
    diagnose->add_option("--epsilon", epsilon, "target epsilon (exact rational/decimal)");
    diagnose->add_option("--delta", delta, "sensitivity constant");
    diagnose->add_option("--delta-grid,--grid", grid_csv, "radii a,b,c");
    diagnose->add_option("--level", level, "theorem4 level or 'auto' (sets grid to 1/|A_n|)");
    diagnose->add_option("--horizon", params.horizon, "Birkhoff horizon N");
    diagnose->add_option("--tail-start", params.tail_start, "tail surrogate start N0");
    diagnose->add_option("--window-floor", params.window_floor, "Banach window floor W");
    diagnose->add_option("--resolution", params.resolution, "metric resolution K");
    diagnose->add_option("--samples", params.samples, "sample points per grid cell");
    diagnose->add_option("--seed", params.seed, "sampler seed");
    diagnose->add_option("--sampler", sampler_name, "orbit|random-tail|perturb");
    diagnose->add_option("--sample-scan-length", params.sample_scan_length,
                         "orbit occurrence search range");
    diagnose->add_option("--out", common.out, "write the JSON report");
    diagnose->add_option("--csv", csv_out, "also write the flat CSV");

    // entropy
    auto* entropy_cmd = app.add_subcommand("entropy", "block complexity and h estimates");
    std::int64_t prefix_length = 1000000;
    int n_max = 24;
    double threshold = 0.02;
    entropy_cmd->add_option("--system", system_path, "generator descriptor JSON")
        ->required();
    entropy_cmd->add_option("--prefix-length,-L", prefix_length, "prefix length L");
    entropy_cmd->add_option("--n-max", n_max, "largest block length");
    entropy_cmd->add_option("--threshold", threshold, "zero-entropy flag threshold");
    entropy_cmd->add_option("--out", common.out, "write the curve CSV");

    // report
    auto* report_cmd = app.add_subcommand("report", "re-emit a JSON report as CSV");
    std::string in_path;
    report_cmd->add_option("--in", in_path, "diagnostic report JSON")->required();
    report_cmd->add_option("--out", common.out, "write the CSV");

    std::vector<std::string> expanded;
    try {
        expanded = expand_run_config(argc, argv);
    } catch (const Error& e) {
        std::cerr << "error [" << errc_name(e.code()) << "]: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error [schema]: " << e.what() << "\n";
        return 1;
    }
    std::vector<const char*> args;
    args.push_back(argv[0]);
    for (const auto& a : expanded) args.push_back(a.c_str());
    try {
        app.parse(static_cast<int>(args.size()), args.data());
    } catch (const CLI::ParseError& e) {
        return app.exit(e);
    }

    try {
        if (construct->parsed())
            return run_construct(base, levels, gaps_csv, slack_num, slack_den, budget,
                                 common, schedule_out);
        if (validate->parsed()) return run_validate(schedule_path, forward_budget, common);
        if (claims->parsed())
            return run_claims(schedule_path, levels_range, which_claim, scan_length,
                              base_scan, common);
        if (density->parsed())
            return run_density(set_file, predicate, density_op, N, W, ip_order, ip_bound,
                               common);
        if (diagnose->parsed()) {
            params.epsilon = rat_from_string(epsilon);
            params.delta = rat_from_string(delta);
            if (!grid_csv.empty()) params.grid = parse_grid(grid_csv);
            if (params.grid.empty() && level.empty())
                params.grid = {Rat(1, 2), Rat(1, 4), Rat(1, 8), Rat(1, 16), Rat(1, 32),
                               Rat(1, 64)};
            if (sampler_name == "orbit") params.sampler = SamplerKind::orbit;
            else if (sampler_name == "random-tail") params.sampler = SamplerKind::random_tail;
            else if (sampler_name == "perturb") params.sampler = SamplerKind::perturb;
            else fail(Errc::schema, "unknown sampler: " + sampler_name);
            return run_diagnose(mode_name, system_path, pair_path, params, level, csv_out,
                                common);
        }
        if (entropy_cmd->parsed())
            return run_entropy(system_path, prefix_length, n_max, threshold, common);
        if (report_cmd->parsed()) return run_report(in_path, common);
    } catch (const Error& e) {
        std::cerr << "error [" << errc_name(e.code()) << "]: " << e.what() << "\n";
        return e.code() == Errc::internal ? 2 : 1;
    } catch (const std::exception& e) {
        std::cerr << "internal error: " << e.what() << "\n";
        return 2;
    }
    return 2;
}
