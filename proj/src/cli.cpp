#include "cat0/cli.hpp"

#include "cat0/flatstrip.hpp"
#include "cat0/rankone.hpp"
#include "cat0/suites.hpp"

#include <CLI11.hpp>

#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <numbers>
#include <random>
#include <sstream>

namespace cat0 {

using json = nlohmann::ordered_json;

namespace {

constexpr const char* kVersion = "1.0.0";

std::string trim(const std::string& s)
{
    auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return "";
    auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

template <class T>
T parse_number(const std::string& key, const std::string& value)
{
    std::istringstream in(value);
    T v{};
    in >> v;
    if (in.fail() || !in.eof()) throw ConfigError("bad value for " + key + ": '" + value + "'");
    return v;
}

std::vector<std::string> split_list(const std::string& text)
{
    std::vector<std::string> out;
    std::stringstream in(text);
    std::string item;
    while (std::getline(in, item, ','))
        if (!trim(item).empty()) out.push_back(trim(item));
    return out;
}

TreeDescription tree_from_spec(const std::string& spec)
{
    std::istringstream in(spec);
    std::string kind;
    in >> kind;
    if (kind == "line") {
        int n = 0;
        std::string len;
        in >> n >> len;
        if (in.fail() || n < 0) throw ConfigError("tree = line N LEN expects a count and a length");
        return line_tree(n, parse_rational(len));
    }
    if (kind == "tripod") {
        std::string len;
        in >> len;
        if (in.fail()) throw ConfigError("tree = tripod LEN expects a length");
        return tripod_tree(parse_rational(len));
    }
    if (kind == "file") {
        std::string path;
        in >> path;
        std::ifstream f(path);
        if (!f) throw ConfigError("cannot open tree file " + path);
        return TreeDescription::parse(f);
    }
    throw ConfigError("unknown tree description '" + spec + "'");
}

std::vector<int> rays_of(const ModelSpace& space)
{
    std::vector<int> out;
    const auto& edges = space.tree_description().edges;
    for (std::size_t i = 0; i < edges.size(); ++i)
        if (edges[i].ray) out.push_back(static_cast<int>(i));
    return out;
}

std::vector<int> finite_edges(const ModelSpace& space)
{
    std::vector<int> out;
    const auto& edges = space.tree_description().edges;
    for (std::size_t i = 0; i < edges.size(); ++i)
        if (!edges[i].ray) out.push_back(static_cast<int>(i));
    return out;
}

json suite_json(const SuiteVerdict& v)
{
    return json{{"name", v.name},          {"passed", v.passed},       {"checks", v.checks},
                {"failures", v.failures},  {"worst", v.worst},         {"tolerance", v.tolerance},
                {"detail", v.detail}};
}

SuiteVerdict error_suite(const std::string& name, const json& cases, double tolerance)
{
    SuiteVerdict v;
    v.name = name;
    v.tolerance = tolerance;
    for (const auto& c : cases) {
        ++v.checks;
        double e = c["error"].get<double>();
        v.worst = std::max(v.worst, e);
        if (!(e <= tolerance)) {
            ++v.failures;
            v.passed = false;
            if (v.detail.empty()) v.detail = "case " + std::to_string(c["id"].get<int>());
        }
    }
    return v;
}

class Clock {
public:
    explicit Clock(bool on) : on_(on), start_(std::chrono::steady_clock::now()) {}
    double seconds() const
    {
        if (!on_) return 0.0;
        return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
    }

private:
    bool on_;
    std::chrono::steady_clock::time_point start_;
};

json make_case(int id, json inputs, double reconstructed, double truth, std::uint64_t calls, double seconds)
{
    return json{{"id", id},
                {"inputs", std::move(inputs)},
                {"reconstructed", reconstructed},
                {"ground_truth", truth},
                {"error", std::abs(reconstructed - truth)},
                {"oracle_calls", calls},
                {"wall_time_s", seconds}};
}

// ---------------------------------------------------------------------------
// Scenarios

struct FlatCase {
    Geodesic c;
    Num t1, t2;
    json inputs;
};

FlatCase flat_case(const ModelSpace& sp, std::mt19937_64& rng, int id)
{
    FlatCase fc;
    std::uniform_real_distribution<double> real(-3.0, 3.0);
    std::uniform_int_distribution<int> den(1, 8);
    auto param = [&]() -> Num {
        if (!sp.exact()) return Num(real(rng));
        int n = den(rng);
        return Num(Rational(std::uniform_int_distribution<int>(-3 * n, 3 * n)(rng), n));
    };
    if (sp.kind() == SpaceKind::euclidean_plane) {
        Point p = sp.random_point(rng, 2.0);
        Num ux, uy;
        if (sp.exact()) {
            static const int dirs[][3] = {{1, 0, 1}, {0, 1, 1}, {3, 4, 5}, {4, 3, 5}, {5, 12, 13}, {12, 5, 13}, {8, 15, 17}};
            const auto& d = dirs[std::uniform_int_distribution<int>(0, 6)(rng)];
            int sx = std::uniform_int_distribution<int>(0, 1)(rng) ? 1 : -1;
            int sy = std::uniform_int_distribution<int>(0, 1)(rng) ? 1 : -1;
            ux = Num::ratio(sx * d[0], d[2]);
            uy = Num::ratio(sy * d[1], d[2]);
        } else {
            double phi = std::uniform_real_distribution<double>(0.0, 2 * std::numbers::pi)(rng);
            ux = Num(std::cos(phi));
            uy = Num(std::sin(phi));
        }
        fc.c = sp.geodesic_through(p, sp.point(p.x + ux, p.y + uy));
        fc.inputs["line"] = describe(p) + " dir (" + std::to_string(ux.value()) + ", " + std::to_string(uy.value()) + ")";
    } else {
        auto fin = finite_edges(sp);
        auto rays = rays_of(sp);
        if (id % 2 == 0 && !fin.empty()) {
            int e = fin[std::uniform_int_distribution<std::size_t>(0, fin.size() - 1)(rng)];
            Num len = sp.num(sp.tree_description().edges[e].length);
            Num off = len * sp.num(Rational(std::uniform_int_distribution<int>(1, 7)(rng), 8));
            fc.c = sp.geodesic_through(sp.product_point(e, off, sp.num(Rational(0))),
                                       sp.product_point(e, off, sp.num(Rational(1))));
            fc.inputs["line"] = "vertical over edge " + std::to_string(e);
        } else {
            // Sloped line between two rays: tree run and height rise form a 3-4-5 triangle when
            // the rays are two units apart, which keeps exact arithmetic rational.
            int ra = rays.front(), rb = rays.back();
            Point a = sp.product_point(ra, sp.num(Rational(1)), sp.num(Rational(0)));
            Num run = sp.tree_distance(sp.tree_part(a), sp.tree_part(sp.product_point(rb, sp.num(Rational(1)), sp.num(Rational(0)))));
            Num rise = run * sp.num(Rational(3, 4));
            fc.c = sp.geodesic_through(a, sp.product_point(rb, sp.num(Rational(1)), rise));
            fc.inputs["line"] = "sloped between rays " + std::to_string(ra) + " and " + std::to_string(rb);
        }
    }
    fc.t1 = param();
    fc.t2 = param();
    fc.inputs["t1"] = fc.t1.value();
    fc.inputs["t2"] = fc.t2.value();
    return fc;
}

void scenario_flat(const ScenarioConfig& cfg, json& report)
{
    SpacePtr sp = cfg.make_space();
    if (sp->kind() != SpaceKind::euclidean_plane && sp->kind() != SpaceKind::tree_cross_line)
        throw ConfigError("reconstruct_flat runs on euclidean or tree_cross_line spaces");
    std::mt19937_64 rng(cfg.seed);
    FlatConfig fcfg;
    fcfg.rank = RankConfig{cfg.k_max, cfg.window, cfg.density};
    bool exact_ok = true;
    for (int i = 0; i < cfg.cases; ++i) {
        FlatCase fc = flat_case(*sp, rng, i);
        OracleSession session(sp);
        Clock clock(cfg.timing);
        FlatReconstruction r = reconstruct_flat(session, fc.c, fc.t1, fc.t2, cfg.tolerance, fcfg);
        Num truth = sp->distance(eval(fc.c, fc.t1), eval(fc.c, fc.t2));
        double value = r.exact ? r.exact->convert_to<double>() : r.estimate;
        json rec = make_case(i, fc.inputs, value, truth.value(), r.queries, clock.seconds());
        if (r.exact) {
            rec["exact"] = to_string(*r.exact);
            if (truth.exact()) exact_ok = exact_ok && Num(*r.exact) == truth;
        }
        report["cases"].push_back(rec);
    }
    report["suites"].push_back(suite_json(error_suite("max_error_within_tolerance", report["cases"], cfg.tolerance)));
    SuiteVerdict ex;
    ex.name = "rationals_exact";
    ex.checks = cfg.cases;
    ex.passed = exact_ok;
    ex.failures = exact_ok ? 0 : 1;
    report["suites"].push_back(suite_json(ex));
}

void scenario_rankone(const ScenarioConfig& cfg, json& report)
{
    SpacePtr sp = cfg.make_space();
    if (sp->kind() != SpaceKind::hyperbolic_plane) throw ConfigError("reconstruct_rankone runs on the hyperbolic plane");
    std::mt19937_64 rng(cfg.seed);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    for (int i = 0; i < cfg.cases; ++i) {
        Point p = sp->random_point(rng, 1.0);
        double phi = 2 * std::numbers::pi * unit(rng);
        Geodesic a = sp->geodesic_through(p, sp->polar(2.0, phi));
        double d = cfg.max_distance * (1.0 - unit(rng));  // in (0, max_distance]
        double t1 = -d / 2 + (unit(rng) - 0.5), t2 = t1 + d;
        OracleSession session(sp);
        Clock clock(cfg.timing);
        RankOneReconstruction r = reconstruct_rankone(session, a, t1, t2, cfg.tolerance);
        double truth = sp->distance(eval(a, t1), eval(a, t2)).value();
        json inputs{{"base", describe(p)}, {"phi", phi}, {"t1", t1}, {"t2", t2}};
        json rec = make_case(i, inputs, r.estimate, truth, r.queries, clock.seconds());
        rec["integer_part"] = r.integer_part;
        rec["ladder"] = r.ladder;
        rec["translations"] = r.translations;
        report["cases"].push_back(rec);
    }
    report["suites"].push_back(suite_json(error_suite("max_error_within_tolerance", report["cases"], cfg.tolerance)));
}

void scenario_properties(const ScenarioConfig& cfg, json& report)
{
    for (const auto& v : run_property_suites(cfg.seed, cfg.cases)) report["suites"].push_back(suite_json(v));
}

void scenario_tape(const ScenarioConfig& cfg, json& report)
{
    SpacePtr sp = cfg.make_space();
    if (sp->kind() != SpaceKind::euclidean_plane) throw ConfigError("tape_demo runs on the euclidean plane");
    OracleSession session(sp);
    Geodesic c = sp->geodesic_through(sp->point(0, 0), sp->point(1, 0));
    FlatStrip strip = make_flat_strip(sp, c, Num(0), sp->point(0, 1));
    Clock clock(cfg.timing);
    Tape tape = build_tape(session, strip, make_rsequence(c, sp->num(Rational(0))), cfg.tape_order);
    // Outer boundary separation: distance from row 3 to the carrier of row 0.
    Point far = tape.at(3, 1, 0);
    double measured = sp->distance(far, sp->project(far, c).foot).value();
    json inputs{{"p", cfg.tape_order}};
    report["cases"].push_back(make_case(0, inputs, measured, tape_width(cfg.tape_order).value(), session.query_count(),
                                        clock.seconds()));
    report["suites"].push_back(suite_json(error_suite("tape_width", report["cases"], 1e-9)));
    json rows = json::array();
    for (int i = 0; i < 4; ++i)
        for (int j = 1; j <= tape.p; ++j)
            for (int z = -cfg.window; z <= cfg.window; ++z) {
                auto uv = chart_coordinates(tape.at(i, j, z));
                rows.push_back(json::array({i, j, z, uv[0], uv[1]}));
            }
    report["plots"]["tape"] = json{{"header", json::array({"i", "j", "z", "u", "v"})}, {"rows", rows}};
}

void scenario_scissors(const ScenarioConfig& cfg, json& report)
{
    SpacePtr sp = cfg.make_space();
    if (sp->kind() != SpaceKind::hyperbolic_plane) throw ConfigError("scissors_demo runs on the hyperbolic plane");
    std::mt19937_64 rng(cfg.seed);
    double phi = std::uniform_real_distribution<double>(0.0, 2 * std::numbers::pi)(rng);
    Geodesic a = sp->geodesic_through(sp->origin(), sp->polar(1.0, phi));
    Point x0 = sp->project(sp->origin(), a).foot;
    Scissors s = find_scissors_with_displacement(*sp, a, x0, Rational(1, cfg.q));
    OracleSession session(sp);
    // Orbits reach distance n / q from x0; double-precision hyperboloid points stay reliable to about 16.
    const int n_limit = std::min(cfg.n_max, 16 * cfg.q);
    report["n_limit"] = n_limit;
    DisplacementRecord rec = displacement_record(session, s, x0, n_limit);
    report["displacement"] = json{{"formula", rec.formula}, {"composed", rec.composed}, {"oracle", rec.oracle},
                                  {"n_used", rec.n_used}};
    json curve = json::array();
    int id = 0;
    for (int n = 1; n <= n_limit; n *= 10) {
        std::uint64_t before = session.query_count();
        Clock clock(cfg.timing);
        double est = displacement_oracle(session, s, x0, n);
        report["cases"].push_back(make_case(id++, json{{"n", n}}, est, rec.formula, session.query_count() - before,
                                            clock.seconds()));
        curve.push_back(json::array({n, std::abs(est - rec.formula)}));
    }
    SuiteVerdict triple;
    triple.name = "triple_agreement";
    triple.tolerance = 1e-8;
    triple.checks = 2;
    triple.worst = std::abs(rec.formula - rec.composed);
    bool oracle_ok = rec.oracle > rec.formula - 1.0 / rec.n_used && rec.oracle <= rec.formula + 1e-8;
    triple.passed = triple.worst <= 1e-8 && oracle_ok;
    triple.failures = (triple.worst <= 1e-8 ? 0 : 1) + (oracle_ok ? 0 : 1);
    report["suites"].push_back(suite_json(triple));
    report["plots"]["error_curve"] = json{{"header", json::array({"n", "error"})}, {"rows", curve}};
    std::ostringstream csv;
    export_scissors_csv(*sp, s, csv);
    json rows = json::array();
    std::string line;
    std::istringstream in(csv.str());
    std::getline(in, line);  // header
    while (std::getline(in, line)) {
        std::istringstream f(line);
        std::string name, t, u, v;
        std::getline(f, name, ',');
        std::getline(f, t, ',');
        std::getline(f, u, ',');
        std::getline(f, v, ',');
        rows.push_back(json::array({name, std::stod(t), std::stod(u), std::stod(v)}));
    }
    report["plots"]["scissors"] = json{{"header", json::array({"line", "t", "u", "v"})}, {"rows", rows}};
}

}  // namespace

// ---------------------------------------------------------------------------
// Config

std::string to_string(Scenario s)
{
    switch (s) {
    case Scenario::reconstruct_flat: return "reconstruct_flat";
    case Scenario::reconstruct_rankone: return "reconstruct_rankone";
    case Scenario::verify_properties: return "verify_properties";
    case Scenario::tape_demo: return "tape_demo";
    case Scenario::scissors_demo: return "scissors_demo";
    }
    return "?";
}

Scenario parse_scenario(const std::string& s)
{
    for (Scenario v : {Scenario::reconstruct_flat, Scenario::reconstruct_rankone, Scenario::verify_properties,
                       Scenario::tape_demo, Scenario::scissors_demo})
        if (to_string(v) == s) return v;
    throw ConfigError("unknown scenario '" + s + "'");
}

ScenarioConfig ScenarioConfig::parse(std::istream& in)
{
    ScenarioConfig c;
    std::string raw;
    int line_no = 0;
    while (std::getline(in, raw)) {
        ++line_no;
        std::string line = trim(raw);
        if (line.empty() || line[0] == '#') continue;
        auto eq = line.find('=');
        if (eq == std::string::npos) throw ConfigError("line " + std::to_string(line_no) + ": expected key = value");
        std::string key = trim(line.substr(0, eq)), value = trim(line.substr(eq + 1));
        if (key.empty() || value.empty()) throw ConfigError("line " + std::to_string(line_no) + ": empty key or value");
        if (key == "scenario") c.scenario = parse_scenario(value);
        else if (key == "space") {
            try {
                c.space = parse_space_kind(value);
            } catch (const std::exception&) {
                throw ConfigError("unknown space '" + value + "'");
            }
        } else if (key == "mode") {
            if (value == "exact") c.mode = NumericMode::exact_rational;
            else if (value == "float") c.mode = NumericMode::float_with_tolerance;
            else throw ConfigError("mode must be exact or float");
        } else if (key == "tree") c.tree = value;
        else if (key == "tolerance") c.tolerance = parse_number<double>(key, value);
        else if (key == "seed") c.seed = parse_number<std::uint64_t>(key, value);
        else if (key == "cases") c.cases = parse_number<int>(key, value);
        else if (key == "window") c.window = parse_number<int>(key, value);
        else if (key == "k_max") c.k_max = parse_number<int>(key, value);
        else if (key == "n_max") c.n_max = parse_number<int>(key, value);
        else if (key == "density") c.density = parse_number<int>(key, value);
        else if (key == "tape_order") c.tape_order = parse_number<int>(key, value);
        else if (key == "q") c.q = parse_number<int>(key, value);
        else if (key == "max_distance") c.max_distance = parse_number<double>(key, value);
        else if (key == "report") c.report = value;
        else if (key == "out_dir") c.out_dir = value;
        else if (key == "plots") c.plots = split_list(value);
        else if (key == "timing") {
            if (value != "on" && value != "off") throw ConfigError("timing must be on or off");
            c.timing = value == "on";
        } else throw ConfigError("line " + std::to_string(line_no) + ": unknown key '" + key + "'");
    }
    c.validate();
    return c;
}

ScenarioConfig ScenarioConfig::parse_string(const std::string& text)
{
    std::istringstream in(text);
    return parse(in);
}

ScenarioConfig ScenarioConfig::parse_file(const std::string& path)
{
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config " + path);
    return parse(in);
}

void ScenarioConfig::validate() const
{
    if (!(tolerance > 0) || !std::isfinite(tolerance)) throw ConfigError("tolerance must be positive");
    if (cases < 1) throw ConfigError("cases must be positive");
    if (window < 1 || k_max < 1 || density < 1 || n_max < 1) throw ConfigError("budgets must be positive");
    if (tape_order < 1) throw ConfigError("tape_order must be positive");
    if (q < 1) throw ConfigError("q must be positive");
    if (!(max_distance > 0)) throw ConfigError("max_distance must be positive");
    for (const auto& p : plots)
        if (p != "tape" && p != "scissors" && p != "error_curve") throw ConfigError("unknown plot '" + p + "'");
}

json ScenarioConfig::to_json() const
{
    return json{{"scenario", cat0::to_string(scenario)},
                {"space", cat0::to_string(space)},
                {"mode", mode == NumericMode::exact_rational ? "exact" : "float"},
                {"tree", tree},
                {"tolerance", tolerance},
                {"seed", seed},
                {"cases", cases},
                {"window", window},
                {"k_max", k_max},
                {"n_max", n_max},
                {"density", density},
                {"tape_order", tape_order},
                {"q", q},
                {"max_distance", max_distance},
                {"plots", plots},
                {"timing", timing}};
}

SpacePtr ScenarioConfig::make_space() const
{
    switch (space) {
    case SpaceKind::euclidean_plane: return ModelSpace::euclidean(mode);
    case SpaceKind::hyperbolic_plane: return ModelSpace::hyperbolic();
    case SpaceKind::metric_tree: return ModelSpace::tree(tree_from_spec(tree), mode);
    case SpaceKind::tree_cross_line: return ModelSpace::tree_cross_line(tree_from_spec(tree), mode);
    }
    throw ConfigError("unknown space");
}

// ---------------------------------------------------------------------------
// Reports

bool Report::passed() const { return data.contains("passed") && data["passed"].get<bool>(); }

Report Report::load(const std::string& path)
{
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open report " + path);
    Report r;
    try {
        r.data = json::parse(in);
    } catch (const json::parse_error& e) {
        throw std::runtime_error("report is not valid JSON: " + std::string(e.what()));
    }
    return r;
}

Report run(const ScenarioConfig& config)
{
    config.validate();
    Report r;
    json& d = r.data;
    d["artifact"] = "cat0";
    d["version"] = kVersion;
    d["config"] = config.to_json();
    d["cases"] = json::array();
    d["suites"] = json::array();
    d["plots"] = json::object();
    try {
        switch (config.scenario) {
        case Scenario::reconstruct_flat: scenario_flat(config, d); break;
        case Scenario::reconstruct_rankone: scenario_rankone(config, d); break;
        case Scenario::verify_properties: scenario_properties(config, d); break;
        case Scenario::tape_demo: scenario_tape(config, d); break;
        case Scenario::scissors_demo: scenario_scissors(config, d); break;
        }
    } catch (const ConfigError&) {
        throw;
    } catch (const std::exception& e) {
        // Partial report: the records so far stay, the run is marked failed.
        d["failure"] = e.what();
    }
    bool ok = !d.contains("failure") && !d["suites"].empty();
    for (const auto& s : d["suites"]) ok = ok && s["passed"].get<bool>();
    d["passed"] = ok;
    return r;
}

void emit_plot_data(const Report& report, const std::string& what, std::ostream& out)
{
    if (what != "tape" && what != "scissors" && what != "error_curve")
        throw std::invalid_argument("unknown plot '" + what + "'");
    const json& d = report.data;
    if (!d.contains("plots") || !d["plots"].contains(what))
        throw std::runtime_error("report holds no " + what + " data");
    const json& p = d["plots"][what];
    const json& header = p["header"];
    for (std::size_t i = 0; i < header.size(); ++i) out << (i ? "," : "") << header[i].get<std::string>();
    out << "\n";
    for (const auto& row : p["rows"]) {
        for (std::size_t i = 0; i < row.size(); ++i) {
            if (i) out << ",";
            if (row[i].is_string()) out << row[i].get<std::string>();
            else out << row[i].dump();
        }
        out << "\n";
    }
}

// ---------------------------------------------------------------------------
// Command line

int cli_main(int argc, char** argv)
{
    CLI::App app{"Metric reconstruction of model CAT(0) spaces from a unit-distance oracle"};
    app.require_subcommand(1);

    std::string config_path, out_dir;
    std::optional<std::uint64_t> seed;
    std::optional<double> tolerance;
    auto* run_cmd = app.add_subcommand("run", "Run a scenario and write its JSON report");
    run_cmd->add_option("config", config_path, "key = value scenario file")->required();
    run_cmd->add_option("--seed", seed, "Override the seed");
    run_cmd->add_option("--tolerance", tolerance, "Override the tolerance");
    run_cmd->add_option("--out-dir", out_dir, "Directory for the report and plots");

    std::string report_path, what, plot_dir = ".";
    auto* plot_cmd = app.add_subcommand("plot", "Write plot CSV from a report");
    plot_cmd->add_option("report", report_path, "Report JSON")->required();
    plot_cmd->add_option("what", what, "tape, scissors or error_curve")->required();
    plot_cmd->add_option("--out-dir", plot_dir, "Directory for the CSV");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    if (run_cmd->parsed()) {
        ScenarioConfig cfg;
        try {
            cfg = ScenarioConfig::parse_file(config_path);
            if (seed) cfg.seed = *seed;
            if (tolerance) cfg.tolerance = *tolerance;
            if (!out_dir.empty()) cfg.out_dir = out_dir;
            cfg.validate();
        } catch (const ConfigError& e) {
            std::cerr << "config error: " << e.what() << "\n";
            return 2;
        }
        Report report;
        try {
            report = run(cfg);
        } catch (const ConfigError& e) {
            std::cerr << "config error: " << e.what() << "\n";
            return 2;
        }
        std::filesystem::create_directories(cfg.out_dir);
        auto path = std::filesystem::path(cfg.out_dir) / cfg.report;
        std::ofstream(path) << report.dump();
        for (const auto& p : cfg.plots) {
            std::ofstream csv(std::filesystem::path(cfg.out_dir) / (p + ".csv"));
            try {
                emit_plot_data(report, p, csv);
            } catch (const std::exception& e) {
                std::cerr << "plot " << p << ": " << e.what() << "\n";
            }
        }
        std::cout << path.string() << ": " << (report.passed() ? "pass" : "FAIL") << "\n";
        if (report.data.contains("failure")) std::cerr << "scenario failed: " << report.data["failure"].get<std::string>() << "\n";
        return report.passed() ? 0 : 1;
    }

    try {
        Report report = Report::load(report_path);
        std::filesystem::create_directories(plot_dir);
        auto path = std::filesystem::path(plot_dir) / (what + ".csv");
        std::ostringstream csv;
        emit_plot_data(report, what, csv);
        std::ofstream(path) << csv.str();
        std::cout << path.string() << "\n";
        return 0;
    } catch (const std::invalid_argument& e) {
        std::cerr << "plot: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "plot: " << e.what() << "\n";
        return 1;
    }
}

}  // namespace cat0
