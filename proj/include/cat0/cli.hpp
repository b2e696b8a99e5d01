#pragma once

#include "cat0/model_spaces.hpp"

#include <json.hpp>

#include <cstdint>
#include <iosfwd>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

namespace cat0 {

struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

enum class Scenario { reconstruct_flat, reconstruct_rankone, verify_properties, tape_demo, scissors_demo };

std::string to_string(Scenario s);
Scenario parse_scenario(const std::string& s);

/// Flat key = value configuration. Lines starting with '#' are comments.
///
///   scenario  = reconstruct_flat | reconstruct_rankone | verify_properties | tape_demo | scissors_demo
///   space     = euclidean | hyperbolic | tree | tree_cross_line
///   mode      = exact | float
///   tree      = line N LEN | tripod LEN | file PATH
///   tolerance, seed, cases, window, k_max, n_max, density, tape_order, q, max_distance
///   report    = output file name (inside the output directory)
///   plots     = comma-separated subset of tape, scissors, error_curve
///   timing    = on | off   (off keeps reports byte-identical across runs)
struct ScenarioConfig {
    Scenario scenario = Scenario::verify_properties;
    SpaceKind space = SpaceKind::euclidean_plane;
    NumericMode mode = NumericMode::exact_rational;
    std::string tree = "line 2 1";
    double tolerance = 1e-6;
    std::uint64_t seed = 1;
    int cases = 10;
    int window = 8;
    int k_max = 16;
    int n_max = 1000;
    int density = 16;
    int tape_order = 3;
    int q = 64;
    double max_distance = 10.0;
    std::string report = "report.json";
    std::string out_dir = ".";
    std::vector<std::string> plots;
    bool timing = false;

    static ScenarioConfig parse(std::istream& in);
    static ScenarioConfig parse_string(const std::string& text);
    static ScenarioConfig parse_file(const std::string& path);
    /// Throws ConfigError on out-of-range values.
    void validate() const;
    nlohmann::ordered_json to_json() const;
    SpacePtr make_space() const;
};

/// JSON report: config echo, per-case records, suite verdicts and plot geometry.
struct Report {
    nlohmann::ordered_json data;
    bool passed() const;
    std::string dump() const { return data.dump(2) + "\n"; }
    static Report load(const std::string& path);
};

Report run(const ScenarioConfig& config);

/// Writes the CSV for `what` in {tape, scissors, error_curve}; throws if absent.
void emit_plot_data(const Report& report, const std::string& what, std::ostream& out);

/// Entry point of the command-line tool; returns the process exit code.
int cli_main(int argc, char** argv);

}  // namespace cat0
