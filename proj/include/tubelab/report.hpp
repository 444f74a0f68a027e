// Experiment configuration, dispatch and report emission for the CLI.
// Configs are single JSON documents; output is CSV, JSON or plot-data
// with fully deterministic bytes for a fixed config and seed.

#ifndef TUBELAB_REPORT_HPP
#define TUBELAB_REPORT_HPP

#include <map>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "tubelab/spaces.hpp"

namespace tubelab::report {

using Json = nlohmann::ordered_json;

struct UsageError : std::runtime_error {
    explicit UsageError(const std::string& w) : std::runtime_error(w) {}
};

enum class Experiment {
    density_profile,
    ball_volumes,
    tube_volume,
    tube_invariants,
    check_harmonic,
    check_datri,
    transform_cosine,
    stiefel_fubini,
    series_fit,
    steiner_check,
};

Experiment experiment_from_name(const std::string& name);
std::string experiment_name(Experiment e);

struct CurveSpec {
    std::string type = "geodesic";  // geodesic | circle
    spaces::Vec base;
    spaces::Vec direction;
    double length = 1.0;
    double circle_radius = 1.0;
};

struct QuadratureSpec {
    int rule_level = 6;
    std::string rule_kind = "product";  // product | lowdisc
    int radial_order = 16;
    int t_panels = 1;
    int t_order = 8;
};

struct ExperimentConfig {
    spaces::SpaceSpec space;
    Experiment experiment = Experiment::density_profile;
    std::vector<double> radii = {0.5};
    CurveSpec curve;
    QuadratureSpec quadrature;
    double pass_tolerance = 1e-4;
    uint64_t seed = 1;
    bool expected_fail = false;
    std::string format = "csv";  // csv | json | plot
    std::string out_path;        // empty -> stdout

    // experiment extras
    std::vector<std::string> functions = {"const", "odd-cubic", "odd-mixed", "odd-trig",
                                          "even-square"};
    bool functions_set = false;  // "functions" present in the document
    std::vector<int> dims = {3, 4, 5};
    int max_order = 6;
    double window_lo = 0.05, window_hi = 0.5;
    int directions = 8;
    int base_points = 3;
    std::vector<double> speeds = {0.4, 0.8};
    std::vector<double> deltas = {0.02, 0.01};
    std::vector<std::string> checks = {"half-ball", "first-integral"};
    double sample_box = 0.2;  // half-width of the base-point sampling box
    std::map<std::string, double> coefficient_references;
};

struct ReportRow {
    std::string experiment;
    std::string space;
    double r = std::numeric_limits<double>::quiet_NaN();  // NaN -> empty column
    std::string quantity;
    double value = 0.0;
    double error = 0.0;
    std::optional<double> reference;
    std::string pass;  // pass | fail | expected-fail | na
};

struct RunResult {
    std::vector<ReportRow> rows;
    int exit_code = 0;
};

// Parses a config document (throws UsageError on schema violations).
ExperimentConfig parse_config(const Json& doc);

// Applies a dotted-path override ("quadrature.rule_level=8") to the
// raw document before parsing.
void apply_override(Json& doc, const std::string& assignment);

RunResult run(const ExperimentConfig& cfg);

// Renderers. Numbers are printed with 17 significant digits.
std::string emit_csv(const std::vector<ReportRow>& rows);
std::string emit_json(const Json& config_doc, const std::vector<ReportRow>& rows,
                      const std::string& timestamp = "");
std::string emit_plot(const std::vector<ReportRow>& rows);

// Runs a whole document: either one config object or {"suite":[...]};
// returns concatenated rows and the worst exit code.
RunResult run_document(const Json& doc);

inline constexpr const char* kVersion = "0.1.0";

}  // namespace tubelab::report

#endif
