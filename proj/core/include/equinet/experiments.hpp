#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <utility>
#include <vector>

namespace equinet {

/// Parsed experiment configuration. Each kind accepts only its own keys;
/// unknown keys are rejected with a structured error naming them.
struct ExperimentConfig {
    std::string kind;
    std::uint64_t seed = 1;
    std::string out_dir; // empty = caller decides

    // clt_sweep
    std::vector<std::pair<int, int>> ab = {{0, 0}, {1, 0}, {1, 1}, {2, 0}};
    std::vector<double> lambdas = {1.0, 0.5, 0.25, 0.125};
    // sn_invariance_fit
    int n = 6;
    int m = 3;
    std::vector<int> widths = {8, 32, 128};
    int seeds = 10;
    int train = 300;
    int test = 150;
    // shared tolerances
    double tolerance = 0.0; // kind-specific default applied at parse time
    double threshold = 1e-3;
    double ratio_min = 1.5;
    // basic_equivariance / downsample / charge_rotation
    int trials = 0; // kind-specific default
    int specs = 20;
    // invariant_poly_fit
    int samples = 600;
    int width = 200;
    double reg = 1e-10;
    double rmse_max = 1e-2;

    static ExperimentConfig from_json_text(const std::string& text);
    static ExperimentConfig from_file(const std::string& path);
    std::string to_json() const;
};

struct CaseResult {
    std::string name;
    bool pass = false;
    // insertion-ordered key/value pairs so reports print deterministically
    std::vector<std::pair<std::string, double>> values;
    std::string note; // set when a case failed with a module error
    double wall_ms = 0.0;

    double value(const std::string& key) const;
};

struct Report {
    ExperimentConfig config;
    std::vector<CaseResult> cases;

    bool verdict() const;
    /// include_timing=false drops wall-clock fields, leaving only the
    /// deterministic content.
    std::string to_json(bool include_timing = true) const;
};

struct CsvTable {
    std::string name; // file name, e.g. "kernel_gaps.csv"
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;

    std::string str() const;
};

struct ExperimentOutput {
    Report report;
    std::vector<CsvTable> tables;
    // extra files, e.g. golden signals in Signal JSON
    std::vector<std::pair<std::string, std::string>> artifacts;
};

/// Floats in CSVs and report details print with 12 significant digits.
std::string format_sig12(double v);

std::vector<std::string> experiment_kinds();
std::string experiment_description(const std::string& kind);

/// Runs one experiment; cases may execute on `jobs` threads, with results
/// assembled in declared order so the report does not depend on jobs.
ExperimentOutput run_experiment(const ExperimentConfig& cfg, int jobs = 1);

/// Runs and writes report.json plus one CSV per table under out_dir.
/// Returns the overall verdict.
bool run_and_write(const ExperimentConfig& cfg, const std::string& out_dir, int jobs = 1);

} // namespace equinet
