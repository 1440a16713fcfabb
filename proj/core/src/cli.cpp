#include "equinet/cli.hpp"

#include <CLI11.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <ostream>
#include <sstream>

#include "equinet/acceptance.hpp"
#include "equinet/experiments.hpp"
#include "equinet/local_ops.hpp"

namespace equinet {

namespace {

std::string resolve_out_dir(const std::string& cli_out, const std::string& cfg_out,
                            const std::string& fallback) {
    if (const char* env = std::getenv("EQUINET_OUT"); env && *env) return env;
    if (!cli_out.empty()) return cli_out;
    if (!cfg_out.empty()) return cfg_out;
    return fallback;
}

std::vector<int> parse_int_list(const std::string& text, char sep) {
    std::vector<int> out;
    std::stringstream ss(text);
    std::string tok;
    while (std::getline(ss, tok, sep))
        if (!tok.empty()) out.push_back(std::stoi(tok));
    return out;
}

std::vector<double> parse_double_list(const std::string& text) {
    std::vector<double> out;
    std::stringstream ss(text);
    std::string tok;
    while (std::getline(ss, tok, ','))
        if (!tok.empty()) out.push_back(std::stod(tok));
    return out;
}

} // namespace

int cli_main(std::vector<std::string> args, std::ostream& out, std::ostream& err) {
    CLI::App app{"equinet: invariant/equivariant approximation experiments"};
    app.require_subcommand(1);
    app.fallthrough(); // global options may follow the subcommand
    int jobs = 1;
    app.add_option("--jobs", jobs, "threads for independent cases")->capture_default_str();

    auto* run_cmd = app.add_subcommand("run", "run an experiment described by a JSON config");
    std::string config_path, run_out;
    long long seed_override = -1;
    run_cmd->add_option("config", config_path, "config JSON file")->required();
    run_cmd->add_option("--out", run_out, "output directory");
    run_cmd->add_option("--seed", seed_override, "override the config seed");

    auto* kernels_cmd =
        app.add_subcommand("check-kernels", "kernel-gap sweep printed as CSV");
    std::vector<std::string> ab_args;
    std::string lambdas_arg = "0.5,0.25";
    std::string kernels_out;
    kernels_cmd->add_option("--ab", ab_args, "derivative orders, e.g. 1,0 (repeatable)")
        ->required();
    kernels_cmd->add_option("--lambdas", lambdas_arg, "descending spacings, e.g. 0.5,0.25")
        ->capture_default_str();
    kernels_cmd->add_option("--out", kernels_out, "also write kernel_gaps.csv here");

    auto* list_cmd = app.add_subcommand("list-experiments", "list experiment kinds");

    auto* selftest_cmd =
        app.add_subcommand("selftest", "run the full acceptance suite");
    std::string selftest_out;
    selftest_cmd->add_option("--out", selftest_out, "write selftest_report.txt here");

    // args arrive in natural order; CLI11 consumes them reversed
    std::reverse(args.begin(), args.end());
    try {
        app.parse(std::move(args));
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return 0;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << "\n\n" << app.help();
        return 2;
    }

    try {
        if (*run_cmd) {
            ExperimentConfig cfg = ExperimentConfig::from_file(config_path);
            if (seed_override >= 0) cfg.seed = static_cast<std::uint64_t>(seed_override);
            std::string dir = resolve_out_dir(run_out, cfg.out_dir, "equinet-out");
            bool ok = run_and_write(cfg, dir, jobs);
            out << "experiment " << cfg.kind << ": " << (ok ? "pass" : "fail") << "\n"
                << "report: " << dir << "/report.json\n";
            return ok ? 0 : 1;
        }
        if (*kernels_cmd) {
            std::vector<std::pair<int, int>> pairs;
            for (const std::string& a : ab_args) {
                std::stringstream ss(a);
                std::string group;
                while (std::getline(ss, group, ';')) {
                    std::vector<int> v = parse_int_list(group, ',');
                    if (v.size() != 2)
                        throw std::invalid_argument("--ab expects pairs like 1,0");
                    pairs.emplace_back(v[0], v[1]);
                }
            }
            std::vector<double> lambdas = parse_double_list(lambdas_arg);
            if (lambdas.empty()) throw std::invalid_argument("--lambdas expects a list");

            CsvTable csv;
            csv.name = "kernel_gaps.csv";
            csv.header = {"a", "b", "lambda", "gap", "kernel_l2", "grid_half_width"};
            bool monotone = true;
            for (const auto& [a, b] : pairs) {
                double prev = std::numeric_limits<double>::infinity();
                for (double lam : lambdas) {
                    KernelGapResult r = kernel_gap_result(a, b, lam);
                    if (!(r.gap < prev)) monotone = false;
                    prev = r.gap;
                    csv.rows.push_back({std::to_string(a), std::to_string(b),
                                        format_sig12(lam), format_sig12(r.gap),
                                        format_sig12(r.kernel_l2),
                                        std::to_string(r.grid_half_width)});
                }
            }
            out << csv.str();
            std::string dir = resolve_out_dir(kernels_out, "", "");
            if (!dir.empty()) {
                std::filesystem::create_directories(dir);
                std::ofstream f(dir + "/" + csv.name);
                f << csv.str();
            }
            return monotone ? 0 : 1;
        }
        if (*list_cmd) {
            for (const std::string& kind : experiment_kinds())
                out << kind << "\n    " << experiment_description(kind) << "\n";
            return 0;
        }
        if (*selftest_cmd) {
            std::vector<CriterionResult> results = run_acceptance(jobs);
            std::string text = acceptance_report_text(results);
            out << text;
            std::string dir = resolve_out_dir(selftest_out, "", "");
            if (!dir.empty()) {
                std::filesystem::create_directories(dir);
                std::ofstream f(dir + "/selftest_report.txt");
                f << text;
            }
            for (const CriterionResult& c : results)
                if (!c.pass) return 1;
            return 0;
        }
    } catch (const std::invalid_argument& e) {
        err << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return 1;
    }
    return 2;
}

} // namespace equinet
