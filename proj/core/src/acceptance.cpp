#include "equinet/acceptance.hpp"

#include <algorithm>
#include <chrono>
#include <functional>
#include <cmath>
#include <map>
#include <sstream>

#include "equinet/experiments.hpp"
#include "equinet/grid_signal.hpp"
#include "equinet/local_ops.hpp"

namespace equinet {

namespace {

CriterionResult stencil_identities() {
    double dev = 0.0;
    for (double lam : {1.0, 0.5}) {
        Signal z = discretize(AnalyticField::coordinate_monomial(1, 0), lam, 4.0);
        Signal dz = stencil_apply(StencilKind::Dz, z);
        Signal dzb = stencil_apply(StencilKind::Dzbar, z);
        Signal r2 = discretize(AnalyticField::coordinate_monomial(1, 1), lam, 4.0);
        Signal lap = stencil_apply(StencilKind::Laplace, r2);
        int L = dz.half_width();
        for (int kx = -L; kx <= L; ++kx)
            for (int ky = -L; ky <= L; ++ky) {
                dev = std::max(dev, std::abs(dz.at(kx, ky, 0) - Complex{1.0, 0.0}));
                dev = std::max(dev, std::abs(dzb.at(kx, ky, 0)));
                dev = std::max(dev, std::abs(lap.at(kx, ky, 0) - Complex{4.0, 0.0}));
            }
    }
    return {1, "exact stencil identities", dev <= 1e-12, "max_dev=" + format_sig12(dev)};
}

CriterionResult fourier_machinery() {
    Rng rng(202);
    double rt_dev = 0.0, parseval_dev = 0.0;
    for (int trial = 0; trial < 20; ++trial) {
        int L = 4 + (trial * 28) / 19; // up to 32, i.e. 65^2 nodes
        double lam = (trial % 3 == 0) ? 1.0 : (trial % 3 == 1 ? 0.5 : 0.25);
        Signal s = random_signal(GridSpec{lam, L}, 1, Field::Complex, rng);
        Signal F = dft2(s);
        parseval_dev = std::max(parseval_dev, std::abs(l2_norm(F) - l2_norm(s)));
        rt_dev = std::max(rt_dev, max_abs_diff(idft2(F, lam), s));
    }
    double sym_dev = 0.0;
    for (StencilKind k :
         {StencilKind::Dz, StencilKind::Dzbar, StencilKind::Laplace, StencilKind::Smooth}) {
        double lam = 0.5;
        Signal s = pad_to(random_signal(GridSpec{lam, 4}, 1, Field::Complex, rng), 6);
        Signal t = pad_to(stencil_apply(k, s), 6);
        Signal Fs = dft2(s);
        Signal Ft = dft2(t);
        double dp = Fs.spacing();
        for (int jx = -6; jx <= 6; ++jx)
            for (int jy = -6; jy <= 6; ++jy) {
                Complex want = fourier_symbol(k, lam, jx * dp, jy * dp) * Fs.at(jx, jy, 0);
                sym_dev = std::max(sym_dev, std::abs(Ft.at(jx, jy, 0) - want));
            }
    }
    bool pass = rt_dev <= 1e-10 && parseval_dev <= 1e-10 && sym_dev <= 1e-8;
    return {2, "dft2 unitarity and symbol agreement", pass,
            "roundtrip=" + format_sig12(rt_dev) + " parseval=" + format_sig12(parseval_dev) +
                " symbol=" + format_sig12(sym_dev)};
}

CriterionResult kernel_convergence(int jobs) {
    ExperimentConfig cfg;
    cfg.kind = "clt_sweep";
    cfg.seed = 1;
    ExperimentOutput out = run_experiment(cfg, jobs);
    bool pass = out.report.verdict();
    std::map<std::pair<int, int>, std::pair<double, double>> first_last;
    double worst_ratio = 0.0;
    for (const CaseResult& c : out.report.cases) {
        if (c.name.rfind("gap(", 0) != 0) continue;
        std::pair<int, int> ab{int(c.value("a")), int(c.value("b"))};
        if (!first_last.count(ab)) first_last[ab].first = c.value("gap");
        first_last[ab].second = c.value("gap");
    }
    for (const auto& [ab, fl] : first_last) {
        double ratio = fl.second / fl.first;
        worst_ratio = std::max(worst_ratio, ratio);
        if (!(ratio < 0.15)) pass = false;
    }
    return {3, "discrete-to-continuum kernel convergence", pass,
            "worst_gap_ratio=" + format_sig12(worst_ratio) + " (limit 0.15)"};
}

CriterionResult sn_network(int jobs) {
    ExperimentConfig cfg;
    cfg.kind = "sn_invariance_fit";
    cfg.seed = 1;
    cfg.tolerance = 1e-10;
    ExperimentOutput out = run_experiment(cfg, jobs);
    double exh = 0.0, rnd = 0.0, final_median = 0.0, target_std = 0.0;
    for (const CaseResult& c : out.report.cases) {
        if (c.name == "perm_exhaustive_n4") exh = c.value("max_dev");
        if (c.name == "perm_random_n12") rnd = c.value("max_dev");
        if (c.name == "final_rmse_below_tenth_std") {
            final_median = c.value("final_median");
            target_std = c.value("target_std");
        }
    }
    return {4, "S_N invariance and fitting", out.report.verdict(),
            "exhaustive_dev=" + format_sig12(exh) + " random_dev=" + format_sig12(rnd) +
                " final_median_rmse=" + format_sig12(final_median) +
                " target_std=" + format_sig12(target_std)};
}

CriterionResult convnet_equivariance(int jobs) {
    ExperimentConfig basic;
    basic.kind = "basic_equivariance";
    basic.seed = 1;
    basic.trials = 50;
    basic.tolerance = 1e-12;
    ExperimentOutput a = run_experiment(basic, jobs);
    double max_dev = 0.0;
    for (const CaseResult& c : a.report.cases) max_dev = std::max(max_dev, c.value("max_dev"));

    ExperimentConfig down;
    down.kind = "downsample_nonequivariance";
    down.seed = 1;
    down.trials = 20;
    down.threshold = 1e-3;
    ExperimentOutput b = run_experiment(down, jobs);
    double violation = 0.0;
    for (const CaseResult& c : b.report.cases)
        if (c.name == "violation_search") violation = c.value("max_dev");

    bool pass = a.report.verdict() && b.report.verdict();
    return {5, "translation equivariance and its erosion by striding", pass,
            "basic_max_dev=" + format_sig12(max_dev) +
                " downsample_violation=" + format_sig12(violation)};
}

CriterionResult charge_network(int jobs) {
    ExperimentConfig cfg;
    cfg.kind = "charge_rotation";
    cfg.seed = 1;
    cfg.trials = 100;
    cfg.specs = 20;
    cfg.tolerance = 1e-10;
    ExperimentOutput out = run_experiment(cfg, jobs);
    double phase = 0.0, origin = 0.0, diff_cov = 0.0;
    for (const CaseResult& c : out.report.cases) {
        if (c.name.rfind("phase_trial", 0) == 0)
            phase = std::max(phase, c.value("deviation"));
        if (c.name.rfind("origin_invariance", 0) == 0)
            origin = std::max(origin, c.value("deviation"));
        if (c.name == "diff_quarter_turn_covariance") diff_cov = c.value("deviation");
    }
    return {6, "charge conservation of the rotation-equivariant net", out.report.verdict(),
            "phase=" + format_sig12(phase) + " origin=" + format_sig12(origin) +
                " diff_cov=" + format_sig12(diff_cov)};
}

CriterionResult scaling_limit_consistency(int jobs) {
    ExperimentConfig cfg;
    cfg.kind = "lambda_consistency";
    cfg.seed = 1;
    cfg.lambdas = {0.5, 0.25, 0.125};
    cfg.ratio_min = 1.5;
    ExperimentOutput out = run_experiment(cfg, jobs);
    double ratio = 0.0;
    for (const CaseResult& c : out.report.cases)
        if (c.name == "rotation_ratio") ratio = c.value("ratio");
    return {7, "continuous-rotation consistency of the scaling limit", out.report.verdict(),
            "rot_dev_ratio=" + format_sig12(ratio) + " (needs >= 1.5)"};
}

CriterionResult ansatz_equivalence(int jobs) {
    ExperimentConfig cfg;
    cfg.kind = "invariant_poly_fit";
    cfg.seed = 1;
    ExperimentOutput out = run_experiment(cfg, jobs);
    double ra = 0.0, rb = 0.0;
    for (const CaseResult& c : out.report.cases) {
        if (c.name == "poly_ansatz_rmse") ra = c.value("rmse");
        if (c.name == "group_avg_rmse") rb = c.value("rmse");
    }
    return {8, "invariant-ansatz equivalence", out.report.verdict(),
            "poly_rmse=" + format_sig12(ra) + " avg_rmse=" + format_sig12(rb)};
}

} // namespace

namespace {

// per-criterion wall-clock budgets in seconds; a breach flips the verdict and
// is recorded in the detail (which is otherwise timing-free so that repeated
// passing runs stay byte-identical)
CriterionResult timed(double budget_s, const std::function<CriterionResult()>& fn) {
    auto t0 = std::chrono::steady_clock::now();
    CriterionResult r = fn();
    double elapsed = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (elapsed >= budget_s) {
        r.pass = false;
        r.detail += " runtime_budget_exceeded(" + format_sig12(elapsed) + "s >= " +
                    format_sig12(budget_s) + "s)";
    }
    return r;
}

} // namespace

std::vector<CriterionResult> run_acceptance_core(int jobs) {
    std::vector<CriterionResult> r;
    r.push_back(timed(1.0, [] { return stencil_identities(); }));
    r.push_back(timed(30.0, [] { return fourier_machinery(); }));
    r.push_back(timed(120.0, [&] { return kernel_convergence(jobs); }));
    r.push_back(timed(120.0, [&] { return sn_network(jobs); }));
    r.push_back(timed(30.0, [&] { return convnet_equivariance(jobs); }));
    r.push_back(timed(60.0, [&] { return charge_network(jobs); }));
    r.push_back(timed(180.0, [&] { return scaling_limit_consistency(jobs); }));
    r.push_back(timed(30.0, [&] { return ansatz_equivalence(jobs); }));
    return r;
}

std::vector<CriterionResult> run_acceptance(int jobs) {
    std::vector<CriterionResult> first = run_acceptance_core(jobs);
    std::vector<CriterionResult> second = run_acceptance_core(jobs);
    bool identical = acceptance_report_text(first) == acceptance_report_text(second);
    first.push_back({9, "report determinism across repeated runs", identical,
                     identical ? "byte-identical" : "reports differ"});
    return first;
}

std::string acceptance_report_text(const std::vector<CriterionResult>& results) {
    std::ostringstream os;
    for (const CriterionResult& c : results)
        os << "C" << c.id << ' ' << (c.pass ? "PASS" : "FAIL") << "  " << c.name << "  ["
           << c.detail << "]\n";
    bool all = std::all_of(results.begin(), results.end(),
                           [](const CriterionResult& c) { return c.pass; });
    os << (all ? "ALL CRITERIA PASS" : "CRITERIA FAILED") << '\n';
    return os.str();
}

} // namespace equinet
