#include "equinet/experiments.hpp"

#include <json.hpp>

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <numbers>
#include <stdexcept>
#include <thread>

#include "equinet/charge_convnet.hpp"
#include "equinet/convnets.hpp"
#include "equinet/grid_signal.hpp"
#include "equinet/invariant_nets.hpp"
#include "equinet/local_ops.hpp"
#include "equinet/serialization.hpp"

namespace equinet {

using nlohmann::json;

namespace {

constexpr double kPi = std::numbers::pi;

const std::map<std::string, std::vector<std::string>>& kind_keys() {
    static const std::map<std::string, std::vector<std::string>> keys = {
        {"clt_sweep", {"ab", "lambdas"}},
        {"sn_invariance_fit", {"n", "m", "widths", "seeds", "train", "test", "tolerance"}},
        {"basic_equivariance", {"trials", "tolerance"}},
        {"downsample_nonequivariance", {"trials", "threshold"}},
        {"charge_rotation", {"trials", "specs", "tolerance"}},
        {"lambda_consistency", {"lambdas", "ratio_min"}},
        {"invariant_poly_fit", {"samples", "width", "reg", "rmse_max"}},
    };
    return keys;
}

void apply_kind_defaults(ExperimentConfig& cfg) {
    if (cfg.kind == "sn_invariance_fit" && cfg.tolerance == 0.0) cfg.tolerance = 1e-10;
    if (cfg.kind == "basic_equivariance") {
        if (cfg.tolerance == 0.0) cfg.tolerance = 1e-12;
        if (cfg.trials == 0) cfg.trials = 50;
    }
    if (cfg.kind == "downsample_nonequivariance" && cfg.trials == 0) cfg.trials = 20;
    if (cfg.kind == "charge_rotation") {
        if (cfg.tolerance == 0.0) cfg.tolerance = 1e-10;
        if (cfg.trials == 0) cfg.trials = 100;
    }
    if (cfg.kind == "lambda_consistency" && cfg.lambdas == std::vector<double>{1.0, 0.5, 0.25, 0.125})
        cfg.lambdas = {0.5, 0.25, 0.125};
}

void validate_config(const ExperimentConfig& cfg) {
    auto fail = [](const std::string& msg) { throw std::invalid_argument("config: " + msg); };
    if (!kind_keys().count(cfg.kind)) fail("unknown kind '" + cfg.kind + "'");
    if (!std::is_sorted(cfg.lambdas.rbegin(), cfg.lambdas.rend()))
        fail("lambdas must be sorted descending");
    for (double l : cfg.lambdas)
        if (!(l > 0.0)) fail("lambdas must be positive");
    if (cfg.kind == "clt_sweep")
        for (double l : cfg.lambdas)
            if (l > 1.0) fail("clt_sweep lambdas must lie in (0, 1]");
    if (cfg.kind == "lambda_consistency" && cfg.lambdas.size() < 2)
        fail("lambda_consistency needs at least two lambdas");
    if (cfg.tolerance < 0.0) fail("tolerance must be positive");
    if (cfg.threshold <= 0.0) fail("threshold must be positive");
    if (cfg.ratio_min <= 0.0) fail("ratio_min must be positive");
    if (cfg.kind == "sn_invariance_fit") {
        if (cfg.n < 1 || cfg.m < 1) fail("n and m must be positive");
        if (cfg.widths.empty()) fail("widths must be nonempty");
    }
    if (cfg.kind == "invariant_poly_fit" && cfg.width < 1) fail("width must be positive");
}

// ---------------------------------------------------------------------------
// parallel case runner: deterministic assembly in declared order

std::vector<CaseResult> run_cases(const std::vector<std::function<CaseResult()>>& tasks,
                                  int jobs) {
    std::vector<CaseResult> results(tasks.size());
    auto run_one = [&](std::size_t i) {
        auto t0 = std::chrono::steady_clock::now();
        try {
            results[i] = tasks[i]();
        } catch (const std::exception& e) {
            // a module error fails the case but the run continues
            results[i].name = "case[" + std::to_string(i) + "]";
            results[i].pass = false;
            results[i].note = e.what();
        }
        auto t1 = std::chrono::steady_clock::now();
        results[i].wall_ms = std::chrono::duration<double, std::milli>(t1 - t0).count();
    };
    if (jobs <= 1) {
        for (std::size_t i = 0; i < tasks.size(); ++i) run_one(i);
        return results;
    }
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    int n_threads = std::min<std::size_t>(static_cast<std::size_t>(jobs), tasks.size());
    for (int t = 0; t < n_threads; ++t)
        pool.emplace_back([&] {
            while (true) {
                std::size_t i = next.fetch_add(1);
                if (i >= tasks.size()) return;
                run_one(i);
            }
        });
    for (std::thread& th : pool) th.join();
    return results;
}

CaseResult make_case(std::string name, bool pass,
                     std::vector<std::pair<std::string, double>> values) {
    CaseResult c;
    c.name = std::move(name);
    c.pass = pass;
    c.values = std::move(values);
    return c;
}

// ---------------------------------------------------------------------------
// experiment kinds

ExperimentOutput run_clt(const ExperimentConfig& cfg, int jobs) {
    std::vector<std::function<CaseResult()>> tasks;
    for (const auto& [a, b] : cfg.ab)
        for (double lam : cfg.lambdas) {
            int aa = a, bb = b;
            tasks.push_back([aa, bb, lam] {
                KernelGapResult r = kernel_gap_result(aa, bb, lam);
                char name[64];
                std::snprintf(name, sizeof name, "gap(%d,%d,%g)", aa, bb, lam);
                return make_case(name, r.mass_dev <= 1e-8,
                                 {{"a", double(aa)},
                                  {"b", double(bb)},
                                  {"lambda", lam},
                                  {"gap", r.gap},
                                  {"kernel_l2", r.kernel_l2},
                                  {"mass_dev", r.mass_dev},
                                  {"grid_half_width", double(r.grid_half_width)}});
            });
        }
    ExperimentOutput out;
    out.report.config = cfg;
    out.report.cases = run_cases(tasks, jobs);

    CsvTable csv;
    csv.name = "kernel_gaps.csv";
    csv.header = {"a", "b", "lambda", "gap", "kernel_l2", "grid_half_width"};
    std::size_t idx = 0;
    for (const auto& [a, b] : cfg.ab) {
        double prev = std::numeric_limits<double>::infinity();
        double first = 0.0, last = 0.0;
        bool monotone = true;
        for (std::size_t li = 0; li < cfg.lambdas.size(); ++li, ++idx) {
            const CaseResult& c = out.report.cases[idx];
            double gap = c.value("gap");
            if (li == 0) first = gap;
            last = gap;
            if (!(gap < prev)) monotone = false;
            prev = gap;
            csv.rows.push_back({std::to_string(a), std::to_string(b),
                                format_sig12(c.value("lambda")), format_sig12(gap),
                                format_sig12(c.value("kernel_l2")),
                                std::to_string(int(c.value("grid_half_width")))});
        }
        char name[64];
        std::snprintf(name, sizeof name, "monotone(%d,%d)", a, b);
        out.report.cases.push_back(make_case(
            name, monotone, {{"gap_ratio_last_to_first", first > 0 ? last / first : 0.0}}));
    }
    out.tables.push_back(std::move(csv));
    return out;
}

double sn_target(const RealMatrix& X) {
    double acc = 0.0;
    for (int n = 0; n < X.rows; ++n) {
        double r2 = 0.0;
        for (int m = 0; m < X.cols; ++m) r2 += X.at(n, m) * X.at(n, m);
        acc += std::tanh(r2);
    }
    return acc;
}

ExperimentOutput run_sn_fit(const ExperimentConfig& cfg, int jobs) {
    const int t2 = 24;
    std::vector<std::function<CaseResult()>> tasks;
    for (int seed_i = 0; seed_i < cfg.seeds; ++seed_i)
        for (int width : cfg.widths) {
            tasks.push_back([&cfg, seed_i, width] {
                Rng data_rng(cfg.seed * 10000 + 9000 + static_cast<std::uint64_t>(seed_i));
                std::vector<RealMatrix> Xs;
                std::vector<double> ys;
                for (int i = 0; i < cfg.train + cfg.test; ++i) {
                    RealMatrix X(cfg.n, cfg.m);
                    for (double& v : X.data) v = data_rng.pm1();
                    ys.push_back(sn_target(X));
                    Xs.push_back(std::move(X));
                }
                double mean = 0.0;
                for (double y : ys) mean += y;
                mean /= static_cast<double>(ys.size());
                double var = 0.0;
                for (double y : ys) var += (y - mean) * (y - mean);
                double target_std = std::sqrt(var / static_cast<double>(ys.size()));

                Rng wrng(cfg.seed * 10000 + 100 + static_cast<std::uint64_t>(seed_i));
                SymNetWeights w = SymNetWeights::random(width, t2, cfg.m, wrng);
                RealMatrix design(cfg.train, width);
                std::vector<double> t(static_cast<std::size_t>(cfg.train));
                for (int i = 0; i < cfg.train; ++i) {
                    std::vector<double> feat =
                        symmetric_net_features(w, Xs[static_cast<std::size_t>(i)]);
                    for (int j = 0; j < width; ++j)
                        design.at(i, j) = feat[static_cast<std::size_t>(j)];
                    t[static_cast<std::size_t>(i)] = ys[static_cast<std::size_t>(i)];
                }
                w.c = fit_ridge(design, t, 1e-8);
                auto rmse_on = [&](int lo, int hi) {
                    double sse = 0.0;
                    for (int i = lo; i < hi; ++i) {
                        double r = symmetric_net_eval(w, Xs[static_cast<std::size_t>(i)]) -
                                   ys[static_cast<std::size_t>(i)];
                        sse += r * r;
                    }
                    return std::sqrt(sse / (hi - lo));
                };
                char name[48];
                std::snprintf(name, sizeof name, "fit(seed=%d,width=%d)", seed_i, width);
                return make_case(name, true,
                                 {{"seed", double(seed_i)},
                                  {"width", double(width)},
                                  {"train_rmse", rmse_on(0, cfg.train)},
                                  {"test_rmse", rmse_on(cfg.train, cfg.train + cfg.test)},
                                  {"target_std", target_std}});
            });
        }
    // invariance checks
    tasks.push_back([&cfg] {
        Rng rng(cfg.seed * 10000 + 55);
        SymNetWeights w = SymNetWeights::random(6, 5, 3, rng);
        for (double& v : w.c) v = rng.pm1();
        RealMatrix X(4, 3);
        for (double& v : X.data) v = rng.pm1();
        double base = symmetric_net_eval(w, X);
        double dev = 0.0;
        std::vector<int> perm = {0, 1, 2, 3};
        do {
            RealMatrix P(4, 3);
            for (int n = 0; n < 4; ++n)
                for (int m = 0; m < 3; ++m) P.at(n, m) = X.at(perm[static_cast<std::size_t>(n)], m);
            dev = std::max(dev, std::abs(symmetric_net_eval(w, P) - base));
        } while (std::next_permutation(perm.begin(), perm.end()));
        return make_case("perm_exhaustive_n4", dev == 0.0, {{"max_dev", dev}});
    });
    tasks.push_back([&cfg] {
        Rng rng(cfg.seed * 10000 + 56);
        SymNetWeights w = SymNetWeights::random(4, 4, 2, rng);
        for (double& v : w.c) v = rng.pm1();
        RealMatrix X(12, 2);
        for (double& v : X.data) v = rng.pm1();
        double base = symmetric_net_eval(w, X);
        double dev = 0.0;
        std::vector<int> perm(12);
        std::iota(perm.begin(), perm.end(), 0);
        for (int trial = 0; trial < 200; ++trial) {
            for (int i = 11; i > 0; --i)
                std::swap(perm[static_cast<std::size_t>(i)],
                          perm[static_cast<std::size_t>(rng.uniform_int(0, i))]);
            RealMatrix P(12, 2);
            for (int n = 0; n < 12; ++n)
                for (int m = 0; m < 2; ++m) P.at(n, m) = X.at(perm[static_cast<std::size_t>(n)], m);
            dev = std::max(dev, std::abs(symmetric_net_eval(w, P) - base));
        }
        return make_case("perm_random_n12", dev <= cfg.tolerance, {{"max_dev", dev}});
    });

    ExperimentOutput out;
    out.report.config = cfg;
    out.report.cases = run_cases(tasks, jobs);

    CsvTable csv;
    csv.name = "sn_fit.csv";
    csv.header = {"seed", "width", "train_rmse", "test_rmse"};
    std::map<int, std::vector<double>> by_width;
    double target_std = 0.0;
    for (const CaseResult& c : out.report.cases) {
        if (c.name.rfind("fit(", 0) != 0) continue;
        csv.rows.push_back({std::to_string(int(c.value("seed"))),
                            std::to_string(int(c.value("width"))),
                            format_sig12(c.value("train_rmse")),
                            format_sig12(c.value("test_rmse"))});
        by_width[int(c.value("width"))].push_back(c.value("test_rmse"));
        target_std = c.value("target_std");
    }
    auto median = [](std::vector<double> v) {
        std::sort(v.begin(), v.end());
        return 0.5 * (v[(v.size() - 1) / 2] + v[v.size() / 2]);
    };
    double prev = std::numeric_limits<double>::infinity();
    double final_median = 0.0;
    bool monotone = true;
    for (int width : cfg.widths) {
        double med = median(by_width[width]);
        if (med > prev) monotone = false;
        prev = med;
        final_median = med;
        char name[48];
        std::snprintf(name, sizeof name, "median(width=%d)", width);
        out.report.cases.push_back(make_case(name, true, {{"median_test_rmse", med}}));
    }
    out.report.cases.push_back(make_case("median_monotone", monotone, {}));
    out.report.cases.push_back(make_case("final_rmse_below_tenth_std",
                                         final_median < 0.1 * target_std,
                                         {{"final_median", final_median},
                                          {"target_std", target_std}}));
    out.tables.push_back(std::move(csv));
    return out;
}

ExperimentOutput run_basic_equivariance(const ExperimentConfig& cfg, int jobs) {
    std::vector<std::function<CaseResult()>> tasks;
    for (int trial = 0; trial < cfg.trials; ++trial) {
        tasks.push_back([&cfg, trial] {
            Rng rng(cfg.seed * 10000 + 7919 * static_cast<std::uint64_t>(trial));
            int l_rf = rng.uniform_int(1, 2);
            int depth = rng.uniform_int(2, 3);
            std::vector<int> dims(static_cast<std::size_t>(depth) + 1, 0);
            for (int& d : dims) d = rng.uniform_int(1, 3);
            BasicConvNetSpec spec = BasicConvNetSpec::random(1.0, 4.0, l_rf, depth, dims, rng);
            Signal in =
                random_signal(GridSpec{1.0, spec.in_half_width()}, dims[0], Field::Real, rng);
            int kx = rng.uniform_int(-2, 2);
            int ky = rng.uniform_int(-2, 2);
            int M = spec.out_half_width() - std::max(std::abs(kx), std::abs(ky));
            Signal lhs = crop(basic_forward(spec, translate(in, kx, ky)), M);
            Signal rhs = crop(translate(basic_forward(spec, in), kx, ky), M);
            double dev = max_abs_diff(lhs, rhs);
            char name[48];
            std::snprintf(name, sizeof name, "shift_trial(%d)", trial);
            return make_case(name, dev <= cfg.tolerance,
                             {{"trial", double(trial)},
                              {"kx", double(kx)},
                              {"ky", double(ky)},
                              {"max_dev", dev}});
        });
    }
    ExperimentOutput out;
    out.report.config = cfg;
    out.report.cases = run_cases(tasks, jobs);
    CsvTable csv;
    csv.name = "basic_equivariance.csv";
    csv.header = {"trial", "kx", "ky", "max_dev"};
    for (const CaseResult& c : out.report.cases)
        csv.rows.push_back({std::to_string(int(c.value("trial"))),
                            std::to_string(int(c.value("kx"))),
                            std::to_string(int(c.value("ky"))),
                            format_sig12(c.value("max_dev"))});
    out.tables.push_back(std::move(csv));
    return out;
}

ExperimentOutput run_downsample(const ExperimentConfig& cfg, int jobs) {
    (void)jobs;
    ExperimentOutput out;
    out.report.config = cfg;

    CsvTable csv;
    csv.name = "downsample_probe.csv";
    csv.header = {"trial", "dev"};
    Rng rng(cfg.seed * 10000 + 31);
    double max_dev = 0.0;
    int found = -1;
    for (int trial = 0; trial < cfg.trials; ++trial) {
        DownsampledConvNetSpec spec =
            DownsampledConvNetSpec::random(1.0, 1, 2, 3, {1, 4, 4, 1}, rng);
        Signal in = random_signal(GridSpec{1.0, spec.in_half_width()}, 1, Field::Real, rng);
        double base = downsampled_forward(spec, in)[0];
        double shifted = downsampled_forward(spec, translate(in, 1, 0))[0];
        double dev = std::abs(base - shifted);
        csv.rows.push_back({std::to_string(trial), format_sig12(dev)});
        if (dev > max_dev) max_dev = dev;
        if (found < 0 && dev > cfg.threshold) found = trial;
    }
    out.report.cases.push_back(make_case("violation_search", found >= 0,
                                         {{"max_dev", max_dev}, {"found_trial", double(found)},
                                          {"shift_x", 1.0}, {"shift_y", 0.0}}));
    bool rejected = false;
    try {
        Rng r2(1);
        (void)DownsampledConvNetSpec::random(1.0, 1, 4, 2, {1, 2, 1}, r2);
    } catch (const std::invalid_argument&) {
        rejected = true;
    }
    out.report.cases.push_back(make_case("stride_rejection", rejected, {}));
    out.tables.push_back(std::move(csv));
    return out;
}

ExperimentOutput run_charge_rotation(const ExperimentConfig& cfg, int jobs) {
    std::vector<std::function<CaseResult()>> tasks;
    for (int trial = 0; trial < cfg.trials; ++trial) {
        tasks.push_back([&cfg, trial] {
            Rng rng(cfg.seed * 10000 + 17 * static_cast<std::uint64_t>(trial) + 3);
            ChargeConvNetSpec spec = ChargeConvNetSpec::random(1.0, 2.0, 2, 3, 3, 1, rng);
            ChargedStack st = random_mult_stack(spec, GridSpec{1.0, 2}, rng);
            double phi = rng.uniform(0.0, 2.0 * kPi);
            double dev = phase_equivariance_check(spec, st, phi);
            char name[48];
            std::snprintf(name, sizeof name, "phase_trial(%d)", trial);
            return make_case(name, dev <= cfg.tolerance, {{"deviation", dev}, {"phi", phi}});
        });
    }
    for (int s = 0; s < cfg.specs; ++s) {
        tasks.push_back([&cfg, s] {
            Rng rng(cfg.seed * 10000 + 29 * static_cast<std::uint64_t>(s) + 7);
            ChargeConvNetSpec spec = ChargeConvNetSpec::random(1.0, 2.0, 2, 2, 3, 2, rng);
            Signal in =
                random_signal(GridSpec{1.0, spec.in_half_width()}, 1, Field::Real, rng);
            Signal base = forward_signal(spec, in);
            double dev = 0.0;
            for (int q = 1; q <= 3; ++q) {
                Signal rot = forward_signal(spec, rotate_quarter(in, q));
                for (int c = 0; c < spec.d_u; ++c)
                    dev = std::max(dev, std::abs(rot.at(0, 0, c) - base.at(0, 0, c)));
            }
            char name[48];
            std::snprintf(name, sizeof name, "origin_invariance(%d)", s);
            return make_case(name, dev <= cfg.tolerance, {{"deviation", dev}});
        });
    }
    tasks.push_back([&cfg] {
        Rng rng(cfg.seed * 10000 + 41);
        Signal in = random_signal(GridSpec{0.5, 6}, 1, Field::Complex, rng);
        double dev = 0.0;
        for (int q = 1; q <= 3; ++q) {
            ChargedStack a = diff_stage(rotate_quarter(in, q), 2);
            ChargedStack b = diff_stage(in, 2);
            for (const auto& [label, sig] : a.entries) {
                int k = (((-label.second * q) % 4) + 4) % 4;
                Complex ph = k == 0   ? Complex{1.0, 0.0}
                             : k == 1 ? Complex{0.0, 1.0}
                             : k == 2 ? Complex{-1.0, 0.0}
                                      : Complex{0.0, -1.0};
                Signal rb = rotate_quarter(b.at(label.first, label.second), q);
                Signal want = Signal::build(sig.grid(), 1, Field::Complex,
                                            [&](int kx, int ky, int c) {
                                                return ph * rb.at(kx, ky, c);
                                            });
                dev = std::max(dev, max_abs_diff(sig, want));
            }
        }
        return make_case("diff_quarter_turn_covariance", dev <= cfg.tolerance,
                         {{"deviation", dev}});
    });
    tasks.push_back([] {
        bool rejected = false;
        try {
            MultWeights w(2, 1, {1, 1, 1, 1, 1}, false);
            w.set_w2(1, 1, 0, 0, 0, 0, Complex{1.0, 0.0});
        } catch (const std::invalid_argument&) {
            rejected = true;
        }
        return make_case("w2_constraint_rejection", rejected, {});
    });

    ExperimentOutput out;
    out.report.config = cfg;
    out.report.cases = run_cases(tasks, jobs);
    CsvTable csv;
    csv.name = "charge_rotation.csv";
    csv.header = {"case", "deviation"};
    for (const CaseResult& c : out.report.cases) {
        double dev = 0.0;
        for (const auto& [k, v] : c.values)
            if (k == "deviation") dev = v;
        csv.rows.push_back({c.name, format_sig12(dev)});
    }
    out.tables.push_back(std::move(csv));
    return out;
}

AnalyticField lambda_consistency_field() {
    PolyZZbar p;
    p.terms.push_back({0, 0, {1.0, 0.0}});
    p.terms.push_back({1, 0, {0.45, 0.0}});
    p.terms.push_back({0, 1, {0.45, 0.0}});
    p.terms.push_back({2, 0, {0.2, 0.0}});
    p.terms.push_back({0, 2, {0.2, 0.0}});
    p.terms.push_back({1, 1, {0.1, 0.0}});
    return AnalyticField::gaussian_poly(p);
}

ExperimentOutput run_lambda_consistency(const ExperimentConfig& cfg, int jobs) {
    Rng rng(cfg.seed * 10000 + 2027);
    ChargeConvNetSpec spec = ChargeConvNetSpec::random(0.5, 1.0, 2, 2, 4, 1, rng);
    AnalyticField f = lambda_consistency_field();
    AnalyticField f_rot = f.rotated(kPi / 7);
    const std::vector<std::pair<double, double>> pts = {
        {0.0, 0.0}, {0.5, 0.0}, {-0.5, 0.5}, {0.5, 0.5}, {0.0, -0.5}};
    std::vector<std::vector<double>> limit = scaling_limit_eval(spec, f, pts);

    std::vector<std::function<CaseResult()>> tasks;
    std::vector<std::string> goldens(cfg.lambdas.size());
    for (std::size_t li = 0; li < cfg.lambdas.size(); ++li) {
        double lam = cfg.lambdas[li];
        std::string* golden = &goldens[li];
        tasks.push_back([&spec, &f, &f_rot, &pts, &limit, lam, golden] {
            ChargeConvNetSpec s = spec.with_lambda(lam);
            Signal out_f = forward(s, f);
            Signal out_rot = forward(s, f_rot);
            *golden = signal_to_json(out_f);
            double rot_dev = std::abs(out_rot.at(0, 0, 0) - out_f.at(0, 0, 0));
            double lim_dev = 0.0;
            for (std::size_t i = 0; i < pts.size(); ++i) {
                int kx = static_cast<int>(std::lround(pts[i].first / lam));
                int ky = static_cast<int>(std::lround(pts[i].second / lam));
                lim_dev = std::max(lim_dev,
                                   std::abs(out_f.at(kx, ky, 0).real() - limit[i][0]));
            }
            char name[48];
            std::snprintf(name, sizeof name, "lambda(%g)", lam);
            return make_case(name, true,
                             {{"lambda", lam},
                              {"rot_discrepancy", rot_dev},
                              {"forward_vs_limit", lim_dev}});
        });
    }
    ExperimentOutput out;
    out.report.config = cfg;
    out.report.cases = run_cases(tasks, jobs);
    // forward outputs as golden Signal JSON files, one per lambda
    for (std::size_t li = 0; li < cfg.lambdas.size(); ++li) {
        char fname[48];
        std::snprintf(fname, sizeof fname, "forward_lambda_%g.json", cfg.lambdas[li]);
        out.artifacts.emplace_back(fname, goldens[li]);
    }

    CsvTable csv;
    csv.name = "lambda_consistency.csv";
    csv.header = {"lambda", "rot_discrepancy", "forward_vs_limit"};
    bool lim_monotone = true;
    double prev = std::numeric_limits<double>::infinity();
    for (const CaseResult& c : out.report.cases) {
        csv.rows.push_back({format_sig12(c.value("lambda")),
                            format_sig12(c.value("rot_discrepancy")),
                            format_sig12(c.value("forward_vs_limit"))});
        if (!(c.value("forward_vs_limit") < prev)) lim_monotone = false;
        prev = c.value("forward_vs_limit");
    }
    std::size_t n = out.report.cases.size();
    double ratio = out.report.cases[n - 2].value("rot_discrepancy") /
                   out.report.cases[n - 1].value("rot_discrepancy");
    out.report.cases.push_back(make_case("rotation_ratio", ratio >= cfg.ratio_min,
                                         {{"ratio", ratio}, {"ratio_min", cfg.ratio_min}}));
    out.report.cases.push_back(make_case("limit_monotone", lim_monotone, {}));
    out.tables.push_back(std::move(csv));
    return out;
}

ExperimentOutput run_invariant_poly_fit(const ExperimentConfig& cfg, int jobs) {
    (void)jobs;
    Rng rng(cfg.seed * 10000 + 4099);
    auto target = [](double x1, double x2) {
        return std::tanh(x1 * x1 + 0.5 * x2 * x2 + 0.7 * x1 * x2);
    };
    std::vector<std::array<double, 2>> train, test;
    for (int i = 0; i < cfg.samples; ++i) train.push_back({rng.pm1(), rng.pm1()});
    for (int i = 0; i < 400; ++i) test.push_back({rng.pm1(), rng.pm1()});

    // model A: polynomial-invariant ansatz on f1=x1^2, f2=x2^2, f3=x1 x2
    PolyFeatureSet fs = PolyFeatureSet::builtin_z2(2);
    fs.equivariants = {PolyMap::constant_one(2)};
    PolyAnsatzWeights wt = PolyAnsatzWeights::random(1, cfg.width, 3, rng);
    // model B: group-averaged shallow net over Z2
    OrthogonalRep z2 = OrthogonalRep::sign_flip(2);
    ShallowNet net = ShallowNet::random(cfg.width, 2, rng);

    RealMatrix design_a(cfg.samples, cfg.width);
    RealMatrix design_b(cfg.samples, cfg.width);
    std::vector<double> ys(static_cast<std::size_t>(cfg.samples));
    for (int i = 0; i < cfg.samples; ++i) {
        std::vector<double> x = {train[static_cast<std::size_t>(i)][0],
                                 train[static_cast<std::size_t>(i)][1]};
        ys[static_cast<std::size_t>(i)] = target(x[0], x[1]);
        std::vector<double> fa = poly_invariant_features(fs, wt, x);
        std::vector<double> fb = symmetrize_features(z2, net, x);
        for (int j = 0; j < cfg.width; ++j) {
            design_a.at(i, j) = fa[static_cast<std::size_t>(j)];
            design_b.at(i, j) = fb[static_cast<std::size_t>(j)];
        }
    }
    wt.c[0] = fit_ridge(design_a, ys, cfg.reg);
    net.c = fit_ridge(design_b, ys, cfg.reg);

    auto eval_a = [&](double x1, double x2) {
        return poly_ansatz_eval(fs, wt, std::vector<double>{x1, x2})[0];
    };
    auto eval_b = [&](double x1, double x2) {
        return symmetrize_eval_invariant(z2, net, std::vector<double>{x1, x2});
    };
    double sse_a = 0.0, sse_b = 0.0;
    for (const auto& p : test) {
        double t = target(p[0], p[1]);
        sse_a += (eval_a(p[0], p[1]) - t) * (eval_a(p[0], p[1]) - t);
        sse_b += (eval_b(p[0], p[1]) - t) * (eval_b(p[0], p[1]) - t);
    }
    double rmse_a = std::sqrt(sse_a / static_cast<double>(test.size()));
    double rmse_b = std::sqrt(sse_b / static_cast<double>(test.size()));

    // argmax over a 41x41 grid on [-1,1]^2, first-in-scan tie policy
    int best_a = -1, best_b = -1;
    double max_a = -std::numeric_limits<double>::infinity();
    double max_b = max_a;
    for (int i = 0; i <= 40; ++i)
        for (int j = 0; j <= 40; ++j) {
            double x1 = -1.0 + i * 0.05;
            double x2 = -1.0 + j * 0.05;
            double va = eval_a(x1, x2);
            double vb = eval_b(x1, x2);
            if (va > max_a) {
                max_a = va;
                best_a = i * 41 + j;
            }
            if (vb > max_b) {
                max_b = vb;
                best_b = i * 41 + j;
            }
        }

    ExperimentOutput out;
    out.report.config = cfg;
    out.report.cases.push_back(make_case("poly_ansatz_rmse", rmse_a < cfg.rmse_max,
                                         {{"rmse", rmse_a}, {"rmse_max", cfg.rmse_max}}));
    out.report.cases.push_back(make_case("group_avg_rmse", rmse_b < cfg.rmse_max,
                                         {{"rmse", rmse_b}, {"rmse_max", cfg.rmse_max}}));
    out.report.cases.push_back(make_case("argmax_match", best_a == best_b,
                                         {{"argmax_poly", double(best_a)},
                                          {"argmax_avg", double(best_b)}}));
    CsvTable csv;
    csv.name = "invariant_fit.csv";
    csv.header = {"model", "rmse", "argmax_x", "argmax_y"};
    csv.rows.push_back({"poly_ansatz", format_sig12(rmse_a),
                        format_sig12(-1.0 + (best_a / 41) * 0.05),
                        format_sig12(-1.0 + (best_a % 41) * 0.05)});
    csv.rows.push_back({"group_averaged", format_sig12(rmse_b),
                        format_sig12(-1.0 + (best_b / 41) * 0.05),
                        format_sig12(-1.0 + (best_b % 41) * 0.05)});
    out.tables.push_back(std::move(csv));
    return out;
}

} // namespace

// ---------------------------------------------------------------------------

double CaseResult::value(const std::string& key) const {
    for (const auto& [k, v] : values)
        if (k == key) return v;
    throw std::out_of_range("CaseResult: no value named " + key);
}

bool Report::verdict() const {
    for (const CaseResult& c : cases)
        if (!c.pass) return false;
    return true;
}

std::string format_sig12(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.12g", v);
    return buf;
}

std::string CsvTable::str() const {
    std::string out;
    for (std::size_t i = 0; i < header.size(); ++i) {
        if (i) out += ',';
        out += header[i];
    }
    out += '\n';
    for (const auto& row : rows) {
        for (std::size_t i = 0; i < row.size(); ++i) {
            if (i) out += ',';
            out += row[i];
        }
        out += '\n';
    }
    return out;
}

ExperimentConfig ExperimentConfig::from_json_text(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::parse_error& e) {
        throw std::invalid_argument(std::string("config: invalid JSON: ") + e.what());
    }
    ExperimentConfig cfg;
    if (!j.contains("kind")) throw std::invalid_argument("config: missing required key 'kind'");
    cfg.kind = j.at("kind").get<std::string>();
    if (!kind_keys().count(cfg.kind))
        throw std::invalid_argument("config: unknown kind '" + cfg.kind + "'");

    const std::vector<std::string>& allowed = kind_keys().at(cfg.kind);
    std::vector<std::string> unknown;
    for (const auto& [key, value] : j.items()) {
        (void)value;
        if (key == "kind" || key == "seed" || key == "out") continue;
        if (std::find(allowed.begin(), allowed.end(), key) == allowed.end())
            unknown.push_back(key);
    }
    if (!unknown.empty()) {
        std::string msg = "config: unknown keys for kind '" + cfg.kind + "':";
        for (const std::string& k : unknown) msg += " '" + k + "'";
        throw std::invalid_argument(msg);
    }

    cfg.seed = j.value("seed", 1);
    cfg.out_dir = j.value("out", std::string{});
    if (j.contains("ab")) {
        cfg.ab.clear();
        for (const json& e : j.at("ab")) cfg.ab.emplace_back(e.at(0).get<int>(), e.at(1).get<int>());
    }
    if (j.contains("lambdas")) cfg.lambdas = j.at("lambdas").get<std::vector<double>>();
    cfg.n = j.value("n", cfg.n);
    cfg.m = j.value("m", cfg.m);
    if (j.contains("widths")) cfg.widths = j.at("widths").get<std::vector<int>>();
    cfg.seeds = j.value("seeds", cfg.seeds);
    cfg.train = j.value("train", cfg.train);
    cfg.test = j.value("test", cfg.test);
    cfg.tolerance = j.value("tolerance", cfg.tolerance);
    cfg.threshold = j.value("threshold", cfg.threshold);
    cfg.ratio_min = j.value("ratio_min", cfg.ratio_min);
    cfg.trials = j.value("trials", cfg.trials);
    cfg.specs = j.value("specs", cfg.specs);
    cfg.samples = j.value("samples", cfg.samples);
    cfg.width = j.value("width", cfg.width);
    cfg.reg = j.value("reg", cfg.reg);
    cfg.rmse_max = j.value("rmse_max", cfg.rmse_max);

    apply_kind_defaults(cfg);
    validate_config(cfg);
    return cfg;
}

ExperimentConfig ExperimentConfig::from_file(const std::string& path) {
    std::ifstream in(path);
    if (!in)
        throw std::invalid_argument("config: cannot open file '" + path + "'");
    std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    return from_json_text(text);
}

std::string ExperimentConfig::to_json() const {
    json j;
    j["kind"] = kind;
    j["seed"] = seed;
    if (!out_dir.empty()) j["out"] = out_dir;
    for (const std::string& key : kind_keys().at(kind)) {
        if (key == "ab") {
            json arr = json::array();
            for (const auto& [a, b] : ab) arr.push_back(json::array({a, b}));
            j["ab"] = std::move(arr);
        } else if (key == "lambdas")
            j["lambdas"] = lambdas;
        else if (key == "n")
            j["n"] = n;
        else if (key == "m")
            j["m"] = m;
        else if (key == "widths")
            j["widths"] = widths;
        else if (key == "seeds")
            j["seeds"] = seeds;
        else if (key == "train")
            j["train"] = train;
        else if (key == "test")
            j["test"] = test;
        else if (key == "tolerance")
            j["tolerance"] = tolerance;
        else if (key == "threshold")
            j["threshold"] = threshold;
        else if (key == "ratio_min")
            j["ratio_min"] = ratio_min;
        else if (key == "trials")
            j["trials"] = trials;
        else if (key == "specs")
            j["specs"] = specs;
        else if (key == "samples")
            j["samples"] = samples;
        else if (key == "width")
            j["width"] = width;
        else if (key == "reg")
            j["reg"] = reg;
        else if (key == "rmse_max")
            j["rmse_max"] = rmse_max;
    }
    return j.dump();
}

std::string Report::to_json(bool include_timing) const {
    json j;
    j["config"] = json::parse(config.to_json());
    json cs = json::array();
    for (const CaseResult& c : cases) {
        json cj;
        cj["name"] = c.name;
        cj["pass"] = c.pass;
        json vals = json::object();
        for (const auto& [k, v] : c.values) vals[k] = v;
        cj["values"] = std::move(vals);
        if (!c.note.empty()) cj["note"] = c.note;
        if (include_timing) cj["wall_clock_ms"] = c.wall_ms;
        cs.push_back(std::move(cj));
    }
    j["cases"] = std::move(cs);
    j["verdict"] = verdict() ? "pass" : "fail";
    return j.dump(2);
}

std::vector<std::string> experiment_kinds() {
    std::vector<std::string> out;
    for (const auto& [k, v] : kind_keys()) {
        (void)v;
        out.push_back(k);
    }
    return out;
}

std::string experiment_description(const std::string& kind) {
    static const std::map<std::string, std::string> desc = {
        {"clt_sweep",
         "kernel_gap(a,b,lambda) sweep; passes when gaps decrease strictly as lambda shrinks"},
        {"sn_invariance_fit",
         "permutation invariance of the symmetric net plus random-feature ridge fits over widths"},
        {"basic_equivariance",
         "exact shift equivariance of basic convnets on overlap windows, random triples"},
        {"downsample_nonequivariance",
         "exhibits a shift that breaks equivariance under striding and checks stride rejection"},
        {"charge_rotation",
         "phase equivariance of mult layers, quarter-turn origin invariance, diff covariance"},
        {"lambda_consistency",
         "rotated-input discrepancy ratio and forward-vs-scaling-limit decay over lambdas"},
        {"invariant_poly_fit",
         "fits the polynomial-invariant ansatz and the group-averaged net to an even target"},
    };
    auto it = desc.find(kind);
    return it == desc.end() ? std::string{} : it->second;
}

ExperimentOutput run_experiment(const ExperimentConfig& cfg, int jobs) {
    validate_config(cfg);
    if (cfg.kind == "clt_sweep") return run_clt(cfg, jobs);
    if (cfg.kind == "sn_invariance_fit") return run_sn_fit(cfg, jobs);
    if (cfg.kind == "basic_equivariance") return run_basic_equivariance(cfg, jobs);
    if (cfg.kind == "downsample_nonequivariance") return run_downsample(cfg, jobs);
    if (cfg.kind == "charge_rotation") return run_charge_rotation(cfg, jobs);
    if (cfg.kind == "lambda_consistency") return run_lambda_consistency(cfg, jobs);
    if (cfg.kind == "invariant_poly_fit") return run_invariant_poly_fit(cfg, jobs);
    throw std::invalid_argument("run_experiment: unknown kind " + cfg.kind);
}

bool run_and_write(const ExperimentConfig& cfg, const std::string& out_dir, int jobs) {
    ExperimentOutput out = run_experiment(cfg, jobs);
    std::filesystem::create_directories(out_dir);
    {
        std::ofstream f(out_dir + "/report.json");
        f << out.report.to_json(true) << '\n';
    }
    for (const CsvTable& t : out.tables) {
        std::ofstream f(out_dir + "/" + t.name);
        f << t.str();
    }
    for (const auto& [name, content] : out.artifacts) {
        std::ofstream f(out_dir + "/" + name);
        f << content;
    }
    return out.report.verdict();
}

} // namespace equinet
