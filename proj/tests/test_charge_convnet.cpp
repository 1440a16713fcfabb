#include "doctest.h"

#include <cmath>
#include <numbers>

#include "equinet/charge_convnet.hpp"
#include "equinet/local_ops.hpp"

using namespace equinet;

namespace {

constexpr double kPi = std::numbers::pi;

Complex unit_phase(int quarter_turns) {
    switch (((quarter_turns % 4) + 4) % 4) {
    case 0: return {1.0, 0.0};
    case 1: return {0.0, 1.0};
    case 2: return {-1.0, 0.0};
    default: return {0.0, -1.0};
    }
}

Signal constant_signal(GridSpec g, Complex v) {
    return Signal::build(g, 1, Field::Complex, [&](int, int, int) { return v; });
}

} // namespace

TEST_CASE("diff_stage on constants") {
    Signal c = constant_signal(GridSpec{1.0, 4}, {2.0, 0.0});
    ChargedStack d = diff_stage(c, 1);
    CHECK(d.at(0, 0).half_width() == 3);
    CHECK(std::abs(d.at(0, 0).at(1, -2, 0) - Complex{2.0, 0.0}) < 1e-15);
    CHECK(linf_norm(d.at(1, 1)) < 1e-15);
    CHECK(linf_norm(d.at(1, -1)) < 1e-15);
}

TEST_CASE("diff_stage composition carries the multinomial coefficient") {
    Rng rng(3);
    Signal s0 = random_signal(GridSpec{0.5, 6}, 1, Field::Complex, rng);
    ChargedStack d = diff_stage(s0, 2);
    // direct stencil-composition oracle for the (2, 0) entry
    Signal oracle = stencil_apply(StencilKind::Dzbar, stencil_apply(StencilKind::Dz, s0));
    Signal want = Signal::build(oracle.grid(), 1, Field::Complex, [&](int kx, int ky, int ch) {
        return 2.0 * oracle.at(kx, ky, ch);
    });
    CHECK(max_abs_diff(d.at(2, 0), want) < 1e-12);
    // coefficients: (2, 2) has 2!/2! = 1, (1, 1) has 2!/1! = 2
    Signal dz = crop(stencil_apply(StencilKind::Dz, s0), 4);
    Signal two_dz = Signal::build(dz.grid(), 1, Field::Complex, [&](int kx, int ky, int ch) {
        return 2.0 * dz.at(kx, ky, ch);
    });
    CHECK(max_abs_diff(d.at(1, 1), two_dz) < 1e-13);
}

TEST_CASE("diff_stage materializes parity-forbidden labels as zeros") {
    Rng rng(5);
    Signal s0 = random_signal(GridSpec{1.0, 5}, 1, Field::Complex, rng);
    ChargedStack d = diff_stage(s0, 2);
    CHECK(d.entries.count({1, 0}) == 1);
    CHECK(linf_norm(d.at(1, 0)) == 0.0);
    CHECK(d.entries.count({2, 1}) == 1);
    CHECK(linf_norm(d.at(2, 1)) == 0.0);
    // charge-parity: labels with |mu| > s do not exist
    CHECK(d.entries.count({1, 2}) == 0);
}

TEST_CASE("mult_layer arithmetic") {
    GridSpec g{1.0, 0};
    SUBCASE("zero weights give the zero stack") {
        MultWeights w(1, 2, {1, 1, 1}, false);
        ChargedStack st;
        st.stage = StackStage::Mult;
        for (int mu = -1; mu <= 1; ++mu)
            st.entries.emplace(std::make_pair(mu, 0), constant_signal(g, {1.0, 2.0}));
        ChargedStack out = mult_layer(st, w);
        for (const auto& [label, sig] : out.entries) CHECK(linf_norm(sig) == 0.0);
    }
    SUBCASE("charge-conserving product (1) x (-1) -> 0 gives i * (-i) = 1") {
        MultWeights w(1, 1, {1, 1, 1}, false);
        w.set_w2(1, -1, 0, 0, 0, 0, Complex{1.0, 0.0});
        ChargedStack st;
        st.stage = StackStage::Mult;
        st.entries.emplace(std::make_pair(-1, 0), constant_signal(g, {0.0, -1.0}));
        st.entries.emplace(std::make_pair(0, 0), constant_signal(g, {0.0, 0.0}));
        st.entries.emplace(std::make_pair(1, 0), constant_signal(g, {0.0, 1.0}));
        ChargedStack out = mult_layer(st, w);
        CHECK(out.at(0, 0).at(0, 0, 0) == Complex{1.0, 0.0});
        CHECK(linf_norm(out.at(1, 0)) == 0.0);
    }
    SUBCASE("w0 injects a constant into mu = 0") {
        MultWeights w(1, 2, {1, 1, 1}, false);
        w.set_w0(1, Complex{3.0, 0.0});
        ChargedStack st;
        st.stage = StackStage::Mult;
        for (int mu = -1; mu <= 1; ++mu)
            st.entries.emplace(std::make_pair(mu, 0), constant_signal(g, {0.5, -0.25}));
        ChargedStack out = mult_layer(st, w);
        CHECK(out.at(0, 1).at(0, 0, 0) == Complex{3.0, 0.0});
        CHECK(linf_norm(out.at(0, 0)) == 0.0);
        CHECK(linf_norm(out.at(-1, 1)) == 0.0);
    }
    SUBCASE("charge out of range is rejected") {
        MultWeights w(1, 1, {1, 1, 1}, false);
        ChargedStack st;
        st.stage = StackStage::Mult;
        st.entries.emplace(std::make_pair(2, 0), constant_signal(g, {1.0, 0.0}));
        CHECK_THROWS_AS((void)mult_layer(st, w), std::invalid_argument);
    }
}

TEST_CASE("w2 charge conservation is enforced at construction") {
    MultWeights w(2, 3, {1, 2, 3, 2, 1}, false);
    CHECK_THROWS_WITH_AS(w.set_w2(1, 1, 0, 0, 0, 0, Complex{1.0, 0.0}),
                         doctest::Contains("charge conservation"), std::invalid_argument);
    CHECK_THROWS_AS(w.set_w2(2, 1, 0, 0, 0, Complex{1.0, 0.0}), std::invalid_argument);
    CHECK_NOTHROW(w.set_w2(1, 1, 2, 0, 1, 1, Complex{1.0, 0.0}));
    // final layers only accept mu = 0 outputs
    MultWeights fin(2, 1, {1, 1, 1, 1, 1}, true);
    CHECK_THROWS_AS(fin.set_w1(1, 0, 0, Complex{1.0, 0.0}), std::invalid_argument);
    CHECK_NOTHROW(fin.set_w2(1, -1, 0, 0, 0, Complex{1.0, 0.0}));
}

TEST_CASE("forward") {
    SUBCASE("constant zero input produces the weight-induced constant") {
        Rng rng(11);
        ChargeConvNetSpec spec = ChargeConvNetSpec::random(1.0, 2.0, 2, 2, 3, 2, rng);
        Signal out = forward(spec, AnalyticField::constant({0.0, 0.0}));
        CHECK(out.half_width() == 2);
        CHECK(out.channels() == 2);
        CHECK(out.field() == Field::Real);
        for (int c = 0; c < 2; ++c) {
            Complex v0 = out.at(0, 0, c);
            for (int kx = -2; kx <= 2; ++kx)
                for (int ky = -2; ky <= 2; ++ky)
                    CHECK(std::abs(out.at(kx, ky, c) - v0) < 1e-12);
        }
    }
    SUBCASE("pass-through spec reduces to the smoothing chain") {
        ChargeConvNetSpec spec;
        spec.lambda = 1.0;
        spec.Lambda = 2.0;
        spec.t_diff = 2;
        spec.t_mult = 1;
        spec.d_mult = 1;
        spec.d_u = 1;
        MultWeights fin(2, 1, spec.diff_channel_layout(), true);
        fin.set_w1(0, 0, 0, Complex{1.0, 0.0}); // n1 = 0 is the (s=0, mu=0) slot
        spec.layers.push_back(fin);

        PolyZZbar p;
        p.terms.push_back({1, 0, {0.3, 0.0}});
        p.terms.push_back({0, 1, {0.3, 0.0}});
        p.terms.push_back({0, 0, {1.0, 0.0}});
        AnalyticField f = AnalyticField::gaussian_poly(p);
        Signal out = forward(spec, f);

        Signal in = discretize(f, 1.0, (spec.in_half_width() + 0.5) * 1.0);
        Signal want = crop(smooth_chain(as_complex(in)), spec.out_half_width());
        double dev = 0.0;
        for (int kx = -2; kx <= 2; ++kx)
            for (int ky = -2; ky <= 2; ++ky)
                dev = std::max(dev, std::abs(out.at(kx, ky, 0) - want.at(kx, ky, 0)));
        CHECK(dev < 1e-13);
    }
    SUBCASE("exact shift equivariance on overlap windows") {
        Rng rng(13);
        ChargeConvNetSpec spec = ChargeConvNetSpec::random(1.0, 3.0, 2, 2, 3, 1, rng);
        Signal in = random_signal(GridSpec{1.0, spec.in_half_width()}, 1, Field::Real, rng);
        Signal base = forward_signal(spec, in);
        for (auto [kx, ky] : {std::pair{1, 0}, std::pair{-1, 1}}) {
            Signal shifted = forward_signal(spec, translate(in, kx, ky));
            // |gamma - k| <= L_out keeps every receptive field clear of the
            // zero-fill band introduced by translate
            int M = spec.out_half_width() - std::max(std::abs(kx), std::abs(ky));
            Signal lhs = crop(shifted, M);
            Signal rhs = crop(translate(base, kx, ky), M);
            CHECK(max_abs_diff(lhs, rhs) <= 1e-12);
        }
    }
}

TEST_CASE("scaling limit") {
    SUBCASE("matches forward for the zero input") {
        Rng rng(17);
        ChargeConvNetSpec spec = ChargeConvNetSpec::random(0.5, 1.0, 1, 2, 2, 1, rng);
        AnalyticField zero = AnalyticField::constant({0.0, 0.0});
        Signal out = forward(spec, zero);
        auto limit = scaling_limit_eval(spec, zero, {{0.0, 0.0}, {0.25, -0.5}});
        CHECK(std::abs(out.at(0, 0, 0).real() - limit[0][0]) < 1e-12);
        CHECK(std::abs(limit[0][0] - limit[1][0]) < 1e-12);
    }
    SUBCASE("pass-through spec gives the Gaussian convolution closed form") {
        ChargeConvNetSpec spec;
        spec.lambda = 0.5;
        spec.Lambda = 1.0;
        spec.t_diff = 2;
        spec.t_mult = 1;
        spec.d_mult = 1;
        spec.d_u = 1;
        MultWeights fin(2, 1, spec.diff_channel_layout(), true);
        fin.set_w1(0, 0, 0, Complex{1.0, 0.0});
        spec.layers.push_back(fin);
        AnalyticField gauss = AnalyticField::gaussian_poly(PolyZZbar::one());
        auto limit = scaling_limit_eval(spec, gauss, {{0.0, 0.0}});
        CHECK(limit[0][0] == doctest::Approx(0.5).epsilon(1e-7));
    }
    SUBCASE("forward approaches the scaling limit as lambda shrinks") {
        Rng rng(19);
        ChargeConvNetSpec spec = ChargeConvNetSpec::random(0.5, 1.0, 2, 2, 2, 1, rng);
        PolyZZbar p;
        p.terms.push_back({0, 0, {1.0, 0.0}});
        p.terms.push_back({1, 0, {0.4, 0.1}});
        p.terms.push_back({0, 1, {0.4, -0.1}});
        AnalyticField f = AnalyticField::gaussian_poly(p);
        std::vector<std::pair<double, double>> pts = {{0.0, 0.0}, {0.5, -0.5}};
        auto limit = scaling_limit_eval(spec, f, pts);
        double prev = 1e100;
        for (double lam : {0.5, 0.25}) {
            ChargeConvNetSpec s = spec.with_lambda(lam);
            Signal out = forward(s, f);
            double dev = 0.0;
            for (std::size_t i = 0; i < pts.size(); ++i) {
                int kx = static_cast<int>(std::lround(pts[i].first / lam));
                int ky = static_cast<int>(std::lround(pts[i].second / lam));
                dev = std::max(dev, std::abs(out.at(kx, ky, 0).real() - limit[i][0]));
            }
            CHECK(dev < prev);
            prev = dev;
        }
    }
}

TEST_CASE("phase equivariance of multiplication layers") {
    Rng rng(23);
    ChargeConvNetSpec spec = ChargeConvNetSpec::random(1.0, 2.0, 2, 3, 3, 1, rng);
    GridSpec g{1.0, 2};
    SUBCASE("phi = 0 gives exactly zero deviation") {
        ChargedStack st = random_mult_stack(spec, g, rng);
        CHECK(phase_equivariance_check(spec, st, 0.0) == 0.0);
    }
    SUBCASE("phi = pi with only even charges populated cancels exactly") {
        ChargedStack st = random_mult_stack(spec, g, rng);
        for (auto& [label, sig] : st.entries)
            if (label.first % 2 != 0) sig = Signal(g, 1, Field::Complex);
        CHECK(phase_equivariance_check(spec, st, kPi) == 0.0);
    }
    SUBCASE("random phases stay below 1e-10") {
        for (int trial = 0; trial < 25; ++trial) {
            ChargedStack st = random_mult_stack(spec, g, rng);
            double phi = rng.uniform(0.0, 2.0 * kPi);
            CHECK(phase_equivariance_check(spec, st, phi) <= 1e-10);
        }
    }
}

TEST_CASE("quarter-turn covariance of the diff stage") {
    Rng rng(29);
    Signal in = random_signal(GridSpec{0.5, 6}, 1, Field::Complex, rng);
    for (int q = 1; q <= 3; ++q) {
        ChargedStack a = diff_stage(rotate_quarter(in, q), 2);
        ChargedStack b = diff_stage(in, 2);
        for (const auto& [label, sig] : a.entries) {
            Complex ph = unit_phase(-label.second * q);
            Signal want = Signal::build(sig.grid(), 1, Field::Complex, [&](int kx, int ky, int c) {
                return ph * rotate_quarter(b.at(label.first, label.second), q).at(kx, ky, c);
            });
            CHECK(max_abs_diff(sig, want) <= 1e-10);
        }
    }
}

TEST_CASE("origin invariance of forward under quarter turns") {
    Rng rng(31);
    for (int trial = 0; trial < 5; ++trial) {
        ChargeConvNetSpec spec = ChargeConvNetSpec::random(1.0, 2.0, 2, 2, 3, 2, rng);
        Signal in = random_signal(GridSpec{1.0, spec.in_half_width()}, 1, Field::Real, rng);
        Signal base = forward_signal(spec, in);
        for (int q = 1; q <= 3; ++q) {
            Signal rot = forward_signal(spec, rotate_quarter(in, q));
            for (int c = 0; c < spec.d_u; ++c)
                CHECK(std::abs(rot.at(0, 0, c) - base.at(0, 0, c)) <= 1e-10);
        }
    }
}

TEST_CASE("multi-channel inputs flow through the charge reshape") {
    Rng rng(41);
    ChargeConvNetSpec spec = ChargeConvNetSpec::random(1.0, 2.0, 2, 2, 3, 2, rng, /*d_v=*/2);
    std::vector<int> layout = spec.diff_channel_layout();
    CHECK(layout[static_cast<std::size_t>(spec.t_diff)] == (spec.t_diff + 1) * 2); // mu = 0
    Signal in = random_signal(GridSpec{1.0, spec.in_half_width()}, 2, Field::Real, rng);
    Signal base = forward_signal(spec, in);
    CHECK(base.channels() == 2);
    for (int q = 1; q <= 3; ++q) {
        Signal rot = forward_signal(spec, rotate_quarter(in, q));
        for (int c = 0; c < spec.d_u; ++c)
            CHECK(std::abs(rot.at(0, 0, c) - base.at(0, 0, c)) <= 1e-10);
    }
    // the reshape's flat index n = (s - |mu|) d_v + channel
    Signal cur = smooth_chain(as_complex(in));
    ChargedStack diff = diff_stage(cur, spec.t_diff);
    ChargedStack mult = diff_to_mult(diff, spec.t_diff);
    CHECK(max_abs_diff(mult.at(0, 0), channel_slice(diff.at(0, 0), 0)) == 0.0);
    CHECK(max_abs_diff(mult.at(0, 3), channel_slice(diff.at(1, 0), 1)) == 0.0);
    CHECK(max_abs_diff(mult.at(1, 1), channel_slice(diff.at(1, 1), 1)) == 0.0);
}

TEST_CASE("ridge fit of the final mult layer recovers a realizable target") {
    Rng rng(47);
    ChargeConvNetSpec teacher = ChargeConvNetSpec::random(1.0, 3.0, 2, 2, 3, 1, rng);
    std::vector<AnalyticField> inputs;
    for (int i = 0; i < 4; ++i) {
        PolyZZbar p;
        p.terms.push_back({0, 0, {1.0 + 0.2 * i, 0.0}});
        p.terms.push_back({1, 0, {0.3, 0.1 * i}});
        p.terms.push_back({0, 1, {0.3, -0.1 * i}});
        if (i % 2) p.terms.push_back({2, 0, {0.15, 0.0}});
        if (i % 2) p.terms.push_back({0, 2, {0.15, 0.0}});
        inputs.push_back(AnalyticField::gaussian_poly(p));
    }
    std::vector<Signal> targets;
    for (const AnalyticField& f : inputs) targets.push_back(forward(teacher, f));

    ChargeConvNetSpec student = teacher;
    student.layers.back() = MultWeights(2, 1, std::vector<int>(5, 3), true);
    ChargeConvNetSpec fitted = fit_final_mult_layer(student, inputs, targets, 1e-12);

    // the teacher's final layer lies in the fitted span, so recovery is
    // near-exact on the training fields and generalizes to a fresh one
    for (std::size_t i = 0; i < inputs.size(); ++i)
        CHECK(max_abs_diff(forward(fitted, inputs[i]), targets[i]) < 1e-7);
    PolyZZbar fresh;
    fresh.terms.push_back({1, 1, {0.4, 0.0}});
    fresh.terms.push_back({0, 0, {0.8, 0.0}});
    AnalyticField f_new = AnalyticField::gaussian_poly(fresh);
    CHECK(max_abs_diff(forward(fitted, f_new), forward(teacher, f_new)) < 1e-6);
}

TEST_CASE("grid bookkeeping through the full chain") {
    Rng rng(37);
    ChargeConvNetSpec spec = ChargeConvNetSpec::random(0.5, 1.0, 1, 2, 2, 1, rng);
    CHECK(spec.smooth_layers() == 16);
    CHECK(spec.out_half_width() == 2);
    CHECK(spec.in_half_width() == 2 + 1 + 16);
    CHECK(spec.lambda_prime() == doctest::Approx(1.0 + 17 * 0.5));
    Signal out = forward(spec, AnalyticField::gaussian_poly(PolyZZbar::one()));
    CHECK(out.half_width() == 2);
}
