#include "doctest.h"

#include <cmath>
#include <map>
#include <numbers>

#include "equinet/local_ops.hpp"

using namespace equinet;

namespace {

constexpr double kPi = std::numbers::pi;

Signal delta_signal(GridSpec g) {
    return Signal::build(g, 1, Field::Complex, [](int kx, int ky, int) {
        return (kx == 0 && ky == 0) ? Complex{1.0, 0.0} : Complex{0.0, 0.0};
    });
}

// Independent repeated-convolution oracle: n-fold self-convolution of the
// smoothing stencil coefficients on the integer lattice.
std::map<std::pair<int, int>, double> smooth_stencil_power(int n) {
    std::map<std::pair<int, int>, double> cur{{{0, 0}, 1.0}};
    for (int it = 0; it < n; ++it) {
        std::map<std::pair<int, int>, double> next;
        for (const auto& [off, v] : cur) {
            next[{off.first, off.second}] += 0.5 * v;
            next[{off.first + 1, off.second}] += 0.125 * v;
            next[{off.first - 1, off.second}] += 0.125 * v;
            next[{off.first, off.second + 1}] += 0.125 * v;
            next[{off.first, off.second - 1}] += 0.125 * v;
        }
        cur = std::move(next);
    }
    return cur;
}

} // namespace

TEST_CASE("smoothing chain length") {
    CHECK(smoothing_chain_length(2.0) == 1);
    CHECK(smoothing_chain_length(1.0) == 4);
    CHECK(smoothing_chain_length(0.5) == 16);
    CHECK(smoothing_chain_length(0.25) == 64);
    CHECK(smoothing_chain_length(0.125) == 256);
    CHECK(smoothing_chain_length(0.2) == 100);
}

TEST_CASE("exact stencil identities on coordinate fields") {
    for (double lam : {1.0, 0.5}) {
        Signal z = discretize(AnalyticField::coordinate_monomial(1, 0), lam, 3.0);
        Signal dz = stencil_apply(StencilKind::Dz, z);
        Signal dzb = stencil_apply(StencilKind::Dzbar, z);
        int L = dz.half_width();
        for (int kx = -L; kx <= L; ++kx)
            for (int ky = -L; ky <= L; ++ky) {
                CHECK(std::abs(dz.at(kx, ky, 0) - Complex{1.0, 0.0}) < 1e-12);
                CHECK(std::abs(dzb.at(kx, ky, 0)) < 1e-12);
            }
        Signal r2 = discretize(AnalyticField::coordinate_monomial(1, 1), lam, 3.0);
        Signal lap = stencil_apply(StencilKind::Laplace, r2);
        for (int kx = -L; kx <= L; ++kx)
            for (int ky = -L; ky <= L; ++ky)
                CHECK(std::abs(lap.at(kx, ky, 0) - Complex{4.0, 0.0}) < 1e-12);
    }
}

TEST_CASE("smoothing stencil has unit mass and fixes constants bit-exactly") {
    Signal c = discretize(AnalyticField::constant({0.7314, 0.0}), 1.0, 4.0);
    Signal s = stencil_apply(StencilKind::Smooth, c);
    CHECK(s.half_width() == 3);
    for (const Complex& v : s.values()) CHECK(v == c.at(0, 0, 0));
}

TEST_CASE("smooth_chain") {
    SUBCASE("lambda 2 applies the stencil once") {
        Signal d = delta_signal(GridSpec{2.0, 3});
        Signal s = smooth_chain(d);
        CHECK(s.half_width() == 2);
        CHECK(s.at(0, 0, 0) == Complex{0.5, 0.0});
        CHECK(s.at(1, 0, 0) == Complex{0.125, 0.0});
        CHECK(s.at(0, -1, 0) == Complex{0.125, 0.0});
        CHECK(std::abs(s.at(1, 1, 0)) == 0.0);
    }
    SUBCASE("constants pass through bit-exactly") {
        Signal c = Signal::build(GridSpec{1.0, 6}, 1, Field::Real,
                                 [](int, int, int) { return Complex{-2.5, 0.0}; });
        Signal s = smooth_chain(c);
        for (const Complex& v : s.values()) CHECK(v == Complex{-2.5, 0.0});
    }
    SUBCASE("lambda 1 delta response matches the repeated-convolution oracle") {
        Signal d = delta_signal(GridSpec{1.0, 8});
        Signal s = smooth_chain(d);
        CHECK(s.half_width() == 4);
        auto oracle = smooth_stencil_power(4);
        for (int kx = -4; kx <= 4; ++kx)
            for (int ky = -4; ky <= 4; ++ky) {
                double want = 0.0;
                auto it = oracle.find({kx, ky});
                if (it != oracle.end()) want = it->second;
                CHECK(std::abs(s.at(kx, ky, 0) - Complex{want, 0.0}) < 1e-15);
            }
    }
    SUBCASE("strictly decreases the sup norm of zero-mean signals") {
        Rng rng(17);
        for (int trial = 0; trial < 5; ++trial) {
            Signal raw = random_signal(GridSpec{1.0, 8}, 1, Field::Real, rng);
            Complex mean{0.0, 0.0};
            for (const Complex& v : raw.values()) mean += v;
            mean /= static_cast<double>(raw.values().size());
            Signal zm = Signal::build(raw.grid(), 1, Field::Real, [&](int kx, int ky, int c) {
                return raw.at(kx, ky, c) - mean;
            });
            CHECK(linf_norm(smooth_chain(zm)) < linf_norm(zm));
        }
    }
    SUBCASE("grid too small throws") {
        CHECK_THROWS_AS((void)smooth_chain(delta_signal(GridSpec{0.5, 4})),
                        std::invalid_argument);
    }
}

TEST_CASE("discrete_deriv_chain") {
    SUBCASE("a=b=0 equals smooth_chain") {
        Rng rng(5);
        Signal s = random_signal(GridSpec{1.0, 7}, 1, Field::Complex, rng);
        CHECK(max_abs_diff(discrete_deriv_chain(s, 0, 0), smooth_chain(s)) == 0.0);
    }
    SUBCASE("derivatives annihilate constants") {
        Signal c = discretize(AnalyticField::constant({3.0, 0.0}), 1.0, 7.0);
        Signal d = discrete_deriv_chain(c, 1, 1);
        CHECK(linf_norm(d) < 1e-14);
    }
    SUBCASE("dz and dzbar commute up to rounding") {
        Rng rng(11);
        Signal s = random_signal(GridSpec{0.5, 5}, 1, Field::Complex, rng);
        Signal ab = stencil_apply(StencilKind::Dzbar, stencil_apply(StencilKind::Dz, s));
        Signal ba = stencil_apply(StencilKind::Dz, stencil_apply(StencilKind::Dzbar, s));
        CHECK(max_abs_diff(ab, ba) < 1e-13);
    }
    SUBCASE("the chain itself is deterministic bit-for-bit") {
        Rng rng(12);
        Signal s = random_signal(GridSpec{1.0, 8}, 1, Field::Complex, rng);
        Signal a = discrete_deriv_chain(s, 1, 1);
        Signal b = discrete_deriv_chain(s, 1, 1);
        CHECK(max_abs_diff(a, b) == 0.0);
    }
    SUBCASE("conjugation identity is exact") {
        Rng rng(13);
        Signal s = random_signal(GridSpec{1.0, 4}, 1, Field::Complex, rng);
        Signal lhs = stencil_apply(StencilKind::Dzbar, conjugate(s));
        Signal rhs = conjugate(stencil_apply(StencilKind::Dz, s));
        CHECK(max_abs_diff(lhs, rhs) == 0.0);
    }
}

TEST_CASE("gaussian derivative kernels") {
    SUBCASE("unit Gaussian normalization at the origin") {
        PolyGaussian g = gaussian_deriv_kernel(0, 0);
        CHECK(g.eval(0.0, 0.0).real() == doctest::Approx(1.0 / (2 * kPi)).epsilon(1e-14));
    }
    SUBCASE("(1,0) has polynomial part -zbar/2") {
        PolyGaussian g = gaussian_deriv_kernel(1, 0);
        REQUIRE(g.poly.terms.size() == 1);
        CHECK(g.poly.terms[0].z_pow == 0);
        CHECK(g.poly.terms[0].zbar_pow == 1);
        CHECK(g.poly.terms[0].coeff == Complex{-0.5, 0.0});
        CHECK(g.eval(1.0, 0.0).real() ==
              doctest::Approx(-std::exp(-0.5) / (4 * kPi)).epsilon(1e-14));
        CHECK(g.eval(1.0, 0.0).real() == doctest::Approx(-0.0482661763150270).epsilon(1e-12));
    }
    SUBCASE("(1,1) matches a finite-difference oracle") {
        PolyGaussian g11 = gaussian_deriv_kernel(1, 1);
        // expected polynomial -1/2 + z zbar / 4
        CHECK(std::abs(g11.poly.eval({0.0, 0.0}) - Complex{-0.5, 0.0}) < 1e-14);
        CHECK(std::abs(g11.poly.eval({2.0, 0.0}) - Complex{0.5, 0.0}) < 1e-14);
        // dz dzbar = Laplacian / 4; five-point finite differences of the Gaussian
        PolyGaussian g00 = gaussian_deriv_kernel(0, 0);
        const double h = 1e-3;
        Rng rng(23);
        for (int i = 0; i < 5; ++i) {
            double x = rng.uniform(-1.5, 1.5);
            double y = rng.uniform(-1.5, 1.5);
            Complex lap = (g00.eval(x + h, y) + g00.eval(x - h, y) + g00.eval(x, y + h) +
                           g00.eval(x, y - h) - 4.0 * g00.eval(x, y)) /
                          (h * h);
            CHECK(std::abs(g11.eval(x, y) - lap / 4.0) < 1e-6);
        }
    }
    SUBCASE("degree guard") {
        CHECK_THROWS_AS((void)gaussian_deriv_kernel(9, 0), std::invalid_argument);
    }
}

TEST_CASE("continuum convolution") {
    AnalyticField one = AnalyticField::constant({1.0, 0.0});
    CHECK(std::abs(continuum_conv(one, 0, 0, 0.3, -0.2) - Complex{1.0, 0.0}) < 1e-10);
    CHECK(std::abs(continuum_conv(one, 1, 0, 0.0, 0.0)) < 1e-10);
    CHECK(std::abs(continuum_conv(one, 2, 1, 0.5, 0.5)) < 1e-9);
    AnalyticField gauss = AnalyticField::gaussian_poly(PolyZZbar::one());
    CHECK(continuum_conv(gauss, 0, 0, 0.0, 0.0).real() ==
          doctest::Approx(0.5).epsilon(1e-8));
}

TEST_CASE("dft2 and inverse") {
    SUBCASE("delta transforms to the flat spectrum") {
        Signal d = delta_signal(GridSpec{1.0, 4});
        Signal F = dft2(d);
        CHECK(F.spacing() == doctest::Approx(2 * kPi / 9).epsilon(1e-15));
        for (const Complex& v : F.values())
            CHECK(std::abs(v - Complex{1.0 / (2 * kPi), 0.0}) < 1e-14);
    }
    SUBCASE("round trip and Parseval on random signals") {
        Rng rng(31);
        for (int trial = 0; trial < 4; ++trial) {
            int L = 3 + 2 * trial;
            double lam = 0.25 + 0.25 * trial;
            Signal s = random_signal(GridSpec{lam, L}, 1, Field::Complex, rng);
            Signal F = dft2(s);
            CHECK(std::abs(l2_norm(F) - l2_norm(s)) < 1e-10);
            Signal back = idft2(F, lam);
            CHECK(max_abs_diff(back, s) < 1e-10);
        }
    }
    SUBCASE("multi-channel transforms act per channel") {
        Rng rng(33);
        Signal s = random_signal(GridSpec{0.5, 4}, 3, Field::Complex, rng);
        Signal F = dft2(s);
        CHECK(F.channels() == 3);
        CHECK(max_abs_diff(idft2(F, 0.5), s) < 1e-10);
        for (int c = 0; c < 3; ++c) {
            Signal Fc = dft2(channel_slice(s, c));
            CHECK(max_abs_diff(Fc, channel_slice(F, c)) < 1e-12);
        }
    }
}

TEST_CASE("fourier symbols") {
    SUBCASE("derivative symbols vanish at p = 0, smoothing is 1 there") {
        for (double lam : {1.0, 0.5}) {
            CHECK(std::abs(fourier_symbol(StencilKind::Dz, lam, 0.0, 0.0)) == 0.0);
            CHECK(std::abs(fourier_symbol(StencilKind::Dzbar, lam, 0.0, 0.0)) == 0.0);
            CHECK(fourier_symbol(StencilKind::Smooth, lam, 0.0, 0.0) == Complex{1.0, 0.0});
        }
    }
    SUBCASE("dz symbol at (pi/2, 0) with lambda 1 is i/2") {
        Complex v = fourier_symbol(StencilKind::Dz, 1.0, kPi / 2, 0.0);
        CHECK(std::abs(v - Complex{0.0, 0.5}) < 1e-15);
    }
    SUBCASE("real stencils satisfy conj(S(p)) = S(-p)") {
        Rng rng(37);
        for (int i = 0; i < 20; ++i) {
            double px = rng.uniform(-kPi, kPi);
            double py = rng.uniform(-kPi, kPi);
            for (StencilKind k : {StencilKind::Laplace, StencilKind::Smooth}) {
                Complex a = std::conj(fourier_symbol(k, 1.0, px, py));
                Complex b = fourier_symbol(k, 1.0, -px, -py);
                CHECK(std::abs(a - b) < 1e-14);
            }
        }
    }
    SUBCASE("DFT-of-stencil oracle matches the closed forms") {
        double lam = 0.5;
        GridSpec g{lam, 6};
        Signal d = delta_signal(g);
        for (StencilKind k :
             {StencilKind::Dz, StencilKind::Dzbar, StencilKind::Laplace, StencilKind::Smooth}) {
            Signal resp = pad_to(stencil_apply(k, d), g.half_width);
            Signal F = dft2(resp);
            double dp = F.spacing();
            for (int jx = -6; jx <= 6; ++jx)
                for (int jy = -6; jy <= 6; ++jy) {
                    Complex sym = fourier_symbol(k, lam, jx * dp, jy * dp);
                    Complex got = F.at(jx, jy, 0) * (2 * kPi / (lam * lam));
                    CHECK(std::abs(sym - got) < 1e-10);
                }
        }
    }
    SUBCASE("stencil/DFT consistency on random interior-supported signals") {
        Rng rng(41);
        double lam = 1.0;
        GridSpec g{lam, 6};
        for (StencilKind k :
             {StencilKind::Dz, StencilKind::Dzbar, StencilKind::Laplace, StencilKind::Smooth}) {
            Signal s = pad_to(random_signal(GridSpec{lam, 4}, 1, Field::Complex, rng), 6);
            Signal t = pad_to(stencil_apply(k, s), 6);
            Signal Fs = dft2(s);
            Signal Ft = dft2(t);
            double dp = Fs.spacing();
            double dev = 0.0;
            for (int jx = -6; jx <= 6; ++jx)
                for (int jy = -6; jy <= 6; ++jy) {
                    Complex want = fourier_symbol(k, lam, jx * dp, jy * dp) * Fs.at(jx, jy, 0);
                    dev = std::max(dev, std::abs(Ft.at(jx, jy, 0) - want));
                }
            CHECK(dev < 1e-8);
        }
    }
    SUBCASE("out-of-domain frequency throws") {
        CHECK_THROWS_AS((void)fourier_symbol(StencilKind::Dz, 1.0, 4.0, 0.0),
                        std::invalid_argument);
    }
}

TEST_CASE("discrete kernels") {
    SUBCASE("unit mass for (0,0) and zero mass for derivatives") {
        for (double lam : {1.0, 0.5}) {
            int L = static_cast<int>(std::ceil(8.0 / lam));
            Signal k00 = discrete_kernel(0, 0, lam, L);
            Complex mass{0.0, 0.0};
            for (const Complex& v : k00.values()) mass += v;
            mass *= lam * lam;
            CHECK(std::abs(mass - Complex{1.0, 0.0}) < 1e-8);
            Signal k10 = discrete_kernel(1, 0, lam, L);
            Complex mass10{0.0, 0.0};
            for (const Complex& v : k10.values()) mass10 += v;
            CHECK(std::abs(mass10) * lam * lam < 1e-8);
        }
    }
    SUBCASE("matches the spatial smoothing response at lambda 1") {
        Signal d = delta_signal(GridSpec{1.0, 12});
        Signal resp = smooth_chain(d); // half-width 8
        Signal k = discrete_kernel(0, 0, 1.0, 8);
        CHECK(max_abs_diff(resp, k) < 1e-8);
    }
    SUBCASE("truncation check rejects too-small grids") {
        CHECK_THROWS_AS((void)discrete_kernel(0, 0, 0.5, 2), std::runtime_error);
    }
}

TEST_CASE("kernel gap sweep") {
    SUBCASE("frozen goldens for (0,0)") {
        CHECK(kernel_gap(0, 0, 1.0) == doctest::Approx(0.027249648751).epsilon(1e-6));
        CHECK(kernel_gap(0, 0, 0.5) == doctest::Approx(0.00515580898089).epsilon(1e-6));
        CHECK(kernel_gap(0, 0, 0.25) == doctest::Approx(0.00123349685159).epsilon(1e-6));
        CHECK(kernel_gap(0, 0, 0.125) == doctest::Approx(0.000305481694414).epsilon(1e-6));
    }
    SUBCASE("conjugate pair gaps coincide") {
        for (double lam : {1.0, 0.5}) {
            double g10 = kernel_gap(1, 0, lam);
            double g01 = kernel_gap(0, 1, lam);
            CHECK(std::abs(g10 - g01) < 1e-10);
            CHECK(g10 >= 0.0);
        }
    }
    SUBCASE("kernel norms respect the uniform bound") {
        for (int ab = 0; ab < 3; ++ab) {
            int a = ab == 2 ? 1 : ab;
            int b = ab == 2 ? 1 : 0;
            double bound = kernel_l2_squared_bound(a, b);
            for (double lam : {1.0, 0.5, 0.25, 0.125}) {
                KernelGapResult r = kernel_gap_result(a, b, lam);
                CHECK(r.kernel_l2 * r.kernel_l2 <= bound);
            }
        }
    }
    SUBCASE("lambda out of range throws") {
        CHECK_THROWS_AS((void)kernel_gap(0, 0, 1.5), std::invalid_argument);
        CHECK_THROWS_AS((void)kernel_gap(0, 0, 0.0), std::invalid_argument);
    }
}
