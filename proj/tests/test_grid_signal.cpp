#include "doctest.h"

#include <cmath>
#include <numbers>

#include "equinet/grid_signal.hpp"

using namespace equinet;

namespace {

Signal delta_signal(GridSpec g, Complex v = {1.0, 0.0}) {
    return Signal::build(g, 1, Field::Complex, [&](int kx, int ky, int) {
        return (kx == 0 && ky == 0) ? v : Complex{0.0, 0.0};
    });
}

// Composite Simpson cell-average oracle, independent of the library's
// 3x3 Gauss-Legendre path.
double simpson_cell_average(const AnalyticField& f, double cx, double cy, double lambda,
                            int panels) {
    int n = 2 * panels;
    double h = lambda / n;
    auto w1d = [&](int i) {
        if (i == 0 || i == n) return 1.0;
        return (i % 2 == 1) ? 4.0 : 2.0;
    };
    double acc = 0.0;
    for (int i = 0; i <= n; ++i)
        for (int j = 0; j <= n; ++j)
            acc += w1d(i) * w1d(j) *
                   f.eval(cx - lambda / 2 + i * h, cy - lambda / 2 + j * h).real();
    return acc * h * h / 9.0 / (lambda * lambda);
}

} // namespace

TEST_CASE("discretize of a constant is exact") {
    Signal s = discretize(AnalyticField::constant({5.0, 0.0}), 1.0, 2.0);
    CHECK(s.half_width() == 2);
    CHECK(s.grid().node_count() == 25);
    CHECK(s.field() == Field::Real);
    for (const Complex& v : s.values()) CHECK(std::abs(v - Complex{5.0, 0.0}) < 1e-14);
}

TEST_CASE("discretize of z has zero center cell average") {
    Signal s = discretize(AnalyticField::coordinate_monomial(1, 0), 1.0, 1.0);
    CHECK(s.half_width() == 1);
    CHECK(std::abs(s.at(0, 0, 0)) < 1e-15);
    // and the cell average of a linear field equals its center value
    CHECK(std::abs(s.at(1, 0, 0) - Complex{1.0, 0.0}) < 1e-14);
}

TEST_CASE("discretize gaussian matches an independent quadrature oracle") {
    AnalyticField f = AnalyticField::gaussian_poly(PolyZZbar::one());
    Signal s = discretize(f, 0.5, 4.0);
    CHECK(s.half_width() == 8);
    double oracle = simpson_cell_average(f, 0.0, 0.0, 0.5, 32);
    CHECK(std::abs(s.at(0, 0, 0).real() - oracle) < 1e-8);
    CHECK(s.at(0, 0, 0).real() == doctest::Approx(0.979467031615638).epsilon(1e-10));
}

TEST_CASE("translate basics") {
    GridSpec g{1.0, 3};
    Rng rng(42);
    Signal s = random_signal(g, 2, Field::Complex, rng);

    SUBCASE("zero shift is the identity") {
        Signal t = translate(s, 0, 0);
        CHECK(max_abs_diff(s, t) == 0.0);
    }
    SUBCASE("delta moves to the shifted node") {
        Signal d = delta_signal(g);
        Signal t = translate(d, 1, 0);
        CHECK(t.at(1, 0, 0) == Complex{1.0, 0.0});
        double rest = 0.0;
        for (int kx = -3; kx <= 3; ++kx)
            for (int ky = -3; ky <= 3; ++ky)
                if (!(kx == 1 && ky == 0)) rest += std::abs(t.at(kx, ky, 0));
        CHECK(rest == 0.0);
    }
    SUBCASE("round trip restricted to the interior overlap") {
        Signal t = translate(translate(s, 2, -1), -2, 1);
        Signal a = crop(s, 1);
        Signal b = crop(t, 1);
        CHECK(max_abs_diff(a, b) == 0.0);
    }
    SUBCASE("norm preserved for interior-supported signals") {
        Signal interior = pad_to(crop(s, 1), 3);
        CHECK(l2_norm(translate(interior, 2, 1)) == doctest::Approx(l2_norm(interior)).epsilon(1e-15));
    }
}

TEST_CASE("rotate_quarter basics") {
    GridSpec g{0.5, 4};
    SUBCASE("quarter turn of a point") {
        Signal d = Signal::build(g, 1, Field::Complex, [](int kx, int ky, int) {
            return (kx == 1 && ky == 0) ? Complex{1.0, 0.0} : Complex{0.0, 0.0};
        });
        Signal r = rotate_quarter(d, 1);
        CHECK(r.at(0, 1, 0) == Complex{1.0, 0.0});
        CHECK(std::abs(r.at(1, 0, 0)) == 0.0);
    }
    SUBCASE("full turn is the identity, bit-exactly") {
        Rng rng(7);
        Signal s = random_signal(g, 3, Field::Complex, rng);
        Signal r = rotate_quarter(s, 4);
        CHECK(max_abs_diff(s, r) == 0.0);
    }
    SUBCASE("radial signals are fixed") {
        Signal s = Signal::build(g, 1, Field::Real, [](int kx, int ky, int) {
            return Complex{std::exp(-0.1 * (kx * kx + ky * ky)), 0.0};
        });
        for (int q = 1; q <= 3; ++q) CHECK(max_abs_diff(s, rotate_quarter(s, q)) == 0.0);
    }
    SUBCASE("norm preservation and composition") {
        Rng rng(9);
        Signal s = random_signal(g, 1, Field::Complex, rng);
        CHECK(l2_norm(rotate_quarter(s, 1)) == doctest::Approx(l2_norm(s)).epsilon(1e-15));
        Signal a = rotate_quarter(rotate_quarter(s, 1), 2);
        Signal b = rotate_quarter(s, 3);
        CHECK(max_abs_diff(a, b) == 0.0);
    }
}

TEST_CASE("norms") {
    SUBCASE("constant 1 on a 3x3 grid with lambda 1") {
        Signal s = discretize(AnalyticField::constant({1.0, 0.0}), 1.0, 1.0);
        CHECK(l2_norm(s) == doctest::Approx(3.0).epsilon(1e-14));
    }
    SUBCASE("delta with lambda 0.5") {
        Signal d = delta_signal(GridSpec{0.5, 2});
        CHECK(l2_norm(d) == doctest::Approx(0.5).epsilon(1e-15));
    }
    SUBCASE("inner(s, s) equals the squared l2 norm") {
        Rng rng(3);
        Signal s = random_signal(GridSpec{0.25, 3}, 2, Field::Real, rng);
        Norms n = norms(s, s);
        CHECK(n.inner.real() == doctest::Approx(n.l2 * n.l2).epsilon(1e-13));
        CHECK(std::abs(n.inner.imag()) < 1e-15);
    }
    SUBCASE("inner conjugates the first argument") {
        GridSpec g{1.0, 0};
        Signal a(g, 1, Field::Complex, {Complex{0.0, 1.0}});
        Signal b(g, 1, Field::Complex, {Complex{0.0, 1.0}});
        CHECK(inner(a, b) == Complex{1.0, 0.0});
    }
    SUBCASE("grid mismatch throws") {
        Signal a(GridSpec{1.0, 1}, 1, Field::Real);
        Signal b(GridSpec{0.5, 1}, 1, Field::Real);
        CHECK_THROWS_AS((void)inner(a, b), std::invalid_argument);
    }
}

TEST_CASE("discretization error decreases as lambda halves") {
    PolyZZbar p;
    p.terms.push_back({1, 0, {0.5, 0.0}});
    p.terms.push_back({0, 1, {0.5, 0.0}});
    p.terms.push_back({0, 0, {1.0, 0.0}});
    AnalyticField f = AnalyticField::gaussian_poly(p);
    auto node_error = [&](double lam) {
        Signal s = discretize(f, lam, 2.0);
        double m = 0.0;
        int L = s.half_width();
        for (int kx = -L; kx <= L; ++kx)
            for (int ky = -L; ky <= L; ++ky)
                m = std::max(m, std::abs(s.at(kx, ky, 0) - f.eval(kx * lam, ky * lam)));
        return m;
    };
    double e1 = node_error(0.5), e2 = node_error(0.25), e3 = node_error(0.125);
    CHECK(e1 > e2);
    CHECK(e2 > e3);
}

TEST_CASE("field and value validation") {
    CHECK_THROWS_AS(Signal(GridSpec{1.0, 1}, 1, Field::Real,
                           std::vector<Complex>(9, Complex{0.0, 1.0})),
                    std::invalid_argument);
    std::vector<Complex> bad(9, Complex{0.0, 0.0});
    bad[4] = Complex{std::nan(""), 0.0};
    CHECK_THROWS_AS(Signal(GridSpec{1.0, 1}, 1, Field::Real, bad), std::invalid_argument);
    CHECK_THROWS_AS(AnalyticField::gaussian_poly(PolyZZbar::one(), {0.0, 0.0}, -1.0),
                    std::invalid_argument);
    CHECK_THROWS_AS((void)discretize(AnalyticField::constant({1.0, 0.0}), -1.0, 1.0),
                    std::invalid_argument);
}

TEST_CASE("analytic rotation of a gaussian_poly") {
    PolyZZbar p;
    p.terms.push_back({2, 0, {1.0, 0.0}});
    p.terms.push_back({0, 2, {1.0, 0.0}});
    AnalyticField f = AnalyticField::gaussian_poly(p);
    double phi = std::numbers::pi / 7;
    AnalyticField fr = f.rotated(phi);
    // rotated field evaluated at x equals the original at R^{-1} x
    double c = std::cos(-phi), s = std::sin(-phi);
    for (double x : {0.3, -0.7})
        for (double y : {0.2, 1.1}) {
            Complex got = fr.eval(x, y);
            Complex want = f.eval(c * x - s * y, s * x + c * y);
            CHECK(std::abs(got - want) < 1e-14);
        }
    CHECK_THROWS_AS(AnalyticField::coordinate_monomial(1, 0).rotated(0.1),
                    std::invalid_argument);
}
