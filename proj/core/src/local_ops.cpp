#include "equinet/local_ops.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace equinet {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kTwoPi = 2.0 * std::numbers::pi;

void require(bool cond, const char* msg) {
    if (!cond) throw std::invalid_argument(msg);
}

PolyZZbar normalized(const PolyZZbar& p) {
    PolyZZbar out;
    for (const auto& t : p.terms) {
        if (t.coeff == Complex{0.0, 0.0}) continue;
        bool merged = false;
        for (auto& u : out.terms)
            if (u.z_pow == t.z_pow && u.zbar_pow == t.zbar_pow) {
                u.coeff += t.coeff;
                merged = true;
                break;
            }
        if (!merged) out.terms.push_back(t);
    }
    std::erase_if(out.terms, [](const PolyZZbar::Term& t) {
        return t.coeff == Complex{0.0, 0.0};
    });
    return out;
}

// p -> dz p - (zbar/2) p
PolyZZbar apply_dz_to_poly(const PolyZZbar& p) {
    PolyZZbar out;
    for (const auto& t : p.terms) {
        if (t.z_pow > 0)
            out.terms.push_back({t.z_pow - 1, t.zbar_pow, t.coeff * static_cast<double>(t.z_pow)});
        out.terms.push_back({t.z_pow, t.zbar_pow + 1, -0.5 * t.coeff});
    }
    return normalized(out);
}

// p -> dzbar p - (z/2) p
PolyZZbar apply_dzbar_to_poly(const PolyZZbar& p) {
    PolyZZbar out;
    for (const auto& t : p.terms) {
        if (t.zbar_pow > 0)
            out.terms.push_back(
                {t.z_pow, t.zbar_pow - 1, t.coeff * static_cast<double>(t.zbar_pow)});
        out.terms.push_back({t.z_pow + 1, t.zbar_pow, -0.5 * t.coeff});
    }
    return normalized(out);
}

// One-dimensional DFT pass along one axis of a node-major value array.
// sign = -1 for the forward transform, +1 for the inverse.
std::vector<Complex> dft_pass(const std::vector<Complex>& in, int N, int d, int axis, int sign) {
    std::vector<Complex> twiddle(static_cast<std::size_t>(N) * N);
    int L = (N - 1) / 2;
    double omega = kTwoPi / N;
    for (int j = -L; j <= L; ++j)
        for (int k = -L; k <= L; ++k)
            twiddle[static_cast<std::size_t>(j + L) * N + (k + L)] =
                std::polar(1.0, sign * omega * j * k);

    std::vector<Complex> out(in.size());
    for (int a = 0; a < N; ++a)       // index along the untransformed axis
        for (int j = 0; j < N; ++j) { // output index along the transformed axis
            for (int c = 0; c < d; ++c) {
                Complex acc{0.0, 0.0};
                for (int k = 0; k < N; ++k) {
                    std::size_t idx =
                        axis == 0 ? (static_cast<std::size_t>(k) * N + a) * d + c
                                  : (static_cast<std::size_t>(a) * N + k) * d + c;
                    acc += twiddle[static_cast<std::size_t>(j) * N + k] * in[idx];
                }
                std::size_t oidx = axis == 0 ? (static_cast<std::size_t>(j) * N + a) * d + c
                                             : (static_cast<std::size_t>(a) * N + j) * d + c;
                out[oidx] = acc;
            }
        }
    return out;
}

} // namespace

int smoothing_chain_length(double lambda) {
    require(lambda > 0.0, "smoothing_chain_length: lambda must be positive");
    double r = 4.0 / (lambda * lambda);
    // relative nudge so that mathematically integral ratios are not pushed up
    return static_cast<int>(std::ceil(r * (1.0 - 1e-12)));
}

Signal stencil_apply(StencilKind kind, const Signal& s) {
    require(s.half_width() >= 1, "stencil_apply: grid too small");
    GridSpec g{s.spacing(), s.half_width() - 1};
    double lam = s.spacing();
    Field out_field =
        (kind == StencilKind::Dz || kind == StencilKind::Dzbar) ? Field::Complex : s.field();

    switch (kind) {
    case StencilKind::Dz: {
        double c = 1.0 / (4.0 * lam);
        return Signal::build(g, s.channels(), out_field, [&](int kx, int ky, int ch) {
            Complex d1 = s.at(kx + 1, ky, ch) - s.at(kx - 1, ky, ch);
            Complex d2 = s.at(kx, ky + 1, ch) - s.at(kx, ky - 1, ch);
            return c * (d1 - Complex{0.0, 1.0} * d2);
        });
    }
    case StencilKind::Dzbar: {
        double c = 1.0 / (4.0 * lam);
        return Signal::build(g, s.channels(), out_field, [&](int kx, int ky, int ch) {
            Complex d1 = s.at(kx + 1, ky, ch) - s.at(kx - 1, ky, ch);
            Complex d2 = s.at(kx, ky + 1, ch) - s.at(kx, ky - 1, ch);
            return c * (d1 + Complex{0.0, 1.0} * d2);
        });
    }
    case StencilKind::Laplace: {
        double inv = 1.0 / (lam * lam);
        return Signal::build(g, s.channels(), out_field, [&](int kx, int ky, int ch) {
            Complex nb = (s.at(kx + 1, ky, ch) + s.at(kx - 1, ky, ch)) +
                         (s.at(kx, ky + 1, ch) + s.at(kx, ky - 1, ch));
            return (nb - 4.0 * s.at(kx, ky, ch)) * inv;
        });
    }
    case StencilKind::Smooth:
        // pairwise neighbor sum keeps constants exactly fixed
        return Signal::build(g, s.channels(), out_field, [&](int kx, int ky, int ch) {
            Complex nb = (s.at(kx + 1, ky, ch) + s.at(kx - 1, ky, ch)) +
                         (s.at(kx, ky + 1, ch) + s.at(kx, ky - 1, ch));
            return nb * 0.125 + s.at(kx, ky, ch) * 0.5;
        });
    }
    throw std::logic_error("stencil_apply: unknown kind");
}

Signal smooth_chain(const Signal& s) {
    int n = smoothing_chain_length(s.spacing());
    require(s.half_width() >= n, "smooth_chain: grid too small for the smoothing chain");
    Signal cur = s;
    for (int i = 0; i < n; ++i) cur = stencil_apply(StencilKind::Smooth, cur);
    return cur;
}

Signal discrete_deriv_chain(const Signal& s, int a, int b) {
    require(a >= 0 && b >= 0, "discrete_deriv_chain: orders must be nonnegative");
    int n = smoothing_chain_length(s.spacing());
    require(s.half_width() >= n + a + b, "discrete_deriv_chain: grid too small");
    Signal cur = smooth_chain(s);
    for (int i = 0; i < a; ++i) cur = stencil_apply(StencilKind::Dz, cur);
    for (int i = 0; i < b; ++i) cur = stencil_apply(StencilKind::Dzbar, cur);
    return cur;
}

Complex PolyGaussian::eval(double x, double y) const {
    double r2 = x * x + y * y;
    return poly.eval(Complex{x, y}) * (std::exp(-r2 / 2.0) / kTwoPi);
}

PolyGaussian gaussian_deriv_kernel(int a, int b) {
    require(a >= 0 && b >= 0, "gaussian_deriv_kernel: orders must be nonnegative");
    require(a <= 8 && b <= 8, "gaussian_deriv_kernel: order exceeds the degree guard (8)");
    PolyZZbar p = PolyZZbar::one();
    for (int i = 0; i < a; ++i) p = apply_dz_to_poly(p);
    for (int i = 0; i < b; ++i) p = apply_dzbar_to_poly(p);
    return PolyGaussian{p};
}

Complex continuum_conv(const AnalyticField& f, int a, int b, double x, double y, int channel) {
    PolyGaussian ker = gaussian_deriv_kernel(a, b);
    const double h = 0.05;
    const double radius = 8.0;
    const int n = static_cast<int>(std::lround(2.0 * radius / h));
    Complex acc{0.0, 0.0};
    for (int i = 0; i < n; ++i) {
        double yx = -radius + (i + 0.5) * h;
        for (int j = 0; j < n; ++j) {
            double yy = -radius + (j + 0.5) * h;
            acc += f.eval(x - yx, y - yy, channel) * ker.eval(yx, yy);
        }
    }
    return acc * (h * h);
}

Signal dft2(const Signal& s) {
    int N = s.grid().side();
    int d = s.channels();
    double lam = s.spacing();
    std::vector<Complex> vals = dft_pass(s.values(), N, d, 0, -1);
    vals = dft_pass(vals, N, d, 1, -1);
    double scale = lam * lam / kTwoPi;
    for (Complex& v : vals) v *= scale;
    double dp = kTwoPi / (N * lam);
    return Signal(GridSpec{dp, s.half_width()}, d, Field::Complex, std::move(vals));
}

Signal idft2(const Signal& freq, double spatial_lambda) {
    require(spatial_lambda > 0.0, "idft2: spatial_lambda must be positive");
    int N = freq.grid().side();
    int d = freq.channels();
    std::vector<Complex> vals = dft_pass(freq.values(), N, d, 0, +1);
    vals = dft_pass(vals, N, d, 1, +1);
    double scale = kTwoPi / (spatial_lambda * spatial_lambda * static_cast<double>(N) * N);
    for (Complex& v : vals) v *= scale;
    return Signal(GridSpec{spatial_lambda, freq.half_width()}, d, Field::Complex,
                  std::move(vals));
}

SpectralSymbol SpectralSymbol::atom(StencilKind kind, double lambda) {
    require(lambda > 0.0, "SpectralSymbol: lambda must be positive");
    SpectralSymbol s;
    s.lambda = lambda;
    switch (kind) {
    case StencilKind::Dz: s.dz_pow = 1; break;
    case StencilKind::Dzbar: s.dzbar_pow = 1; break;
    case StencilKind::Laplace: s.laplace_pow = 1; break;
    case StencilKind::Smooth: s.smooth_pow = 1; break;
    }
    return s;
}

SpectralSymbol SpectralSymbol::composed(int a, int b, double lambda) {
    require(a >= 0 && b >= 0, "SpectralSymbol: orders must be nonnegative");
    SpectralSymbol s;
    s.lambda = lambda;
    s.dz_pow = a;
    s.dzbar_pow = b;
    s.smooth_pow = smoothing_chain_length(lambda);
    return s;
}

Complex SpectralSymbol::eval(double px, double py) const {
    double bound = kPi / lambda * (1.0 + 1e-12);
    if (std::abs(px) > bound || std::abs(py) > bound)
        throw std::invalid_argument("SpectralSymbol: p outside the fundamental domain");
    double sx = std::sin(lambda * px);
    double sy = std::sin(lambda * py);
    double hx = std::sin(lambda * px / 2.0);
    double hy = std::sin(lambda * py / 2.0);
    Complex dz = Complex{0.0, 1.0 / (2.0 * lambda)} * Complex{sx, -sy};
    Complex dzbar = Complex{0.0, 1.0 / (2.0 * lambda)} * Complex{sx, sy};
    double lap = -(4.0 / (lambda * lambda)) * (hx * hx + hy * hy);
    double smooth = 1.0 - 0.5 * (hx * hx + hy * hy);

    Complex acc{1.0, 0.0};
    for (int i = 0; i < dz_pow; ++i) acc *= dz;
    for (int i = 0; i < dzbar_pow; ++i) acc *= dzbar;
    for (int i = 0; i < laplace_pow; ++i) acc *= lap;
    if (smooth_pow > 0) acc *= std::pow(smooth, smooth_pow);
    return acc;
}

Complex fourier_symbol(StencilKind kind, double lambda, double px, double py) {
    return SpectralSymbol::atom(kind, lambda).eval(px, py);
}

Complex composed_symbol(int a, int b, double lambda, double px, double py) {
    return SpectralSymbol::composed(a, b, lambda).eval(px, py);
}

namespace {

Signal kernel_from_symbol(const SpectralSymbol& sym, double lambda, int L) {
    int N = 2 * L + 1;
    double dp = kTwoPi / (N * lambda);
    Signal freq = Signal::build(GridSpec{dp, L}, 1, Field::Complex, [&](int jx, int jy, int) {
        return sym.eval(jx * dp, jy * dp);
    });
    Signal k = idft2(freq, lambda);
    return Signal::build(k.grid(), 1, Field::Complex, [&](int kx, int ky, int) {
        return k.at(kx, ky, 0) / kTwoPi;
    });
}

} // namespace

Signal discrete_kernel(int a, int b, double lambda, int L) {
    require(lambda > 0.0, "discrete_kernel: lambda must be positive");
    require(L >= 1, "discrete_kernel: L must be positive");
    SpectralSymbol sym = SpectralSymbol::composed(a, b, lambda);
    Signal k = kernel_from_symbol(sym, lambda, L);

    int pad = std::max(4, static_cast<int>(std::ceil(4.0 / lambda)));
    Signal kchk = kernel_from_symbol(sym, lambda, L + pad);
    double tail = 0.0;
    int Lc = kchk.half_width();
    for (int kx = -Lc; kx <= Lc; ++kx)
        for (int ky = -Lc; ky <= Lc; ++ky)
            if (std::abs(kx) > L || std::abs(ky) > L) tail += std::abs(kchk.at(kx, ky, 0));
    tail *= lambda * lambda;
    if (tail >= 1e-8)
        throw std::runtime_error(
            "discrete_kernel: kernel mass outside the grid exceeds 1e-8; use a larger L");
    return k;
}

KernelGapResult kernel_gap_result(int a, int b, double lambda) {
    require(lambda > 0.0 && lambda <= 1.0, "kernel_gap: lambda must lie in (0, 1]");
    int L = static_cast<int>(std::ceil(8.0 / lambda));
    Signal kd = discrete_kernel(a, b, lambda, L);
    PolyGaussian psi = gaussian_deriv_kernel(a, b);
    AnalyticField cont = AnalyticField::gaussian_poly(psi.poly);

    // cell averages of the continuum kernel on the same grid; gaussian_poly
    // carries exp(-r^2/2w^2) so width 1 matches and the 1/2pi factor is
    // applied here
    Signal kc = discretize(cont, lambda, (L + 0.5) * lambda);
    double acc = 0.0;
    double l2 = 0.0;
    Complex mass{0.0, 0.0};
    for (int kx = -L; kx <= L; ++kx)
        for (int ky = -L; ky <= L; ++ky) {
            Complex diff = kd.at(kx, ky, 0) - kc.at(kx, ky, 0) / kTwoPi;
            acc += std::norm(diff);
            l2 += std::norm(kd.at(kx, ky, 0));
            mass += kd.at(kx, ky, 0);
        }
    KernelGapResult r;
    r.gap = std::sqrt(acc) * lambda;
    r.kernel_l2 = std::sqrt(l2) * lambda;
    r.mass_dev = std::abs(mass * (lambda * lambda) -
                          ((a == 0 && b == 0) ? Complex{1.0, 0.0} : Complex{0.0, 0.0}));
    r.grid_half_width = L;
    return r;
}

double kernel_gap(int a, int b, double lambda) { return kernel_gap_result(a, b, lambda).gap; }

double kernel_l2_squared_bound(int a, int b) {
    const double h = 0.05;
    const double radius = 30.0;
    const int n = static_cast<int>(std::lround(2.0 * radius / h));
    const double alpha = 4.0 / (kPi * kPi);
    double acc = 0.0;
    for (int i = 0; i < n; ++i) {
        double px = -radius + (i + 0.5) * h;
        for (int j = 0; j < n; ++j) {
            double py = -radius + (j + 0.5) * h;
            double base = 0.5 * (std::abs(px) + std::abs(py));
            acc += std::pow(base, 2 * (a + b)) * std::exp(-alpha * (px * px + py * py));
        }
    }
    return acc * h * h / (4.0 * kPi * kPi);
}

} // namespace equinet
