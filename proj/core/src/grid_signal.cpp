#include "equinet/grid_signal.hpp"

#include <cmath>
#include <stdexcept>
#include <utility>

namespace equinet {

namespace {

void require(bool cond, const char* msg) {
    if (!cond) throw std::invalid_argument(msg);
}

// 5-point Gauss-Legendre rule on [-1/2, 1/2]; weights sum to 1 so the tensor
// rule returns the cell average directly. Exact through degree 9 per axis.
constexpr double kGlN1 = 0.2692346550528415455;
constexpr double kGlN2 = 0.4530899229693319964;
const double kGlNodes[5] = {-kGlN2, -kGlN1, 0.0, kGlN1, kGlN2};
const double kGlWeights[5] = {0.1184634425280945438, 0.2393143352496832340,
                              0.2844444444444444444, 0.2393143352496832340,
                              0.1184634425280945438};

} // namespace

Signal::Signal(GridSpec grid, int channels, Field field)
    : grid_(grid), channels_(channels), field_(field),
      values_(grid.node_count() * static_cast<std::size_t>(channels)) {
    require(grid.spacing > 0.0, "Signal: spacing must be positive");
    require(grid.half_width >= 0, "Signal: half_width must be nonnegative");
    require(channels > 0, "Signal: channels must be positive");
}

Signal::Signal(GridSpec grid, int channels, Field field, std::vector<Complex> values)
    : grid_(grid), channels_(channels), field_(field), values_(std::move(values)) {
    require(grid.spacing > 0.0, "Signal: spacing must be positive");
    require(grid.half_width >= 0, "Signal: half_width must be nonnegative");
    require(channels > 0, "Signal: channels must be positive");
    require(values_.size() == grid.node_count() * static_cast<std::size_t>(channels),
            "Signal: value count does not match grid and channels");
    validate();
}

Signal Signal::build(GridSpec grid, int channels, Field field,
                     const std::function<Complex(int, int, int)>& fn) {
    std::vector<Complex> vals(grid.node_count() * static_cast<std::size_t>(channels));
    int L = grid.half_width;
    std::size_t i = 0;
    for (int kx = -L; kx <= L; ++kx)
        for (int ky = -L; ky <= L; ++ky)
            for (int c = 0; c < channels; ++c) vals[i++] = fn(kx, ky, c);
    return Signal(grid, channels, field, std::move(vals));
}

void Signal::validate() const {
    for (const Complex& v : values_) {
        if (!std::isfinite(v.real()) || !std::isfinite(v.imag()))
            throw std::invalid_argument("Signal: values must be finite");
        if (field_ == Field::Real && v.imag() != 0.0)
            throw std::invalid_argument("Signal: real-field signal has nonzero imaginary part");
    }
}

Complex PolyZZbar::eval(Complex z) const {
    Complex zb = std::conj(z);
    Complex acc{0.0, 0.0};
    for (const Term& t : terms) {
        Complex m = t.coeff;
        for (int i = 0; i < t.z_pow; ++i) m *= z;
        for (int i = 0; i < t.zbar_pow; ++i) m *= zb;
        acc += m;
    }
    return acc;
}

PolyZZbar PolyZZbar::rotated(double phi) const {
    PolyZZbar out = *this;
    for (Term& t : out.terms) {
        double ang = -phi * (t.z_pow - t.zbar_pow);
        t.coeff *= Complex{std::cos(ang), std::sin(ang)};
    }
    return out;
}

int PolyZZbar::max_degree() const {
    int d = 0;
    for (const Term& t : terms) d = std::max(d, t.z_pow + t.zbar_pow);
    return d;
}

AnalyticField AnalyticField::constant(Complex c) {
    AnalyticField f;
    Component comp;
    comp.kind = Kind::Constant;
    comp.const_value = c;
    f.components_.push_back(comp);
    return f;
}

AnalyticField AnalyticField::coordinate_monomial(int a, int b) {
    if (a < 0 || b < 0)
        throw std::invalid_argument("coordinate_monomial: exponents must be nonnegative");
    AnalyticField f;
    Component comp;
    comp.kind = Kind::Monomial;
    comp.mono_a = a;
    comp.mono_b = b;
    f.components_.push_back(comp);
    return f;
}

AnalyticField AnalyticField::gaussian_poly(PolyZZbar p, Complex center, double width) {
    if (!(width > 0.0)) throw std::invalid_argument("gaussian_poly: width must be positive");
    AnalyticField f;
    Component comp;
    comp.kind = Kind::GaussianPoly;
    comp.poly = std::move(p);
    comp.center = center;
    comp.width = width;
    f.components_.push_back(comp);
    return f;
}

AnalyticField AnalyticField::stack(std::vector<AnalyticField> components) {
    AnalyticField f;
    for (AnalyticField& part : components)
        for (Component& comp : part.components_) f.components_.push_back(std::move(comp));
    if (f.components_.empty()) throw std::invalid_argument("stack: no components");
    return f;
}

Complex AnalyticField::eval(double x, double y, int c) const {
    const Component& comp = components_.at(static_cast<std::size_t>(c));
    Complex z{x, y};
    switch (comp.kind) {
    case Kind::Constant:
        return comp.const_value;
    case Kind::Monomial: {
        Complex m{1.0, 0.0};
        Complex zb = std::conj(z);
        for (int i = 0; i < comp.mono_a; ++i) m *= z;
        for (int i = 0; i < comp.mono_b; ++i) m *= zb;
        return m;
    }
    case Kind::GaussianPoly: {
        Complex u = z - comp.center;
        double r2 = std::norm(u);
        return comp.poly.eval(u) * std::exp(-r2 / (2.0 * comp.width * comp.width));
    }
    }
    return {};
}

bool AnalyticField::square_integrable() const {
    for (const Component& comp : components_)
        if (comp.kind != Kind::GaussianPoly) return false;
    return true;
}

AnalyticField AnalyticField::rotated(double phi) const {
    AnalyticField out;
    for (const Component& comp : components_) {
        Component r = comp;
        switch (comp.kind) {
        case Kind::Constant:
            break;
        case Kind::GaussianPoly:
            if (comp.center != Complex{0.0, 0.0})
                throw std::invalid_argument(
                    "rotated: gaussian_poly rotation requires center at the origin");
            r.poly = comp.poly.rotated(phi);
            break;
        case Kind::Monomial:
            throw std::invalid_argument(
                "rotated: coordinate_monomial has no in-family rotation");
        }
        out.components_.push_back(std::move(r));
    }
    return out;
}

Signal discretize(const AnalyticField& f, double lambda, double Lambda) {
    require(lambda > 0.0, "discretize: lambda must be positive");
    require(Lambda >= 0.0, "discretize: Lambda must be nonnegative");
    // the relative nudge keeps decimal ratios like 0.3/0.1 on the intended node count
    GridSpec grid{lambda, static_cast<int>(std::floor(Lambda / lambda + 1e-12))};
    int d = f.channels();

    bool real_ok = true;
    Signal out = Signal::build(grid, d, Field::Complex, [&](int kx, int ky, int c) {
        double cx = kx * lambda;
        double cy = ky * lambda;
        Complex acc{0.0, 0.0};
        for (int i = 0; i < 5; ++i)
            for (int j = 0; j < 5; ++j) {
                double w = kGlWeights[i] * kGlWeights[j];
                acc += w * f.eval(cx + kGlNodes[i] * lambda, cy + kGlNodes[j] * lambda, c);
            }
        if (acc.imag() != 0.0) real_ok = false;
        return acc;
    });
    if (!real_ok) return out;
    return Signal(grid, d, Field::Real, out.values());
}

Signal translate(const Signal& s, int kx, int ky) {
    int L = s.half_width();
    return Signal::build(s.grid(), s.channels(), s.field(), [&](int mx, int my, int c) {
        int sx = mx - kx;
        int sy = my - ky;
        if (sx < -L || sx > L || sy < -L || sy > L) return Complex{0.0, 0.0};
        return s.at(sx, sy, c);
    });
}

Signal rotate_quarter(const Signal& s, int q) {
    int r = ((q % 4) + 4) % 4;
    return Signal::build(s.grid(), s.channels(), s.field(), [&](int kx, int ky, int c) {
        int sx = kx, sy = ky;
        // apply rho^{-1}: (kx, ky) -> (ky, -kx), r times
        for (int i = 0; i < r; ++i) {
            int tx = sy;
            int ty = -sx;
            sx = tx;
            sy = ty;
        }
        return s.at(sx, sy, c);
    });
}

double l2_norm(const Signal& s) {
    double acc = 0.0;
    for (const Complex& v : s.values()) acc += std::norm(v);
    return std::sqrt(acc) * s.spacing();
}

double linf_norm(const Signal& s) {
    double m = 0.0;
    for (const Complex& v : s.values()) m = std::max(m, std::abs(v));
    return m;
}

Complex inner(const Signal& s, const Signal& t) {
    if (s.grid() != t.grid() || s.channels() != t.channels())
        throw std::invalid_argument("inner: grid or channel mismatch");
    Complex acc{0.0, 0.0};
    const auto& a = s.values();
    const auto& b = t.values();
    for (std::size_t i = 0; i < a.size(); ++i) acc += std::conj(a[i]) * b[i];
    return acc * (s.spacing() * s.spacing());
}

Norms norms(const Signal& s, const Signal& t) {
    return Norms{l2_norm(s), linf_norm(s), inner(s, t)};
}

Signal crop(const Signal& s, int half_width) {
    if (half_width < 0 || half_width > s.half_width())
        throw std::invalid_argument("crop: half_width out of range");
    GridSpec g{s.spacing(), half_width};
    return Signal::build(g, s.channels(), s.field(),
                         [&](int kx, int ky, int c) { return s.at(kx, ky, c); });
}

Signal pad_to(const Signal& s, int half_width) {
    if (half_width < s.half_width())
        throw std::invalid_argument("pad_to: half_width smaller than input");
    int L = s.half_width();
    GridSpec g{s.spacing(), half_width};
    return Signal::build(g, s.channels(), s.field(), [&](int kx, int ky, int c) {
        if (kx < -L || kx > L || ky < -L || ky > L) return Complex{0.0, 0.0};
        return s.at(kx, ky, c);
    });
}

Signal channel_slice(const Signal& s, int c) {
    if (c < 0 || c >= s.channels()) throw std::invalid_argument("channel_slice: bad channel");
    return Signal::build(s.grid(), 1, s.field(),
                         [&](int kx, int ky, int) { return s.at(kx, ky, c); });
}

Signal as_complex(const Signal& s) {
    return Signal(s.grid(), s.channels(), Field::Complex, s.values());
}

Signal conjugate(const Signal& s) {
    return Signal::build(s.grid(), s.channels(), s.field(),
                         [&](int kx, int ky, int c) { return std::conj(s.at(kx, ky, c)); });
}

double max_abs_diff(const Signal& a, const Signal& b) {
    if (a.grid() != b.grid() || a.channels() != b.channels())
        throw std::invalid_argument("max_abs_diff: grid or channel mismatch");
    double m = 0.0;
    const auto& av = a.values();
    const auto& bv = b.values();
    for (std::size_t i = 0; i < av.size(); ++i) m = std::max(m, std::abs(av[i] - bv[i]));
    return m;
}

Signal random_signal(GridSpec grid, int channels, Field field, Rng& rng) {
    return Signal::build(grid, channels, field, [&](int, int, int) {
        if (field == Field::Complex) return rng.complex_pm1();
        return Complex{rng.pm1(), 0.0};
    });
}

} // namespace equinet
