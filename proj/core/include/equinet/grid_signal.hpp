#pragma once

#include <complex>
#include <functional>
#include <vector>

#include "equinet/rng.hpp"

namespace equinet {

using Complex = std::complex<double>;

enum class Field { Real, Complex };

/// Centered square grid with odd side 2L+1; nodes are {spacing*k : k in Z^2,
/// |k|_inf <= half_width}. Centering makes quarter-turn rotation an exact
/// permutation of nodes.
struct GridSpec {
    double spacing = 1.0;
    int half_width = 0;

    int side() const { return 2 * half_width + 1; }
    std::size_t node_count() const {
        return static_cast<std::size_t>(side()) * static_cast<std::size_t>(side());
    }
    bool operator==(const GridSpec& o) const {
        return spacing == o.spacing && half_width == o.half_width;
    }
    bool operator!=(const GridSpec& o) const { return !(*this == o); }
};

/// Multi-channel signal sampled on a GridSpec. Values are stored as complex
/// doubles in all cases; Field::Real signals are constrained to zero
/// imaginary parts at construction. Instances are immutable once built;
/// every operation below returns a fresh Signal.
class Signal {
public:
    Signal(GridSpec grid, int channels, Field field); // zero signal
    Signal(GridSpec grid, int channels, Field field, std::vector<Complex> values);

    /// Builds a signal by evaluating fn(kx, ky, channel) at every node,
    /// kx, ky in [-L, L].
    static Signal build(GridSpec grid, int channels, Field field,
                        const std::function<Complex(int, int, int)>& fn);

    const GridSpec& grid() const { return grid_; }
    double spacing() const { return grid_.spacing; }
    int half_width() const { return grid_.half_width; }
    int channels() const { return channels_; }
    Field field() const { return field_; }
    const std::vector<Complex>& values() const { return values_; }

    Complex at(int kx, int ky, int c = 0) const { return values_[index(kx, ky, c)]; }

    std::size_t index(int kx, int ky, int c) const {
        int L = grid_.half_width;
        int side = grid_.side();
        return (static_cast<std::size_t>(kx + L) * side + static_cast<std::size_t>(ky + L)) *
                   channels_ +
               static_cast<std::size_t>(c);
    }

private:
    void validate() const;

    GridSpec grid_;
    int channels_;
    Field field_;
    std::vector<Complex> values_;
};

/// Bivariate polynomial in (z, zbar) with sparse complex coefficients.
struct PolyZZbar {
    struct Term {
        int z_pow = 0;
        int zbar_pow = 0;
        Complex coeff;
    };
    std::vector<Term> terms;

    static PolyZZbar one() { return PolyZZbar{{Term{0, 0, Complex{1.0, 0.0}}}}; }
    static PolyZZbar monomial(int a, int b, Complex c = {1.0, 0.0}) {
        return PolyZZbar{{Term{a, b, c}}};
    }

    Complex eval(Complex z) const;
    /// Coefficient map of precomposition with a rotation by phi:
    /// c_{jk} -> exp(-i phi (j-k)) c_{jk}.
    PolyZZbar rotated(double phi) const;
    int max_degree() const;
};

/// Analytic test field on R^2. Each channel is one of three closed-form
/// kinds: a constant, a coordinate monomial z^a zbar^b, or a polynomial
/// times a Gaussian p(z-z0, conj) * exp(-|x-x0|^2 / (2 w^2)).
class AnalyticField {
public:
    static AnalyticField constant(Complex c);
    static AnalyticField coordinate_monomial(int a, int b);
    static AnalyticField gaussian_poly(PolyZZbar p, Complex center = {0.0, 0.0},
                                       double width = 1.0);
    /// Stacks single-channel fields into one multi-channel field.
    static AnalyticField stack(std::vector<AnalyticField> components);

    int channels() const { return static_cast<int>(components_.size()); }
    Complex eval(double x, double y, int c = 0) const;
    bool square_integrable() const;
    /// Analytic rotation of the field by angle phi. Supported for constants
    /// and origin-centered gaussian_poly channels.
    AnalyticField rotated(double phi) const;

private:
    enum class Kind { Constant, Monomial, GaussianPoly };
    struct Component {
        Kind kind;
        Complex const_value{};
        int mono_a = 0, mono_b = 0;
        PolyZZbar poly;
        Complex center{};
        double width = 1.0;
    };
    std::vector<Component> components_;
};

/// Cell-average discretization onto the grid with half_width floor(Lambda/lambda).
/// Cell averages use 5x5 tensor Gauss-Legendre quadrature, exact for
/// polynomial integrands up to degree 9 per axis.
Signal discretize(const AnalyticField& f, double lambda, double Lambda);

/// Integer grid shift: output node m carries the input value at m - k, and 0
/// where the source node falls outside the grid. Grid unchanged.
Signal translate(const Signal& s, int kx, int ky);

/// Exact 90-degree rotations: node k receives the value at rho^{-q} k where
/// rho(kx,ky) = (-ky,kx). q may be any integer; q=4 is the identity.
Signal rotate_quarter(const Signal& s, int q);

struct Norms {
    double l2 = 0.0;   // of the first argument
    double linf = 0.0; // of the first argument
    Complex inner{};   // conjugates the first argument
};

double l2_norm(const Signal& s);
double linf_norm(const Signal& s);
/// lambda^2-weighted scalar product, conjugating the first argument.
Complex inner(const Signal& s, const Signal& t);
Norms norms(const Signal& s, const Signal& t);

/// Centered restriction to a smaller half-width.
Signal crop(const Signal& s, int half_width);
/// Zero extension to a larger half-width.
Signal pad_to(const Signal& s, int half_width);
Signal channel_slice(const Signal& s, int c);
Signal as_complex(const Signal& s);
Signal conjugate(const Signal& s);

/// Max over nodes/channels of |a - b|; grids and channel counts must agree.
double max_abs_diff(const Signal& a, const Signal& b);

Signal random_signal(GridSpec grid, int channels, Field field, Rng& rng);

} // namespace equinet
