#pragma once

#include "equinet/grid_signal.hpp"

namespace equinet {

enum class StencilKind { Dz, Dzbar, Laplace, Smooth };

/// Number of smoothing layers paired with spacing lambda: ceil(4 / lambda^2).
int smoothing_chain_length(double lambda);

/// Applies one 5-point stencil. The output grid shrinks by one node per side
/// (no padding). Dz and Dzbar produce complex output; Laplace and Smooth
/// preserve the input field.
///
/// Dz      f = (1/4L) (f(x+L,y) - f(x-L,y) - i (f(x,y+L) - f(x,y-L)))
/// Dzbar   f = (1/4L) (f(x+L,y) - f(x-L,y) + i (f(x,y+L) - f(x,y-L)))
/// Laplace f = (f(x+L,y) + f(x-L,y) + f(x,y+L) + f(x,y-L) - 4 f(x,y)) / L^2
/// Smooth  f = (1 + L^2/8 Laplace) f
Signal stencil_apply(StencilKind kind, const Signal& s);

/// ceil(4/lambda^2) applications of the smoothing stencil.
Signal smooth_chain(const Signal& s);

/// Smoothing chain followed by a applications of Dz and b of Dzbar, in that
/// fixed order (the stencils commute).
Signal discrete_deriv_chain(const Signal& s, int a, int b);

/// A bivariate polynomial in (z, zbar) times the unit Gaussian
/// (1/2pi) exp(-|x|^2/2).
struct PolyGaussian {
    PolyZZbar poly;
    Complex eval(double x, double y) const;
};

/// Psi_{a,b} = dz^a dzbar^b of the unit Gaussian, computed by the symbolic
/// recursions dz: p -> dz p - (zbar/2) p and dzbar: p -> dzbar p - (z/2) p.
/// Guarded to a, b <= 8.
PolyGaussian gaussian_deriv_kernel(int a, int b);

/// Continuum convolution (f * Psi_{a,b})(x) evaluated by fixed-grid midpoint
/// quadrature (step 0.05, truncation radius 8 in the convolution variable).
Complex continuum_conv(const AnalyticField& f, int a, int b, double x, double y,
                       int channel = 0);

/// Discrete Fourier transform F(p) = (lambda^2 / 2pi) sum_g s(g) e^{-i p.g},
/// sampled on the uniform frequency grid {j * dp : |j|_inf <= L} with
/// dp = 2pi / ((2L+1) lambda). Unitary between the lambda^2-weighted spatial
/// norm and the dp^2-weighted frequency norm.
Signal dft2(const Signal& s);

/// Inverse of dft2; spatial_lambda fixes the output grid spacing.
Signal idft2(const Signal& freq, double spatial_lambda);

/// Closed-form spectral symbol on the fundamental domain [-pi/L, pi/L]^2:
/// a product of powers of the Dz, Dzbar and Laplace atoms and of the
/// smoothing factor (1 + L^2/8 Laplace-symbol).
struct SpectralSymbol {
    double lambda = 1.0;
    int dz_pow = 0;
    int dzbar_pow = 0;
    int laplace_pow = 0;
    int smooth_pow = 0;

    static SpectralSymbol atom(StencilKind kind, double lambda);
    /// Symbol of the composed operator: dz^a dzbar^b smooth^{ceil(4/lambda^2)}.
    static SpectralSymbol composed(int a, int b, double lambda);

    Complex eval(double px, double py) const;
};

Complex fourier_symbol(StencilKind kind, double lambda, double px, double py);
Complex composed_symbol(int a, int b, double lambda, double px, double py);

/// Spatial kernel of the composed operator on the (2L+1)^2 grid:
/// (1/2pi) F^{-1} of the composed symbol sampled on the matching frequency
/// grid. Verifies that the kernel mass outside the grid is below 1e-8 and
/// throws otherwise, advising a larger L.
Signal discrete_kernel(int a, int b, double lambda, int L);

struct KernelGapResult {
    double gap = 0.0;       // L2 distance between discrete and continuum kernel
    double kernel_l2 = 0.0; // L2 norm of the discrete kernel
    double mass_dev = 0.0;  // |lambda^2 sum_g k(g) - (1 if a=b=0 else 0)|
    int grid_half_width = 0;
};

/// L2 distance between the discrete kernel (a step function on cells) and the
/// continuum Gaussian-derivative kernel discretized by cell averages on the
/// same grid. Valid for lambda in (0, 1]; the grid is sized to pass the
/// truncation check.
KernelGapResult kernel_gap_result(int a, int b, double lambda);
double kernel_gap(int a, int b, double lambda);

/// Uniform-in-lambda upper bound for the squared L2 norm of the discrete
/// kernels: (1/4pi^2) integral of ((|px|+|py|)/2)^{2(a+b)} e^{-4(px^2+py^2)/pi^2}.
double kernel_l2_squared_bound(int a, int b);

} // namespace equinet
