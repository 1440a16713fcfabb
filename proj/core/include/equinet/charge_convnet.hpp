#pragma once

#include <map>
#include <utility>
#include <vector>

#include "equinet/grid_signal.hpp"

namespace equinet {

enum class StackStage { Diff, Mult };

/// Collection of complex signals on a common grid, labeled by stage-specific
/// integer pairs: (degree s, charge mu) in the differentiation stage and
/// (charge mu, channel n) in the multiplication stage.
struct ChargedStack {
    StackStage stage = StackStage::Diff;
    std::map<std::pair<int, int>, Signal> entries;

    GridSpec grid() const;
    const Signal& at(int a, int b) const;
};

/// Weights of one multiplication layer. Indices are validated on insertion;
/// in particular a second-order entry must satisfy mu_out = mu1 + mu2 with
/// all charges within [-T_diff, T_diff].
class MultWeights {
public:
    /// n_in_per_mu[mu + t_diff] is the input channel count at charge mu.
    MultWeights(int t_diff, int n_out, std::vector<int> n_in_per_mu, bool final_layer);

    void set_w0(int n, Complex v);
    void set_w1(int mu, int n, int n1, Complex v);
    /// Explicit output charge; throws unless mu_out == mu1 + mu2.
    void set_w2(int mu1, int mu2, int mu_out, int n, int n1, int n2, Complex v);
    void set_w2(int mu1, int mu2, int n, int n1, int n2, Complex v);

    int t_diff() const { return t_diff_; }
    int n_out() const { return n_out_; }
    int n_in(int mu) const;
    bool final_layer() const { return final_; }

    const std::vector<Complex>& w0() const { return w0_; }
    const std::map<std::tuple<int, int, int>, Complex>& w1() const { return w1_; }
    const std::map<std::tuple<int, int, int, int, int>, Complex>& w2() const { return w2_; }

    static MultWeights random(int t_diff, int n_out, std::vector<int> n_in_per_mu,
                              bool final_layer, Rng& rng);

private:
    int t_diff_;
    int n_out_;
    std::vector<int> n_in_;
    bool final_;
    std::vector<Complex> w0_;                              // [n]
    std::map<std::tuple<int, int, int>, Complex> w1_;      // (mu, n, n1)
    std::map<std::tuple<int, int, int, int, int>, Complex> w2_; // (mu1, mu2, n, n1, n2)
};

/// Structural parameters and weights of the charge-conserving convnet. The
/// grid spacing can be varied with the weights held fixed (the
/// multi-resolution family); the input padding
/// Lambda' = Lambda + (T_diff + ceil(4/lambda^2)) lambda tracks it.
struct ChargeConvNetSpec {
    double lambda = 1.0;
    double Lambda = 0.0;
    int t_diff = 1;
    int t_mult = 1;
    int d_mult = 1;
    int d_v = 1;
    int d_u = 1;
    std::vector<MultWeights> layers; // size t_mult, last one final

    int out_half_width() const;
    int smooth_layers() const;
    int in_half_width() const { return out_half_width() + t_diff + smooth_layers(); }
    double lambda_prime() const { return Lambda + (t_diff + smooth_layers()) * lambda; }

    /// Input channel count of the first multiplication layer at charge mu:
    /// degrees s = |mu|..T_diff times d_v, including the parity-forced zeros.
    std::vector<int> diff_channel_layout() const;

    ChargeConvNetSpec with_lambda(double new_lambda) const;
    static ChargeConvNetSpec random(double lambda, double Lambda, int t_diff, int t_mult,
                                    int d_mult, int d_u, Rng& rng, int d_v = 1);
};

/// Multinomial coefficient T_diff! / (a! b! (T_diff-a-b)!).
double diff_multinomial(int t_diff, int a, int b);

/// Differentiation stage: entry (s, mu) carries
/// c_{a,b} (dz)^a (dzbar)^b s0 with a+b = s, a-b = mu, cropped to the common
/// output grid; labels with s and mu of opposite parity hold zero signals.
/// The input s0 is the already smoothed, complex-lifted signal.
ChargedStack diff_stage(const Signal& s0, int t_diff);

/// Reshapes a diff stack into the mult-stage layout (mu, n) with
/// n = (s - |mu|) d_v + channel.
ChargedStack diff_to_mult(const ChargedStack& diff, int t_diff);

/// One multiplication layer, pointwise per node:
/// Psi_{mu,n} = w0_n 1_{mu=0} + sum w1 Phi_{mu,n1}
///            + sum_{mu1+mu2=mu} w2 Phi_{mu1,n1} Phi_{mu2,n2};
/// the final layer keeps only real mu=0 components.
ChargedStack mult_layer(const ChargedStack& stack, const MultWeights& w);

/// Full chain: discretize -> smooth -> diff -> mult; the output is a real
/// d_u-channel signal on half-width floor(Lambda/lambda).
Signal forward(const ChargeConvNetSpec& spec, const AnalyticField& f);
/// Same, starting from an already discretized input on the padded grid.
Signal forward_signal(const ChargeConvNetSpec& spec, const Signal& input);

/// Scaling limit: per point x, the diff stack is replaced by
/// c_{a,b} (f * Psi_{a,b})(x) and the identical mult layers run pointwise.
std::vector<std::vector<double>> scaling_limit_eval(const ChargeConvNetSpec& spec,
                                                    const AnalyticField& f,
                                                    const std::vector<std::pair<double, double>>& points);

/// Multiplies each entry of charge mu by exp(-i mu phi).
ChargedStack phased(const ChargedStack& stack, double phi);

/// Max node-wise deviation |L(e^{-i mu phi} stack) - e^{-i mu phi} L(stack)|
/// across the spec's non-final multiplication layers.
double phase_equivariance_check(const ChargeConvNetSpec& spec, const ChargedStack& stack,
                                double phi);

/// Random mult-stage stack matching the first-layer input layout of spec.
ChargedStack random_mult_stack(const ChargeConvNetSpec& spec, GridSpec grid, Rng& rng);

/// Ridge fit of the final multiplication layer over the fixed earlier layers.
/// The final layer is linear in its complex weights, so with Re(.) applied the
/// fit is an ordinary real ridge regression per output channel; rows are the
/// output-grid nodes of every input/target pair. Targets must be real
/// d_u-channel signals on the spec's output grid. Returns the spec with the
/// fitted final layer installed.
ChargeConvNetSpec fit_final_mult_layer(const ChargeConvNetSpec& spec,
                                       const std::vector<AnalyticField>& inputs,
                                       const std::vector<Signal>& targets, double reg);

} // namespace equinet
