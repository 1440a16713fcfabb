#pragma once

#include <string>
#include <vector>

#include "equinet/grid_signal.hpp"
#include "equinet/invariant_nets.hpp"

namespace equinet {

/// Basic (no-pooling) convnet: T-1 local convolution layers with activation,
/// each shrinking the grid by L_rf, followed by a pointwise affine layer.
/// dims holds d_1..d_{T+1}; conv weights are indexed w[t][n][theta][k] with
/// theta running over the (2 L_rf + 1)^2 receptive field.
struct BasicConvNetSpec {
    double lambda = 1.0;
    double Lambda = 0.0;
    int l_rf = 1;
    int depth = 1;         // T
    std::vector<int> dims; // size T+1
    Activation act = Activation::Tanh;

    // conv layers t = 1..T-1, flattened as (n * S^2 + theta) * d_t + k
    std::vector<std::vector<double>> w;
    std::vector<std::vector<double>> h;
    // final 1x1 affine layer
    std::vector<double> w_final; // d_U x d_T row-major
    std::vector<double> h_final; // d_U

    int rf_side() const { return 2 * l_rf + 1; }
    int out_half_width() const;
    int in_half_width() const { return out_half_width() + (depth - 1) * l_rf; }

    /// Weights uniform on [-1,1] divided by fan-in, deterministic in rng.
    static BasicConvNetSpec random(double lambda, double Lambda, int l_rf, int depth,
                                   std::vector<int> dims, Rng& rng);
};

/// Downsampled convnet: each layer reads the stride-s neighborhood
/// s*gamma + theta; the output is the affine image of the single surviving
/// node. Construction rejects strides larger than the receptive field side.
struct DownsampledConvNetSpec {
    double lambda = 1.0;
    int l_rf = 1;
    int stride = 1;
    int depth = 1;
    std::vector<int> dims;
    Activation act = Activation::Tanh;

    std::vector<std::vector<double>> w;
    std::vector<std::vector<double>> h;
    std::vector<double> w_final;
    std::vector<double> h_final;

    int rf_side() const { return 2 * l_rf + 1; }
    /// L_{t,T} = L_rf (1 + s + ... + s^{T-t-1}) for t < T, else 0.
    int range_at(int t) const;
    int in_half_width() const { return range_at(1); }

    static DownsampledConvNetSpec random(double lambda, int l_rf, int stride, int depth,
                                         std::vector<int> dims, Rng& rng);
};

Signal basic_forward(const BasicConvNetSpec& spec, const Signal& input);
Signal basic_forward(const BasicConvNetSpec& spec, const AnalyticField& f);

std::vector<double> downsampled_forward(const DownsampledConvNetSpec& spec, const Signal& input);
std::vector<double> downsampled_forward(const DownsampledConvNetSpec& spec,
                                        const AnalyticField& f);

struct SpecDiagnostics {
    bool ok = true;
    std::vector<std::string> issues;
    std::vector<int> schedule; // per-layer grid half-widths, t = 1..T+1
};

SpecDiagnostics validate_spec(const BasicConvNetSpec& spec);
SpecDiagnostics validate_spec(const DownsampledConvNetSpec& spec);

} // namespace equinet
