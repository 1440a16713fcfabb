#include "equinet/convnets.hpp"

#include <cmath>
#include <stdexcept>

namespace equinet {

namespace {

void require(bool cond, const std::string& msg) {
    if (!cond) throw std::invalid_argument(msg);
}

std::size_t conv_weight_count(int d_out, int rf_side, int d_in) {
    return static_cast<std::size_t>(d_out) * rf_side * rf_side * d_in;
}

// One convolution layer with optional stride; reads gamma*stride + theta.
Signal conv_layer(const Signal& in, const std::vector<double>& w, const std::vector<double>& h,
                  int l_rf, int d_out, int out_half_width, int stride, Activation act) {
    int S = 2 * l_rf + 1;
    int d_in = in.channels();
    GridSpec g{in.spacing(), out_half_width};
    return Signal::build(g, d_out, Field::Real, [&](int kx, int ky, int n) {
        double acc = h[static_cast<std::size_t>(n)];
        for (int tx = -l_rf; tx <= l_rf; ++tx)
            for (int ty = -l_rf; ty <= l_rf; ++ty) {
                int theta = (tx + l_rf) * S + (ty + l_rf);
                for (int k = 0; k < d_in; ++k) {
                    double wv = w[(static_cast<std::size_t>(n) * S * S + theta) * d_in + k];
                    acc += wv * in.at(stride * kx + tx, stride * ky + ty, k).real();
                }
            }
        return Complex{activate(act, acc), 0.0};
    });
}

Signal affine_layer(const Signal& in, const std::vector<double>& w, const std::vector<double>& h,
                    int d_out) {
    int d_in = in.channels();
    return Signal::build(in.grid(), d_out, Field::Real, [&](int kx, int ky, int n) {
        double acc = h[static_cast<std::size_t>(n)];
        for (int k = 0; k < d_in; ++k)
            acc += w[static_cast<std::size_t>(n) * d_in + k] * in.at(kx, ky, k).real();
        return Complex{acc, 0.0};
    });
}

void fill_uniform_scaled(std::vector<double>& v, double scale, Rng& rng) {
    for (double& x : v) x = rng.pm1() * scale;
}

} // namespace

int BasicConvNetSpec::out_half_width() const {
    return static_cast<int>(std::floor(Lambda / lambda + 1e-12));
}

BasicConvNetSpec BasicConvNetSpec::random(double lambda, double Lambda, int l_rf, int depth,
                                          std::vector<int> dims, Rng& rng) {
    require(depth >= 1, "BasicConvNetSpec: depth must be positive");
    require(static_cast<int>(dims.size()) == depth + 1,
            "BasicConvNetSpec: dims must have T+1 entries");
    BasicConvNetSpec s;
    s.lambda = lambda;
    s.Lambda = Lambda;
    s.l_rf = l_rf;
    s.depth = depth;
    s.dims = std::move(dims);
    int S = s.rf_side();
    for (int t = 0; t + 1 < depth; ++t) {
        int d_in = s.dims[static_cast<std::size_t>(t)];
        int d_out = s.dims[static_cast<std::size_t>(t) + 1];
        std::vector<double> w(conv_weight_count(d_out, S, d_in));
        std::vector<double> h(static_cast<std::size_t>(d_out));
        fill_uniform_scaled(w, 1.0 / (S * S * d_in), rng);
        fill_uniform_scaled(h, 1.0, rng);
        s.w.push_back(std::move(w));
        s.h.push_back(std::move(h));
    }
    int d_t = s.dims[static_cast<std::size_t>(depth - 1)];
    int d_u = s.dims[static_cast<std::size_t>(depth)];
    s.w_final.resize(static_cast<std::size_t>(d_u) * d_t);
    s.h_final.resize(static_cast<std::size_t>(d_u));
    fill_uniform_scaled(s.w_final, 1.0 / d_t, rng);
    fill_uniform_scaled(s.h_final, 1.0, rng);
    return s;
}

Signal basic_forward(const BasicConvNetSpec& spec, const Signal& input) {
    SpecDiagnostics diag = validate_spec(spec);
    if (!diag.ok) throw std::invalid_argument("basic_forward: invalid spec: " + diag.issues[0]);
    require(input.half_width() == spec.in_half_width(),
            "basic_forward: input half_width must equal floor(Lambda/lambda) + (T-1) L_rf");
    require(input.channels() == spec.dims[0], "basic_forward: input channel mismatch");
    Signal cur = input;
    for (int t = 0; t + 1 < spec.depth; ++t)
        cur = conv_layer(cur, spec.w[static_cast<std::size_t>(t)],
                         spec.h[static_cast<std::size_t>(t)], spec.l_rf,
                         spec.dims[static_cast<std::size_t>(t) + 1],
                         cur.half_width() - spec.l_rf, 1, spec.act);
    return affine_layer(cur, spec.w_final, spec.h_final,
                        spec.dims[static_cast<std::size_t>(spec.depth)]);
}

Signal basic_forward(const BasicConvNetSpec& spec, const AnalyticField& f) {
    Signal in = discretize(f, spec.lambda, (spec.in_half_width() + 0.5) * spec.lambda);
    require(in.field() == Field::Real, "basic_forward: field input must be real-valued");
    return basic_forward(spec, in);
}

int DownsampledConvNetSpec::range_at(int t) const {
    if (t >= depth) return 0;
    long acc = 0, pw = 1;
    for (int i = 0; i < depth - t; ++i) {
        acc += pw;
        pw *= stride;
    }
    return static_cast<int>(l_rf * acc);
}

DownsampledConvNetSpec DownsampledConvNetSpec::random(double lambda, int l_rf, int stride,
                                                      int depth, std::vector<int> dims,
                                                      Rng& rng) {
    require(stride >= 1, "DownsampledConvNetSpec: stride must be positive");
    if (stride > 2 * l_rf + 1)
        throw std::invalid_argument(
            "DownsampledConvNetSpec: stride " + std::to_string(stride) +
            " exceeds the receptive field size 2*L_rf+1 = " + std::to_string(2 * l_rf + 1));
    require(depth >= 1, "DownsampledConvNetSpec: depth must be positive");
    require(static_cast<int>(dims.size()) == depth + 1,
            "DownsampledConvNetSpec: dims must have T+1 entries");
    DownsampledConvNetSpec s;
    s.lambda = lambda;
    s.l_rf = l_rf;
    s.stride = stride;
    s.depth = depth;
    s.dims = std::move(dims);
    int S = s.rf_side();
    for (int t = 0; t + 1 < depth; ++t) {
        int d_in = s.dims[static_cast<std::size_t>(t)];
        int d_out = s.dims[static_cast<std::size_t>(t) + 1];
        std::vector<double> w(conv_weight_count(d_out, S, d_in));
        std::vector<double> h(static_cast<std::size_t>(d_out));
        fill_uniform_scaled(w, 1.0 / (S * S * d_in), rng);
        fill_uniform_scaled(h, 1.0, rng);
        s.w.push_back(std::move(w));
        s.h.push_back(std::move(h));
    }
    int d_t = s.dims[static_cast<std::size_t>(depth - 1)];
    int d_u = s.dims[static_cast<std::size_t>(depth)];
    s.w_final.resize(static_cast<std::size_t>(d_u) * d_t);
    s.h_final.resize(static_cast<std::size_t>(d_u));
    fill_uniform_scaled(s.w_final, 1.0 / d_t, rng);
    fill_uniform_scaled(s.h_final, 1.0, rng);
    return s;
}

std::vector<double> downsampled_forward(const DownsampledConvNetSpec& spec, const Signal& input) {
    SpecDiagnostics diag = validate_spec(spec);
    if (!diag.ok)
        throw std::invalid_argument("downsampled_forward: invalid spec: " + diag.issues[0]);
    require(input.half_width() == spec.in_half_width(),
            "downsampled_forward: input half_width must equal L_{1,T}");
    require(input.channels() == spec.dims[0], "downsampled_forward: input channel mismatch");
    Signal cur = input;
    for (int t = 0; t + 1 < spec.depth; ++t)
        cur = conv_layer(cur, spec.w[static_cast<std::size_t>(t)],
                         spec.h[static_cast<std::size_t>(t)], spec.l_rf,
                         spec.dims[static_cast<std::size_t>(t) + 1], spec.range_at(t + 2),
                         spec.stride, spec.act);
    int d_u = spec.dims[static_cast<std::size_t>(spec.depth)];
    int d_t = cur.channels();
    std::vector<double> out(static_cast<std::size_t>(d_u));
    for (int n = 0; n < d_u; ++n) {
        double acc = spec.h_final[static_cast<std::size_t>(n)];
        for (int k = 0; k < d_t; ++k)
            acc += spec.w_final[static_cast<std::size_t>(n) * d_t + k] * cur.at(0, 0, k).real();
        out[static_cast<std::size_t>(n)] = acc;
    }
    return out;
}

std::vector<double> downsampled_forward(const DownsampledConvNetSpec& spec,
                                        const AnalyticField& f) {
    Signal in = discretize(f, spec.lambda, (spec.in_half_width() + 0.5) * spec.lambda);
    return downsampled_forward(spec, in);
}

SpecDiagnostics validate_spec(const BasicConvNetSpec& spec) {
    SpecDiagnostics d;
    auto issue = [&](const std::string& s) {
        d.ok = false;
        d.issues.push_back(s);
    };
    if (!(spec.lambda > 0.0)) issue("lambda must be positive");
    if (!(spec.Lambda >= 0.0)) issue("Lambda must be nonnegative");
    if (spec.l_rf < 1) issue("l_rf must be positive");
    if (spec.depth < 1) issue("depth must be positive");
    if (static_cast<int>(spec.dims.size()) != spec.depth + 1) {
        issue("dims must have T+1 entries");
        return d;
    }
    for (int v : spec.dims)
        if (v < 1) issue("feature dims must be positive");
    if (static_cast<int>(spec.w.size()) != spec.depth - 1 ||
        static_cast<int>(spec.h.size()) != spec.depth - 1)
        issue("conv layer count must be T-1");
    int S = spec.rf_side();
    for (std::size_t t = 0; t < spec.w.size() && d.ok; ++t) {
        int d_in = spec.dims[t];
        int d_out = spec.dims[t + 1];
        if (spec.w[t].size() != conv_weight_count(d_out, S, d_in))
            issue("weight tensor shape mismatch at layer " + std::to_string(t + 1) +
                  " (want d_{t+1} x (2L_rf+1)^2 x d_t)");
        if (spec.h[t].size() != static_cast<std::size_t>(d_out))
            issue("bias length mismatch at layer " + std::to_string(t + 1));
    }
    if (d.ok) {
        int d_t = spec.dims[static_cast<std::size_t>(spec.depth - 1)];
        int d_u = spec.dims[static_cast<std::size_t>(spec.depth)];
        if (spec.w_final.size() != static_cast<std::size_t>(d_u) * d_t)
            issue("final layer weight shape mismatch (want d_U x d_T)");
        if (spec.h_final.size() != static_cast<std::size_t>(d_u))
            issue("final layer bias length mismatch");
    }
    if (d.ok)
        for (int t = 1; t <= spec.depth + 1; ++t)
            d.schedule.push_back(spec.out_half_width() +
                                 std::max(0, spec.depth - t) * spec.l_rf);
    return d;
}

SpecDiagnostics validate_spec(const DownsampledConvNetSpec& spec) {
    SpecDiagnostics d;
    auto issue = [&](const std::string& s) {
        d.ok = false;
        d.issues.push_back(s);
    };
    if (!(spec.lambda > 0.0)) issue("lambda must be positive");
    if (spec.l_rf < 1) issue("l_rf must be positive");
    if (spec.stride < 1) issue("stride must be positive");
    if (spec.stride > 2 * spec.l_rf + 1)
        issue("stride exceeds the receptive field size 2*L_rf+1");
    if (spec.depth < 1) issue("depth must be positive");
    if (static_cast<int>(spec.dims.size()) != spec.depth + 1) {
        issue("dims must have T+1 entries");
        return d;
    }
    for (int v : spec.dims)
        if (v < 1) issue("feature dims must be positive");
    if (static_cast<int>(spec.w.size()) != spec.depth - 1 ||
        static_cast<int>(spec.h.size()) != spec.depth - 1)
        issue("conv layer count must be T-1");
    int S = spec.rf_side();
    for (std::size_t t = 0; t < spec.w.size() && d.ok; ++t) {
        if (spec.w[t].size() != conv_weight_count(spec.dims[t + 1], S, spec.dims[t]))
            issue("weight tensor shape mismatch at layer " + std::to_string(t + 1));
        if (spec.h[t].size() != static_cast<std::size_t>(spec.dims[t + 1]))
            issue("bias length mismatch at layer " + std::to_string(t + 1));
    }
    // range recurrence L_{t,T} = s L_{t+1,T} + L_rf for t < T
    for (int t = 1; t + 1 < spec.depth && d.ok; ++t)
        if (spec.range_at(t) != spec.stride * spec.range_at(t + 1) + spec.l_rf)
            issue("range schedule violates L_{t,T} = s L_{t+1,T} + L_rf");
    if (d.ok)
        for (int t = 1; t <= spec.depth + 1; ++t) d.schedule.push_back(spec.range_at(t));
    return d;
}

} // namespace equinet
