#include "equinet/charge_convnet.hpp"

#include <cmath>
#include <stdexcept>

#include "equinet/invariant_nets.hpp"
#include "equinet/local_ops.hpp"

namespace equinet {

namespace {

void require(bool cond, const std::string& msg) {
    if (!cond) throw std::invalid_argument(msg);
}

} // namespace

GridSpec ChargedStack::grid() const {
    require(!entries.empty(), "ChargedStack: empty stack");
    GridSpec g = entries.begin()->second.grid();
    for (const auto& [label, sig] : entries)
        require(sig.grid() == g, "ChargedStack: entries on different grids");
    return g;
}

const Signal& ChargedStack::at(int a, int b) const {
    auto it = entries.find({a, b});
    require(it != entries.end(), "ChargedStack: missing label");
    return it->second;
}

MultWeights::MultWeights(int t_diff, int n_out, std::vector<int> n_in_per_mu, bool final_layer)
    : t_diff_(t_diff), n_out_(n_out), n_in_(std::move(n_in_per_mu)), final_(final_layer) {
    require(t_diff_ >= 0, "MultWeights: t_diff must be nonnegative");
    require(n_out_ >= 1, "MultWeights: n_out must be positive");
    require(static_cast<int>(n_in_.size()) == 2 * t_diff_ + 1,
            "MultWeights: n_in_per_mu must have 2*T_diff+1 entries");
    w0_.assign(static_cast<std::size_t>(n_out_), Complex{0.0, 0.0});
}

int MultWeights::n_in(int mu) const {
    require(std::abs(mu) <= t_diff_, "MultWeights: charge out of range");
    return n_in_[static_cast<std::size_t>(mu + t_diff_)];
}

void MultWeights::set_w0(int n, Complex v) {
    require(n >= 0 && n < n_out_, "MultWeights::set_w0: channel out of range");
    w0_[static_cast<std::size_t>(n)] = v;
}

void MultWeights::set_w1(int mu, int n, int n1, Complex v) {
    require(std::abs(mu) <= t_diff_, "MultWeights::set_w1: |mu| exceeds T_diff");
    if (final_) require(mu == 0, "MultWeights::set_w1: final layer carries only mu=0");
    require(n >= 0 && n < n_out_, "MultWeights::set_w1: output channel out of range");
    require(n1 >= 0 && n1 < n_in(mu), "MultWeights::set_w1: input channel out of range");
    w1_[{mu, n, n1}] = v;
}

void MultWeights::set_w2(int mu1, int mu2, int mu_out, int n, int n1, int n2, Complex v) {
    if (mu_out != mu1 + mu2)
        throw std::invalid_argument(
            "MultWeights::set_w2: charge conservation violated (mu_out != mu1 + mu2)");
    set_w2(mu1, mu2, n, n1, n2, v);
}

void MultWeights::set_w2(int mu1, int mu2, int n, int n1, int n2, Complex v) {
    require(std::abs(mu1) <= t_diff_ && std::abs(mu2) <= t_diff_,
            "MultWeights::set_w2: |mu1|, |mu2| must not exceed T_diff");
    int mu = mu1 + mu2;
    if (std::abs(mu) > t_diff_)
        throw std::invalid_argument(
            "MultWeights::set_w2: output charge mu1 + mu2 exceeds T_diff");
    if (final_) require(mu == 0, "MultWeights::set_w2: final layer carries only mu=0");
    require(n >= 0 && n < n_out_, "MultWeights::set_w2: output channel out of range");
    require(n1 >= 0 && n1 < n_in(mu1), "MultWeights::set_w2: n1 out of range");
    require(n2 >= 0 && n2 < n_in(mu2), "MultWeights::set_w2: n2 out of range");
    w2_[{mu1, mu2, n, n1, n2}] = v;
}

MultWeights MultWeights::random(int t_diff, int n_out, std::vector<int> n_in_per_mu,
                                bool final_layer, Rng& rng) {
    MultWeights w(t_diff, n_out, n_in_per_mu, final_layer);
    int max_in = 1;
    for (int v : n_in_per_mu) max_in = std::max(max_in, v);
    double s1 = 1.0 / max_in;
    double s2 = 1.0 / (static_cast<double>(max_in) * max_in * (2 * t_diff + 1));
    for (int n = 0; n < n_out; ++n) w.set_w0(n, 0.25 * rng.complex_pm1());
    for (int mu = -t_diff; mu <= t_diff; ++mu) {
        if (final_layer && mu != 0) continue;
        for (int n = 0; n < n_out; ++n)
            for (int n1 = 0; n1 < w.n_in(mu); ++n1) w.set_w1(mu, n, n1, s1 * rng.complex_pm1());
    }
    for (int mu1 = -t_diff; mu1 <= t_diff; ++mu1)
        for (int mu2 = -t_diff; mu2 <= t_diff; ++mu2) {
            int mu = mu1 + mu2;
            if (std::abs(mu) > t_diff) continue;
            if (final_layer && mu != 0) continue;
            for (int n = 0; n < n_out; ++n)
                for (int n1 = 0; n1 < w.n_in(mu1); ++n1)
                    for (int n2 = 0; n2 < w.n_in(mu2); ++n2)
                        w.set_w2(mu1, mu2, n, n1, n2, s2 * rng.complex_pm1());
        }
    return w;
}

int ChargeConvNetSpec::out_half_width() const {
    return static_cast<int>(std::floor(Lambda / lambda + 1e-12));
}

int ChargeConvNetSpec::smooth_layers() const { return smoothing_chain_length(lambda); }

std::vector<int> ChargeConvNetSpec::diff_channel_layout() const {
    std::vector<int> n_in(static_cast<std::size_t>(2 * t_diff + 1));
    for (int mu = -t_diff; mu <= t_diff; ++mu)
        n_in[static_cast<std::size_t>(mu + t_diff)] = (t_diff - std::abs(mu) + 1) * d_v;
    return n_in;
}

ChargeConvNetSpec ChargeConvNetSpec::with_lambda(double new_lambda) const {
    ChargeConvNetSpec s = *this;
    s.lambda = new_lambda;
    return s;
}

ChargeConvNetSpec ChargeConvNetSpec::random(double lambda, double Lambda, int t_diff, int t_mult,
                                            int d_mult, int d_u, Rng& rng, int d_v) {
    require(t_mult >= 1, "ChargeConvNetSpec: t_mult must be positive");
    ChargeConvNetSpec s;
    s.lambda = lambda;
    s.Lambda = Lambda;
    s.t_diff = t_diff;
    s.t_mult = t_mult;
    s.d_mult = d_mult;
    s.d_v = d_v;
    s.d_u = d_u;
    std::vector<int> uniform(static_cast<std::size_t>(2 * t_diff + 1), d_mult);
    for (int t = 1; t <= t_mult; ++t) {
        bool final_layer = (t == t_mult);
        std::vector<int> n_in = (t == 1) ? s.diff_channel_layout() : uniform;
        int n_out = final_layer ? d_u : d_mult;
        s.layers.push_back(MultWeights::random(t_diff, n_out, n_in, final_layer, rng));
    }
    return s;
}

double diff_multinomial(int t_diff, int a, int b) {
    double num = 1.0;
    for (int i = 2; i <= t_diff; ++i) num *= i;
    auto fact = [](int n) {
        double f = 1.0;
        for (int i = 2; i <= n; ++i) f *= i;
        return f;
    };
    return num / (fact(a) * fact(b) * fact(t_diff - a - b));
}

ChargedStack diff_stage(const Signal& s0, int t_diff) {
    require(t_diff >= 0, "diff_stage: t_diff must be nonnegative");
    require(s0.half_width() >= t_diff, "diff_stage: grid too small for T_diff shrinks");
    int L_out = s0.half_width() - t_diff;
    ChargedStack out;
    out.stage = StackStage::Diff;
    for (int s = 0; s <= t_diff; ++s)
        for (int mu = -s; mu <= s; ++mu) {
            if ((s - mu) % 2 != 0) {
                // opposite parity: the label is materialized with a zero signal
                out.entries.emplace(std::make_pair(s, mu),
                                    Signal(GridSpec{s0.spacing(), L_out}, s0.channels(),
                                           Field::Complex));
                continue;
            }
            int a = (s + mu) / 2;
            int b = (s - mu) / 2;
            Signal cur = s0;
            for (int i = 0; i < a; ++i) cur = stencil_apply(StencilKind::Dz, cur);
            for (int i = 0; i < b; ++i) cur = stencil_apply(StencilKind::Dzbar, cur);
            cur = crop(as_complex(cur), L_out);
            double coeff = diff_multinomial(t_diff, a, b);
            Signal scaled = Signal::build(cur.grid(), cur.channels(), Field::Complex,
                                          [&](int kx, int ky, int c) {
                                              return coeff * cur.at(kx, ky, c);
                                          });
            out.entries.emplace(std::make_pair(s, mu), std::move(scaled));
        }
    return out;
}

ChargedStack diff_to_mult(const ChargedStack& diff, int t_diff) {
    require(diff.stage == StackStage::Diff, "diff_to_mult: expected a diff stack");
    diff.grid(); // validates the shared grid
    int d_v = diff.entries.begin()->second.channels();
    ChargedStack out;
    out.stage = StackStage::Mult;
    for (int mu = -t_diff; mu <= t_diff; ++mu) {
        int n = 0;
        for (int s = std::abs(mu); s <= t_diff; ++s)
            for (int c = 0; c < d_v; ++c, ++n) {
                const Signal& src = diff.at(s, mu);
                out.entries.emplace(std::make_pair(mu, n), channel_slice(src, c));
            }
    }
    return out;
}

ChargedStack mult_layer(const ChargedStack& stack, const MultWeights& w) {
    require(stack.stage == StackStage::Mult, "mult_layer: expected a mult stack");
    GridSpec g = stack.grid();
    int t_diff = w.t_diff();
    for (const auto& [label, sig] : stack.entries) {
        require(std::abs(label.first) <= t_diff, "mult_layer: stack charge exceeds T_diff");
        require(label.second >= 0 && label.second < w.n_in(label.first),
                "mult_layer: stack channel exceeds the layer input layout");
        (void)sig;
    }

    std::size_t nodes = g.node_count();
    ChargedStack out;
    out.stage = StackStage::Mult;
    auto zero_values = [&]() { return std::vector<Complex>(nodes, Complex{0.0, 0.0}); };

    std::map<std::pair<int, int>, std::vector<Complex>> acc;
    for (int mu = -t_diff; mu <= t_diff; ++mu) {
        if (w.final_layer() && mu != 0) continue;
        for (int n = 0; n < w.n_out(); ++n) {
            auto vals = zero_values();
            if (mu == 0) {
                Complex w0 = w.w0()[static_cast<std::size_t>(n)];
                for (auto& v : vals) v = w0;
            }
            acc.emplace(std::make_pair(mu, n), std::move(vals));
        }
    }
    for (const auto& [key, wv] : w.w1()) {
        auto [mu, n, n1] = key;
        auto it = acc.find({mu, n});
        if (it == acc.end()) continue;
        const Signal& src = stack.at(mu, n1);
        const auto& sv = src.values();
        auto& dst = it->second;
        for (std::size_t i = 0; i < nodes; ++i) dst[i] += wv * sv[i];
    }
    for (const auto& [key, wv] : w.w2()) {
        auto [mu1, mu2, n, n1, n2] = key;
        auto it = acc.find({mu1 + mu2, n});
        if (it == acc.end()) continue;
        const auto& sv1 = stack.at(mu1, n1).values();
        const auto& sv2 = stack.at(mu2, n2).values();
        auto& dst = it->second;
        for (std::size_t i = 0; i < nodes; ++i) dst[i] += wv * (sv1[i] * sv2[i]);
    }
    for (auto& [label, vals] : acc) {
        if (w.final_layer())
            for (auto& v : vals) v = Complex{v.real(), 0.0};
        out.entries.emplace(label, Signal(g, 1,
                                          w.final_layer() ? Field::Real : Field::Complex,
                                          std::move(vals)));
    }
    return out;
}

Signal forward_signal(const ChargeConvNetSpec& spec, const Signal& input) {
    require(input.half_width() == spec.in_half_width(),
            "forward: input half_width must equal floor(Lambda/lambda) + T_diff + smoothing");
    require(input.channels() == spec.d_v, "forward: input channel mismatch");
    require(static_cast<int>(spec.layers.size()) == spec.t_mult,
            "forward: layer count must equal t_mult");
    Signal cur = smooth_chain(as_complex(input));
    ChargedStack stack = diff_to_mult(diff_stage(cur, spec.t_diff), spec.t_diff);
    for (const MultWeights& w : spec.layers) stack = mult_layer(stack, w);

    GridSpec g = stack.grid();
    return Signal::build(g, spec.d_u, Field::Real, [&](int kx, int ky, int n) {
        return stack.at(0, n).at(kx, ky, 0);
    });
}

Signal forward(const ChargeConvNetSpec& spec, const AnalyticField& f) {
    Signal in = discretize(f, spec.lambda, (spec.in_half_width() + 0.5) * spec.lambda);
    return forward_signal(spec, in);
}

std::vector<std::vector<double>> scaling_limit_eval(
    const ChargeConvNetSpec& spec, const AnalyticField& f,
    const std::vector<std::pair<double, double>>& points) {
    std::vector<std::vector<double>> out;
    GridSpec point_grid{spec.lambda, 0};
    for (const auto& [px, py] : points) {
        ChargedStack stack;
        stack.stage = StackStage::Mult;
        for (int mu = -spec.t_diff; mu <= spec.t_diff; ++mu) {
            int n = 0;
            for (int s = std::abs(mu); s <= spec.t_diff; ++s)
                for (int c = 0; c < spec.d_v; ++c, ++n) {
                    Complex v{0.0, 0.0};
                    if ((s - mu) % 2 == 0) {
                        int a = (s + mu) / 2;
                        int b = (s - mu) / 2;
                        v = diff_multinomial(spec.t_diff, a, b) *
                            continuum_conv(f, a, b, px, py, c);
                    }
                    stack.entries.emplace(
                        std::make_pair(mu, n),
                        Signal(point_grid, 1, Field::Complex, {v}));
                }
        }
        for (const MultWeights& w : spec.layers) stack = mult_layer(stack, w);
        std::vector<double> vals(static_cast<std::size_t>(spec.d_u));
        for (int n = 0; n < spec.d_u; ++n) vals[static_cast<std::size_t>(n)] =
            stack.at(0, n).at(0, 0, 0).real();
        out.push_back(std::move(vals));
    }
    return out;
}

ChargedStack phased(const ChargedStack& stack, double phi) {
    require(stack.stage == StackStage::Mult, "phased: expected a mult stack");
    ChargedStack out;
    out.stage = StackStage::Mult;
    for (const auto& [label, sig] : stack.entries) {
        // reduce before trig so that full-turn phases come out as exactly 1
        double ang = std::fmod(-label.first * phi, 2.0 * M_PI);
        Complex ph{std::cos(ang), std::sin(ang)};
        out.entries.emplace(label, Signal::build(sig.grid(), sig.channels(), Field::Complex,
                                                 [&](int kx, int ky, int c) {
                                                     return ph * sig.at(kx, ky, c);
                                                 }));
    }
    return out;
}

double phase_equivariance_check(const ChargeConvNetSpec& spec, const ChargedStack& stack,
                                double phi) {
    double dev = 0.0;
    ChargedStack cur = stack;
    for (int t = 0; t + 1 < static_cast<int>(spec.layers.size()); ++t) {
        const MultWeights& w = spec.layers[static_cast<std::size_t>(t)];
        ChargedStack lhs = mult_layer(phased(cur, phi), w);
        ChargedStack next = mult_layer(cur, w);
        ChargedStack rhs = phased(next, phi);
        for (const auto& [label, sig] : lhs.entries)
            dev = std::max(dev, max_abs_diff(sig, rhs.at(label.first, label.second)));
        cur = std::move(next);
    }
    return dev;
}

ChargeConvNetSpec fit_final_mult_layer(const ChargeConvNetSpec& spec,
                                       const std::vector<AnalyticField>& inputs,
                                       const std::vector<Signal>& targets, double reg) {
    require(!inputs.empty() && inputs.size() == targets.size(),
            "fit_final_mult_layer: need matching nonempty inputs and targets");
    require(spec.t_mult >= 1, "fit_final_mult_layer: spec has no mult layers");
    int t_diff = spec.t_diff;
    int d_in = spec.t_mult == 1 ? 0 : spec.d_mult; // layer-1 layout handled below
    std::vector<int> layout =
        spec.t_mult == 1 ? spec.diff_channel_layout()
                         : std::vector<int>(static_cast<std::size_t>(2 * t_diff + 1),
                                            spec.d_mult);
    (void)d_in;

    // parameter slots in a fixed order: real w0 per n, then (re, im) per w1 and
    // per charge-conserving w2 index
    struct W1Slot {
        int n1;
    };
    struct W2Slot {
        int mu1, n1, n2;
    };
    std::vector<W1Slot> w1_slots;
    for (int n1 = 0; n1 < layout[static_cast<std::size_t>(t_diff)]; ++n1)
        w1_slots.push_back({n1});
    std::vector<W2Slot> w2_slots;
    for (int mu1 = -t_diff; mu1 <= t_diff; ++mu1)
        for (int n1 = 0; n1 < layout[static_cast<std::size_t>(mu1 + t_diff)]; ++n1)
            for (int n2 = 0; n2 < layout[static_cast<std::size_t>(-mu1 + t_diff)]; ++n2)
                w2_slots.push_back({mu1, n1, n2});
    int n_feat = 1 + 2 * static_cast<int>(w1_slots.size()) +
                 2 * static_cast<int>(w2_slots.size());

    // run the fixed layers on every input and collect per-node features
    std::vector<std::vector<double>> rows;
    std::vector<std::vector<double>> ys(static_cast<std::size_t>(spec.d_u));
    for (std::size_t i = 0; i < inputs.size(); ++i) {
        Signal in = discretize(inputs[i], spec.lambda, (spec.in_half_width() + 0.5) * spec.lambda);
        require(in.channels() == spec.d_v, "fit_final_mult_layer: input channel mismatch");
        ChargedStack stack =
            diff_to_mult(diff_stage(smooth_chain(as_complex(in)), t_diff), t_diff);
        for (int t = 0; t + 1 < spec.t_mult; ++t)
            stack = mult_layer(stack, spec.layers[static_cast<std::size_t>(t)]);
        const Signal& tgt = targets[i];
        require(tgt.half_width() == spec.out_half_width() && tgt.channels() == spec.d_u,
                "fit_final_mult_layer: target must live on the output grid with d_u channels");
        int L = spec.out_half_width();
        for (int kx = -L; kx <= L; ++kx)
            for (int ky = -L; ky <= L; ++ky) {
                std::vector<double> row;
                row.reserve(static_cast<std::size_t>(n_feat));
                row.push_back(1.0); // Re(w0)
                for (const W1Slot& s : w1_slots) {
                    Complex v = stack.at(0, s.n1).at(kx, ky, 0);
                    row.push_back(v.real());
                    row.push_back(-v.imag());
                }
                for (const W2Slot& s : w2_slots) {
                    Complex v = stack.at(s.mu1, s.n1).at(kx, ky, 0) *
                                stack.at(-s.mu1, s.n2).at(kx, ky, 0);
                    row.push_back(v.real());
                    row.push_back(-v.imag());
                }
                rows.push_back(std::move(row));
                for (int n = 0; n < spec.d_u; ++n)
                    ys[static_cast<std::size_t>(n)].push_back(tgt.at(kx, ky, n).real());
            }
    }

    RealMatrix design(static_cast<int>(rows.size()), n_feat);
    for (std::size_t r = 0; r < rows.size(); ++r)
        for (int c = 0; c < n_feat; ++c) design.at(static_cast<int>(r), c) = rows[r][static_cast<std::size_t>(c)];

    ChargeConvNetSpec fitted = spec;
    MultWeights fin(t_diff, spec.d_u, layout, true);
    for (int n = 0; n < spec.d_u; ++n) {
        std::vector<double> w = fit_ridge(design, ys[static_cast<std::size_t>(n)], reg);
        std::size_t k = 0;
        fin.set_w0(n, Complex{w[k], 0.0});
        ++k;
        for (const W1Slot& s : w1_slots) {
            fin.set_w1(0, n, s.n1, Complex{w[k], w[k + 1]});
            k += 2;
        }
        for (const W2Slot& s : w2_slots) {
            fin.set_w2(s.mu1, -s.mu1, n, s.n1, s.n2, Complex{w[k], w[k + 1]});
            k += 2;
        }
    }
    fitted.layers.back() = std::move(fin);
    return fitted;
}

ChargedStack random_mult_stack(const ChargeConvNetSpec& spec, GridSpec grid, Rng& rng) {
    ChargedStack stack;
    stack.stage = StackStage::Mult;
    std::vector<int> layout = spec.diff_channel_layout();
    for (int mu = -spec.t_diff; mu <= spec.t_diff; ++mu)
        for (int n = 0; n < layout[static_cast<std::size_t>(mu + spec.t_diff)]; ++n)
            stack.entries.emplace(std::make_pair(mu, n),
                                  random_signal(grid, 1, Field::Complex, rng));
    return stack;
}

} // namespace equinet
