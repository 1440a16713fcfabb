#include "equinet/serialization.hpp"

#include <json.hpp>

#include <stdexcept>

namespace equinet {

using nlohmann::json;

namespace {

json complex_to_json(Complex v) { return json::array({v.real(), v.imag()}); }

Complex complex_from_json(const json& j) {
    if (!j.is_array() || j.size() != 2) throw std::invalid_argument("expected [re, im]");
    return {j[0].get<double>(), j[1].get<double>()};
}

std::string field_name(Field f) { return f == Field::Real ? "real" : "complex"; }

Field field_from_name(const std::string& s) {
    if (s == "real") return Field::Real;
    if (s == "complex") return Field::Complex;
    throw std::invalid_argument("unknown field kind: " + s);
}

std::string activation_name(Activation a) {
    switch (a) {
    case Activation::Tanh: return "tanh";
    case Activation::Sigmoid: return "sigmoid";
    case Activation::Softplus: return "softplus";
    }
    return "tanh";
}

Activation activation_from_name(const std::string& s) {
    if (s == "tanh") return Activation::Tanh;
    if (s == "sigmoid") return Activation::Sigmoid;
    if (s == "softplus") return Activation::Softplus;
    throw std::invalid_argument("unknown activation: " + s);
}

} // namespace

std::string signal_to_json(const Signal& s) {
    json j;
    j["lambda"] = s.spacing();
    j["half_width"] = s.half_width();
    j["channels"] = s.channels();
    j["field"] = field_name(s.field());
    int L = s.half_width();
    json rows = json::array();
    for (int kx = -L; kx <= L; ++kx) {
        json row = json::array();
        for (int ky = -L; ky <= L; ++ky) {
            json cell = json::array();
            for (int c = 0; c < s.channels(); ++c) {
                Complex v = s.at(kx, ky, c);
                if (s.field() == Field::Real)
                    cell.push_back(v.real());
                else
                    cell.push_back(complex_to_json(v));
            }
            row.push_back(std::move(cell));
        }
        rows.push_back(std::move(row));
    }
    j["values"] = std::move(rows);
    return j.dump();
}

Signal signal_from_json(const std::string& text) {
    json j = json::parse(text);
    GridSpec g{j.at("lambda").get<double>(), j.at("half_width").get<int>()};
    int channels = j.at("channels").get<int>();
    Field field = field_from_name(j.at("field").get<std::string>());
    const json& rows = j.at("values");
    int side = g.side();
    if (static_cast<int>(rows.size()) != side)
        throw std::invalid_argument("signal_from_json: row count mismatch");
    std::vector<Complex> vals;
    vals.reserve(g.node_count() * static_cast<std::size_t>(channels));
    for (const json& row : rows) {
        if (static_cast<int>(row.size()) != side)
            throw std::invalid_argument("signal_from_json: column count mismatch");
        for (const json& cell : row) {
            if (static_cast<int>(cell.size()) != channels)
                throw std::invalid_argument("signal_from_json: channel count mismatch");
            for (const json& v : cell)
                vals.push_back(v.is_array() ? complex_from_json(v)
                                            : Complex{v.get<double>(), 0.0});
        }
    }
    return Signal(g, channels, field, std::move(vals));
}

std::string sym_net_to_json(const SymNetWeights& w) {
    json j;
    j["t1"] = w.t1;
    j["t2"] = w.t2;
    j["m"] = w.m;
    j["activation"] = activation_name(w.act);
    j["c"] = w.c;
    j["h"] = w.h;
    j["b"] = w.b;
    j["e"] = w.e;
    j["w"] = w.w.data;
    j["a"] = w.a.data;
    return j.dump();
}

SymNetWeights sym_net_from_json(const std::string& text) {
    json j = json::parse(text);
    SymNetWeights w;
    w.t1 = j.at("t1").get<int>();
    w.t2 = j.at("t2").get<int>();
    w.m = j.at("m").get<int>();
    w.act = activation_from_name(j.at("activation").get<std::string>());
    w.c = j.at("c").get<std::vector<double>>();
    w.h = j.at("h").get<std::vector<double>>();
    w.b = j.at("b").get<std::vector<double>>();
    w.e = j.at("e").get<std::vector<double>>();
    w.w = RealMatrix(w.t2, w.t1);
    w.w.data = j.at("w").get<std::vector<double>>();
    w.a = RealMatrix(w.t1, w.m);
    w.a.data = j.at("a").get<std::vector<double>>();
    if (w.w.data.size() != static_cast<std::size_t>(w.t2) * w.t1 ||
        w.a.data.size() != static_cast<std::size_t>(w.t1) * w.m ||
        w.c.size() != static_cast<std::size_t>(w.t1) ||
        w.b.size() != static_cast<std::size_t>(w.t2))
        throw std::invalid_argument("sym_net_from_json: shape metadata mismatch");
    return w;
}

namespace {

json conv_common_to_json(double lambda, int l_rf, int depth, const std::vector<int>& dims,
                         Activation act, const std::vector<std::vector<double>>& w,
                         const std::vector<std::vector<double>>& h,
                         const std::vector<double>& w_final, const std::vector<double>& h_final) {
    json j;
    j["lambda"] = lambda;
    j["l_rf"] = l_rf;
    j["depth"] = depth;
    j["dims"] = dims;
    j["activation"] = activation_name(act);
    j["w"] = w;
    j["h"] = h;
    j["w_final"] = w_final;
    j["h_final"] = h_final;
    return j;
}

} // namespace

std::string basic_spec_to_json(const BasicConvNetSpec& s) {
    json j = conv_common_to_json(s.lambda, s.l_rf, s.depth, s.dims, s.act, s.w, s.h, s.w_final,
                                 s.h_final);
    j["Lambda"] = s.Lambda;
    return j.dump();
}

BasicConvNetSpec basic_spec_from_json(const std::string& text) {
    json j = json::parse(text);
    BasicConvNetSpec s;
    s.lambda = j.at("lambda").get<double>();
    s.Lambda = j.at("Lambda").get<double>();
    s.l_rf = j.at("l_rf").get<int>();
    s.depth = j.at("depth").get<int>();
    s.dims = j.at("dims").get<std::vector<int>>();
    s.act = activation_from_name(j.at("activation").get<std::string>());
    s.w = j.at("w").get<std::vector<std::vector<double>>>();
    s.h = j.at("h").get<std::vector<std::vector<double>>>();
    s.w_final = j.at("w_final").get<std::vector<double>>();
    s.h_final = j.at("h_final").get<std::vector<double>>();
    SpecDiagnostics d = validate_spec(s);
    if (!d.ok) throw std::invalid_argument("basic_spec_from_json: " + d.issues[0]);
    return s;
}

std::string downsampled_spec_to_json(const DownsampledConvNetSpec& s) {
    json j = conv_common_to_json(s.lambda, s.l_rf, s.depth, s.dims, s.act, s.w, s.h, s.w_final,
                                 s.h_final);
    j["stride"] = s.stride;
    return j.dump();
}

DownsampledConvNetSpec downsampled_spec_from_json(const std::string& text) {
    json j = json::parse(text);
    DownsampledConvNetSpec s;
    s.lambda = j.at("lambda").get<double>();
    s.stride = j.at("stride").get<int>();
    s.l_rf = j.at("l_rf").get<int>();
    s.depth = j.at("depth").get<int>();
    s.dims = j.at("dims").get<std::vector<int>>();
    s.act = activation_from_name(j.at("activation").get<std::string>());
    s.w = j.at("w").get<std::vector<std::vector<double>>>();
    s.h = j.at("h").get<std::vector<std::vector<double>>>();
    s.w_final = j.at("w_final").get<std::vector<double>>();
    s.h_final = j.at("h_final").get<std::vector<double>>();
    SpecDiagnostics d = validate_spec(s);
    if (!d.ok) throw std::invalid_argument("downsampled_spec_from_json: " + d.issues[0]);
    return s;
}

std::string charge_spec_to_json(const ChargeConvNetSpec& s) {
    json j;
    j["lambda"] = s.lambda;
    j["Lambda"] = s.Lambda;
    j["T_diff"] = s.t_diff;
    j["T_mult"] = s.t_mult;
    j["d_mult"] = s.d_mult;
    j["d_v"] = s.d_v;
    j["d_u"] = s.d_u;
    json layers = json::array();
    for (const MultWeights& w : s.layers) {
        json layer;
        json w0 = json::array();
        for (int n = 0; n < w.n_out(); ++n) {
            Complex v = w.w0()[static_cast<std::size_t>(n)];
            if (v != Complex{0.0, 0.0}) w0.push_back(json::array({n, v.real(), v.imag()}));
        }
        json w1 = json::array();
        for (const auto& [key, v] : w.w1()) {
            auto [mu, n, n1] = key;
            w1.push_back(json::array({mu, n, n1, v.real(), v.imag()}));
        }
        json w2 = json::array();
        for (const auto& [key, v] : w.w2()) {
            auto [mu1, mu2, n, n1, n2] = key;
            w2.push_back(json::array({mu1, mu2, n, n1, n2, v.real(), v.imag()}));
        }
        layer["w0"] = std::move(w0);
        layer["w1"] = std::move(w1);
        layer["w2"] = std::move(w2);
        layers.push_back(std::move(layer));
    }
    j["layers"] = std::move(layers);
    return j.dump();
}

ChargeConvNetSpec charge_spec_from_json(const std::string& text) {
    json j = json::parse(text);
    ChargeConvNetSpec s;
    s.lambda = j.at("lambda").get<double>();
    s.Lambda = j.at("Lambda").get<double>();
    s.t_diff = j.at("T_diff").get<int>();
    s.t_mult = j.at("T_mult").get<int>();
    s.d_mult = j.at("d_mult").get<int>();
    s.d_v = j.value("d_v", 1);
    s.d_u = j.value("d_u", 1);
    const json& layers = j.at("layers");
    if (static_cast<int>(layers.size()) != s.t_mult)
        throw std::invalid_argument("charge_spec_from_json: layer count must equal T_mult");
    std::vector<int> uniform(static_cast<std::size_t>(2 * s.t_diff + 1), s.d_mult);
    for (int t = 1; t <= s.t_mult; ++t) {
        const json& layer = layers[static_cast<std::size_t>(t - 1)];
        bool final_layer = (t == s.t_mult);
        MultWeights w(s.t_diff, final_layer ? s.d_u : s.d_mult,
                      t == 1 ? s.diff_channel_layout() : uniform, final_layer);
        for (const json& e : layer.value("w0", json::array()))
            w.set_w0(e.at(0).get<int>(), {e.at(1).get<double>(), e.at(2).get<double>()});
        for (const json& e : layer.value("w1", json::array()))
            w.set_w1(e.at(0).get<int>(), e.at(1).get<int>(), e.at(2).get<int>(),
                     {e.at(3).get<double>(), e.at(4).get<double>()});
        for (const json& e : layer.value("w2", json::array()))
            w.set_w2(e.at(0).get<int>(), e.at(1).get<int>(), e.at(2).get<int>(),
                     e.at(3).get<int>(), e.at(4).get<int>(),
                     {e.at(5).get<double>(), e.at(6).get<double>()});
        s.layers.push_back(std::move(w));
    }
    return s;
}

std::string stack_to_json(const ChargedStack& s) {
    json j;
    j["stage"] = s.stage == StackStage::Diff ? "diff" : "mult";
    json entries = json::array();
    for (const auto& [label, sig] : s.entries)
        entries.push_back(json::array(
            {label.first, label.second, json::parse(signal_to_json(sig))}));
    j["entries"] = std::move(entries);
    return j.dump();
}

ChargedStack stack_from_json(const std::string& text) {
    json j = json::parse(text);
    ChargedStack s;
    std::string stage = j.at("stage").get<std::string>();
    if (stage == "diff")
        s.stage = StackStage::Diff;
    else if (stage == "mult")
        s.stage = StackStage::Mult;
    else
        throw std::invalid_argument("stack_from_json: unknown stage " + stage);
    for (const json& e : j.at("entries"))
        s.entries.emplace(std::make_pair(e.at(0).get<int>(), e.at(1).get<int>()),
                          signal_from_json(e.at(2).dump()));
    return s;
}

} // namespace equinet
