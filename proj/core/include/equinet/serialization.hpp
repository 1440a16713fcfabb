#pragma once

#include <string>

#include "equinet/charge_convnet.hpp"
#include "equinet/convnets.hpp"
#include "equinet/grid_signal.hpp"
#include "equinet/invariant_nets.hpp"

namespace equinet {

/// Signal JSON: {lambda, half_width, channels, field, values} with values as
/// row-major nested arrays (kx outer, ky inner, channels innermost) and
/// complex entries encoded as [re, im].
std::string signal_to_json(const Signal& s);
Signal signal_from_json(const std::string& text);

std::string sym_net_to_json(const SymNetWeights& w);
SymNetWeights sym_net_from_json(const std::string& text);

std::string basic_spec_to_json(const BasicConvNetSpec& s);
BasicConvNetSpec basic_spec_from_json(const std::string& text);

std::string downsampled_spec_to_json(const DownsampledConvNetSpec& s);
DownsampledConvNetSpec downsampled_spec_from_json(const std::string& text);

/// Charge convnet JSON: {lambda, Lambda, T_diff, T_mult, d_mult, d_v, d_u,
/// layers: [{w0: [[n,re,im]], w1: [[mu,n,n1,re,im]],
/// w2: [[mu1,mu2,n,n1,n2,re,im]]}]}. Parsing rebuilds each layer through the
/// validating weight setters, so files violating the charge constraint are
/// rejected.
std::string charge_spec_to_json(const ChargeConvNetSpec& s);
ChargeConvNetSpec charge_spec_from_json(const std::string& text);

std::string stack_to_json(const ChargedStack& s);
ChargedStack stack_from_json(const std::string& text);

} // namespace equinet
