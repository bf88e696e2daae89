#pragma once

#include <cmath>
#include <span>
#include <vector>

#include "racsep/detail/kernels.hpp"
#include "racsep/rac.hpp"

namespace racsep::detail {

template <class S>
struct TypedParams {
  std::size_t depth, hidden, input_dim, classes;
  std::vector<std::vector<S>> w_in, w_hidden, h0;
  std::vector<S> w_out;
};

template <class S>
TypedParams<S> typed(const RacParams& p) {
  TypedParams<S> t{p.depth(), p.hidden(), p.input_dim(), p.classes(), {}, {}, {}, p.w_out().values<S>()};
  for (std::size_t l = 0; l < p.depth(); ++l) {
    t.w_in.push_back(p.w_in(l).values<S>());
    t.w_hidden.push_back(p.w_hidden(l).values<S>());
    t.h0.push_back(p.h0(l).values<S>());
  }
  return t;
}

template <class S>
std::vector<S> merge(Nonlinearity g, const std::vector<S>& a, const std::vector<S>& b) {
  std::vector<S> out(a.size());
  if (g.kind == Nonlinearity::Kind::RacProduct) {
    for (std::size_t i = 0; i < a.size(); ++i) out[i] = a[i] * b[i];
    return out;
  }
  for (std::size_t i = 0; i < a.size(); ++i) out[i] = a[i] + b[i];
  if (g.activation == Nonlinearity::Activation::Tanh) {
    if constexpr (std::is_same_v<S, double>) {
      for (auto& x : out) x = std::tanh(x);
    } else {
      throw ParameterError("tanh activation is not defined over the exact field");
    }
  }
  return out;
}

/// Advances every layer by one time step. `state[l]` holds h[t-1][l] on entry
/// and h[t][l] on exit.
template <class S>
void step(const TypedParams<S>& p, Nonlinearity g, const std::vector<S>& input, std::vector<std::vector<S>>& state) {
  const std::vector<S>* below = &input;
  for (std::size_t l = 0; l < p.depth; ++l) {
    const auto in_dim = l == 0 ? p.input_dim : p.hidden;
    auto recurrent = matvec(p.w_hidden[l], state[l], p.hidden, p.hidden);
    auto fresh = matvec(p.w_in[l], *below, p.hidden, in_dim);
    state[l] = merge(g, recurrent, fresh);
    below = &state[l];
  }
}

template <class S>
std::vector<S> readout(const TypedParams<S>& p, const std::vector<S>& top) {
  return matvec(p.w_out, top, p.classes, p.hidden);
}

}  // namespace racsep::detail
