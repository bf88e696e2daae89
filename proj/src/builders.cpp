#include "racsep/builders.hpp"

#include <sstream>

#include "racsep/detail/rac_step.hpp"
#include "racsep/linalg.hpp"
#include "racsep/serialization.hpp"

namespace racsep {

namespace {

template <class S>
std::vector<S> row(const std::vector<S>& m, std::size_t cols, std::size_t i) {
  return std::vector<S>(m.begin() + i * cols, m.begin() + (i + 1) * cols);
}

// phi[b] is the coefficient tensor (order t) of (W_H h[t])_b as a polynomial in
// the first t encodings; phi[b] at t = 0 is the scalar (W_H h0)_b.
template <class S>
std::vector<S> weights_tensor_entries(const detail::TypedParams<S>& p, std::size_t c, std::size_t steps) {
  const auto r = p.hidden;
  const auto m = p.input_dim;
  const auto& wh = p.w_hidden[0];
  const auto seed = detail::matvec(wh, p.h0[0], r, r);
  std::vector<std::vector<S>> phi(r);
  for (std::size_t b = 0; b < r; ++b) phi[b] = {seed[b]};

  auto extend = [&](const std::vector<std::vector<S>>& cur) {
    std::vector<std::vector<S>> out;
    for (std::size_t a = 0; a < r; ++a) out.push_back(detail::outer(cur[a], row(p.w_in[0], m, a)));
    return out;
  };
  for (std::size_t t = 1; t < steps; ++t) {
    const auto ext = extend(phi);
    std::vector<std::vector<S>> next(r, std::vector<S>(ext[0].size(), detail::zero<S>()));
    for (std::size_t b = 0; b < r; ++b)
      for (std::size_t a = 0; a < r; ++a) detail::axpy(wh[b * r + a], ext[a], next[b]);
    phi = std::move(next);
  }
  const auto ext = extend(phi);
  std::vector<S> result(ext[0].size(), detail::zero<S>());
  for (std::size_t a = 0; a < r; ++a) detail::axpy(p.w_out[c * r + a], ext[a], result);
  return result;
}

template <class S>
void grid_dfs(const detail::TypedParams<S>& p, Nonlinearity g, const std::vector<std::vector<S>>& encodings,
              std::size_t c, std::size_t steps, std::size_t t, const std::vector<std::vector<S>>& state,
              std::vector<S>& out, std::size_t& cursor) {
  for (std::size_t d = 0; d < encodings.size(); ++d) {
    auto next = state;
    detail::step(p, g, encodings[d], next);
    if (t + 1 == steps) {
      const auto& top = next.back();
      S acc = detail::zero<S>();
      for (std::size_t k = 0; k < p.hidden; ++k) acc += p.w_out[c * p.hidden + k] * top[k];
      out[cursor++] = acc;
    } else {
      grid_dfs(p, g, encodings, c, steps, t + 1, next, out, cursor);
    }
  }
}

std::uint64_t fnv1a(const std::string& s) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char ch : s) {
    h ^= ch;
    h *= 0x100000001b3ULL;
  }
  return h;
}

}  // namespace

WeightsTensor build_weights_tensor(const RacParams& p, std::size_t class_index, std::size_t steps) {
  if (p.depth() != 1) throw ParameterError("weights tensor is defined for depth-1 networks");
  if (steps < 2) throw ParameterError("weights tensor requires T >= 2");
  if (class_index >= p.classes()) throw ParameterError("class index out of range");
  if (!is_invertible(p.w_hidden(0))) throw ParameterError("weights tensor requires an invertible hidden matrix");
  const DenseTensor::Dims dims(steps, p.input_dim());
  auto tensor = p.w_out().visit([&](const auto& v) {
    using S = typename std::decay_t<decltype(v)>::value_type;
    return DenseTensor(dims, weights_tensor_entries(detail::typed<S>(p), class_index, steps));
  });
  return {std::move(tensor), class_index, p.hidden()};
}

Scalar score_from_tensor(const WeightsTensor& w, const TemplateEncoder& enc, const InputSequence& seq) {
  const auto& a = w.tensor;
  if (seq.length() != a.order()) throw InvalidInputError("sequence length does not match tensor order");
  if (enc.dim() != a.dim(0)) throw InvalidInputError("encoder dimension does not match tensor modes");
  return a.visit([&](const auto& v) -> Scalar {
    using S = typename std::decay_t<decltype(v)>::value_type;
    const auto m = enc.dim();
    // Contract the last mode with f(x_T), then the next-to-last, and so on.
    std::vector<S> cur = v;
    for (std::size_t i = seq.length(); i-- > 0;) {
      const auto encoded = enc.encode(seq.symbols[i]);
      const auto& f = encoded.template values<S>();
      std::vector<S> next(cur.size() / m, detail::zero<S>());
      for (std::size_t j = 0; j < next.size(); ++j)
        for (std::size_t d = 0; d < m; ++d) next[j] += cur[j * m + d] * f[d];
      cur = std::move(next);
    }
    return cur[0];
  });
}

GridTensor build_grid_tensor(const RacParams& p, Nonlinearity g, const TemplateEncoder& enc, std::size_t class_index,
                             std::size_t steps, const Budgets& budgets) {
  if (steps == 0) throw ParameterError("grid tensor requires T >= 1");
  if (class_index >= p.classes()) throw ParameterError("class index out of range");
  if (enc.dim() != p.input_dim()) throw ParameterError("encoder dimension does not match w_in[0]");
  if (enc.matrix().field() != p.field()) throw FieldMismatchError("encoder and parameters use different fields");
  double required = 1.0;
  for (std::size_t t = 0; t < steps; ++t) required *= static_cast<double>(enc.dim());
  if (required > static_cast<double>(budgets.grid_entries))
    throw ResourceError("grid tensor needs " + std::to_string(static_cast<unsigned long long>(required)) +
                            " entries, budget is " + std::to_string(budgets.grid_entries),
                        required);

  const DenseTensor::Dims dims(steps, enc.dim());
  auto tensor = p.w_out().visit([&](const auto& v) {
    using S = typename std::decay_t<decltype(v)>::value_type;
    const auto tp = detail::typed<S>(p);
    std::vector<std::vector<S>> encodings;
    for (std::size_t d = 0; d < enc.dim(); ++d) encodings.push_back(enc.encode(d).template values<S>());
    std::vector<S> out(static_cast<std::size_t>(required));
    std::size_t cursor = 0;
    grid_dfs(tp, g, encodings, class_index, steps, 0, tp.h0, out, cursor);
    return DenseTensor(dims, std::move(out));
  });
  return {std::move(tensor), {content_hash(p), content_hash(enc.matrix()), p.depth(), class_index}};
}

std::uint64_t content_hash(const RacParams& p) {
  std::ostringstream os;
  write_params(os, p);
  return fnv1a(os.str());
}

std::uint64_t content_hash(const DenseTensor& t) {
  std::ostringstream os;
  write_tensor(os, t);
  return fnv1a(os.str());
}

}  // namespace racsep
