#include "racsep/rac.hpp"

#include "racsep/detail/rac_step.hpp"
#include "racsep/linalg.hpp"

namespace racsep {

namespace {

void require_matrix(const DenseTensor& m, std::size_t rows, std::size_t cols, const std::string& name) {
  if (m.order() != 2 || m.rows() != rows || m.cols() != cols)
    throw ParameterError(name + " must be " + std::to_string(rows) + "x" + std::to_string(cols));
}

}  // namespace

RacParams::RacParams(std::vector<DenseTensor> w_in, std::vector<DenseTensor> w_hidden, DenseTensor w_out,
                     std::vector<DenseTensor> h0)
    : w_in_(std::move(w_in)), w_hidden_(std::move(w_hidden)), w_out_(std::move(w_out)), h0_(std::move(h0)) {
  const auto depth = w_in_.size();
  if (depth == 0) throw ParameterError("network depth must be at least 1");
  if (w_hidden_.size() != depth || h0_.size() != depth)
    throw ParameterError("w_in, w_hidden and h0 must have one entry per layer");
  if (w_out_.order() != 2) throw ParameterError("w_out must be a matrix");
  if (w_in_.front().order() != 2) throw ParameterError("w_in[0] must be a matrix");
  const auto r = w_out_.cols();
  const auto m = w_in_.front().cols();
  const auto field = w_out_.field();
  for (std::size_t l = 0; l < depth; ++l) {
    const auto tag = "layer " + std::to_string(l);
    require_matrix(w_in_[l], r, l == 0 ? m : r, tag + " w_in");
    require_matrix(w_hidden_[l], r, r, tag + " w_hidden");
    if (h0_[l].order() != 1 || h0_[l].dim(0) != r) throw ParameterError(tag + " h0 must have length " + std::to_string(r));
    for (const auto* t : {&w_in_[l], &w_hidden_[l], &h0_[l]})
      if (t->field() != field) throw FieldMismatchError("network parameters mix scalar fields");
  }
}

RacParams RacParams::with_default_h0(std::vector<DenseTensor> w_in, std::vector<DenseTensor> w_hidden,
                                     DenseTensor w_out) {
  std::vector<DenseTensor> h0;
  for (const auto& wh : w_hidden) h0.push_back(default_initial_state(wh));
  return {std::move(w_in), std::move(w_hidden), std::move(w_out), std::move(h0)};
}

RacParams RacParams::to_float() const {
  auto conv = [](const std::vector<DenseTensor>& v) {
    std::vector<DenseTensor> out;
    for (const auto& t : v) out.push_back(t.to_float());
    return out;
  };
  return {conv(w_in_), conv(w_hidden_), w_out_.to_float(), conv(h0_)};
}

DenseTensor default_initial_state(const DenseTensor& w_hidden) {
  if (!is_invertible(w_hidden)) throw ParameterError("default initial state requires an invertible hidden matrix");
  return solve(w_hidden, ones(w_hidden.rows(), w_hidden.field()));
}

RacParams random_rac_params(std::size_t depth, std::size_t hidden, std::size_t input_dim, std::size_t classes,
                            Field field, Rng& rng) {
  std::vector<DenseTensor> w_in, w_hidden;
  for (std::size_t l = 0; l < depth; ++l) {
    w_in.push_back(random_matrix(hidden, l == 0 ? input_dim : hidden, field, rng));
    auto wh = random_matrix(hidden, hidden, field, rng);
    while (!is_invertible(wh)) wh = random_matrix(hidden, hidden, field, rng);
    w_hidden.push_back(std::move(wh));
  }
  auto w_out = random_matrix(classes, hidden, field, rng);
  return RacParams::with_default_h0(std::move(w_in), std::move(w_hidden), std::move(w_out));
}

TemplateEncoder::TemplateEncoder(DenseTensor f_matrix) : f_(std::move(f_matrix)) {
  if (f_.order() != 2 || f_.rows() != f_.cols()) throw ParameterError("encoder matrix must be square");
  if (!is_invertible(f_)) throw ParameterError("encoder matrix must be non-singular");
}

TemplateEncoder TemplateEncoder::identity(std::size_t m, Field field) {
  return TemplateEncoder(identity_matrix(m, field));
}

DenseTensor TemplateEncoder::encode(std::size_t symbol) const {
  if (symbol >= dim()) throw InvalidInputError("template symbol out of range");
  return f_.visit([&](const auto& v) {
    using S = typename std::decay_t<decltype(v)>::value_type;
    const auto m = dim();
    return DenseTensor::vector(std::vector<S>(v.begin() + symbol * m, v.begin() + (symbol + 1) * m));
  });
}

std::vector<DenseTensor> forward_all_timesteps(const RacParams& p, Nonlinearity g, const TemplateEncoder& enc,
                                               const InputSequence& seq) {
  if (enc.dim() != p.input_dim()) throw ParameterError("encoder dimension does not match w_in[0]");
  if (enc.matrix().field() != p.field()) throw FieldMismatchError("encoder and parameters use different fields");
  for (auto s : seq.symbols)
    if (s >= enc.dim()) throw InvalidInputError("sequence symbol out of range");

  return p.w_out().visit([&](const auto& tag) {
    using S = typename std::decay_t<decltype(tag)>::value_type;
    const auto tp = detail::typed<S>(p);
    auto state = tp.h0;
    std::vector<DenseTensor> outputs;
    outputs.reserve(seq.length());
    for (auto s : seq.symbols) {
      detail::step(tp, g, enc.encode(s).values<S>(), state);
      outputs.push_back(DenseTensor::vector(detail::readout(tp, state.back())));
    }
    return outputs;
  });
}

DenseTensor forward_deep(const RacParams& p, Nonlinearity g, const TemplateEncoder& enc, const InputSequence& seq) {
  if (seq.length() == 0) throw InvalidInputError("input sequence must be non-empty");
  return forward_all_timesteps(p, g, enc, seq).back();
}

DenseTensor forward_shallow(const RacParams& p, Nonlinearity g, const TemplateEncoder& enc, const InputSequence& seq) {
  if (p.depth() != 1) throw ParameterError("forward_shallow requires a depth-1 network");
  return forward_deep(p, g, enc, seq);
}

}  // namespace racsep
