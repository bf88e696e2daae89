#pragma once

// Shallow and deep recurrent networks evaluated step by step:
//   h[t][l] = g(W_H[l] h[t-1][l], W_I[l] h[t][l-1]),  h[t][0] = f(x[t]),
//   y[t]    = W_O h[t][L].
// Layers, time steps and template symbols are 0-based.

#include <cstddef>
#include <vector>

#include "racsep/random.hpp"
#include "racsep/tensor.hpp"

namespace racsep {

/// Weights and initial hidden states of an L-layer network with R hidden
/// channels, M-dimensional input encoding and C output classes.
class RacParams {
 public:
  RacParams(std::vector<DenseTensor> w_in, std::vector<DenseTensor> w_hidden, DenseTensor w_out,
            std::vector<DenseTensor> h0);

  /// h0[l] = W_H[l]^{-1} 1, so the first multiplicative step sees a vector of ones.
  static RacParams with_default_h0(std::vector<DenseTensor> w_in, std::vector<DenseTensor> w_hidden,
                                   DenseTensor w_out);

  [[nodiscard]] std::size_t depth() const noexcept { return w_in_.size(); }
  [[nodiscard]] std::size_t hidden() const noexcept { return w_hidden_.front().rows(); }
  [[nodiscard]] std::size_t input_dim() const noexcept { return w_in_.front().cols(); }
  [[nodiscard]] std::size_t classes() const noexcept { return w_out_.rows(); }
  [[nodiscard]] Field field() const noexcept { return w_out_.field(); }

  [[nodiscard]] const DenseTensor& w_in(std::size_t layer) const { return w_in_.at(layer); }
  [[nodiscard]] const DenseTensor& w_hidden(std::size_t layer) const { return w_hidden_.at(layer); }
  [[nodiscard]] const DenseTensor& h0(std::size_t layer) const { return h0_.at(layer); }
  [[nodiscard]] const DenseTensor& w_out() const noexcept { return w_out_; }

  [[nodiscard]] RacParams to_float() const;

  friend bool operator==(const RacParams&, const RacParams&) = default;

 private:
  std::vector<DenseTensor> w_in_;
  std::vector<DenseTensor> w_hidden_;
  DenseTensor w_out_;
  std::vector<DenseTensor> h0_;
};

/// W_H^{-1} 1; throws ParameterError for singular W_H.
[[nodiscard]] DenseTensor default_initial_state(const DenseTensor& w_hidden);

/// Random draw (see random_matrix) with non-singular hidden matrices, redrawn
/// until invertible, and default initial states.
[[nodiscard]] RacParams random_rac_params(std::size_t depth, std::size_t hidden, std::size_t input_dim,
                                          std::size_t classes, Field field, Rng& rng);

struct Nonlinearity {
  enum class Kind { RacProduct, RnnAdditive };
  enum class Activation { Identity, Tanh };

  Kind kind = Kind::RacProduct;
  Activation activation = Activation::Identity;

  static constexpr Nonlinearity rac() { return {Kind::RacProduct, Activation::Identity}; }
  static constexpr Nonlinearity rnn(Activation a) { return {Kind::RnnAdditive, a}; }
};

/// Encoder matrix F with F(i, j) = f_j(x^(i)); row d is the encoding of
/// template symbol d. F must be non-singular.
class TemplateEncoder {
 public:
  explicit TemplateEncoder(DenseTensor f_matrix);

  /// Indicator encoding of a discrete input space: F = I.
  static TemplateEncoder identity(std::size_t m, Field field);

  [[nodiscard]] std::size_t dim() const noexcept { return f_.rows(); }
  [[nodiscard]] const DenseTensor& matrix() const noexcept { return f_; }
  [[nodiscard]] DenseTensor encode(std::size_t symbol) const;

 private:
  DenseTensor f_;
};

struct InputSequence {
  std::vector<std::size_t> symbols;

  [[nodiscard]] std::size_t length() const noexcept { return symbols.size(); }
};

/// Depth-1 networks only; returns W_O h[T].
[[nodiscard]] DenseTensor forward_shallow(const RacParams& p, Nonlinearity g, const TemplateEncoder& enc,
                                          const InputSequence& seq);
[[nodiscard]] DenseTensor forward_deep(const RacParams& p, Nonlinearity g, const TemplateEncoder& enc,
                                       const InputSequence& seq);
/// Class scores after every time step.
[[nodiscard]] std::vector<DenseTensor> forward_all_timesteps(const RacParams& p, Nonlinearity g,
                                                             const TemplateEncoder& enc, const InputSequence& seq);

}  // namespace racsep
