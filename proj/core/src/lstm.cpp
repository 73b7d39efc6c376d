#include "deltamine/lstm.hpp"

#include <cmath>
#include <stdexcept>

namespace deltamine::nn {

namespace {

Tensor init_weight(std::size_t rows, std::size_t cols, Rng& rng) {
  const double bound = std::sqrt(1.0 / static_cast<double>(cols));
  std::vector<double> data(rows * cols);
  for (auto& x : data) x = rng.uniform(-bound, bound);
  return Tensor::parameter({rows, cols}, std::move(data));
}

Tensor init_bias(std::size_t n, double fill = 0.0) {
  return Tensor::parameter({n}, std::vector<double>(n, fill));
}

}  // namespace

LstmCellParams LstmCellParams::init(std::size_t input_dim, std::size_t hidden_dim, Rng& rng) {
  LstmCellParams p;
  p.input_dim = input_dim;
  p.hidden_dim = hidden_dim;
  p.w_xi = init_weight(hidden_dim, input_dim, rng);
  p.w_hi = init_weight(hidden_dim, hidden_dim, rng);
  p.b_i = init_bias(hidden_dim);
  p.w_xf = init_weight(hidden_dim, input_dim, rng);
  p.w_hf = init_weight(hidden_dim, hidden_dim, rng);
  p.b_f = init_bias(hidden_dim, 1.0);
  p.w_xc = init_weight(hidden_dim, input_dim, rng);
  p.w_hc = init_weight(hidden_dim, hidden_dim, rng);
  p.b_c = init_bias(hidden_dim);
  p.w_xo = init_weight(hidden_dim, input_dim, rng);
  p.w_ho = init_weight(hidden_dim, hidden_dim, rng);
  p.b_o = init_bias(hidden_dim);
  return p;
}

std::vector<Tensor> LstmCellParams::tensors() {
  return {w_xi, w_hi, b_i, w_xf, w_hf, b_f, w_xc, w_hc, b_c, w_xo, w_ho, b_o};
}

std::vector<Tensor> LstmCellParams::tensors() const {
  return {w_xi, w_hi, b_i, w_xf, w_hf, b_f, w_xc, w_hc, b_c, w_xo, w_ho, b_o};
}

LstmState lstm_cell_step(const LstmCellParams& params, const Tensor& x,
                         const LstmState& prev) {
  if (x.rank() != 1 || x.shape()[0] != params.input_dim) {
    throw std::invalid_argument("lstm_cell_step: input dim mismatch");
  }
  if (prev.h.shape()[0] != params.hidden_dim || prev.c.shape()[0] != params.hidden_dim) {
    throw std::invalid_argument("lstm_cell_step: state dim mismatch");
  }
  Tensor i = sigmoid(add(add(matvec(params.w_xi, x), matvec(params.w_hi, prev.h)), params.b_i));
  Tensor f = sigmoid(add(add(matvec(params.w_xf, x), matvec(params.w_hf, prev.h)), params.b_f));
  Tensor g = tanh(add(add(matvec(params.w_xc, x), matvec(params.w_hc, prev.h)), params.b_c));
  Tensor c = add(mul(f, prev.c), mul(i, g));
  Tensor o = sigmoid(add(add(matvec(params.w_xo, x), matvec(params.w_ho, prev.h)), params.b_o));
  Tensor h = mul(o, tanh(c));
  return {h, c};
}

LstmState lstm_zero_state(std::size_t hidden_dim) {
  return {Tensor::zeros({hidden_dim}), Tensor::zeros({hidden_dim})};
}

std::vector<LstmState> lstm_run(const LstmCellParams& params,
                                const std::vector<Tensor>& inputs,
                                const LstmState& initial) {
  std::vector<LstmState> states;
  states.reserve(inputs.size());
  LstmState s = initial;
  for (const Tensor& x : inputs) {
    s = lstm_cell_step(params, x, s);
    states.push_back(s);
  }
  return states;
}

}  // namespace deltamine::nn
