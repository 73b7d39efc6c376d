#pragma once

#include <utility>
#include <vector>

#include "deltamine/rng.hpp"
#include "deltamine/tensor.hpp"

namespace deltamine::nn {

// Gate parameters of one LSTM cell. Weight matrices are [hidden, input] for
// the x side and [hidden, hidden] for the h side; biases are [hidden].
struct LstmCellParams {
  std::size_t input_dim = 0;
  std::size_t hidden_dim = 0;
  Tensor w_xi, w_hi, b_i;
  Tensor w_xf, w_hf, b_f;
  Tensor w_xc, w_hc, b_c;
  Tensor w_xo, w_ho, b_o;

  // uniform(-sqrt(1/fan_in), +sqrt(1/fan_in)) weights, zero biases,
  // forget-gate bias +1
  static LstmCellParams init(std::size_t input_dim, std::size_t hidden_dim, Rng& rng);

  std::vector<Tensor> tensors();
  std::vector<Tensor> tensors() const;
};

struct LstmState {
  Tensor h;
  Tensor c;
};

// One step of the gated recurrence:
//   i = sigmoid(Wxi x + Whi h + bi)
//   f = sigmoid(Wxf x + Whf h + bf)
//   c' = f*c + i*tanh(Wxc x + Whc h + bc)
//   o = sigmoid(Wxo x + Who h + bo)
//   h' = o*tanh(c')
LstmState lstm_cell_step(const LstmCellParams& params, const Tensor& x,
                         const LstmState& prev);

LstmState lstm_zero_state(std::size_t hidden_dim);

// Runs the cell over a sequence and returns every hidden state.
std::vector<LstmState> lstm_run(const LstmCellParams& params,
                                const std::vector<Tensor>& inputs,
                                const LstmState& initial);

}  // namespace deltamine::nn
