#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "deltamine/checkpoint.hpp"
#include "deltamine/lstm.hpp"
#include "deltamine/optim.hpp"
#include "deltamine/rng.hpp"
#include "support/fixtures.hpp"
#include "support/oracles.hpp"

using namespace deltamine;
using nn::Tensor;

namespace {

nn::LstmCellParams zero_params(std::size_t in, std::size_t hid) {
  Rng rng(1);
  auto p = nn::LstmCellParams::init(in, hid, rng);
  for (auto& t : p.tensors()) std::fill(t.values().begin(), t.values().end(), 0.0);
  return p;
}

}  // namespace

TEST_CASE("zero parameters: gates 0.5, cell halves, output through tanh") {
  const std::size_t dim = 3;
  auto p = zero_params(dim, dim);
  Tensor x = Tensor::constant({dim}, {0.2, -0.4, 1.0});
  nn::LstmState prev{Tensor::constant({dim}, {0.0, 0.0, 0.0}),
                     Tensor::constant({dim}, {1.0, -2.0, 0.5})};
  auto next = nn::lstm_cell_step(p, x, prev);
  for (std::size_t k = 0; k < dim; ++k) {
    const double c = prev.c.values()[k];
    CHECK(next.c.values()[k] == doctest::Approx(0.5 * c).epsilon(1e-12));
    CHECK(next.h.values()[k] == doctest::Approx(0.5 * std::tanh(0.5 * c)).epsilon(1e-12));
  }
}

TEST_CASE("saturated forget gate carries the cell state") {
  const std::size_t dim = 2;
  auto p = zero_params(dim, dim);
  std::fill(p.b_f.values().begin(), p.b_f.values().end(), 50.0);
  // input gate stays at sigmoid(0)=0.5 but tanh(0)=0 kills the candidate
  Tensor x = Tensor::constant({dim}, {0.0, 0.0});
  nn::LstmState prev{Tensor::constant({dim}, {0.0, 0.0}),
                     Tensor::constant({dim}, {0.7, -1.3})};
  auto next = nn::lstm_cell_step(p, x, prev);
  CHECK(next.c.values()[0] == doctest::Approx(0.7).epsilon(1e-9));
  CHECK(next.c.values()[1] == doctest::Approx(-1.3).epsilon(1e-9));
}

TEST_CASE("cell step matches the straight-line oracle") {
  Rng rng(2024);
  for (int rep = 0; rep < 10; ++rep) {
    auto p = nn::LstmCellParams::init(3, 4, rng);
    std::vector<double> xv(3), hv(4, 0.0), cv(4, 0.0);
    for (auto& v : xv) v = rng.uniform(-1, 1);
    for (auto& v : hv) v = rng.uniform(-1, 1);
    for (auto& v : cv) v = rng.uniform(-1, 1);

    auto state = nn::lstm_cell_step(p, Tensor::constant({3}, xv),
                                    {Tensor::constant({4}, hv), Tensor::constant({4}, cv)});

    auto w = oracle::extract(p);
    auto h = hv;
    auto c = cv;
    oracle::lstm_step(w, xv, h, c);
    for (std::size_t k = 0; k < 4; ++k) {
      CHECK(std::abs(state.h.values()[k] - h[k]) < 1e-12);
      CHECK(std::abs(state.c.values()[k] - c[k]) < 1e-12);
    }
  }
}

TEST_CASE("gates stay strictly inside (0,1) and the cell bound holds") {
  Rng rng(5);
  for (int rep = 0; rep < 50; ++rep) {
    auto p = nn::LstmCellParams::init(3, 3, rng);
    std::vector<double> xv(3), cv(3);
    for (auto& v : xv) v = rng.uniform(-5, 5);
    for (auto& v : cv) v = rng.uniform(-3, 3);
    auto state = nn::lstm_cell_step(p, Tensor::constant({3}, xv),
                                    {Tensor::zeros({3}), Tensor::constant({3}, cv)});
    // |c_t| <= |f||c_prev| + |i| <= |c_prev| + 1
    for (std::size_t k = 0; k < 3; ++k) {
      CHECK(std::abs(state.c.values()[k]) <= std::abs(cv[k]) + 1.0 + 1e-12);
      CHECK(std::abs(state.h.values()[k]) < 1.0);
    }
  }
}

TEST_CASE("two-step LSTM gradients match finite differences") {
  Rng rng(77);
  auto p = nn::LstmCellParams::init(3, 4, rng);
  std::vector<double> x1(3), x2(3), target(4);
  for (auto& v : x1) v = rng.uniform(-1, 1);
  for (auto& v : x2) v = rng.uniform(-1, 1);
  for (auto& v : target) v = rng.uniform(-1, 1);

  auto build = [&]() {
    auto s1 = nn::lstm_cell_step(p, Tensor::constant({3}, x1), nn::lstm_zero_state(4));
    auto s2 = nn::lstm_cell_step(p, Tensor::constant({3}, x2), s1);
    Tensor diff = nn::sub(s2.h, Tensor::constant({4}, target));
    return nn::sum(nn::mul(diff, diff));
  };
  auto result = oracle::gradcheck(
      p.tensors(), [&] { return build().item(); }, [&] { nn::backward(build()); });
  CHECK(result.checked == 4 * (3 * 4) + 4 * (4 * 4) + 4 * 4);  // every parameter element
  CHECK(result.max_rel_err < 1e-4);
}

TEST_CASE("adam leaves parameters alone on zero gradients") {
  Tensor w = Tensor::parameter({2}, {1.0, -1.0});
  nn::Adam adam({w}, {});
  w.zero_grad();
  adam.step();
  CHECK(w.values()[0] == 1.0);
  CHECK(w.values()[1] == -1.0);
}

TEST_CASE("first adam step moves by about lr in the gradient sign") {
  nn::AdamConfig cfg;
  cfg.lr = 0.1;
  Tensor w = Tensor::parameter({2}, {0.0, 0.0});
  nn::Adam adam({w}, cfg);
  nn::backward(nn::sum(nn::mul(w, Tensor::constant({2}, {3.0, -0.25}))));  // grad = (3, -0.25)
  adam.step();
  CHECK(w.values()[0] == doctest::Approx(-0.1).epsilon(1e-6));
  CHECK(w.values()[1] == doctest::Approx(0.1).epsilon(1e-6));
}

TEST_CASE("adam converges on (w-3)^2") {
  nn::AdamConfig cfg;
  cfg.lr = 0.1;
  Tensor w = Tensor::parameter({1}, {0.0});
  nn::Adam adam({w}, cfg);
  for (int step = 0; step < 100; ++step) {
    adam.zero_grad();
    Tensor diff = nn::sub(w, Tensor::scalar(3.0));
    nn::backward(nn::sum(nn::mul(diff, diff)));
    adam.step();
  }
  CHECK(std::abs(w.values()[0] - 3.0) < 0.1);
}

TEST_CASE("checkpoint round-trips tensors bit-exactly") {
  fixtures::TempDir dir;
  Rng rng(11);
  nn::Checkpoint cp;
  cp["alpha"] = {{2, 3}, {1.0, -2.5, 3.25, 1e-17, -0.0, 7.75}};
  std::vector<double> noisy(16);
  for (auto& v : noisy) v = rng.uniform(-1e6, 1e6);
  cp["beta"] = {{16}, noisy};
  nn::save_checkpoint(cp, dir.file("model.dmn"));
  auto loaded = nn::load_checkpoint(dir.file("model.dmn"));
  CHECK(loaded.size() == 2);
  CHECK(loaded.at("alpha").shape == std::vector<std::size_t>{2, 3});
  CHECK(loaded.at("alpha").data == cp.at("alpha").data);
  CHECK(loaded.at("beta").data == cp.at("beta").data);
  CHECK_THROWS(nn::require_entry(loaded, "alpha", {3, 2}));
  CHECK_THROWS(nn::require_entry(loaded, "missing", {1}));
}

TEST_CASE("checkpoint loader rejects a bad magic") {
  fixtures::TempDir dir;
  fixtures::write_file(dir.file("bogus.dmn"), "not a checkpoint");
  CHECK_THROWS(nn::load_checkpoint(dir.file("bogus.dmn")));
}
