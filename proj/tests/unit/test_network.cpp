#include "gradient_check.hpp"

#include "levelk/core/errors.hpp"
#include "levelk/nn/adam.hpp"
#include "levelk/nn/checkpoint.hpp"
#include "levelk/nn/network.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <limits>

using namespace levelk;
using namespace levelk::nn;

TEST(Network, QNetworkLayout) {
  const auto spec = q_network_spec(5);
  EXPECT_EQ(spec.layer_sizes, (std::vector<int>{9, 256, 256, 128, 5}));
  const auto p = NetworkParams::zeros(spec);
  EXPECT_EQ(p.parameter_count(), std::size_t(9 * 256 + 256 + 256 * 256 + 256 + 256 * 128 + 128 + 128 * 5 + 5));
}

TEST(Network, XavierBoundsAndZeroBiases) {
  RandomStream r(1);
  const auto p = xavier_init(q_network_spec(3), r);
  for (std::size_t l = 0; l < p.weights.size(); ++l) {
    const auto& w = p.weights[l];
    const double bound = std::sqrt(6.0 / static_cast<double>(w.rows() + w.cols()));
    EXPECT_LE(w.cwiseAbs().maxCoeff(), bound);
    EXPECT_GT(w.cwiseAbs().maxCoeff(), 0.9 * bound);
    EXPECT_EQ(p.biases[l].cwiseAbs().maxCoeff(), 0.0);
  }
}

TEST(Network, ForwardHandFixture) {
  // 2 -> 2 (relu) -> 1
  NetworkParams p = NetworkParams::zeros({{2, 2, 1}});
  p.weights[0] << 1, -1, 2, 1;
  p.biases[0] << 0, -1;
  p.weights[1] << 3, -2;
  p.biases[1] << 0.5;
  const std::vector<double> x = {1.0, 2.0};
  // hidden: relu(1 - 2 + 0) = 0, relu(2 + 2 - 1) = 3; out: 0 - 6 + 0.5
  EXPECT_DOUBLE_EQ(forward(p, x)(0), -5.5);
  const std::vector<double> bad = {1.0, std::numeric_limits<double>::quiet_NaN()};
  EXPECT_THROW(forward(p, bad), ContractViolation);
  const std::vector<double> short_input = {1.0};
  EXPECT_THROW(forward(p, short_input), ContractViolation);
}

TEST(Network, SingleLayerGradientByHand) {
  // Q = w x + b, one sample: L = (y - Q)^2, dL/dw = -2 (y - Q) x, dL/db = -2 (y - Q)
  NetworkParams p = NetworkParams::zeros({{2, 1}});
  p.weights[0] << 0.5, -1.0;
  p.biases[0] << 0.25;
  Matrix x(2, 1);
  x << 2.0, 3.0;
  const std::vector<TdSample> s = {{0, 1.0}};
  const auto lg = td_gradient(p, x, s);
  const double q = 0.5 * 2 - 3 + 0.25;
  EXPECT_DOUBLE_EQ(lg.loss, (1.0 - q) * (1.0 - q));
  EXPECT_DOUBLE_EQ(lg.gradient.weights[0](0, 0), -2 * (1.0 - q) * 2.0);
  EXPECT_DOUBLE_EQ(lg.gradient.weights[0](0, 1), -2 * (1.0 - q) * 3.0);
  EXPECT_DOUBLE_EQ(lg.gradient.biases[0](0), -2 * (1.0 - q));
}

TEST(Network, OnlySelectedOutputReceivesGradient) {
  RandomStream r(3);
  auto p = xavier_init({{4, 6, 3}}, r);
  Matrix x = Matrix::Constant(4, 1, 0.3);
  const std::vector<TdSample> s = {{1, 2.0}};
  const auto g = td_gradient(p, x, s).gradient;
  EXPECT_EQ(g.weights[1].row(0).cwiseAbs().sum(), 0.0);
  EXPECT_EQ(g.weights[1].row(2).cwiseAbs().sum(), 0.0);
  EXPECT_EQ(g.biases[1](0), 0.0);
}

TEST(Network, GradientMatchesFiniteDifferences) {
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    EXPECT_LT(oracle::gradient_check({9, 12, 10, 8, 5}, 6, seed), 1e-4) << "seed " << seed;
  }
}

TEST(Network, ArgmaxFirstIndexOnTies) {
  Vector v(4);
  v << 1, 3, 3, 2;
  EXPECT_EQ(argmax(v), 1);
}

TEST(Network, FlattenRoundTrip) {
  RandomStream r(5);
  const auto p = xavier_init({{3, 4, 2}}, r);
  auto q = NetworkParams::zeros(p.spec);
  q.assign_flat(p.flatten());
  EXPECT_EQ(p, q);
  // row-major W then b
  EXPECT_EQ(p.flatten()[1], p.weights[0](0, 1));
  EXPECT_EQ(p.flatten()[12], p.biases[0](0));
}

TEST(Adam, FirstStepMovesByLearningRate) {
  // after one step m_hat = g and v_hat = g^2, so the update is lr * g / (|g| + eps)
  NetworkParams p = NetworkParams::zeros({{2, 1}});
  p.weights[0] << 1.0, -1.0;
  auto g = NetworkParams::zeros(p.spec);
  g.weights[0] << 0.5, -2.0;
  g.biases[0] << 0.0;
  auto state = AdamState::for_params(p);
  adam_step(p, state, g);
  const double lr = 0.0013, eps = 1e-8;
  EXPECT_NEAR(p.weights[0](0, 0), 1.0 - lr * 0.5 / (0.5 + eps), 1e-15);
  EXPECT_NEAR(p.weights[0](0, 1), -1.0 + lr * 2.0 / (2.0 + eps), 1e-15);
  EXPECT_EQ(p.biases[0](0), 0.0);
  EXPECT_EQ(state.step, 1u);
}

TEST(Adam, ConstantGradientClosedForm) {
  // with a constant gradient g, m_hat = g and v_hat = g^2 at every step
  NetworkParams p = NetworkParams::zeros({{1, 1}});
  auto g = NetworkParams::zeros(p.spec);
  g.weights[0] << 0.3;
  g.biases[0] << -0.7;
  auto state = AdamState::for_params(p);
  for (int t = 0; t < 50; ++t) adam_step(p, state, g);
  const double lr = 0.0013, eps = 1e-8;
  EXPECT_NEAR(p.weights[0](0, 0), -50 * lr * 0.3 / (0.3 + eps), 1e-12);
  EXPECT_NEAR(p.biases[0](0), 50 * lr * 0.7 / (0.7 + eps), 1e-12);
}

TEST(Adam, RejectsShapeMismatch) {
  auto p = NetworkParams::zeros({{2, 1}});
  auto state = AdamState::for_params(p);
  EXPECT_THROW(adam_step(p, state, NetworkParams::zeros({{3, 1}})), ContractViolation);
}

TEST(Checkpoint, RoundTripIsExact) {
  RandomStream r(9);
  const auto p = xavier_init(q_network_spec(5), r);
  const CheckpointMeta meta{"level2", 1300, 42};
  const auto bytes = encode_checkpoint(p, meta);
  EXPECT_EQ(bytes.substr(0, 4), "LKQN");
  const auto c = decode_checkpoint(bytes, 5);
  EXPECT_EQ(c.params, p);
  EXPECT_EQ(c.meta, meta);
}

TEST(Checkpoint, DetectsCorruptionVersionAndShape) {
  RandomStream r(9);
  const auto p = xavier_init({{9, 4, 3}}, r);
  const auto bytes = encode_checkpoint(p, {"dynamic", 1, 2});
  auto expect_kind = [](const std::string& b, std::optional<int> outputs, CheckpointError::Kind kind) {
    try {
      decode_checkpoint(b, outputs);
      ADD_FAILURE() << "no error";
    } catch (const CheckpointError& e) {
      EXPECT_EQ(e.kind(), kind) << e.what();
    }
  };
  auto flipped = bytes;
  flipped[flipped.size() / 2] ^= 0x10;
  expect_kind(flipped, {}, CheckpointError::Kind::Corrupt);
  expect_kind(bytes.substr(0, bytes.size() - 3), {}, CheckpointError::Kind::Corrupt);
  auto magic = bytes;
  magic[0] = 'X';
  expect_kind(magic, {}, CheckpointError::Kind::Corrupt);
  auto version = bytes;
  version[4] = 7;
  expect_kind(version, {}, CheckpointError::Kind::Version);
  expect_kind(bytes, 5, CheckpointError::Kind::ShapeMismatch);
}

TEST(Checkpoint, FileRoundTripAndMissingFile) {
  const auto dir = std::filesystem::temp_directory_path() / "levelk_ckpt_test";
  std::filesystem::create_directories(dir);
  RandomStream r(2);
  const auto p = xavier_init({{9, 4, 5}}, r);
  save_params(p, {"level1", 3, 4}, dir / "a.qnet");
  EXPECT_EQ(load_params(dir / "a.qnet", 5).params, p);
  try {
    load_params(dir / "missing.qnet");
    ADD_FAILURE();
  } catch (const CheckpointError& e) {
    EXPECT_EQ(e.kind(), CheckpointError::Kind::Io);
  }
  std::filesystem::remove_all(dir);
}

TEST(Checkpoint, FnvReferenceValues) {
  // published FNV-1a 64 test vectors
  EXPECT_EQ(fnv1a(""), 0xcbf29ce484222325ULL);
  EXPECT_EQ(fnv1a("a"), 0xaf63dc4c8601ec8cULL);
  EXPECT_EQ(fnv1a("foobar"), 0x85944171f73967e8ULL);
}
