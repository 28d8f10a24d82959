#include "tiny_mdp.hpp"

#include "levelk/core/errors.hpp"
#include "levelk/dqn/dqn.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <map>

using namespace levelk;
using namespace levelk::dqn;

namespace {

Experience exp_with(int tag, bool terminal = false) {
  Experience e;
  e.s[0] = tag;
  e.action = tag % 3;
  e.reward = tag;
  e.terminal = terminal;
  return e;
}

}  // namespace

TEST(Replay, FifoEvictionAtCapacity) {
  ReplayMemory m(3, 1);
  for (int i = 0; i < 5; ++i) m.push(exp_with(i));
  EXPECT_EQ(m.size(), 3u);
  EXPECT_EQ(m.at(0).reward, 2.0);
  EXPECT_EQ(m.at(2).reward, 4.0);
  EXPECT_THROW(m.at(3), ContractViolation);
}

TEST(Replay, NoSamplingBeforeWarmup) {
  ReplayMemory m(10, 4);
  RandomStream r(1);
  for (int i = 0; i < 3; ++i) m.push(exp_with(i));
  EXPECT_FALSE(m.ready());
  EXPECT_THROW(m.sample_batch(2, r), ContractViolation);
  m.push(exp_with(3));
  EXPECT_TRUE(m.ready());
  EXPECT_EQ(m.sample_batch(32, r).size(), 32u);
}

TEST(Replay, SamplingIsUniform) {
  ReplayMemory m(5, 5);
  for (int i = 0; i < 5; ++i) m.push(exp_with(i));
  RandomStream r(2);
  std::array<int, 5> counts{};
  const int draws = 50000;
  for (int i = 0; i < draws / 10; ++i) {
    for (auto idx : m.sample_indices(10, r)) ++counts[idx];
  }
  for (int c : counts) EXPECT_NEAR(c, draws / 5.0, 4 * std::sqrt(draws * 0.2 * 0.8));
}

TEST(Replay, RejectsBadConfiguration) {
  EXPECT_THROW(ReplayMemory(0, 0), ContractViolation);
  EXPECT_THROW(ReplayMemory(10, 11), ContractViolation);
}

TEST(Boltzmann, ClosedFormProbabilities) {
  // q = (0, ln 2) at T = 1 -> (1/3, 2/3)
  const std::vector<double> q = {0.0, std::log(2.0)};
  const auto p = boltzmann_probabilities(q, 1.0);
  EXPECT_NEAR(p[0], 1.0 / 3.0, 1e-12);
  EXPECT_NEAR(p[1], 2.0 / 3.0, 1e-12);
  // temperature scales the logits
  const auto p2 = boltzmann_probabilities(std::vector<double>{0.0, 2 * std::log(2.0)}, 2.0);
  EXPECT_NEAR(p2[1], 2.0 / 3.0, 1e-12);
}

TEST(Boltzmann, StableForLargeValues) {
  const auto p = boltzmann_probabilities(std::vector<double>{1000.0, 1000.0, -1000.0}, 1.0);
  EXPECT_NEAR(p[0], 0.5, 1e-12);
  EXPECT_NEAR(p[2], 0.0, 1e-12);
  EXPECT_THROW(boltzmann_probabilities(std::vector<double>{}, 1.0), ContractViolation);
  EXPECT_THROW(boltzmann_probabilities(std::vector<double>{1.0}, 0.0), ContractViolation);
}

TEST(Boltzmann, SamplingFrequencies) {
  RandomStream r(4);
  const std::vector<double> q = {0.0, std::log(2.0)};
  const int n = 100000;
  int ones = 0;
  for (int i = 0; i < n; ++i) ones += boltzmann_sample(q, 1.0, r);
  EXPECT_NEAR(ones / double(n), 2.0 / 3.0, 3 * std::sqrt(2.0 / 9.0 / n));
}

TEST(Boltzmann, AnnealingSchedule) {
  BoltzmannSchedule s;
  s.anneal();
  EXPECT_DOUBLE_EQ(s.temperature, 50.0 * 0.998);
  for (int i = 0; i < 10000; ++i) s.anneal();
  EXPECT_EQ(s.temperature, 1.0);
  // 50 * 0.998^n reaches 1 after ceil(ln 50 / -ln 0.998) episodes
  BoltzmannSchedule t;
  int n = 0;
  while (t.temperature > 1.0) {
    t.anneal();
    ++n;
  }
  EXPECT_EQ(n, static_cast<int>(std::ceil(std::log(50.0) / -std::log(0.998))));
}

TEST(TdTargets, TerminalAndBootstrapped) {
  // a network whose outputs are its biases: 9 -> 2 with zero weights
  nn::NetworkParams target = nn::NetworkParams::zeros({{9, 2}});
  target.biases[0] << 1.5, 4.0;
  std::vector<Experience> batch(2);
  batch[0].reward = 1.0;
  batch[0].terminal = true;
  batch[1].reward = 1.0;
  const auto y = td_targets(batch, target, 0.95);
  EXPECT_DOUBLE_EQ(y[0], 1.0);
  EXPECT_DOUBLE_EQ(y[1], 1.0 + 0.95 * 4.0);
}

TEST(Learner, TargetSyncEveryUpdatePeriod) {
  TrainerConfig c;
  c.warmup = 1;
  c.memory_capacity = 100;
  c.target_update = 5;
  RandomStream r(1);
  Learner learner(nn::xavier_init({{9, 8, 2}}, r), c, 7);
  learner.remember(exp_with(1));
  for (int t = 1; t <= 4; ++t) {
    ASSERT_TRUE(learner.train_tick().has_value());
    EXPECT_FALSE(learner.primary() == learner.target()) << "tick " << t;
  }
  learner.train_tick();
  EXPECT_TRUE(learner.primary() == learner.target());
}

TEST(Learner, NoUpdatesDuringWarmup) {
  TrainerConfig c;
  c.warmup = 3;
  c.memory_capacity = 10;
  RandomStream r(1);
  const auto init = nn::xavier_init({{9, 8, 2}}, r);
  Learner learner(init, c, 7);
  learner.remember(exp_with(1));
  EXPECT_FALSE(learner.train_tick().has_value());
  EXPECT_TRUE(learner.primary() == init);
}

TEST(Learner, ConvergesOnTinyMdp) {
  const oracle::TinyMdp mdp;
  const auto q_star = mdp.optimal_q();
  TrainerConfig c;
  c.gamma = mdp.gamma;
  c.warmup = 64;
  c.memory_capacity = 2000;
  c.target_update = 100;
  RandomStream init_rng(3);
  Learner learner(nn::xavier_init({{9, 32, 32, 2}}, init_rng), c, 5);
  RandomStream behaviour(11);
  for (int t = 0; t < 6000; ++t) {
    const int s = static_cast<int>(behaviour.index(2));
    const int a = static_cast<int>(behaviour.index(2));
    const auto o = oracle::TinyMdp::step(s, a);
    Experience e;
    e.s = oracle::TinyMdp::encode(s);
    e.action = a;
    e.reward = o.reward;
    e.terminal = o.next < 0;
    e.s_next = oracle::TinyMdp::encode(std::max(o.next, 0));
    learner.remember(e);
    learner.train_tick();
  }
  double worst = 0.0;
  for (int s = 0; s < 2; ++s) {
    const auto x = oracle::TinyMdp::encode(s);
    const auto q = nn::forward(learner.primary(), x);
    for (int a = 0; a < 2; ++a) worst = std::max(worst, std::abs(q(a) - q_star[s][a]));
  }
  EXPECT_LT(worst, 0.05);
}

TEST(TrainerConfig, DefaultsAndValidation) {
  TrainerConfig c;
  EXPECT_EQ(c.memory_capacity, 50000u);
  EXPECT_EQ(c.warmup, 5000u);
  EXPECT_EQ(c.target_update, 1000u);
  EXPECT_EQ(c.batch_size, 32u);
  EXPECT_EQ(c.gamma, 0.95);
  EXPECT_EQ(c.initial_temperature, 50.0);
  EXPECT_EQ(c.adam.learning_rate, 0.0013);
  c.gamma = 1.5;
  EXPECT_THROW(c.validate(), ConfigError);
}
