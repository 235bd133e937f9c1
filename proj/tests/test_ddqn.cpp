#include "doctest.h"
#include "uavris/ddqn.hpp"

#include <Eigen/Dense>
#include <cmath>
#include <sstream>

using namespace uavris;

namespace {

// Batch of hand-planted transitions living in a replay memory.
ReplayMemory memory_of(const std::vector<Transition>& ts, size_t capacity = 64) {
  ReplayMemory m(capacity);
  for (const auto& t : ts) m.push(t);
  return m;
}

std::vector<size_t> iota_batch(size_t n) {
  std::vector<size_t> idx(n);
  for (size_t i = 0; i < n; ++i) idx[i] = i;
  return idx;
}

}  // namespace

TEST_CASE("forward with zero weights is zero") {
  Rng rng(1);
  QNetwork net({3, 4, 2}, rng);
  for (size_t i = 0; i < net.param_count(); ++i) net.set_param(i, 0.0);
  const auto q = net.forward({0.5, -0.2, 0.9});
  CHECK(q == std::vector<double>{0.0, 0.0});
}

TEST_CASE("single linear layer reproduces a padded identity") {
  Rng rng(2);
  QNetwork net({3, 3}, rng);
  for (size_t i = 0; i < net.param_count(); ++i) net.set_param(i, 0.0);
  // weights are row-major (out x in)
  net.weights()[0][0 * 3 + 0] = 1.0;
  net.weights()[0][1 * 3 + 1] = 1.0;
  net.weights()[0][2 * 3 + 2] = 1.0;
  const auto q = net.forward({0.25, -1.5, 3.0});
  CHECK(q[0] == 0.25);
  CHECK(q[1] == -1.5);
  CHECK(q[2] == 3.0);
}

TEST_CASE("forward matches an Eigen layer-by-layer recomputation") {
  Rng rng(3);
  QNetwork net({5, 7, 6, 4}, rng);
  std::vector<double> input(5);
  for (auto& v : input) v = rng.uniform(-1, 1);
  const auto q = net.forward(input);

  Eigen::VectorXd act = Eigen::Map<const Eigen::VectorXd>(input.data(), 5);
  const auto& sizes = net.layer_sizes();
  for (size_t l = 0; l + 1 < sizes.size(); ++l) {
    Eigen::MatrixXd w(sizes[l + 1], sizes[l]);
    for (int o = 0; o < sizes[l + 1]; ++o)
      for (int i = 0; i < sizes[l]; ++i)
        w(o, i) = net.weights()[l][static_cast<size_t>(o) * sizes[l] + i];
    Eigen::VectorXd b =
        Eigen::Map<const Eigen::VectorXd>(net.biases()[l].data(), sizes[l + 1]);
    act = (w * act + b).eval();
    if (l + 2 < sizes.size()) act = act.cwiseMax(0.0);
  }
  for (int i = 0; i < 4; ++i) CHECK(q[i] == doctest::Approx(act(i)).epsilon(1e-12));
}

TEST_CASE("forward rejects dimension mismatch") {
  Rng rng(4);
  QNetwork net({3, 2}, rng);
  CHECK_THROWS_AS(net.forward({1.0, 2.0}), std::invalid_argument);
}

TEST_CASE("epsilon 0 always picks the argmax, ties break low") {
  Rng rng(5);
  for (int i = 0; i < 100; ++i)
    CHECK(select_action({1.0, 3.0, 2.0}, 0.0, rng) == 1);
  for (int i = 0; i < 100; ++i)
    CHECK(select_action({2.0, 2.0, 2.0}, 0.0, rng) == 0);
  CHECK(argmax_index({2.0, 2.0, 2.0}) == 0);
}

TEST_CASE("epsilon-greedy frequencies approach the printed distribution") {
  Rng rng(6);
  const std::vector<double> q = {0.1, 0.9, 0.3, 0.2, 0.4};
  std::vector<int> counts(5, 0);
  const int n = 200000;
  for (int i = 0; i < n; ++i) ++counts[select_action(q, 0.1, rng)];
  CHECK(static_cast<double>(counts[1]) / n == doctest::Approx(0.9).epsilon(0.01));
  for (int a = 0; a < 5; ++a) {
    if (a == 1) continue;
    CHECK(static_cast<double>(counts[a]) / n ==
          doctest::Approx(0.1 / 4).epsilon(0.08));
  }
}

TEST_CASE("decayed learning rate follows alpha0 / (1 + eta n)") {
  CHECK(decayed_lr(0.1, 0.001, 0) == 0.1);
  CHECK(decayed_lr(0.1, 0.001, 1000) == 0.05);
  CHECK(decayed_lr(0.1, 0.0, 123456) == 0.1);
  double prev = 1.0;
  for (int n = 0; n < 100; ++n) {
    const double lr = decayed_lr(0.5, 0.01, n);
    CHECK(lr < prev);
    CHECK(lr <= 0.5);
    prev = lr;
  }
}

TEST_CASE("td targets: myopic limit, arithmetic, terminal handling") {
  Rng rng(7);
  QNetwork target({2, 3}, rng);
  const Transition t1{{0.1, 0.2}, 0, 1.0, {0.3, 0.4}, false};
  const Transition t2{{0.1, 0.2}, 1, 5.0, {0.3, 0.4}, true};
  const ReplayMemory mem = memory_of({t1, t2});

  const auto y0 = td_targets(mem, iota_batch(2), target, 0.0);
  CHECK(y0[0] == 1.0);
  CHECK(y0[1] == 5.0);

  // Force max Q(s') = 2 to get 1 + 0.7 * 2 = 2.4.
  for (size_t i = 0; i < target.param_count(); ++i) target.set_param(i, 0.0);
  target.biases()[0] = {2.0, -1.0, 0.5};
  const auto y = td_targets(mem, iota_batch(2), target, 0.7);
  CHECK(y[0] == doctest::Approx(2.4).epsilon(1e-15));
  CHECK(y[1] == 5.0);  // terminal ignores the bootstrap
}

TEST_CASE("td targets match a scalar loop on random batches") {
  Rng rng(8);
  QNetwork target({3, 5, 4}, rng);
  std::vector<Transition> ts;
  for (int i = 0; i < 32; ++i) {
    Transition t;
    t.state = {rng.uniform(-1, 1), rng.uniform(-1, 1), rng.uniform(-1, 1)};
    t.next_state = {rng.uniform(-1, 1), rng.uniform(-1, 1), rng.uniform(-1, 1)};
    t.action = static_cast<int>(rng.uniform_index(4));
    t.reward = rng.uniform(-2, 2);
    t.terminal = rng.bernoulli(0.2);
    ts.push_back(t);
  }
  const ReplayMemory mem = memory_of(ts);
  const auto y = td_targets(mem, iota_batch(32), target, 0.7);
  for (size_t i = 0; i < 32; ++i) {
    double expect = ts[i].reward;
    if (!ts[i].terminal) {
      const auto qn = target.forward(ts[i].next_state);
      double mx = qn[0];
      for (double v : qn) mx = std::max(mx, v);
      expect += 0.7 * mx;
    }
    CHECK(y[i] == doctest::Approx(expect).epsilon(1e-12));
  }
}

TEST_CASE("zero TD error leaves the network untouched") {
  Rng rng(9);
  QNetwork net({2, 4, 3}, rng);
  const Transition t{{0.3, -0.7}, 1, 0.0, {0.0, 0.0}, true};
  const ReplayMemory mem = memory_of({t});
  const double q = net.forward(t.state)[1];
  const std::vector<double> targets = {q};  // y == Q
  QNetwork before = net;
  const double loss = gradient_step(net, mem, {0}, targets, 0.05);
  CHECK(loss == 0.0);
  for (size_t i = 0; i < net.param_count(); ++i)
    CHECK(net.get_param(i) == before.get_param(i));
}

TEST_CASE("single linear layer takes the closed-form regression step") {
  Rng rng(10);
  QNetwork net({2, 2}, rng);
  for (size_t i = 0; i < net.param_count(); ++i) net.set_param(i, 0.0);
  // Q(s, a) = w_a . s; batch of two samples on action 0 and 1.
  const Transition t0{{1.0, 2.0}, 0, 0.0, {0, 0}, true};
  const Transition t1{{-1.0, 0.5}, 1, 0.0, {0, 0}, true};
  const ReplayMemory mem = memory_of({t0, t1});
  const std::vector<double> y = {2.0, -1.0};
  const double lr = 0.1;
  gradient_step(net, mem, {0, 1}, y, lr);
  // grad w_0 = -(1/I)(y_0 - 0) s_0, I = 2
  CHECK(net.weights()[0][0] == doctest::Approx(lr * 0.5 * 2.0 * 1.0));
  CHECK(net.weights()[0][1] == doctest::Approx(lr * 0.5 * 2.0 * 2.0));
  CHECK(net.weights()[0][2] == doctest::Approx(lr * 0.5 * -1.0 * -1.0));
  CHECK(net.weights()[0][3] == doctest::Approx(lr * 0.5 * -1.0 * 0.5));
  CHECK(net.biases()[0][0] == doctest::Approx(lr * 0.5 * 2.0));
  CHECK(net.biases()[0][1] == doctest::Approx(lr * 0.5 * -1.0));
}

TEST_CASE("analytic gradient matches central finite differences") {
  Rng rng(11);
  for (int trial = 0; trial < 3; ++trial) {
    const int in = 3 + static_cast<int>(rng.uniform_index(3));
    const int hidden = 5 + static_cast<int>(rng.uniform_index(10));
    const int out = 2 + static_cast<int>(rng.uniform_index(4));
    QNetwork net({in, hidden, out}, rng);

    std::vector<Transition> ts;
    for (int i = 0; i < 8; ++i) {
      Transition t;
      for (int j = 0; j < in; ++j) t.state.push_back(rng.uniform(-1, 1));
      t.action = static_cast<int>(rng.uniform_index(out));
      t.terminal = true;
      ts.push_back(t);
    }
    const ReplayMemory mem = memory_of(ts);
    std::vector<double> y(8);
    for (auto& v : y) v = rng.uniform(-1, 1);
    const auto batch = iota_batch(8);

    // Analytic gradient read off a tiny step.
    QNetwork stepped = net;
    const double lr = 1.0;
    gradient_step(stepped, mem, batch, y, lr);
    const double eps = 1e-6;
    for (size_t i = 0; i < net.param_count(); i += 7) {  // sample the params
      const double analytic = (net.get_param(i) - stepped.get_param(i)) / lr;
      QNetwork plus = net, minus = net;
      plus.set_param(i, net.get_param(i) + eps);
      minus.set_param(i, net.get_param(i) - eps);
      const double fd =
          (td_loss(plus, mem, batch, y) - td_loss(minus, mem, batch, y)) /
          (2 * eps);
      const double denom = std::max({std::abs(analytic), std::abs(fd), 1e-8});
      CHECK(std::abs(analytic - fd) / denom < 1e-4);
    }
  }
}

TEST_CASE("loss is non-increasing for a small step") {
  Rng rng(12);
  QNetwork net({4, 10, 5}, rng);
  std::vector<Transition> ts;
  for (int i = 0; i < 16; ++i) {
    Transition t;
    for (int j = 0; j < 4; ++j) t.state.push_back(rng.uniform(-1, 1));
    t.action = static_cast<int>(rng.uniform_index(5));
    t.terminal = true;
    ts.push_back(t);
  }
  const ReplayMemory mem = memory_of(ts);
  std::vector<double> y(16);
  for (auto& v : y) v = rng.uniform(-1, 1);
  const auto batch = iota_batch(16);
  const double before = td_loss(net, mem, batch, y);
  gradient_step(net, mem, batch, y, 1e-3);
  CHECK(td_loss(net, mem, batch, y) <= before);
}

TEST_CASE("tabular update arithmetic") {
  CHECK(tabular_q_update(0.0, 1.0, 2.0, 0.5, 0.7) == doctest::Approx(1.2).epsilon(1e-15));
  CHECK(tabular_q_update(3.3, 1.0, 2.0, 0.0, 0.7) == 3.3);
  CHECK(tabular_q_update(3.3, 1.0, 2.0, 1.0, 0.7) == doctest::Approx(2.4).epsilon(1e-15));
}

TEST_CASE("replay memory is a strict FIFO ring") {
  ReplayMemory mem(4);
  for (int i = 0; i < 6; ++i) {
    Transition t;
    t.reward = i;
    mem.push(t);
    CHECK(mem.size() <= 4);
  }
  // After 6 pushes into capacity 4, entries 0 and 1 were evicted first.
  std::vector<double> rewards;
  for (size_t i = 0; i < mem.size(); ++i) rewards.push_back(mem.at(i).reward);
  std::sort(rewards.begin(), rewards.end());
  CHECK(rewards == std::vector<double>{2, 3, 4, 5});
}

TEST_CASE("checkpoint stream round-trips the network and rng state") {
  Rng rng(13);
  QNetwork net({4, 6, 3}, rng);
  Rng stream(99);
  stream.next_u64();
  std::ostringstream out;
  save_checkpoint_stream(out, net, stream);

  std::istringstream in(out.str());
  const Checkpoint cp = load_checkpoint_stream(in);
  CHECK(cp.net.layer_sizes() == net.layer_sizes());
  REQUIRE(cp.net.param_count() == net.param_count());
  for (size_t i = 0; i < net.param_count(); ++i)
    CHECK(cp.net.get_param(i) == net.get_param(i));
  CHECK(cp.rng_state == stream.state());

  std::istringstream bad("XXXXgarbage");
  CHECK_THROWS_WITH_AS(load_checkpoint_stream(bad), "checkpoint: bad magic bytes",
                       std::runtime_error);
}
