#include <cmath>
#include <vector>

#include "doctest.h"
#include "harvestrl/errors.hpp"
#include "harvestrl/rl_core.hpp"

using namespace harvestrl;
using namespace harvestrl::rl;

namespace {

ExplorationParams fixed_eps(double e) { return {e, e, 0.0}; }

}  // namespace

TEST_CASE("epsilon schedule") {
  const ExplorationParams p;
  CHECK(compute_epsilon(p, 0, 3) == doctest::Approx(0.9));
  CHECK(compute_epsilon(p, 3, 3) == doctest::Approx(0.05));
  CHECK(compute_epsilon(p, 2, 3) == doctest::Approx(0.05 + 0.85 / 3.0));
  CHECK_THROWS_AS(compute_epsilon(p, 0, 0), ConfigError);
  CHECK_THROWS_AS(compute_epsilon(p, 4, 3), ContractViolation);
}

TEST_CASE("epsilon is non-increasing and bounded") {
  for (double k : {0.0, 0.3, 0.85, 2.0}) {
    const ExplorationParams p{0.9, 0.05, k};
    for (std::size_t smax : {1u, 3u, 8u, 50u}) {
      double prev = 2.0;
      for (std::size_t s = 0; s <= smax; ++s) {
        const double e = compute_epsilon(p, s, smax);
        CHECK(e <= prev);
        CHECK(e >= 0.05 - 1e-15);
        CHECK(e <= 0.9);
        prev = e;
      }
    }
  }
}

TEST_CASE("alpha schedule") {
  CHECK(compute_alpha(1.0, 1) == 1.0);
  CHECK(compute_alpha(1.0, 4) == 0.25);
  CHECK(compute_alpha(0.5, 10) == doctest::Approx(0.05));
  CHECK_THROWS_AS(compute_alpha(1.0, 0), ContractViolation);

  // Strictly decreasing; partial sums grow like log n, squares stay below pi^2/6.
  double sum = 0.0, sq = 0.0, prev = 2.0;
  for (std::uint64_t n = 1; n <= 10000; ++n) {
    const double a = compute_alpha(1.0, n);
    CHECK(a < prev);
    prev = a;
    sum += a;
    sq += a * a;
  }
  CHECK(sum > std::log(10000.0));
  CHECK(sum < std::log(10000.0) + 1.0);
  CHECK(sq < M_PI * M_PI / 6.0);
}

TEST_CASE("parameter validation") {
  CHECK_NOTHROW(ExplorationParams{}.validate());
  CHECK_THROWS_AS((ExplorationParams{0.1, 0.2, 0.5}.validate()), ConfigError);
  CHECK_THROWS_AS((ExplorationParams{1.5, 0.2, 0.5}.validate()), ConfigError);
  CHECK_THROWS_AS((ExplorationParams{0.9, 0.05, -1.0}.validate()), ConfigError);
  CHECK_NOTHROW(LearningParams{}.validate());
  CHECK_THROWS_AS((LearningParams{0.0, 0.8}.validate()), ConfigError);
  CHECK_THROWS_AS((LearningParams{1.0, 1.0}.validate()), ConfigError);
  try {
    LearningParams{1.0, 1.0}.validate();
  } catch (const ConfigError& e) {
    CHECK(e.key() == "rl.gamma");
  }
}

TEST_CASE("pure exploration is uniform") {
  QTable q(1, 3);
  q.set_value({0}, {1}, 5.0);
  Rng rng(11);
  std::vector<int> counts(3, 0);
  const int n = 10000;
  for (int i = 0; i < n; ++i) ++counts[select_action(q, {0}, fixed_eps(1.0), rng).index];
  double chi2 = 0.0;
  for (int c : counts) chi2 += (c - n / 3.0) * (c - n / 3.0) / (n / 3.0);
  CHECK(chi2 < 13.82);  // df = 2, p = 0.001
}

TEST_CASE("pure greedy and tie-breaking") {
  QTable q(1, 3);
  q.set_value({0}, {0}, 0.1);
  q.set_value({0}, {1}, 0.9);
  q.set_value({0}, {2}, 0.3);
  q.observe({0});
  Rng rng(3);
  for (int i = 0; i < 1000; ++i) CHECK(select_action(q, {0}, fixed_eps(0.0), rng).index == 1);

  QTable t(1, 3);
  t.set_value({0}, {0}, 0.5);
  t.set_value({0}, {1}, 0.5);
  t.set_value({0}, {2}, 0.1);
  int zero = 0, one = 0;
  for (int i = 0; i < 10000; ++i) {
    const auto a = select_action(t, {0}, fixed_eps(0.0), rng).index;
    REQUIRE(a <= 1);
    (a == 0 ? zero : one)++;
  }
  CHECK(std::abs(zero - 5000) < 200);
  CHECK(std::abs(one - 5000) < 200);
}

TEST_CASE("update rule") {
  QTable q(2, 2);
  q.set_value({1}, {0}, 0.0);
  apply_update(q, {0}, {0}, 1.0, {1}, 0.8, 1.0);
  CHECK(q.value({0}, {0}) == 1.0);

  QTable h(2, 2);
  h.set_value({0}, {1}, 0.5);
  h.set_value({1}, {0}, 1.0);
  apply_update(h, {0}, {1}, 0.0, {1}, 0.8, 0.5);
  CHECK(h.value({0}, {1}) == doctest::Approx(0.65));

  const QTable before = h;
  apply_update(h, {0}, {1}, 0.7, {1}, 0.8, 0.0);
  CHECK(h == before);
}

TEST_CASE("update_q bookkeeping") {
  QTable q(3, 2);
  const LearningParams lp;
  q.observe({0});
  CHECK(q.visited_states() == 1);
  CHECK(update_q(q, {0}, {1}, 1.0, {2}, lp) == 1.0);
  CHECK(q.visits({0}, {1}) == 1);
  CHECK(q.visited_states() == 2);
  CHECK(q.seen({2}));
  CHECK(update_q(q, {0}, {1}, 0.0, {2}, lp) == 0.5);
  CHECK(q.visits({0}, {1}) == 2);
  CHECK(q.value({0}, {1}) == doctest::Approx(0.5));
  CHECK_THROWS_AS(update_q(q, {0}, {0}, std::nan(""), {1}, lp), RewardError);
  CHECK_THROWS_AS(update_q(q, {0}, {0}, INFINITY, {1}, lp), RewardError);
  CHECK(q.visits({0}, {0}) == 0);
  CHECK_THROWS_AS(update_q(q, {5}, {0}, 0.0, {1}, lp), ContractViolation);
  CHECK_THROWS_AS(q.set_value({0}, {0}, NAN), ContractViolation);
}

TEST_CASE("greedy policy extraction") {
  QTable z(4, 3);
  for (auto a : greedy_policy(z)) CHECK(a.index == 0);

  QTable q(2, 2);
  q.set_value({0}, {1}, 1.0);
  q.set_value({1}, {0}, 2.0);
  q.set_value({1}, {1}, 1.0);
  const auto p = greedy_policy(q);
  CHECK(p[0].index == 1);
  CHECK(p[1].index == 0);

  Rng rng(99);
  QTable r(20, 6);
  for (std::size_t s = 0; s < 20; ++s)
    for (std::size_t a = 0; a < 6; ++a) r.set_value({s}, {a}, rng.uniform01());
  const auto g = greedy_policy(r);
  for (std::size_t s = 0; s < 20; ++s) {
    std::size_t best = 0;
    for (std::size_t a = 1; a < 6; ++a)
      if (r.value({s}, {a}) > r.value({s}, {best})) best = a;
    CHECK(g[s].index == best);
  }
}

TEST_CASE("Q stays within the discounted reward bound") {
  const double gamma = 0.8;
  const LearningParams lp{1.0, gamma};
  QTable q(5, 4);
  Rng rng(5);
  std::size_t s = 0;
  q.observe({s});
  for (int i = 0; i < 100000; ++i) {
    const auto a = select_action(q, {s}, ExplorationParams{}, rng);
    const std::size_t s2 = rng.uniform_index(5);
    const double r = rng.uniform01() < 0.5 ? 1.0 : -1.0 + 2.0 * rng.uniform01();
    update_q(q, {s}, a, r, {s2}, lp);
    REQUIRE(std::abs(q.value({s}, a)) <= 1.0 / (1.0 - gamma) + 1e-12);
    s = s2;
  }
}

TEST_CASE("identical seeds replay identically") {
  auto run = [](std::uint64_t seed) {
    QTable q(4, 3);
    Rng rng(seed);
    std::vector<QTable> trajectory;
    std::size_t s = 0;
    q.observe({s});
    for (int i = 0; i < 2000; ++i) {
      const auto a = select_action(q, {s}, ExplorationParams{}, rng);
      const std::size_t s2 = rng.uniform_index(4);
      update_q(q, {s}, a, rng.uniform01(), {s2}, LearningParams{});
      if (i % 100 == 0) trajectory.push_back(q);
      s = s2;
    }
    return trajectory;
  };
  CHECK(run(42) == run(42));
  CHECK_FALSE(run(42) == run(43));
}

TEST_CASE("value iteration oracle") {
  ExplicitMdp one{1, 1, {1.0}, {1.0}};
  const auto q1 = value_iteration_oracle(one, 0.5, 1e-12);
  CHECK(q1(0, 0) == doctest::Approx(2.0).epsilon(1e-10));

  // s0 -> s1 paying 0, s1 -> s0 paying 1. Q0 = 0.8 Q1, Q1 = 1 + 0.8 Q0.
  ExplicitMdp chain{2, 1, {0.0, 1.0, 1.0, 0.0}, {0.0, 1.0}};
  const auto qc = value_iteration_oracle(chain, 0.8, 1e-12);
  CHECK(qc(0, 0) == doctest::Approx(0.8 / 0.36).epsilon(1e-10));
  CHECK(qc(1, 0) == doctest::Approx(1.0 / 0.36).epsilon(1e-10));

  Rng rng(7);
  ExplicitMdp m{4, 3, {}, {}};
  for (std::size_t sa = 0; sa < 12; ++sa) {
    std::vector<double> row(4);
    double total = 0.0;
    for (auto& v : row) total += (v = rng.uniform01());
    for (auto v : row) m.transition.push_back(v / total);
    m.reward.push_back(2.0 * rng.uniform01() - 1.0);
  }
  const auto qm = value_iteration_oracle(m, 0.9, 1e-9);
  CHECK(bellman_residual(m, qm, 0.9) < 1e-9);

  ExplicitMdp bad{1, 1, {0.9}, {0.0}};
  CHECK_THROWS_AS(bad.validate(), ConfigError);
  CHECK_THROWS_AS(value_iteration_oracle(bad, 0.5, 1e-9), ConfigError);
}
