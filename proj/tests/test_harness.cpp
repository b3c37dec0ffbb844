#include <cmath>

#include "doctest.h"
#include "harvestrl/errors.hpp"
#include "harvestrl/harness.hpp"

using namespace harvestrl;
using namespace harvestrl::harness;
using scenarios::PolicySnapshot;
using scenarios::TimeSeriesRecord;

namespace {

std::vector<TimeSeriesRecord> records_in(std::vector<std::size_t> states) {
  std::vector<TimeSeriesRecord> out;
  for (std::size_t i = 0; i < states.size(); ++i) {
    TimeSeriesRecord r;
    r.t_min = 20.0 * i;
    r.state = {states[i]};
    r.soc = 1.0;
    out.push_back(r);
  }
  return out;
}

PolicySnapshot pol(std::initializer_list<std::size_t> a) {
  PolicySnapshot p;
  for (auto x : a) p.push_back({x});
  return p;
}

scenarios::WbanScenarioConfig forced(int action) {
  scenarios::WbanScenarioConfig cfg;
  cfg.agent.forced_action = action;
  cfg.agent.learning_enabled = false;
  return cfg;
}

}  // namespace

TEST_CASE("policy stability time") {
  const auto recs = records_in(std::vector<std::size_t>(100, 0));
  std::vector<PolicySnapshot> constant(100, pol({2, 1}));
  CHECK(policy_stability_time(recs, constant) == std::optional<std::size_t>(0));

  std::vector<PolicySnapshot> flip(100, pol({1, 1}));
  for (std::size_t u = 0; u < 40; ++u) flip[u] = pol({0, 1});
  CHECK(policy_stability_time(recs, flip) == std::optional<std::size_t>(40));

  std::vector<PolicySnapshot> alternating;
  for (std::size_t u = 0; u < 100; ++u) alternating.push_back(pol({u % 2, 0}));
  CHECK_FALSE(policy_stability_time(recs, alternating).has_value());

  // A late flip in the last 10% counts as not converged.
  std::vector<PolicySnapshot> late(100, pol({1, 1}));
  for (std::size_t u = 0; u < 95; ++u) late[u] = pol({0, 1});
  CHECK_FALSE(policy_stability_time(recs, late).has_value());

  // Disagreements in states that are never visited again do not count.
  auto mixed = records_in({1, 1, 1, 1, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0});
  std::vector<PolicySnapshot> p(20, pol({0, 0}));
  for (std::size_t u = 0; u < 12; ++u) p[u] = pol({0, 1});
  CHECK(policy_stability_time(mixed, p) == std::optional<std::size_t>(4));

  CHECK_THROWS_AS(policy_stability_time(recs, std::vector<PolicySnapshot>(3, pol({0}))), ContractViolation);
}

TEST_CASE("stability time does not grow when the final policy is kept") {
  Rng rng(12);
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t n = 50 + rng.uniform_index(100);
    std::vector<std::size_t> states;
    std::vector<PolicySnapshot> snaps;
    for (std::size_t i = 0; i < n; ++i) {
      states.push_back(rng.uniform_index(3));
      snaps.push_back(pol({rng.uniform_index(2), rng.uniform_index(2), rng.uniform_index(2)}));
    }
    // Settle the tail so the base run has a chance to converge.
    const std::size_t settle = n / 3 + rng.uniform_index(n / 3);
    for (std::size_t i = settle; i < n; ++i) snaps[i] = snaps.back();
    const auto base = policy_stability_time(records_in(states), snaps);

    // Append epochs only in states visited after the base t*, with the final policy.
    const std::size_t stable_from = base ? *base : settle;
    std::vector<std::size_t> allowed(states.begin() + static_cast<std::ptrdiff_t>(stable_from), states.end());
    const std::size_t extra = 1 + rng.uniform_index(200);
    for (std::size_t i = 0; i < extra; ++i) {
      states.push_back(allowed[rng.uniform_index(allowed.size())]);
      snaps.push_back(snaps.back());
    }
    const auto longer = policy_stability_time(records_in(states), snaps);
    if (base) {
      REQUIRE(longer.has_value());
      CHECK(*longer <= *base);
    }
  }
}

TEST_CASE("summaries of constant-action runs") {
  const scenarios::ScenarioConfig five = forced(5);
  const auto s = summarize(scenarios::run_scenario(five, 1), five, 1);
  for (const auto& c : s.normalized_consumption) {
    REQUIRE(c.has_value());
    CHECK(*c == doctest::Approx(0.1926 / 0.6278));
  }
  CHECK(s.survived_days == 7.0);
  CHECK(s.min_soc <= s.final_soc);

  std::vector<TimeSeriesRecord> relax(10);
  for (auto& r : relax) r.load_ma = 0.6278, r.soc = 0.5;
  const scenarios::ScenarioConfig wban = scenarios::WbanScenarioConfig{};
  const auto only = summarize(relax, {}, wban);
  CHECK(*only.normalized_consumption[0] == doctest::Approx(1.0));
  CHECK_FALSE(only.normalized_consumption[1].has_value());
  CHECK_FALSE(only.normalized_consumption[2].has_value());

  relax[6].soc = 0.0;
  CHECK(summarize(relax, {}, wban).survived_days == doctest::Approx(6.0 * 20.0 / 1440.0));
  CHECK_THROWS_AS(summarize(std::vector<TimeSeriesRecord>{}, {}, wban), ContractViolation);
}

TEST_CASE("seed sweeps") {
  const scenarios::ScenarioConfig cfg = scenarios::WbanScenarioConfig{};
  const auto one = sweep_seeds(cfg, 5, 1);
  REQUIRE(one.size() == 1);
  const auto direct = summarize(scenarios::run_scenario(cfg, 5), cfg, 5);
  CHECK(one[0].final_soc == direct.final_soc);
  CHECK(one[0].learning_time_epochs == direct.learning_time_epochs);

  const auto a = sweep_seeds(cfg, 10, 5);
  const auto b = sweep_seeds(cfg, 10, 5);
  REQUIRE(a.size() == 5);
  for (std::size_t i = 0; i < 5; ++i) {
    CHECK(a[i].seed == 10 + i);
    CHECK(a[i].final_soc == b[i].final_soc);
    CHECK(a[i].normalized_consumption == b[i].normalized_consumption);
  }
  const std::uint64_t shuffled[] = {13, 10, 14, 12, 11};
  const auto c = sweep_seeds(cfg, shuffled);
  for (std::size_t i = 0; i < 5; ++i) {
    CHECK(c[i].seed == a[i].seed);
    CHECK(c[i].final_soc == a[i].final_soc);
  }
}

TEST_CASE("medians") {
  CHECK(median({3.0, 1.0, 2.0}) == 2.0);
  CHECK(median({4.0, 1.0, 2.0, 3.0}) == 2.5);
  std::vector<RunSummary> runs(3);
  runs[0].learning_time_epochs = 10;
  runs[1].learning_time_epochs = std::nullopt;
  runs[2].learning_time_epochs = 30;
  CHECK(median_summary(runs).learning_time_epochs == std::optional<std::size_t>(30));
  runs[0].learning_time_epochs.reset();
  CHECK_FALSE(median_summary(runs).learning_time_epochs.has_value());
  CHECK_THROWS_AS(median_summary(std::vector<RunSummary>{}), ContractViolation);
}

TEST_CASE("ordering flag and spread") {
  CHECK(ordering_flag({0.3, 0.5, 0.7}));
  CHECK_FALSE(ordering_flag({0.3, 0.31, 0.7}));
  CHECK_FALSE(ordering_flag({0.7, 0.5, 0.3}));
  CHECK_FALSE(ordering_flag({0.3, std::nullopt, 0.7}));
  CHECK(consumption_spread({0.3, 0.3, 0.3}) == 0.0);
  CHECK(consumption_spread({0.2, 0.3, 0.4}) == doctest::Approx(0.2 / 0.3));
}

TEST_CASE("compare rewards") {
  const scenarios::ScenarioConfig cfg = scenarios::WbanScenarioConfig{};
  const rewards::RewardSpec list[] = {rewards::R3{}, rewards::R3{}};
  const std::uint64_t seeds[] = {1, 2, 3};
  const auto rows = compare_rewards(cfg, list, seeds);
  REQUIRE(rows.size() == 2);
  CHECK(rows[0].reward == "R3");
  CHECK(rows[0].median.final_soc == rows[1].median.final_soc);
  CHECK(rows[0].median.normalized_consumption == rows[1].median.normalized_consumption);
  CHECK(rows[0].runs.size() == 3);
  CHECK_THROWS_AS(compare_rewards(cfg, list, std::span<const std::uint64_t>{}), ContractViolation);
}

TEST_CASE("spearman") {
  const double x[] = {1, 2, 3, 4, 5};
  const double up[] = {2, 4, 5, 9, 10};
  const double down[] = {5, 4, 3, 2, 1};
  const double flat[] = {1, 1, 1, 1, 1};
  CHECK(spearman(x, up) == doctest::Approx(1.0));
  CHECK(spearman(x, down) == doctest::Approx(-1.0));
  CHECK(spearman(x, flat) == 0.0);
  // Ties take average ranks: y ranks are 1.5, 1.5, 3, 4, 5.
  const double tied[] = {1, 1, 2, 3, 4};
  CHECK(spearman(x, tied) == doctest::Approx(9.5 / std::sqrt(10.0 * 9.5)));
}

TEST_CASE("tracking correlation") {
  const scenarios::BuoyScenarioConfig cfg;
  const scenarios::BuoyStateSpec& spec = cfg.state_spec;
  std::vector<TimeSeriesRecord> recs;
  for (std::size_t band = 0; band < 4; ++band) {
    TimeSeriesRecord r;
    r.state = scenarios::buoy_state(0.125 + 0.25 * band, 1.0, spec);
    r.action = {band + 1};
    recs.push_back(r);
  }
  CHECK(tracking_correlation(recs, cfg, 0) == doctest::Approx(1.0));
  std::reverse(recs.begin(), recs.end());
  for (std::size_t i = 0; i < 4; ++i) recs[i].action = {i};
  CHECK(tracking_correlation(recs, cfg, 0) == doctest::Approx(-1.0));
  CHECK(tracking_correlation(recs, cfg, 3) == 0.0);
}
