#include "harvestrl/harness.hpp"

#include <algorithm>
#include <cmath>
#include <future>
#include <limits>
#include <numeric>
#include <thread>

#include "harvestrl/config.hpp"
#include "harvestrl/errors.hpp"

namespace harvestrl::harness {

using scenarios::PolicySnapshot;
using scenarios::TimeSeriesRecord;

std::optional<double> RunSummary::learning_time_days() const {
  if (!learning_time_epochs) return std::nullopt;
  return static_cast<double>(*learning_time_epochs) * epoch_min / (24.0 * 60.0);
}

std::optional<std::size_t> policy_stability_time(std::span<const TimeSeriesRecord> records,
                                                 std::span<const PolicySnapshot> policies) {
  if (records.size() != policies.size())
    throw ContractViolation("one policy snapshot per epoch is required");
  const std::size_t n = records.size();
  if (n == 0) return std::nullopt;
  const PolicySnapshot& final_policy = policies.back();
  const std::size_t n_states = final_policy.size();

  // Last epoch at which each state's greedy action differs from the final one.
  std::vector<std::ptrdiff_t> last_disagreement(n_states, -1);
  for (std::size_t u = 0; u < n; ++u) {
    if (policies[u].size() != n_states) throw ContractViolation("snapshot sizes differ");
    for (std::size_t x = 0; x < n_states; ++x)
      if (policies[u][x] != final_policy[x]) last_disagreement[x] = static_cast<std::ptrdiff_t>(u);
  }

  // Scan backwards, tracking the latest disagreement among states visited in [t, n).
  std::optional<std::size_t> earliest;
  std::ptrdiff_t blocking = -1;
  for (std::size_t t = n; t-- > 0;) {
    const std::size_t s = records[t].state.index;
    if (s >= n_states) throw ContractViolation("record state outside the snapshot");
    blocking = std::max(blocking, last_disagreement[s]);
    if (blocking < static_cast<std::ptrdiff_t>(t)) earliest = t;
  }
  if (!earliest) return std::nullopt;
  if (static_cast<double>(*earliest) >= 0.9 * static_cast<double>(n)) return std::nullopt;
  return earliest;
}

RunSummary summarize(std::span<const TimeSeriesRecord> records, std::span<const PolicySnapshot> policies,
                     const scenarios::ScenarioConfig& cfg, std::uint64_t seed) {
  if (records.empty()) throw ContractViolation("summarize needs at least one record");
  RunSummary out;
  out.reward = std::string(rewards::name(scenarios::scenario_reward(cfg)));
  out.seed = seed;
  out.fingerprint = config::scenario_fingerprint(cfg);
  out.epoch_min = scenarios::decision_period_min(cfg);
  out.duration_days = scenarios::duration_days(cfg);

  if (std::holds_alternative<scenarios::WbanScenarioConfig>(cfg)) {
    const double max_current = scenarios::max_action_current(cfg);
    std::array<double, 3> sum{0.0, 0.0, 0.0};
    std::array<std::size_t, 3> count{0, 0, 0};
    for (const auto& r : records) {
      sum.at(r.state.index) += r.load_ma;
      ++count.at(r.state.index);
    }
    for (std::size_t i = 0; i < 3; ++i)
      if (count[i] > 0) out.normalized_consumption[i] = sum[i] / static_cast<double>(count[i]) / max_current;
  }

  out.final_soc = records.back().soc;
  out.min_soc = records.front().soc;
  out.survived_days = static_cast<double>(out.duration_days);
  bool died = false;
  for (std::size_t k = 0; k < records.size(); ++k) {
    out.min_soc = std::min(out.min_soc, records[k].soc);
    if (!died && records[k].soc <= 0.0) {
      died = true;
      out.survived_days = static_cast<double>(k) * out.epoch_min / (24.0 * 60.0);
    }
  }
  if (!policies.empty()) out.learning_time_epochs = policy_stability_time(records, policies);
  return out;
}

RunSummary summarize(const scenarios::ScenarioResult& result, const scenarios::ScenarioConfig& cfg,
                     std::uint64_t seed) {
  return summarize(result.records, result.policies, cfg, seed);
}

std::vector<RunSummary> sweep_seeds(const scenarios::ScenarioConfig& cfg,
                                    std::span<const std::uint64_t> seeds) {
  std::vector<std::uint64_t> order(seeds.begin(), seeds.end());
  std::sort(order.begin(), order.end());
  std::vector<RunSummary> out(order.size());

  const std::size_t workers =
      std::max<std::size_t>(1, std::min<std::size_t>(order.size(), std::thread::hardware_concurrency()));
  std::vector<std::future<void>> jobs;
  for (std::size_t w = 0; w < workers; ++w) {
    jobs.push_back(std::async(std::launch::async, [&, w] {
      for (std::size_t i = w; i < order.size(); i += workers)
        out[i] = summarize(scenarios::run_scenario(cfg, order[i]), cfg, order[i]);
    }));
  }
  for (auto& j : jobs) j.get();
  return out;
}

std::vector<RunSummary> sweep_seeds(const scenarios::ScenarioConfig& cfg, std::uint64_t base_seed,
                                    std::size_t n_seeds) {
  if (n_seeds < 1) throw ContractViolation("sweep needs at least one seed");
  std::vector<std::uint64_t> seeds(n_seeds);
  std::iota(seeds.begin(), seeds.end(), base_seed);
  return sweep_seeds(cfg, seeds);
}

double median(std::vector<double> xs) {
  if (xs.empty()) return std::numeric_limits<double>::quiet_NaN();
  std::sort(xs.begin(), xs.end());
  const std::size_t m = xs.size() / 2;
  return xs.size() % 2 ? xs[m] : 0.5 * (xs[m - 1] + xs[m]);
}

RunSummary median_summary(std::span<const RunSummary> runs) {
  if (runs.empty()) throw ContractViolation("median of an empty sweep");
  RunSummary out = runs.front();
  auto field = [&](auto get) {
    std::vector<double> xs;
    for (const auto& r : runs) xs.push_back(get(r));
    return median(std::move(xs));
  };
  out.final_soc = field([](const RunSummary& r) { return r.final_soc; });
  out.min_soc = field([](const RunSummary& r) { return r.min_soc; });
  out.survived_days = field([](const RunSummary& r) { return r.survived_days; });
  for (std::size_t i = 0; i < 3; ++i) {
    std::vector<double> xs;
    for (const auto& r : runs)
      if (r.normalized_consumption[i]) xs.push_back(*r.normalized_consumption[i]);
    out.normalized_consumption[i] = xs.empty() ? std::nullopt : std::optional<double>(median(xs));
  }
  const double inf = std::numeric_limits<double>::infinity();
  const double lt = field([inf](const RunSummary& r) {
    return r.learning_time_epochs ? static_cast<double>(*r.learning_time_epochs) : inf;
  });
  if (std::isfinite(lt)) out.learning_time_epochs = static_cast<std::size_t>(std::llround(lt));
  else out.learning_time_epochs.reset();
  return out;
}

bool ordering_flag(const std::array<std::optional<double>, 3>& c, double margin) {
  if (!c[0] || !c[1] || !c[2]) return false;
  return *c[0] + margin < *c[1] && *c[1] + margin < *c[2];
}

double consumption_spread(const std::array<std::optional<double>, 3>& c) {
  double lo = std::numeric_limits<double>::infinity();
  double hi = -lo;
  double sum = 0.0;
  std::size_t n = 0;
  for (const auto& v : c) {
    if (!v) continue;
    lo = std::min(lo, *v);
    hi = std::max(hi, *v);
    sum += *v;
    ++n;
  }
  if (n == 0) return std::numeric_limits<double>::quiet_NaN();
  return (hi - lo) / (sum / static_cast<double>(n));
}

std::vector<ComparisonRow> compare_rewards(const scenarios::ScenarioConfig& base,
                                           std::span<const rewards::RewardSpec> reward_list,
                                           std::span<const std::uint64_t> seeds) {
  if (seeds.empty()) throw ContractViolation("compare_rewards needs at least one seed");
  std::vector<ComparisonRow> rows;
  for (const auto& spec : reward_list) {
    auto cfg = base;
    scenarios::set_scenario_reward(cfg, spec);
    ComparisonRow row;
    row.reward = std::string(rewards::name(spec));
    row.runs = sweep_seeds(cfg, seeds);
    row.median = median_summary(row.runs);
    row.ordering = ordering_flag(row.median.normalized_consumption);
    row.survival = std::all_of(row.runs.begin(), row.runs.end(),
                               [](const RunSummary& r) { return r.min_soc > 0.0; });
    rows.push_back(std::move(row));
  }
  return rows;
}

namespace {

std::vector<double> ranks(std::span<const double> v) {
  std::vector<std::size_t> idx(v.size());
  std::iota(idx.begin(), idx.end(), 0);
  std::stable_sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return v[a] < v[b]; });
  std::vector<double> r(v.size());
  for (std::size_t i = 0; i < idx.size();) {
    std::size_t j = i;
    while (j + 1 < idx.size() && v[idx[j + 1]] == v[idx[i]]) ++j;
    const double avg = 0.5 * static_cast<double>(i + j) + 1.0;
    for (std::size_t k = i; k <= j; ++k) r[idx[k]] = avg;
    i = j + 1;
  }
  return r;
}

}  // namespace

double spearman(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) throw ContractViolation("spearman needs equal-length series");
  if (x.size() < 2) return 0.0;
  const auto rx = ranks(x);
  const auto ry = ranks(y);
  const double n = static_cast<double>(x.size());
  const double mx = std::accumulate(rx.begin(), rx.end(), 0.0) / n;
  const double my = std::accumulate(ry.begin(), ry.end(), 0.0) / n;
  double sxy = 0.0, sxx = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < rx.size(); ++i) {
    sxy += (rx[i] - mx) * (ry[i] - my);
    sxx += (rx[i] - mx) * (rx[i] - mx);
    syy += (ry[i] - my) * (ry[i] - my);
  }
  if (sxx == 0.0 || syy == 0.0) return 0.0;
  return sxy / std::sqrt(sxx * syy);
}

double tracking_correlation(std::span<const TimeSeriesRecord> records,
                            const scenarios::BuoyScenarioConfig& cfg, std::size_t from_epoch) {
  std::vector<double> fs;
  std::vector<double> band;
  for (std::size_t t = from_epoch; t < records.size(); ++t) {
    fs.push_back(cfg.fs_levels.at(records[t].action.index));
    band.push_back(static_cast<double>(scenarios::decode_buoy_state(records[t].state, cfg.state_spec).band));
  }
  return spearman(fs, band);
}

}  // namespace harvestrl::harness
