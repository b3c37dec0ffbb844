#include "harvestrl/rl_core.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "harvestrl/errors.hpp"

namespace harvestrl::rl {

void ExplorationParams::validate() const {
  auto in_unit = [](double v) { return std::isfinite(v) && v >= 0.0 && v <= 1.0; };
  if (!in_unit(eps_max)) throw ConfigError("rl.eps_max", "must lie in [0, 1]");
  if (!in_unit(eps_min)) throw ConfigError("rl.eps_min", "must lie in [0, 1]");
  if (eps_min > eps_max) throw ConfigError("rl.eps_min", "must not exceed rl.eps_max");
  if (!std::isfinite(k) || k < 0.0) throw ConfigError("rl.k", "must be non-negative");
}

void LearningParams::validate() const {
  if (!std::isfinite(zeta) || zeta <= 0.0 || zeta > 1.0)
    throw ConfigError("rl.zeta", "must lie in (0, 1]");
  if (!std::isfinite(gamma) || gamma < 0.0 || gamma >= 1.0)
    throw ConfigError("rl.gamma", "must lie in [0, 1)");
}

QTable::QTable(std::size_t n_states, std::size_t n_actions)
    : n_states_(n_states),
      n_actions_(n_actions),
      values_(n_states * n_actions, 0.0),
      visits_(n_states * n_actions, 0),
      seen_(n_states, 0) {
  if (n_states == 0) throw ConfigError("", "state space must not be empty");
  if (n_actions == 0) throw ConfigError("", "action set must not be empty");
}

std::size_t QTable::offset(StateId s, ActionId a) const {
  if (s.index >= n_states_ || a.index >= n_actions_)
    throw ContractViolation("state/action index out of range");
  return s.index * n_actions_ + a.index;
}

void QTable::set_value(StateId s, ActionId a, double v) {
  if (!std::isfinite(v)) throw ContractViolation("Q-values must be finite");
  values_[offset(s, a)] = v;
}

std::span<const double> QTable::row(StateId s) const {
  return std::span<const double>(values_).subspan(offset(s, ActionId{0}), n_actions_);
}

double QTable::max_value(StateId s) const {
  const auto r = row(s);
  return *std::max_element(r.begin(), r.end());
}

bool QTable::observe(StateId s) {
  if (s.index >= n_states_) throw ContractViolation("state index out of range");
  if (seen_[s.index]) return false;
  seen_[s.index] = 1;
  ++visited_count_;
  return true;
}

std::uint64_t QTable::record_visit(StateId s, ActionId a) { return ++visits_[offset(s, a)]; }

double compute_epsilon(const ExplorationParams& p, std::size_t visited_states,
                       std::size_t state_space_size) {
  if (state_space_size == 0) throw ConfigError("", "state space size must be positive");
  if (visited_states > state_space_size)
    throw ContractViolation("visited states exceed the state space size");
  const double smax = static_cast<double>(state_space_size);
  const double unvisited = static_cast<double>(state_space_size - visited_states);
  return std::min(p.eps_max, p.eps_min + p.k * unvisited / smax);
}

double compute_alpha(double zeta, std::uint64_t visit_count) {
  if (visit_count == 0) throw ContractViolation("alpha needs at least one visit");
  return zeta / static_cast<double>(visit_count);
}

ActionId select_action(const QTable& q, StateId s, const ExplorationParams& p, Rng& rng) {
  const double eps = compute_epsilon(p, q.visited_states(), q.state_space_size());
  const double u = rng.uniform01();
  if (u <= eps) return ActionId{static_cast<std::size_t>(rng.uniform_index(q.action_count()))};

  const auto r = q.row(s);
  const double best = *std::max_element(r.begin(), r.end());
  const auto ties = static_cast<std::uint64_t>(std::count(r.begin(), r.end(), best));
  std::uint64_t pick = ties > 1 ? rng.uniform_index(ties) : 0;
  for (std::size_t a = 0; a < r.size(); ++a) {
    if (r[a] == best && pick-- == 0) return ActionId{a};
  }
  return ActionId{0};  // unreachable
}

void apply_update(QTable& q, StateId s, ActionId a, double r, StateId s_next,
                  double gamma, double alpha) {
  const double current = q.value(s, a);
  const double target = r + gamma * q.max_value(s_next);
  q.set_value(s, a, current + alpha * (target - current));
}

double update_q(QTable& q, StateId s, ActionId a, double r, StateId s_next,
                const LearningParams& lp) {
  if (!std::isfinite(r)) throw RewardError("reward function returned a non-finite value");
  if (!q.contains(s) || !q.contains(a) || !q.contains(s_next))
    throw ContractViolation("state/action index out of range");
  const double alpha = compute_alpha(lp.zeta, q.record_visit(s, a));
  apply_update(q, s, a, r, s_next, lp.gamma, alpha);
  q.observe(s);
  q.observe(s_next);
  return alpha;
}

std::vector<ActionId> greedy_policy(const QTable& q) {
  std::vector<ActionId> policy(q.state_space_size());
  for (std::size_t s = 0; s < policy.size(); ++s) {
    const auto r = q.row(StateId{s});
    policy[s] = ActionId{static_cast<std::size_t>(std::max_element(r.begin(), r.end()) - r.begin())};
  }
  return policy;
}

void ExplicitMdp::validate() const {
  if (n_states == 0 || n_actions == 0) throw ConfigError("mdp", "empty state or action set");
  if (transition.size() != n_states * n_actions * n_states)
    throw ConfigError("mdp.transition", "wrong table size");
  if (reward.size() != n_states * n_actions) throw ConfigError("mdp.reward", "wrong table size");
  for (std::size_t s = 0; s < n_states; ++s) {
    for (std::size_t a = 0; a < n_actions; ++a) {
      double sum = 0.0;
      for (std::size_t s2 = 0; s2 < n_states; ++s2) {
        const double v = p(s, a, s2);
        if (!(v >= 0.0)) throw ConfigError("mdp.transition", "negative or NaN probability");
        sum += v;
      }
      if (std::abs(sum - 1.0) > 1e-9)
        throw ConfigError("mdp.transition", "row (" + std::to_string(s) + ", " +
                                                std::to_string(a) + ") does not sum to 1");
      if (!std::isfinite(r(s, a))) throw ConfigError("mdp.reward", "non-finite reward");
    }
  }
}

std::size_t ExplicitMdp::sample_next(std::size_t s, std::size_t a, Rng& rng) const {
  const double u = rng.uniform01();
  double acc = 0.0;
  for (std::size_t s2 = 0; s2 + 1 < n_states; ++s2) {
    acc += p(s, a, s2);
    if (u < acc) return s2;
  }
  return n_states - 1;
}

namespace {

QValues bellman(const ExplicitMdp& mdp, const QValues& q, double gamma) {
  std::vector<double> v(mdp.n_states);
  for (std::size_t s = 0; s < mdp.n_states; ++s) {
    double best = q(s, 0);
    for (std::size_t a = 1; a < mdp.n_actions; ++a) best = std::max(best, q(s, a));
    v[s] = best;
  }
  QValues out{mdp.n_states, mdp.n_actions, std::vector<double>(q.data.size())};
  for (std::size_t s = 0; s < mdp.n_states; ++s) {
    for (std::size_t a = 0; a < mdp.n_actions; ++a) {
      double expected = 0.0;
      for (std::size_t s2 = 0; s2 < mdp.n_states; ++s2) expected += mdp.p(s, a, s2) * v[s2];
      out(s, a) = mdp.r(s, a) + gamma * expected;
    }
  }
  return out;
}

double sup_distance(const QValues& a, const QValues& b) {
  double d = 0.0;
  for (std::size_t i = 0; i < a.data.size(); ++i) d = std::max(d, std::abs(a.data[i] - b.data[i]));
  return d;
}

}  // namespace

QValues value_iteration_oracle(const ExplicitMdp& mdp, double gamma, double tol) {
  mdp.validate();
  if (!(gamma >= 0.0 && gamma < 1.0)) throw ConfigError("gamma", "must lie in [0, 1)");
  if (!(tol > 0.0)) throw ConfigError("tol", "must be positive");
  QValues q{mdp.n_states, mdp.n_actions, std::vector<double>(mdp.n_states * mdp.n_actions, 0.0)};
  // residual(T q) <= gamma * |T q - q|, so stop once that bound is safely below tol.
  for (;;) {
    QValues next = bellman(mdp, q, gamma);
    const double step = sup_distance(next, q);
    q = std::move(next);
    if (gamma * step < 0.5 * tol) break;
  }
  return q;
}

double bellman_residual(const ExplicitMdp& mdp, const QValues& q, double gamma) {
  return sup_distance(q, bellman(mdp, q, gamma));
}

std::vector<std::size_t> greedy_policy(const QValues& q) {
  std::vector<std::size_t> policy(q.n_states, 0);
  for (std::size_t s = 0; s < q.n_states; ++s) {
    for (std::size_t a = 1; a < q.n_actions; ++a)
      if (q(s, a) > q(s, policy[s])) policy[s] = a;
  }
  return policy;
}

}  // namespace harvestrl::rl
