#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "harvestrl/rng.hpp"

namespace harvestrl::rl {

struct StateId {
  std::size_t index = 0;
  friend bool operator==(StateId, StateId) = default;
};

struct ActionId {
  std::size_t index = 0;
  friend bool operator==(ActionId, ActionId) = default;
};

// Limits of the exploration factor. eps = min(eps_max, eps_min + k*(Smax-S)/Smax).
struct ExplorationParams {
  double eps_max = 0.9;
  double eps_min = 0.05;
  double k = 0.85;

  void validate() const;
};

struct LearningParams {
  double zeta = 1.0;   // alpha = zeta / visits(s, a)
  double gamma = 0.8;  // discount, strictly below 1

  void validate() const;
};

// Dense tabular action-value store. Values start at zero.
class QTable {
public:
  QTable(std::size_t n_states, std::size_t n_actions);

  std::size_t state_space_size() const noexcept { return n_states_; }
  std::size_t action_count() const noexcept { return n_actions_; }
  std::size_t visited_states() const noexcept { return visited_count_; }

  double value(StateId s, ActionId a) const { return values_[offset(s, a)]; }
  void set_value(StateId s, ActionId a, double v);
  std::uint64_t visits(StateId s, ActionId a) const { return visits_[offset(s, a)]; }
  std::span<const double> row(StateId s) const;
  double max_value(StateId s) const;

  bool seen(StateId s) const { return seen_.at(s.index) != 0; }
  // Registers s as encountered; returns true if it was new.
  bool observe(StateId s);

  // Bumps the visit counter and returns the new count.
  std::uint64_t record_visit(StateId s, ActionId a);

  bool contains(StateId s) const noexcept { return s.index < n_states_; }
  bool contains(ActionId a) const noexcept { return a.index < n_actions_; }

  friend bool operator==(const QTable&, const QTable&) = default;

private:
  std::size_t offset(StateId s, ActionId a) const;

  std::size_t n_states_;
  std::size_t n_actions_;
  std::vector<double> values_;
  std::vector<std::uint64_t> visits_;
  std::vector<std::uint8_t> seen_;
  std::size_t visited_count_ = 0;
};

double compute_epsilon(const ExplorationParams& p, std::size_t visited_states,
                       std::size_t state_space_size);

// alpha for the visit_count-th update of a pair (count includes the current one).
double compute_alpha(double zeta, std::uint64_t visit_count);

// epsilon-greedy with uniform random tie-breaking among maximal Q-values.
ActionId select_action(const QTable& q, StateId s, const ExplorationParams& p, Rng& rng);

// Q(s,a) += alpha * (r + gamma * max Q(s',.) - Q(s,a)) with an explicit alpha.
// Does not touch visit counters.
void apply_update(QTable& q, StateId s, ActionId a, double r, StateId s_next,
                  double gamma, double alpha);

// Full learning step: counts the visit, derives alpha, applies the update
// and registers s_next. Returns the alpha used. Throws RewardError on a
// non-finite reward.
double update_q(QTable& q, StateId s, ActionId a, double r, StateId s_next,
                const LearningParams& lp);

// Argmax per state, ties to the lowest action index.
std::vector<ActionId> greedy_policy(const QTable& q);

// Small explicit MDP used only to check the learner against dynamic programming.
struct ExplicitMdp {
  std::size_t n_states = 0;
  std::size_t n_actions = 0;
  // transition[(s * n_actions + a) * n_states + s2] = P(s2 | s, a)
  std::vector<double> transition;
  // reward[s * n_actions + a]
  std::vector<double> reward;

  double p(std::size_t s, std::size_t a, std::size_t s2) const {
    return transition[(s * n_actions + a) * n_states + s2];
  }
  double r(std::size_t s, std::size_t a) const { return reward[s * n_actions + a]; }

  void validate() const;
  std::size_t sample_next(std::size_t s, std::size_t a, Rng& rng) const;
};

// Row-major n_states x n_actions matrix of action values.
struct QValues {
  std::size_t n_states = 0;
  std::size_t n_actions = 0;
  std::vector<double> data;

  double operator()(std::size_t s, std::size_t a) const { return data[s * n_actions + a]; }
  double& operator()(std::size_t s, std::size_t a) { return data[s * n_actions + a]; }
};

QValues value_iteration_oracle(const ExplicitMdp& mdp, double gamma, double tol);

// sup-norm of Q - T(Q) where T is the Bellman optimality operator.
double bellman_residual(const ExplicitMdp& mdp, const QValues& q, double gamma);

std::vector<std::size_t> greedy_policy(const QValues& q);

}  // namespace harvestrl::rl
