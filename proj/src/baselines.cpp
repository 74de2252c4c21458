/*
 Copyright 2026 The sacbp Authors

 Licensed under the Apache License, Version 2.0 (the "License");
 you may not use this file except in compliance with the License.
 You may obtain a copy of the License at

      https://www.apache.org/licenses/LICENSE-2.0

 Unless required by applicable law or agreed to in writing, software
 distributed under the License is distributed on an "AS IS" BASIS,
 WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 See the License for the specific language governing permissions and
 limitations under the License.
*/

#include "sacbp/baselines.hpp"

#include <cmath>

#include "sacbp/numdiff.hpp"

namespace sacbp {

namespace {

/// Flow x for dt_obs under the constant control u, then apply the expected
/// observation update.
Vec flow_and_expected_update(const ScenarioModel& model, const Vec& x,
                             const Vec& u, const GreedyParams& gp) {
  const int steps = static_cast<int>(std::llround(gp.dt_obs / gp.dt_ctrl));
  Vec z = x;
  for (int j = 0; j < steps; ++j) z += gp.dt_ctrl * model.flow(z, u);
  const Vec y = model.expected_observation(z, u);
  return model.jump(z, y, u);
}

}  // namespace

double greedy_objective(const ScenarioModel& model, const Vec& x, const Vec& u,
                        const GreedyParams& gp) {
  return model.terminal_cost(flow_and_expected_update(model, x, u, gp));
}

Vec greedy_gradient(const ScenarioModel& model, const Vec& x,
                    const GreedyParams& gp) {
  const Vec u0 = Vec::Zero(model.control_dim());
  const Mat composite = numeric_jacobian(
      [&](const Vec& u) { return flow_and_expected_update(model, x, u, gp); },
      u0);
  const Vec grad_h =
      model.terminal_cost_gradient(flow_and_expected_update(model, x, u0, gp));
  Vec g = composite.transpose() * grad_h;
  if (!g.allFinite()) throw DivergenceError("greedy_gradient: non-finite");
  return g;
}

Vec greedy_control(const ScenarioModel& model, const Vec& x,
                   const GreedyParams& gp) {
  const Vec g = greedy_gradient(model, x, gp);
  const Vec u0 = Vec::Zero(model.control_dim());
  if (g.norm() == 0.0) return u0;
  const double f0 = greedy_objective(model, x, u0, gp);
  double eta = gp.eta0;
  for (int k = 0; k <= gp.max_halvings; ++k) {
    const Vec u = model.clamp_control(-eta * g);
    if (greedy_objective(model, x, u, gp) < f0) return u;
    eta *= 0.5;
  }
  return u0;
}

// ---------------------------------------------------------------------------
// MCTS-DPW
// ---------------------------------------------------------------------------

void DPWParams::validate() const {
  if (n_queries < 1) throw ConfigError("DPWParams: n_queries must be >= 1");
  if (depth < 1) throw ConfigError("DPWParams: depth must be >= 1");
  if (alpha_action <= 0.0 || alpha_action >= 1.0 || alpha_state <= 0.0 ||
      alpha_state >= 1.0) {
    throw ConfigError("DPWParams: alpha constants must lie in (0, 1)");
  }
  if (k_action <= 0.0 || k_state <= 0.0) {
    throw ConfigError("DPWParams: k constants must be positive");
  }
  if (gamma <= 0.0 || gamma > 1.0) {
    throw ConfigError("DPWParams: gamma must lie in (0, 1]");
  }
}

namespace {

struct ActionEdge {
  Vec u;
  int visits = 0;
  double q = 0.0;
  std::vector<int> child_states;
  std::vector<int> child_visits;
};

struct StateNode {
  Vec x;
  int visits = 0;
  std::vector<ActionEdge> actions;
};

class DpwSearch {
 public:
  DpwSearch(const ScenarioModel& model, const DPWParams& p, std::uint64_t seed)
      : model_(model), p_(p), rng_(seed) {}

  Vec run(const Vec& root_state) {
    nodes_.push_back({root_state, 0, {}});
    for (int q = 0; q < p_.n_queries; ++q) simulate(0, p_.depth);
    const StateNode& root = nodes_.front();
    if (root.actions.empty()) return Vec::Zero(model_.control_dim());
    int best = 0;
    for (size_t a = 1; a < root.actions.size(); ++a) {
      if (root.actions[a].visits > root.actions[static_cast<size_t>(best)].visits) {
        best = static_cast<int>(a);
      }
    }
    return root.actions[static_cast<size_t>(best)].u;
  }

 private:
  Vec sample_action() {
    const Vec lo = model_.control_lower();
    const Vec hi = model_.control_upper();
    Vec u(lo.size());
    for (int j = 0; j < u.size(); ++j) u(j) = rng_.uniform(lo(j), hi(j));
    return u;
  }

  /// One dt_obs transition in the belief MDP: flow under the held action,
  /// then a sampled observation update. Returns (next state, reward).
  std::pair<Vec, double> step(const Vec& x, const Vec& u) {
    const int cells = static_cast<int>(std::llround(p_.dt_obs / p_.dt_ctrl));
    Vec z = x;
    double cost = 0.0;
    for (int j = 0; j < cells; ++j) {
      cost += p_.dt_ctrl * model_.running_cost(z, u);
      z += p_.dt_ctrl * model_.flow(z, u);
      if (!z.allFinite()) throw DivergenceError("mcts_dpw: diverged");
    }
    const Vec y = model_.sample_observation(z, u, rng_);
    return {model_.jump(z, y, u), -cost};
  }

  double rollout(Vec x, int depth) {
    double value = 0.0;
    double discount = 1.0;
    for (int d = 0; d < depth; ++d) {
      const Vec u = p_.rollout_policy
                        ? model_.clamp_control(p_.rollout_policy->control(x, 0.0))
                        : Vec::Zero(model_.control_dim());
      auto [next, reward] = step(x, u);
      value += discount * reward;
      discount *= p_.gamma;
      x = std::move(next);
    }
    return value - discount * model_.terminal_cost(x);
  }

  double simulate(int node_id, int depth) {
    if (depth == 0) return -model_.terminal_cost(nodes_[static_cast<size_t>(node_id)].x);

    // Action progressive widening.
    {
      StateNode& node = nodes_[static_cast<size_t>(node_id)];
      const double allowed =
          p_.k_action * std::pow(node.visits + 1.0, p_.alpha_action);
      if (static_cast<double>(node.actions.size()) < allowed) {
        node.actions.push_back({sample_action(), 0, 0.0, {}, {}});
      }
    }
    // UCB over the current action set.
    int ai = 0;
    {
      StateNode& node = nodes_[static_cast<size_t>(node_id)];
      double best = -std::numeric_limits<double>::infinity();
      const double log_n = std::log(node.visits + 1.0);
      for (size_t a = 0; a < node.actions.size(); ++a) {
        const ActionEdge& edge = node.actions[a];
        const double ucb =
            edge.visits == 0
                ? std::numeric_limits<double>::infinity()
                : edge.q + p_.c_ucb * std::sqrt(log_n / edge.visits);
        if (ucb > best) {
          best = ucb;
          ai = static_cast<int>(a);
        }
      }
    }

    // Observation (next-state) progressive widening.
    double value;
    const Vec action = nodes_[static_cast<size_t>(node_id)].actions[static_cast<size_t>(ai)].u;
    const double allowed_states =
        p_.k_state *
        std::pow(nodes_[static_cast<size_t>(node_id)].actions[static_cast<size_t>(ai)].visits + 1.0,
                 p_.alpha_state);
    const size_t n_children =
        nodes_[static_cast<size_t>(node_id)].actions[static_cast<size_t>(ai)].child_states.size();
    if (static_cast<double>(n_children) < allowed_states) {
      auto [next, reward] = step(nodes_[static_cast<size_t>(node_id)].x, action);
      nodes_.push_back({std::move(next), 0, {}});
      const int child_id = static_cast<int>(nodes_.size()) - 1;
      {
        ActionEdge& edge =
            nodes_[static_cast<size_t>(node_id)].actions[static_cast<size_t>(ai)];
        edge.child_states.push_back(child_id);
        edge.child_visits.push_back(1);
      }
      value = reward +
              p_.gamma * rollout(nodes_[static_cast<size_t>(child_id)].x, depth - 1);
    } else {
      // Revisit an existing child, chosen proportionally to its visit count.
      ActionEdge& edge =
          nodes_[static_cast<size_t>(node_id)].actions[static_cast<size_t>(ai)];
      int total = 0;
      for (int cv : edge.child_visits) total += cv;
      int pick = static_cast<int>(rng_.uniform() * total);
      size_t ci = 0;
      for (; ci + 1 < edge.child_visits.size(); ++ci) {
        pick -= edge.child_visits[ci];
        if (pick < 0) break;
      }
      edge.child_visits[ci] += 1;
      const int child_id = edge.child_states[ci];
      // Reward of the revisited transition is recomputed deterministically
      // from the held action (running cost depends only on (x, u) here).
      const double reward = replay_reward(nodes_[static_cast<size_t>(node_id)].x, action);
      value = reward + p_.gamma * simulate(child_id, depth - 1);
    }

    StateNode& node = nodes_[static_cast<size_t>(node_id)];
    ActionEdge& edge = node.actions[static_cast<size_t>(ai)];
    node.visits += 1;
    edge.visits += 1;
    edge.q += (value - edge.q) / edge.visits;
    return value;
  }

  /// Running-cost part of a transition's reward (no sampling involved).
  double replay_reward(const Vec& x, const Vec& u) {
    const int cells = static_cast<int>(std::llround(p_.dt_obs / p_.dt_ctrl));
    Vec z = x;
    double cost = 0.0;
    for (int j = 0; j < cells; ++j) {
      cost += p_.dt_ctrl * model_.running_cost(z, u);
      z += p_.dt_ctrl * model_.flow(z, u);
    }
    return -cost;
  }

  const ScenarioModel& model_;
  const DPWParams& p_;
  RngEngine rng_;
  std::vector<StateNode> nodes_;
};

}  // namespace

Vec mcts_dpw_plan(const ScenarioModel& model, const Vec& x,
                  const DPWParams& params, std::uint64_t seed) {
  params.validate();
  DpwSearch search(model, params, seed);
  return search.run(x);
}

// ---------------------------------------------------------------------------
// Position controller
// ---------------------------------------------------------------------------

PositionController::PositionController(PositionControllerGains gains, Vec box_lo,
                                       Vec box_hi)
    : gains_(gains), box_lo_(std::move(box_lo)), box_hi_(std::move(box_hi)) {}

Vec PositionController::control(const Vec& x, double) const {
  // Mean pose block of the packed belief: r(2), theta, v(2), omega.
  Vec u(3);
  u(0) = -gains_.kp_force * x(0) - gains_.kd_force * x(3);
  u(1) = -gains_.kp_force * x(1) - gains_.kd_force * x(4);
  u(2) = -gains_.kp_torque * x(2) - gains_.kd_torque * x(5);
  return u.cwiseMax(box_lo_).cwiseMin(box_hi_);
}

// ---------------------------------------------------------------------------
// Harness adapters
// ---------------------------------------------------------------------------

namespace {

ControlSchedule constant_schedule(const ScenarioModel& model, const Vec& u,
                                  double t0, double horizon, double dt_ctrl) {
  const int cells = static_cast<int>(std::llround(horizon / dt_ctrl));
  return ControlSchedule::constant(t0, dt_ctrl, cells, model.clamp_control(u),
                                   model.control_lower(), model.control_upper());
}

}  // namespace

GreedyUpdater::GreedyUpdater(GreedyParams params, double horizon)
    : params_(params), horizon_(horizon) {}

ControlSchedule GreedyUpdater::initial_schedule(const ScenarioModel& model,
                                                const Vec&, double t0) {
  return constant_schedule(model, Vec::Zero(model.control_dim()), t0, horizon_,
                           params_.dt_ctrl);
}

ControlSchedule GreedyUpdater::update(const ScenarioModel& model, const Vec& x,
                                      double t0, int) {
  return constant_schedule(model, greedy_control(model, x, params_), t0,
                           horizon_, params_.dt_ctrl);
}

MctsDpwUpdater::MctsDpwUpdater(DPWParams params, double horizon,
                               std::uint64_t base_seed)
    : params_(std::move(params)), horizon_(horizon), base_seed_(base_seed) {}

ControlSchedule MctsDpwUpdater::initial_schedule(const ScenarioModel& model,
                                                 const Vec&, double t0) {
  return constant_schedule(model, Vec::Zero(model.control_dim()), t0, horizon_,
                           params_.dt_ctrl);
}

ControlSchedule MctsDpwUpdater::update(const ScenarioModel& model, const Vec& x,
                                       double t0, int epoch) {
  const Vec u = mcts_dpw_plan(
      model, x, params_,
      derive_seed(base_seed_, static_cast<std::uint64_t>(epoch), 0x3c75));
  return constant_schedule(model, u, t0, horizon_, params_.dt_ctrl);
}

}  // namespace sacbp
