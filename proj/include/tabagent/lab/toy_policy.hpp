#pragma once

#include <Eigen/Dense>
#include <array>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "tabagent/core/types.hpp"
#include "tabagent/lab/synthetic_task.hpp"
#include "tabagent/rapo/rapo.hpp"

namespace tabagent::lab {

// Decoding positions and their local vocabularies.
inline constexpr int kPositions = 3;
inline constexpr std::array<int, kPositions> kVocabSize = {3, kNumOps, kMaxColumns};
inline constexpr std::array<int, kPositions> kTokenOffset = {0, 3, 3 + kNumOps};
inline constexpr int kVocabTotal = 3 + kNumOps + kMaxColumns;

enum ModeToken { kAnswer = 0, kTool = 1, kEnd = 2 };

// bias | question family | asked column | previous token (widest vocabulary)
inline constexpr int kPrevWidth = kNumOps;
inline constexpr int kNumFeatures = 1 + kNumFamilies + kMaxColumns + kPrevWidth;

struct TaskFeatures {
  int family = 0;
  int column = 0;
};

TaskFeatures features_of(const SyntheticTask& task);

class ToyPolicy {
 public:
  explicit ToyPolicy(double temperature = 1.0);

  Eigen::Index num_parameters() const { return theta_.size(); }
  Eigen::VectorXd& parameters() { return theta_; }
  const Eigen::VectorXd& parameters() const { return theta_; }

  // Weight matrix (vocab x features) of one position, viewing into θ.
  Eigen::Map<const Eigen::MatrixXd> weights(int position) const;
  Eigen::Map<Eigen::MatrixXd> weights(int position);

  Eigen::VectorXd features(const TaskFeatures& f, int prev_token) const;
  Eigen::VectorXd log_probabilities(const TaskFeatures& f, int position,
                                    int prev_token) const;
  Eigen::VectorXd probabilities(const TaskFeatures& f, int position,
                                int prev_token) const;

  // Log-probabilities of a local token sequence and their θ-Jacobian.
  rapo::TokenJacobian token_jacobian(const TaskFeatures& f,
                                     std::span<const int> tokens) const;

  double temperature = 1.0;

 private:
  static Eigen::Index block_offset(int position);
  Eigen::VectorXd theta_;
};

// Local token index per position from a recorded trajectory.
std::vector<int> local_tokens(const Trajectory& traj);

// Adapter that satisfies rapo::DifferentiablePolicy by resolving each
// trajectory's task features through its task id.
class BoundPolicy {
 public:
  BoundPolicy(const ToyPolicy& policy,
              const std::unordered_map<std::string, TaskFeatures>& features)
      : policy_(policy), features_(features) {}
  Eigen::Index num_parameters() const { return policy_.num_parameters(); }
  rapo::TokenJacobian token_jacobian(const Trajectory& traj) const;

 private:
  const ToyPolicy& policy_;
  const std::unordered_map<std::string, TaskFeatures>& features_;
};

struct LabConfig {
  // Chance that a direct (no tool) answer is exact, by op: sum, max, count, lookup.
  std::array<double, kNumOps> mental_accuracy = {0.1, 0.6, 0.3, 1.0};
  SyntheticTaskSpec shape;
};

// The program a (op, column) token pair denotes on `task`; the argument is
// taken from the question.
Program decode_program(const SyntheticTask& task, int op, int column);

/// Turns a sampled local token sequence into a trajectory: END gives a
/// format-invalid response, ANSWER a direct answer with the op-dependent
/// error model, TOOL one mock-executor call followed by the answer.
Trajectory realize(const SyntheticTask& task, std::span<const int> tokens,
                   std::span<const double> logprobs, Rng& rng, const LabConfig& lab);

/// G sampled trajectories for one task (rewards left unset).
RolloutGroup rollout(const ToyPolicy& policy, const SyntheticTask& task, int G,
                     Rng& rng, const LabConfig& lab = {});

/// Highest-probability token at every position.
std::vector<int> greedy_tokens(const ToyPolicy& policy, const SyntheticTask& task);

Trajectory greedy_trajectory(const ToyPolicy& policy, const SyntheticTask& task,
                             Rng& rng, const LabConfig& lab = {});

}  // namespace tabagent::lab
