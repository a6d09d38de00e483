#include "tabagent/lab/toy_policy.hpp"

#include <cmath>

#include "tabagent/agent/executor.hpp"
#include "tabagent/agent/table_program.hpp"
#include "tabagent/core/errors.hpp"
#include "tabagent/reward/reward.hpp"

namespace tabagent::lab {

namespace {

const char* const kOpNames[kNumOps] = {"sum", "max", "count", "lookup"};

std::string answer_block(const std::string& answer) {
  return "<answer>{\"answer\": \"" + answer + "\"}</answer>";
}

std::string describe(const Program& p) {
  return std::string(kOpNames[static_cast<int>(p.op)]) + " of c" + std::to_string(p.column);
}

double log_sum_exp(const Eigen::VectorXd& v) {
  const double m = v.maxCoeff();
  return m + std::log((v.array() - m).exp().sum());
}

int sample(const Eigen::VectorXd& logp, Rng& rng) {
  const double u = rng.uniform();
  double acc = 0.0;
  for (Eigen::Index k = 0; k < logp.size(); ++k) {
    acc += std::exp(logp(k));
    if (u < acc) return static_cast<int>(k);
  }
  return static_cast<int>(logp.size() - 1);
}

}  // namespace

TaskFeatures features_of(const SyntheticTask& task) {
  return {static_cast<int>(task.family), task.column};
}

ToyPolicy::ToyPolicy(double temperature)
    : temperature(temperature),
      theta_(Eigen::VectorXd::Zero(static_cast<Eigen::Index>(kVocabTotal) * kNumFeatures)) {}

Eigen::Index ToyPolicy::block_offset(int position) {
  return static_cast<Eigen::Index>(kTokenOffset.at(position)) * kNumFeatures;
}

Eigen::Map<const Eigen::MatrixXd> ToyPolicy::weights(int position) const {
  return {theta_.data() + block_offset(position), kVocabSize.at(position), kNumFeatures};
}

Eigen::Map<Eigen::MatrixXd> ToyPolicy::weights(int position) {
  return {theta_.data() + block_offset(position), kVocabSize.at(position), kNumFeatures};
}

Eigen::VectorXd ToyPolicy::features(const TaskFeatures& f, int prev_token) const {
  Eigen::VectorXd phi = Eigen::VectorXd::Zero(kNumFeatures);
  phi(0) = 1.0;
  phi(1 + f.family) = 1.0;
  phi(1 + kNumFamilies + f.column) = 1.0;
  if (prev_token >= 0) phi(1 + kNumFamilies + kMaxColumns + prev_token) = 1.0;
  return phi;
}

Eigen::VectorXd ToyPolicy::log_probabilities(const TaskFeatures& f, int position,
                                             int prev_token) const {
  Eigen::VectorXd logits = weights(position) * features(f, prev_token) / temperature;
  return logits.array() - log_sum_exp(logits);
}

Eigen::VectorXd ToyPolicy::probabilities(const TaskFeatures& f, int position,
                                         int prev_token) const {
  return log_probabilities(f, position, prev_token).array().exp();
}

rapo::TokenJacobian ToyPolicy::token_jacobian(const TaskFeatures& f,
                                              std::span<const int> tokens) const {
  const auto n = static_cast<Eigen::Index>(tokens.size());
  rapo::TokenJacobian out{Eigen::VectorXd(n), Eigen::MatrixXd::Zero(n, num_parameters())};
  Eigen::VectorXd row(num_parameters());
  int prev = -1;
  for (Eigen::Index t = 0; t < n; ++t) {
    const int pos = static_cast<int>(t);
    const int tok = tokens[t];
    const Eigen::VectorXd phi = features(f, prev);
    const Eigen::VectorXd logp = log_probabilities(f, pos, prev);
    out.logprobs(t) = logp(tok);
    Eigen::VectorXd dlogits = -logp.array().exp();
    dlogits(tok) += 1.0;
    row.setZero();
    Eigen::Map<Eigen::MatrixXd>(row.data() + block_offset(pos), kVocabSize[pos], kNumFeatures) =
        dlogits * phi.transpose() / temperature;
    out.jacobian.row(t) = row.transpose();
    prev = tok;
  }
  return out;
}

std::vector<int> local_tokens(const Trajectory& traj) {
  if (traj.tokens.size() > static_cast<std::size_t>(kPositions))
    throw AlignmentError("toy trajectory has " + std::to_string(traj.tokens.size()) + " tokens");
  std::vector<int> out;
  for (std::size_t t = 0; t < traj.tokens.size(); ++t) {
    const auto local = traj.tokens[t].token_id - kTokenOffset[t];
    if (local < 0 || local >= kVocabSize[t])
      throw AlignmentError("token id " + std::to_string(traj.tokens[t].token_id) +
                           " is not valid at position " + std::to_string(t));
    out.push_back(static_cast<int>(local));
  }
  return out;
}

rapo::TokenJacobian BoundPolicy::token_jacobian(const Trajectory& traj) const {
  auto it = features_.find(traj.task_id);
  if (it == features_.end()) throw UnknownTaskId(traj.task_id);
  const auto tokens = local_tokens(traj);
  return policy_.token_jacobian(it->second, tokens);
}

Program decode_program(const SyntheticTask& task, int op, int column) {
  return {static_cast<Op>(op), column, task.arg};
}

Trajectory realize(const SyntheticTask& task, std::span<const int> tokens,
                   std::span<const double> logprobs, Rng& rng, const LabConfig& lab) {
  Trajectory traj;
  traj.task_id = task.task.id;
  for (std::size_t t = 0; t < tokens.size(); ++t)
    traj.tokens.push_back({kTokenOffset[t] + tokens[t], logprobs[t]});

  if (tokens[0] == kEnd) {
    traj.turns.push_back({"<think>no plan</think>", "no plan", std::nullopt, std::nullopt, ""});
    traj.format_valid = false;
    return traj;
  }

  const Program program = decode_program(task, tokens[1], tokens[2]);
  const std::string plan = describe(program);
  std::string answer = "n/a";
  if (tokens[0] == kAnswer) {
    if (auto value = evaluate_program(program, task.task.table)) {
      double v = *value;
      if (rng.uniform() >= lab.mental_accuracy[static_cast<int>(program.op)]) {
        const int k = rng.below(6);
        v += k < 3 ? -(k + 1) : k - 2;
      }
      answer = agent::format_number(v);
    }
    Turn turn;
    turn.plan = plan;
    turn.response = "<think>" + plan + "</think>\n" + answer_block(answer);
    traj.turns.push_back(std::move(turn));
  } else {
    ExecRequest request;
    request.id = task.task.id;
    request.code = program_code(program);
    request.table = exec_table(task.task.table);
    ExecResult result = agent::MockExecutor{}.execute(request);
    result.duration_ms = 0;
    traj.n_tool_turns = 1;
    traj.any_tool_success = is_successful_execution(result);
    if (result.status == ExecStatus::Ok) {
      answer = result.out;
      while (!answer.empty() && (answer.back() == '\n' || answer.back() == ' ')) answer.pop_back();
    }
    Turn call;
    call.plan = plan;
    call.response = "<think>" + plan + "</think>\n```python\n" + request.code + "\n```";
    call.action = request.code;
    call.observation = std::move(result);
    call.reflection = "read the result";
    Turn final;
    final.plan = "read the result";
    final.response = "<think>read the result</think>\n" + answer_block(answer);
    traj.turns.push_back(std::move(call));
    traj.turns.push_back(std::move(final));
  }
  traj.final_answer = answer;
  traj.format_valid = reward::format_reward(traj) == 1.0;
  return traj;
}

RolloutGroup rollout(const ToyPolicy& policy, const SyntheticTask& task, int G, Rng& rng,
                     const LabConfig& lab) {
  if (G < 2) throw GroupTooSmall("rollout needs G >= 2, got " + std::to_string(G));
  const TaskFeatures f = features_of(task);
  RolloutGroup group;
  group.query_id = task.task.id;
  for (int i = 0; i < G; ++i) {
    std::vector<int> tokens;
    std::vector<double> logprobs;
    int prev = -1;
    for (int pos = 0; pos < kPositions; ++pos) {
      const Eigen::VectorXd logp = policy.log_probabilities(f, pos, prev);
      const int tok = sample(logp, rng);
      tokens.push_back(tok);
      logprobs.push_back(logp(tok));
      prev = tok;
      if (pos == 0 && tok == kEnd) break;
    }
    group.trajectories.push_back(realize(task, tokens, logprobs, rng, lab));
  }
  return group;
}

std::vector<int> greedy_tokens(const ToyPolicy& policy, const SyntheticTask& task) {
  const TaskFeatures f = features_of(task);
  std::vector<int> tokens;
  int prev = -1;
  for (int pos = 0; pos < kPositions; ++pos) {
    Eigen::Index best = 0;
    policy.log_probabilities(f, pos, prev).maxCoeff(&best);
    tokens.push_back(static_cast<int>(best));
    prev = tokens.back();
    if (pos == 0 && prev == kEnd) break;
  }
  return tokens;
}

Trajectory greedy_trajectory(const ToyPolicy& policy, const SyntheticTask& task, Rng& rng,
                             const LabConfig& lab) {
  const auto tokens = greedy_tokens(policy, task);
  const TaskFeatures f = features_of(task);
  const auto eval = policy.token_jacobian(f, tokens);
  std::vector<double> logprobs(eval.logprobs.data(), eval.logprobs.data() + eval.logprobs.size());
  return realize(task, tokens, logprobs, rng, lab);
}

}  // namespace tabagent::lab
