#pragma once

// Scalar and per-group kernels of the rank-aware objective. Templated on the
// Eigen expression type so they work for any dense real vector.

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>

#include "tabagent/core/errors.hpp"

namespace tabagent::rapo {

template <typename Scalar>
using VectorX = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

/// Group-normalized advantages (R_i - mean) / (std + std_epsilon) with the
/// population standard deviation. Groups with identical rewards map to all
/// zeros exactly.
template <typename Derived>
VectorX<typename Derived::Scalar> group_advantages(
    const Eigen::MatrixBase<Derived>& rewards,
    typename Derived::Scalar std_epsilon) {
  using Scalar = typename Derived::Scalar;
  if (rewards.size() < 2)
    throw GroupTooSmall("advantage normalization needs at least 2 rewards, got " +
                        std::to_string(rewards.size()));
  if (rewards.maxCoeff() == rewards.minCoeff())
    return VectorX<Scalar>::Zero(rewards.size());
  const Scalar mean = rewards.mean();
  VectorX<Scalar> centered = rewards.array() - mean;
  const Scalar stddev = std::sqrt(centered.squaredNorm() /
                                  static_cast<Scalar>(rewards.size()));
  return centered / (stddev + std_epsilon);
}

/// Pairwise diagnostic flag for a (winner, loser) pair: 1 + alpha when the
/// winner is strictly less confident than the loser, else 1.
template <typename Scalar>
Scalar pairwise_gamma(Scalar logp_winner, Scalar logp_loser, Scalar alpha) {
  return logp_winner < logp_loser ? Scalar(1) + alpha : Scalar(1);
}

struct PairCounts {
  long pairs = 0;
  long misaligned = 0;
};

/// Rank weights: gamma_i is the mean pairwise flag over every pair with a
/// strict reward difference that involves trajectory i, in either role.
/// Trajectories in no pair keep gamma_i = 1.
template <typename DerivedR, typename DerivedC>
VectorX<typename DerivedR::Scalar> rank_weights(
    const Eigen::MatrixBase<DerivedR>& rewards,
    const Eigen::MatrixBase<DerivedC>& confidence,
    typename DerivedR::Scalar alpha, PairCounts* counts = nullptr) {
  using Scalar = typename DerivedR::Scalar;
  const Eigen::Index n = rewards.size();
  VectorX<Scalar> sum = VectorX<Scalar>::Zero(n);
  Eigen::VectorXi involved = Eigen::VectorXi::Zero(n);
  PairCounts local;
  for (Eigen::Index w = 0; w < n; ++w) {
    for (Eigen::Index l = 0; l < n; ++l) {
      if (!(rewards(w) > rewards(l))) continue;
      const Scalar g = pairwise_gamma(confidence(w), confidence(l), alpha);
      sum(w) += g;
      sum(l) += g;
      ++involved(w);
      ++involved(l);
      ++local.pairs;
      if (confidence(w) < confidence(l)) ++local.misaligned;
    }
  }
  if (counts) {
    counts->pairs += local.pairs;
    counts->misaligned += local.misaligned;
  }
  VectorX<Scalar> gamma(n);
  for (Eigen::Index i = 0; i < n; ++i)
    gamma(i) = involved(i) ? sum(i) / static_cast<Scalar>(involved(i))
                           : Scalar(1);
  return gamma;
}

/// min(r * A, clip(r, 1 - eps_low, 1 + eps_high) * A)
template <typename Scalar>
Scalar clipped_token_term(Scalar ratio, Scalar advantage, Scalar eps_low,
                          Scalar eps_high) {
  const Scalar clipped =
      std::clamp(ratio, Scalar(1) - eps_low, Scalar(1) + eps_high);
  return std::min(ratio * advantage, clipped * advantage);
}

/// True when the clipped branch is strictly smaller, i.e. the term is locally
/// constant in the ratio and contributes no gradient.
template <typename Scalar>
bool clip_active(Scalar ratio, Scalar advantage, Scalar eps_low,
                 Scalar eps_high) {
  const Scalar clipped =
      std::clamp(ratio, Scalar(1) - eps_low, Scalar(1) + eps_high);
  return clipped * advantage < ratio * advantage;
}

}  // namespace tabagent::rapo
