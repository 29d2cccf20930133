#pragma once

#include <cstddef>
#include <cstdint>
#include <limits>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "cocreate/random.hpp"

namespace cocreate {

enum class PolicyKind { thompson, ucb1, epsilon_greedy, uniform_random };

struct Policy {
  PolicyKind kind = PolicyKind::thompson;
  double epsilon = 0.2;  // only read by epsilon_greedy

  static Policy thompson() { return {PolicyKind::thompson, 0.2}; }
  static Policy ucb1() { return {PolicyKind::ucb1, 0.2}; }
  static Policy epsilon_greedy(double eps = 0.2) { return {PolicyKind::epsilon_greedy, eps}; }
  static Policy uniform_random() { return {PolicyKind::uniform_random, 0.2}; }

  // Accepts "thompson", "ucb1", "uniform_random", "epsilon_greedy" and
  // "epsilon_greedy:<eps>". Throws InvalidArgument on anything else.
  static Policy parse(std::string_view text);

  // Canonical name without the epsilon suffix.
  std::string name() const;

  friend bool operator==(const Policy&, const Policy&) = default;
};

struct ArmStats {
  std::uint64_t pulls = 0;
  double reward_sum = 0.0;
  double alpha = 1.0;
  double beta = 1.0;

  // Empirical mean reward; 0 for an arm that was never pulled.
  double mean() const noexcept {
    return pulls == 0 ? 0.0 : reward_sum / static_cast<double>(pulls);
  }

  friend bool operator==(const ArmStats&, const ArmStats&) = default;
};

struct BanditState {
  std::vector<ArmStats> arms;
  std::uint64_t total_pulls = 0;
  Policy policy;
  std::uint64_t rng_seed = 0;

  static constexpr std::size_t kDefaultArms = 3;

  // K arms at the uniform Beta(1, 1) prior.
  static BanditState create(std::size_t k, Policy policy, std::uint64_t seed);

  std::size_t size() const noexcept { return arms.size(); }

  friend bool operator==(const BanditState&, const BanditState&) = default;
};

inline constexpr double kUnexploredScore = std::numeric_limits<double>::infinity();

// x̄ + sqrt(2 ln t / n). Unpulled arms score kUnexploredScore.
double ucb1_score(const ArmStats& arm, std::uint64_t t);

// One Beta(alpha, beta) draw.
double thompson_sample(const ArmStats& arm, Rng& rng);

// Picks the next arm under state.policy. Ties in any argmax are broken
// uniformly at random from `rng`; UCB1 takes unpulled arms lowest index first.
std::size_t select_arm(const BanditState& state, Rng& rng);

// Records `reward` in [0, 1] for `arm`: alpha += r, beta += 1 - r.
void update(BanditState& state, std::size_t arm, double reward);

void to_json(nlohmann::json& j, const ArmStats& arm);
void from_json(const nlohmann::json& j, ArmStats& arm);
void to_json(nlohmann::json& j, const BanditState& state);
void from_json(const nlohmann::json& j, BanditState& state);

}  // namespace cocreate
