#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "cocreate/bandit.hpp"
#include "cocreate/random.hpp"

namespace cocreate {

// A policy in the oracle sweep: a learning bandit policy, or one of the two
// fixed reference bounds.
struct OraclePolicy {
  enum class Type { bandit, always_liked, always_disliked };

  Type type = Type::bandit;
  Policy bandit;

  static OraclePolicy learning(Policy p) { return {Type::bandit, p}; }
  static OraclePolicy always_liked() { return {Type::always_liked, {}}; }
  static OraclePolicy always_disliked() { return {Type::always_disliked, {}}; }

  // Bandit policy names plus "always_liked" / "always_disliked".
  static OraclePolicy parse(std::string_view text);
  std::string name() const;

  friend bool operator==(const OraclePolicy&, const OraclePolicy&) = default;
};

struct OracleConfig {
  std::size_t k_arms = 3;
  std::size_t liked_arm = 0;
  std::vector<double> accuracies = {0.6, 0.7, 0.8, 0.9, 1.0};
  std::size_t steps = 10;
  std::size_t repetitions = 100;
  std::vector<OraclePolicy> policies = default_policies();
  std::uint64_t master_seed = 0;
  unsigned threads = 0;  // 0: hardware concurrency

  // Thompson, UCB1, ε-greedy(0.2), uniform random and both reference bounds.
  static std::vector<OraclePolicy> default_policies();

  // Throws InvalidArgument.
  void validate() const;
};

// Simulated human: rewards the liked arm with probability `accuracy` and
// withholds reward from the other arms with the same probability.
int oracle_feedback(std::size_t liked_arm, std::size_t pulled_arm, double accuracy, Rng& rng);

struct TrialResult {
  std::string policy;
  double accuracy = 0.0;
  std::vector<double> rewards;
  double normalized = 0.0;  // Σ rewards / (accuracy · steps)
};

// One fresh bandit run of config.steps pulls. Randomness comes only from
// (config.master_seed, trial_index), so trials can run in any order.
TrialResult run_trial(const OraclePolicy& policy, const OracleConfig& config, double accuracy,
                      std::uint64_t trial_index);

struct ExperimentRow {
  std::string policy;
  double accuracy = 0.0;
  std::size_t repetitions = 0;
  std::size_t steps = 0;
  double mean_normalized = 0.0;
  std::optional<double> std_normalized;  // sample std; absent for one repetition
  std::uint64_t seed = 0;
};

struct ExperimentTable {
  std::vector<ExperimentRow> rows;  // sorted by policy name, then accuracy

  const ExperimentRow* find(std::string_view policy, double accuracy) const;
};

// Sweep of policies × accuracies, config.repetitions trials each.
ExperimentTable run_experiment(const OracleConfig& config);

// policy,accuracy,repetitions,steps,mean_normalized,std_normalized,seed
std::string to_csv(const ExperimentTable& table);
// {"series":[{"policy":..., "points":[[accuracy, mean], ...]}], ...}
nlohmann::json to_plot_json(const ExperimentTable& table);
// Human-readable policy × accuracy grid of mean normalized reward.
std::string format_table(const ExperimentTable& table);

}  // namespace cocreate
