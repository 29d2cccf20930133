#include "cocreate/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <numeric>
#include <random>
#include <thread>

#include "cocreate/errors.hpp"

namespace cocreate {
namespace {

constexpr std::uint64_t kPolicyStream = 0;
constexpr std::uint64_t kOracleStream = 1;

std::string format_number(const char* fmt, double value) {
  char buf[64];
  std::snprintf(buf, sizeof buf, fmt, value);
  return buf;
}

}  // namespace

OraclePolicy OraclePolicy::parse(std::string_view text) {
  if (text == "always_liked") return always_liked();
  if (text == "always_disliked") return always_disliked();
  return learning(Policy::parse(text));
}

std::string OraclePolicy::name() const {
  switch (type) {
    case Type::always_liked:
      return "always_liked";
    case Type::always_disliked:
      return "always_disliked";
    case Type::bandit:
      break;
  }
  if (bandit.kind == PolicyKind::epsilon_greedy && bandit.epsilon != 0.2) {
    return "epsilon_greedy:" + format_number("%g", bandit.epsilon);
  }
  return bandit.name();
}

std::vector<OraclePolicy> OracleConfig::default_policies() {
  return {OraclePolicy::learning(Policy::thompson()),
          OraclePolicy::learning(Policy::ucb1()),
          OraclePolicy::learning(Policy::epsilon_greedy(0.2)),
          OraclePolicy::learning(Policy::uniform_random()),
          OraclePolicy::always_liked(),
          OraclePolicy::always_disliked()};
}

void OracleConfig::validate() const {
  if (k_arms < 2) throw InvalidArgument("the oracle needs at least two arms");
  if (liked_arm >= k_arms) throw InvalidArgument("liked_arm must be smaller than k_arms");
  if (steps < 1) throw InvalidArgument("steps must be at least 1");
  if (repetitions < 1) throw InvalidArgument("repetitions must be at least 1");
  if (accuracies.empty()) throw InvalidArgument("at least one accuracy level is required");
  for (const double acc : accuracies) {
    if (!(acc >= 0.5 && acc <= 1.0)) throw InvalidArgument("accuracy must lie in [0.5, 1.0]");
  }
  if (policies.empty()) throw InvalidArgument("at least one policy is required");
}

int oracle_feedback(std::size_t liked_arm, std::size_t pulled_arm, double accuracy, Rng& rng) {
  std::uniform_real_distribution<double> coin(0.0, 1.0);
  const bool truthful = coin(rng) < accuracy;
  const bool liked = pulled_arm == liked_arm;
  return (liked == truthful) ? 1 : 0;
}

TrialResult run_trial(const OraclePolicy& policy, const OracleConfig& config, double accuracy,
                      std::uint64_t trial_index) {
  Rng policy_rng(derive_seed(config.master_seed, trial_index, kPolicyStream));
  Rng oracle_rng(derive_seed(config.master_seed, trial_index, kOracleStream));
  BanditState state = BanditState::create(config.k_arms, policy.bandit, config.master_seed);
  const std::size_t disliked = (config.liked_arm + 1) % config.k_arms;

  TrialResult result;
  result.policy = policy.name();
  result.accuracy = accuracy;
  result.rewards.reserve(config.steps);
  for (std::size_t step = 0; step < config.steps; ++step) {
    std::size_t arm = config.liked_arm;
    switch (policy.type) {
      case OraclePolicy::Type::bandit:
        arm = select_arm(state, policy_rng);
        break;
      case OraclePolicy::Type::always_liked:
        arm = config.liked_arm;
        break;
      case OraclePolicy::Type::always_disliked:
        arm = disliked;
        break;
    }
    const double reward = oracle_feedback(config.liked_arm, arm, accuracy, oracle_rng);
    update(state, arm, reward);
    result.rewards.push_back(reward);
  }
  const double total = std::accumulate(result.rewards.begin(), result.rewards.end(), 0.0);
  result.normalized = total / (accuracy * static_cast<double>(config.steps));
  return result;
}

const ExperimentRow* ExperimentTable::find(std::string_view policy, double accuracy) const {
  for (const auto& row : rows) {
    if (row.policy == policy && std::abs(row.accuracy - accuracy) < 1e-12) return &row;
  }
  return nullptr;
}

ExperimentTable run_experiment(const OracleConfig& config) {
  config.validate();

  struct Cell {
    const OraclePolicy* policy;
    double accuracy;
  };
  std::vector<Cell> cells;
  for (const auto& policy : config.policies) {
    for (const double acc : config.accuracies) cells.push_back({&policy, acc});
  }

  const std::size_t reps = config.repetitions;
  std::vector<double> normalized(cells.size() * reps);

  const std::size_t total = normalized.size();
  unsigned workers = config.threads ? config.threads : std::max(1u, std::thread::hardware_concurrency());
  workers = static_cast<unsigned>(std::min<std::size_t>(workers, total));
  const auto work = [&](std::size_t begin, std::size_t end) {
    for (std::size_t i = begin; i < end; ++i) {
      const Cell& cell = cells[i / reps];
      normalized[i] = run_trial(*cell.policy, config, cell.accuracy, i % reps).normalized;
    }
  };
  if (workers <= 1) {
    work(0, total);
  } else {
    std::vector<std::jthread> pool;
    const std::size_t chunk = (total + workers - 1) / workers;
    for (std::size_t begin = 0; begin < total; begin += chunk) {
      pool.emplace_back(work, begin, std::min(total, begin + chunk));
    }
  }

  ExperimentTable table;
  for (std::size_t c = 0; c < cells.size(); ++c) {
    const auto first = normalized.begin() + static_cast<std::ptrdiff_t>(c * reps);
    const double mean = std::accumulate(first, first + static_cast<std::ptrdiff_t>(reps), 0.0) /
                        static_cast<double>(reps);
    ExperimentRow row;
    row.policy = cells[c].policy->name();
    row.accuracy = cells[c].accuracy;
    row.repetitions = reps;
    row.steps = config.steps;
    row.mean_normalized = mean;
    row.seed = config.master_seed;
    if (reps > 1) {
      double ss = 0.0;
      for (auto it = first; it != first + static_cast<std::ptrdiff_t>(reps); ++it) {
        ss += (*it - mean) * (*it - mean);
      }
      row.std_normalized = std::sqrt(ss / static_cast<double>(reps - 1));
    }
    table.rows.push_back(std::move(row));
  }
  std::stable_sort(table.rows.begin(), table.rows.end(), [](const auto& a, const auto& b) {
    if (a.policy != b.policy) return a.policy < b.policy;
    return a.accuracy < b.accuracy;
  });
  return table;
}

std::string to_csv(const ExperimentTable& table) {
  std::string out = "policy,accuracy,repetitions,steps,mean_normalized,std_normalized,seed\n";
  for (const auto& row : table.rows) {
    out += row.policy;
    out += ',' + format_number("%g", row.accuracy);
    out += ',' + std::to_string(row.repetitions);
    out += ',' + std::to_string(row.steps);
    out += ',' + format_number("%.6f", row.mean_normalized);
    out += ',';
    if (row.std_normalized) out += format_number("%.6f", *row.std_normalized);
    out += ',' + std::to_string(row.seed);
    out += '\n';
  }
  return out;
}

nlohmann::json to_plot_json(const ExperimentTable& table) {
  nlohmann::json plot;
  auto& series = plot["series"] = nlohmann::json::array();
  std::map<std::string, nlohmann::json> by_policy;
  for (const auto& row : table.rows) {
    auto& s = by_policy[row.policy];
    if (s.is_null()) s = {{"policy", row.policy}, {"points", nlohmann::json::array()}};
    s["points"].push_back({row.accuracy, row.mean_normalized});
  }
  for (auto& [_, s] : by_policy) series.push_back(std::move(s));
  if (!table.rows.empty()) {
    plot["steps"] = table.rows.front().steps;
    plot["repetitions"] = table.rows.front().repetitions;
    plot["seed"] = table.rows.front().seed;
  }
  plot["metric"] = "mean_normalized_reward";
  return plot;
}

std::string format_table(const ExperimentTable& table) {
  std::vector<double> accuracies;
  std::vector<std::string> policies;
  for (const auto& row : table.rows) {
    if (std::find(accuracies.begin(), accuracies.end(), row.accuracy) == accuracies.end()) {
      accuracies.push_back(row.accuracy);
    }
    if (std::find(policies.begin(), policies.end(), row.policy) == policies.end()) {
      policies.push_back(row.policy);
    }
  }
  std::sort(accuracies.begin(), accuracies.end());

  std::size_t width = 8;
  for (const auto& p : policies) width = std::max(width, p.size());

  std::string out = "policy";
  out.append(width + 2 - 6, ' ');
  for (const double acc : accuracies) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%9s", ("acc=" + format_number("%g", acc)).c_str());
    out += buf;
  }
  out += '\n';
  for (const auto& policy : policies) {
    out += policy;
    out.append(width + 2 - policy.size(), ' ');
    for (const double acc : accuracies) {
      const auto* row = table.find(policy, acc);
      char buf[32];
      if (row) {
        std::snprintf(buf, sizeof buf, "%9.3f", row->mean_normalized);
      } else {
        std::snprintf(buf, sizeof buf, "%9s", "-");
      }
      out += buf;
    }
    out += '\n';
  }
  return out;
}

}  // namespace cocreate
