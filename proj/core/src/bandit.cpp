#include "cocreate/bandit.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "cocreate/errors.hpp"

namespace cocreate {
namespace {

constexpr std::string_view kEpsilonPrefix = "epsilon_greedy:";

std::size_t pick_uniform(std::size_t n, Rng& rng) {
  std::uniform_int_distribution<std::size_t> dist(0, n - 1);
  return dist(rng);
}

// Index of the maximum score; equal maxima are broken uniformly at random.
// Only consumes randomness when there is an actual tie.
std::size_t argmax_random_ties(const std::vector<double>& scores, Rng& rng) {
  const double best = *std::max_element(scores.begin(), scores.end());
  std::vector<std::size_t> ties;
  for (std::size_t i = 0; i < scores.size(); ++i) {
    if (scores[i] == best) ties.push_back(i);
  }
  if (ties.size() == 1) return ties.front();
  return ties[pick_uniform(ties.size(), rng)];
}

double sample_beta(double alpha, double beta, Rng& rng) {
  std::gamma_distribution<double> ga(alpha, 1.0);
  std::gamma_distribution<double> gb(beta, 1.0);
  const double x = ga(rng);
  const double y = gb(rng);
  if (x + y == 0.0) return 0.5;
  return x / (x + y);
}

}  // namespace

Policy Policy::parse(std::string_view text) {
  if (text == "thompson") return thompson();
  if (text == "ucb1") return ucb1();
  if (text == "uniform_random") return uniform_random();
  if (text == "epsilon_greedy") return epsilon_greedy();
  if (text.starts_with(kEpsilonPrefix)) {
    const std::string rest(text.substr(kEpsilonPrefix.size()));
    std::size_t consumed = 0;
    double eps = 0.0;
    try {
      eps = std::stod(rest, &consumed);
    } catch (const std::exception&) {
      consumed = 0;
    }
    if (consumed == rest.size() && !rest.empty() && eps >= 0.0 && eps <= 1.0) {
      return epsilon_greedy(eps);
    }
    throw InvalidArgument("epsilon must be a number in [0, 1]: " + std::string(text));
  }
  throw InvalidArgument("unknown policy: " + std::string(text));
}

std::string Policy::name() const {
  switch (kind) {
    case PolicyKind::thompson:
      return "thompson";
    case PolicyKind::ucb1:
      return "ucb1";
    case PolicyKind::epsilon_greedy:
      return "epsilon_greedy";
    case PolicyKind::uniform_random:
      return "uniform_random";
  }
  return "thompson";
}

BanditState BanditState::create(std::size_t k, Policy policy, std::uint64_t seed) {
  BanditState state;
  state.arms.assign(k, ArmStats{});
  state.policy = policy;
  state.rng_seed = seed;
  return state;
}

double ucb1_score(const ArmStats& arm, std::uint64_t t) {
  if (arm.pulls == 0) return kUnexploredScore;
  if (t < 1) throw InvalidArgument("ucb1_score requires t >= 1");
  const double n = static_cast<double>(arm.pulls);
  return arm.mean() + std::sqrt(2.0 * std::log(static_cast<double>(t)) / n);
}

double thompson_sample(const ArmStats& arm, Rng& rng) {
  if (!(arm.alpha > 0.0) || !(arm.beta > 0.0)) {
    throw InvalidArgument("Beta parameters must be positive");
  }
  return sample_beta(arm.alpha, arm.beta, rng);
}

std::size_t select_arm(const BanditState& state, Rng& rng) {
  const std::size_t k = state.arms.size();
  if (k == 0) throw EmptyArmSet();

  switch (state.policy.kind) {
    case PolicyKind::uniform_random:
      return pick_uniform(k, rng);

    case PolicyKind::thompson: {
      std::vector<double> draws(k);
      for (std::size_t i = 0; i < k; ++i) draws[i] = thompson_sample(state.arms[i], rng);
      return argmax_random_ties(draws, rng);
    }

    case PolicyKind::ucb1: {
      for (std::size_t i = 0; i < k; ++i) {
        if (state.arms[i].pulls == 0) return i;
      }
      std::vector<double> scores(k);
      for (std::size_t i = 0; i < k; ++i) scores[i] = ucb1_score(state.arms[i], state.total_pulls);
      return argmax_random_ties(scores, rng);
    }

    case PolicyKind::epsilon_greedy: {
      std::uniform_real_distribution<double> coin(0.0, 1.0);
      if (coin(rng) < state.policy.epsilon) return pick_uniform(k, rng);
      std::vector<double> means(k);
      for (std::size_t i = 0; i < k; ++i) means[i] = state.arms[i].mean();
      return argmax_random_ties(means, rng);
    }
  }
  return 0;
}

void update(BanditState& state, std::size_t arm, double reward) {
  if (arm >= state.arms.size()) {
    throw OutOfRange("arm index " + std::to_string(arm) + " out of range");
  }
  if (!(reward >= 0.0 && reward <= 1.0)) {
    throw OutOfRange("reward must lie in [0, 1]");
  }
  auto& stats = state.arms[arm];
  stats.pulls += 1;
  stats.reward_sum += reward;
  stats.alpha += reward;
  stats.beta += 1.0 - reward;
  state.total_pulls += 1;
}

void to_json(nlohmann::json& j, const ArmStats& arm) {
  j = nlohmann::json{{"pulls", arm.pulls},
                     {"reward_sum", arm.reward_sum},
                     {"alpha", arm.alpha},
                     {"beta", arm.beta}};
}

void from_json(const nlohmann::json& j, ArmStats& arm) {
  j.at("pulls").get_to(arm.pulls);
  j.at("reward_sum").get_to(arm.reward_sum);
  j.at("alpha").get_to(arm.alpha);
  j.at("beta").get_to(arm.beta);
  if (!(arm.alpha > 0.0) || !(arm.beta > 0.0)) {
    throw InvalidArgument("Beta parameters must be positive");
  }
}

void to_json(nlohmann::json& j, const BanditState& state) {
  j = nlohmann::json::object();
  j["policy"] = state.policy.name();
  if (state.policy.kind == PolicyKind::epsilon_greedy) j["epsilon"] = state.policy.epsilon;
  j["arms"] = state.arms;
  j["total_pulls"] = state.total_pulls;
  j["seed"] = state.rng_seed;
}

void from_json(const nlohmann::json& j, BanditState& state) {
  state.policy = Policy::parse(j.at("policy").get<std::string>());
  if (state.policy.kind == PolicyKind::epsilon_greedy && j.contains("epsilon")) {
    state.policy.epsilon = j.at("epsilon").get<double>();
  }
  state.arms = j.at("arms").get<std::vector<ArmStats>>();
  j.at("total_pulls").get_to(state.total_pulls);
  j.at("seed").get_to(state.rng_seed);
  std::uint64_t sum = 0;
  for (const auto& arm : state.arms) sum += arm.pulls;
  if (sum != state.total_pulls) throw InvalidArgument("total_pulls does not match arm pulls");
}

}  // namespace cocreate
