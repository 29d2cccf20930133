#include <benchmark/benchmark.h>

#include "cocreate/bandit.hpp"
#include "cocreate/communications.hpp"
#include "cocreate/oracle.hpp"

using namespace cocreate;

namespace {

BanditState warmed_state(Policy policy) {
  BanditState state = BanditState::create(BanditState::kDefaultArms, policy, 1);
  Rng rng = make_rng(3);
  for (int i = 0; i < 30; ++i) {
    const auto arm = select_arm(state, rng);
    update(state, arm, arm == 0 ? 1.0 : 0.0);
  }
  return state;
}

void select_arm_bench(benchmark::State& st, Policy policy) {
  const BanditState state = warmed_state(policy);
  Rng rng = make_rng(11);
  for (auto _ : st) benchmark::DoNotOptimize(select_arm(state, rng));
}
BENCHMARK_CAPTURE(select_arm_bench, thompson, Policy::thompson());
BENCHMARK_CAPTURE(select_arm_bench, ucb1, Policy::ucb1());
BENCHMARK_CAPTURE(select_arm_bench, epsilon_greedy, Policy::epsilon_greedy(0.2));
BENCHMARK_CAPTURE(select_arm_bench, uniform_random, Policy::uniform_random());

void run_trial_bench(benchmark::State& st) {
  OracleConfig config;
  const auto policy = OraclePolicy::learning(Policy::thompson());
  std::uint64_t trial = 0;
  for (auto _ : st) benchmark::DoNotOptimize(run_trial(policy, config, 0.8, trial++));
}
BENCHMARK(run_trial_bench);

// Six policies, five accuracies, 100 repetitions, 10 steps.
void default_sweep_bench(benchmark::State& st) {
  OracleConfig config;
  config.threads = 1;
  for (auto _ : st) benchmark::DoNotOptimize(run_experiment(config));
}
BENCHMARK(default_sweep_bench)->Unit(benchmark::kMillisecond);

StoryDocument sample_document() {
  StoryDocument doc;
  doc[StoryField::beginning] = "A lighthouse keeper finds a letter addressed to nobody.";
  doc[StoryField::development] = "She follows its instructions along the frozen coast.";
  doc[StoryField::climax] = "The storm arrives before the ship does.";
  doc[StoryField::conclusion] = "At dawn she writes a reply.";
  return doc;
}

void build_prompt_bench(benchmark::State& st) {
  const StoryDocument doc = sample_document();
  for (auto _ : st) benchmark::DoNotOptimize(build_prompt(CommunicationKind::rewrite_closing, doc));
}
BENCHMARK(build_prompt_bench);

void parse_generated_bench(benchmark::State& st) {
  const std::string raw = " Sure. _Climax: The storm breaks.\nConclusion: She answers the letter._ trailing";
  for (auto _ : st) benchmark::DoNotOptimize(parse_generated(raw));
}
BENCHMARK(parse_generated_bench);

}  // namespace

BENCHMARK_MAIN();
