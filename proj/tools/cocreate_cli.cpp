#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "cocreate/config.hpp"
#include "cocreate/errors.hpp"
#include "cocreate/oracle.hpp"
#include "cocreate/replay.hpp"
#include "cocreate/server.hpp"

namespace fs = std::filesystem;
using namespace cocreate;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitFailure = 1;
constexpr int kExitUsage = 2;
constexpr int kExitCorrupt = 3;

struct ExperimentArgs {
  std::string config;
  std::string policies;
  std::string accuracies;
  std::optional<std::size_t> steps;
  std::optional<std::size_t> repetitions;
  std::optional<std::uint64_t> seed;
  std::optional<unsigned> threads;
  std::string out = "results";
};

struct ServeArgs {
  std::string config;
  std::string host;
  std::optional<int> port;
  std::string data_dir;
  std::string backend;
  std::string endpoint;
  std::string model;
  std::optional<int> timeout_ms;
  std::string token_env;
  std::optional<std::uint64_t> generator_seed;
  bool debug = false;
  bool sync_turns = false;
};

ConfigFile load_config(const std::string& path) {
  return path.empty() ? ConfigFile{} : ConfigFile::load(path);
}

void override(ConfigFile& file, const std::string& key, const std::string& value) {
  if (!value.empty()) file.set(key, value);
}

template <typename T>
void override(ConfigFile& file, const std::string& key, const std::optional<T>& value) {
  if (value) file.set(key, std::to_string(*value));
}

// Flags win over the environment, which wins over the config file.
void override_from_env(ConfigFile& file, const std::string& key, const char* env) {
  if (const char* v = std::getenv(env); v && *v) file.set(key, v);
}

void write_file(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  out << text;
  if (!text.empty() && text.back() != '\n') out << '\n';
  if (!out) throw Error("cannot write " + path.string());
}

int run_experiment_command(const ExperimentArgs& args) {
  OracleConfig config;
  try {
    ConfigFile file = load_config(args.config);
    override(file, "experiment.policies", args.policies);
    override(file, "experiment.accuracies", args.accuracies);
    override(file, "experiment.steps", args.steps);
    override(file, "experiment.repetitions", args.repetitions);
    override(file, "experiment.seed", args.seed);
    override(file, "experiment.threads", args.threads);
    config = oracle_config(file);
    config.validate();
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitUsage;
  }

  const ExperimentTable table = run_experiment(config);
  const fs::path out(args.out);
  fs::create_directories(out);
  write_file(out / "results.csv", to_csv(table));
  write_file(out / "results.json", to_plot_json(table).dump(2));
  std::cout << format_table(table);
  std::cout << "wrote " << (out / "results.csv").string() << " and " << (out / "results.json").string()
            << '\n';
  return kExitOk;
}

int run_serve_command(const ServeArgs& args) {
  ServerConfig server;
  try {
    ConfigFile file = load_config(args.config);
    override_from_env(file, "server.port", "COCREATE_PORT");
    override_from_env(file, "server.data_dir", "COCREATE_DATA_DIR");
    override_from_env(file, "generator.backend", "COCREATE_GENERATOR_BACKEND");
    override_from_env(file, "generator.endpoint", "COCREATE_GENERATOR_ENDPOINT");
    override(file, "server.host", args.host);
    override(file, "server.port", args.port);
    override(file, "server.data_dir", args.data_dir);
    override(file, "generator.backend", args.backend);
    override(file, "generator.endpoint", args.endpoint);
    override(file, "generator.model", args.model);
    override(file, "generator.timeout_ms", args.timeout_ms);
    override(file, "generator.auth_token_env", args.token_env);
    override(file, "generator.seed", args.generator_seed);

    server.generator = generator_config(file);
    if (server.generator.backend == GeneratorBackend::http) {
      HttpGenerator probe(server.generator.http);  // validates the endpoint early
    }
    if (auto v = file.get("server.host")) server.host = *v;
    if (auto v = file.get("server.port")) server.port = std::stoi(*v);
    if (server.port < 0 || server.port > 65535) throw InvalidArgument("port out of range");
    if (auto v = file.get("server.data_dir")) server.data_dir = fs::path(*v);
    server.debug = args.debug;
    server.async_agent_turns = !args.sync_turns;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::logic_error& e) {
    std::cerr << "error: bad number: " << e.what() << '\n';
    return kExitUsage;
  }

  ApiServer api(server);
  const int port = api.bind();
  std::cout << "listening on http://" << server.host << ':' << port;
  if (server.data_dir) std::cout << " (logs in " << server.data_dir->string() << ')';
  std::cout << std::endl;
  api.listen();
  return kExitOk;
}

int run_replay_command(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    std::cerr << "error: cannot open " << path << '\n';
    return kExitFailure;
  }
  try {
    const ParsedLog parsed = parse_log(in);
    const ReplayResult result = replay_log(parsed.records);
    const SessionState& state = result.state;

    std::cout << "session " << result.session_id << "  phase " << phase_name(state.phase) << "  turn "
              << state.turn << '/' << state.max_turns << '\n';
    std::cout << "\ndocument (revision " << state.document.revision << ")\n";
    for (const StoryField field : kAllStoryFields) {
      std::cout << "  " << field_name(field) << ": " << state.document[field] << '\n';
    }
    std::cout << "\narms (" << result.config.effective_policy().name() << ")\n";
    for (std::size_t arm = 0; arm < state.bandit.arms.size(); ++arm) {
      const ArmStats& stats = state.bandit.arms[arm];
      std::cout << "  " << arm << ' ' << kind_name(kind_for_arm(arm)) << "  alpha=" << stats.alpha
                << " beta=" << stats.beta << " pulls=" << stats.pulls << '\n';
    }
    std::cout << "\nrewards\n";
    std::size_t turn = 0;
    for (const EventRecord& record : result.regenerated) {
      if (record.event != "reward") continue;
      const auto& p = record.payload;
      std::cout << "  turn " << ++turn << ' ' << p.at("kind").get<std::string>()
                << "  action=" << p.at("action").get<std::string>()
                << " content=" << p.at("content").get<std::string>()
                << " reward=" << p.at("composed").get<double>() << '\n';
    }
    if (turn == 0) std::cout << "  (none)\n";

    if (parsed.truncation_warning) std::cerr << "warning: " << *parsed.truncation_warning << '\n';
    if (result.warning) std::cerr << "warning: " << *result.warning << '\n';
    return kExitOk;
  } catch (const LogCorruption& e) {
    std::cerr << "corrupt log " << path << ": " << e.what() << " (seq " << e.seq() << ", line " << e.line()
              << ")\n";
    return kExitCorrupt;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Mixed-initiative story co-writing engine"};
  app.require_subcommand(1);

  ExperimentArgs exp;
  auto* experiment = app.add_subcommand("experiment", "Run the simulated-feedback bandit sweep");
  experiment->add_option("--config", exp.config, "INI config file")->check(CLI::ExistingFile);
  experiment->add_option("--policies", exp.policies, "Comma separated policy names");
  experiment->add_option("--accuracies", exp.accuracies, "Comma separated feedback accuracies");
  experiment->add_option("--steps", exp.steps, "Pulls per trial");
  experiment->add_option("--repetitions", exp.repetitions, "Trials per policy and accuracy");
  experiment->add_option("--seed", exp.seed, "Master seed");
  experiment->add_option("--threads", exp.threads, "Worker threads (0: all cores)");
  experiment->add_option("--out", exp.out, "Output directory for results.csv and results.json")
      ->capture_default_str();

  ServeArgs srv;
  auto* serve = app.add_subcommand("serve", "Serve the session API");
  serve->add_option("--config", srv.config, "INI config file")->check(CLI::ExistingFile);
  serve->add_option("--host", srv.host, "Bind address (default 127.0.0.1)");
  serve->add_option("--port", srv.port, "Port (default 8787, 0 for any)");
  serve->add_option("--data-dir", srv.data_dir, "Directory for session logs");
  serve->add_option("--generator-backend", srv.backend, "mock or http")
      ->check(CLI::IsMember({"mock", "http"}));
  serve->add_option("--generator-endpoint", srv.endpoint, "HTTP generator URL");
  serve->add_option("--generator-model", srv.model, "Model name sent to the generator");
  serve->add_option("--generator-timeout-ms", srv.timeout_ms, "Generator timeout");
  serve->add_option("--generator-token-env", srv.token_env, "Env var holding the bearer token");
  serve->add_option("--generator-seed", srv.generator_seed, "Seed mixed into mock generations");
  serve->add_flag("--debug", srv.debug, "Expose bandit internals in every state view");
  serve->add_flag("--sync-agent-turns", srv.sync_turns, "Run agent turns inside the triggering request");

  std::string log_path;
  auto* replay = app.add_subcommand("replay", "Rebuild a session from its JSONL log");
  replay->add_option("log", log_path, "Session log")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }

  try {
    if (*experiment) return run_experiment_command(exp);
    if (*serve) return run_serve_command(srv);
    return run_replay_command(log_path);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitFailure;
  }
}
