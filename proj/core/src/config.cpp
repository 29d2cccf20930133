#include "cocreate/config.hpp"

#include <cctype>
#include <fstream>
#include <sstream>
#include <type_traits>

#include "cocreate/errors.hpp"

namespace cocreate {
namespace {

std::string trimmed(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  if (s.size() >= 2 && (s.front() == '"' || s.front() == '\'') && s.back() == s.front()) {
    s = s.substr(1, s.size() - 2);
  }
  return std::string(s);
}

template <typename T>
T parse_number(std::string_view key, const std::string& text) {
  if constexpr (std::is_unsigned_v<T>) {
    if (!text.empty() && text.front() == '-') {
      throw InvalidArgument("config key " + std::string(key) + " must not be negative");
    }
  }
  std::istringstream in(text);
  T value{};
  in >> value;
  if (!in || !in.eof()) {
    throw InvalidArgument("config key " + std::string(key) + " expects a number, got '" + text + "'");
  }
  return value;
}

bool parse_bool(std::string_view key, const std::string& text) {
  if (text == "true" || text == "1" || text == "yes" || text == "on") return true;
  if (text == "false" || text == "0" || text == "no" || text == "off") return false;
  throw InvalidArgument("config key " + std::string(key) + " expects a boolean, got '" + text + "'");
}

}  // namespace

ConfigFile ConfigFile::parse(std::string_view text) {
  ConfigFile file;
  std::string section;
  std::size_t line_no = 0;
  std::istringstream in{std::string(text)};
  std::string raw;
  while (std::getline(in, raw)) {
    ++line_no;
    const std::string line = trimmed(raw);
    if (line.empty() || line.front() == '#' || line.front() == ';') continue;
    if (line.front() == '[') {
      if (line.back() != ']') {
        throw InvalidArgument("config line " + std::to_string(line_no) + ": unterminated section");
      }
      section = trimmed(std::string_view(line).substr(1, line.size() - 2));
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw InvalidArgument("config line " + std::to_string(line_no) + ": expected key = value");
    }
    std::string key = trimmed(std::string_view(line).substr(0, eq));
    if (key.empty()) {
      throw InvalidArgument("config line " + std::to_string(line_no) + ": empty key");
    }
    if (!section.empty()) key = section + "." + key;
    file.values_[std::move(key)] = trimmed(std::string_view(line).substr(eq + 1));
  }
  return file;
}

ConfigFile ConfigFile::load(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InvalidArgument("cannot read config file " + path.string());
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return parse(buffer.str());
}

std::optional<std::string> ConfigFile::get(std::string_view key) const {
  const auto it = values_.find(key);
  if (it == values_.end()) return std::nullopt;
  return it->second;
}

std::vector<std::string> split_list(std::string_view text) {
  std::vector<std::string> items;
  std::size_t start = 0;
  while (start <= text.size()) {
    const auto comma = text.find(',', start);
    const auto end = comma == std::string_view::npos ? text.size() : comma;
    std::string item = trimmed(text.substr(start, end - start));
    if (!item.empty()) items.push_back(std::move(item));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return items;
}

GeneratorConfig generator_config(const ConfigFile& file) {
  GeneratorConfig config;
  if (auto v = file.get("generator.backend")) {
    if (*v == "mock") {
      config.backend = GeneratorBackend::mock;
    } else if (*v == "http") {
      config.backend = GeneratorBackend::http;
    } else {
      throw InvalidArgument("generator.backend must be mock or http");
    }
  }
  if (auto v = file.get("generator.seed")) config.seed = parse_number<std::uint64_t>("generator.seed", *v);
  if (auto v = file.get("generator.endpoint")) config.http.endpoint = *v;
  if (auto v = file.get("generator.model")) config.http.model = *v;
  if (auto v = file.get("generator.timeout_ms")) {
    config.http.timeout_ms = parse_number<int>("generator.timeout_ms", *v);
    if (config.http.timeout_ms <= 0) throw InvalidArgument("generator.timeout_ms must be positive");
  }
  if (auto v = file.get("generator.auth_token_env")) config.http.auth_token_env = *v;
  if (auto v = file.get("generator.max_tokens")) {
    config.http.max_tokens = parse_number<int>("generator.max_tokens", *v);
  }
  if (auto v = file.get("generator.temperature")) {
    config.http.temperature = parse_number<double>("generator.temperature", *v);
  }
  if (auto v = file.get("generator.response_pointer")) config.http.response_pointer = *v;
  if (config.backend == GeneratorBackend::http && config.http.endpoint.empty()) {
    throw InvalidArgument("generator.endpoint is required for the http backend");
  }
  return config;
}

SessionConfig session_config(const ConfigFile& file) {
  SessionConfig config;
  if (auto v = file.get("session.max_turns")) {
    const auto turns = parse_number<long long>("session.max_turns", *v);
    if (turns < 1) throw InvalidArgument("session.max_turns must be at least 1");
    config.max_turns = static_cast<std::uint64_t>(turns);
  }
  if (auto v = file.get("session.policy")) config.policy = Policy::parse(*v);
  if (auto v = file.get("session.epsilon")) {
    config.policy.epsilon = parse_number<double>("session.epsilon", *v);
  }
  if (auto v = file.get("session.ablation")) config.ablation = parse_bool("session.ablation", *v);
  if (auto v = file.get("session.seed")) config.seed = parse_number<std::uint64_t>("session.seed", *v);
  config.validate();
  return config;
}

OracleConfig oracle_config(const ConfigFile& file) {
  OracleConfig config;
  if (auto v = file.get("experiment.policies")) {
    config.policies.clear();
    for (const auto& name : split_list(*v)) config.policies.push_back(OraclePolicy::parse(name));
  }
  if (auto v = file.get("experiment.accuracies")) {
    config.accuracies.clear();
    for (const auto& item : split_list(*v)) {
      config.accuracies.push_back(parse_number<double>("experiment.accuracies", item));
    }
  }
  if (auto v = file.get("experiment.steps")) {
    config.steps = parse_number<std::size_t>("experiment.steps", *v);
  }
  if (auto v = file.get("experiment.repetitions")) {
    config.repetitions = parse_number<std::size_t>("experiment.repetitions", *v);
  }
  if (auto v = file.get("experiment.seed")) {
    config.master_seed = parse_number<std::uint64_t>("experiment.seed", *v);
  }
  if (auto v = file.get("experiment.liked_arm")) {
    config.liked_arm = parse_number<std::size_t>("experiment.liked_arm", *v);
  }
  if (auto v = file.get("experiment.threads")) {
    config.threads = parse_number<unsigned>("experiment.threads", *v);
  }
  config.validate();
  return config;
}

}  // namespace cocreate
