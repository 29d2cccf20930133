#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "cocreate/communications.hpp"
#include "cocreate/oracle.hpp"
#include "cocreate/session.hpp"

namespace cocreate {

// INI-style key=value settings. "[section]" headers prefix the keys that
// follow ("section.key"); '#' and ';' start comment lines.
class ConfigFile {
 public:
  static ConfigFile parse(std::string_view text);
  // Throws InvalidArgument if the file cannot be read or parsed.
  static ConfigFile load(const std::filesystem::path& path);

  std::optional<std::string> get(std::string_view key) const;
  void set(std::string key, std::string value) { values_[std::move(key)] = std::move(value); }
  const std::map<std::string, std::string, std::less<>>& values() const noexcept { return values_; }

 private:
  std::map<std::string, std::string, std::less<>> values_;
};

// Comma separated list, items trimmed, empty items dropped.
std::vector<std::string> split_list(std::string_view text);

// generator.backend / seed / endpoint / model / timeout_ms / auth_token_env /
// max_tokens / temperature / response_pointer
GeneratorConfig generator_config(const ConfigFile& file);
// session.max_turns / policy / epsilon / ablation / seed
SessionConfig session_config(const ConfigFile& file);
// experiment.policies / accuracies / steps / repetitions / seed / liked_arm / threads
OracleConfig oracle_config(const ConfigFile& file);

}  // namespace cocreate
