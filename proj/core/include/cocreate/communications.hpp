#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <string_view>

#include <nlohmann/json.hpp>

#include "cocreate/story.hpp"

namespace cocreate {

// The agent's capabilities. Each one is a bandit arm; arm index == enum value.
enum class CommunicationKind : std::uint8_t { rewrite_opening = 0, rewrite_closing = 1, review = 2 };

inline constexpr std::size_t kCommunicationCount = 3;
inline constexpr std::array<CommunicationKind, kCommunicationCount> kAllCommunications = {
    CommunicationKind::rewrite_opening, CommunicationKind::rewrite_closing, CommunicationKind::review};

std::string_view kind_name(CommunicationKind kind) noexcept;
CommunicationKind parse_kind(std::string_view name);
CommunicationKind kind_for_arm(std::size_t arm);
inline std::size_t arm_for_kind(CommunicationKind kind) noexcept { return static_cast<std::size_t>(kind); }
inline bool is_rewrite(CommunicationKind kind) noexcept { return kind != CommunicationKind::review; }

// The two fields a rewrite kind replaces. Undefined for review.
std::array<StoryField, 2> rewrite_fields(CommunicationKind kind);

struct CommOutcome {
  CommunicationKind kind = CommunicationKind::review;
  std::optional<std::map<StoryField, std::string>> new_fields;  // rewrite kinds only
  std::optional<std::string> review_text;                       // review only
  std::string raw_response;
  bool parse_warning = false;  // no "_..._" span; the trimmed response was used

  friend bool operator==(const CommOutcome&, const CommOutcome&) = default;
};

void to_json(nlohmann::json& j, const CommOutcome& outcome);
void from_json(const nlohmann::json& j, CommOutcome& outcome);

inline constexpr std::string_view kPromptPreamble =
    "You are an AI writing assistant, collaborating with a human on the task of writing a "
    "story.You are very concise, and answer only what is absolutely necessary, without any "
    "explanations or introductions.You make sure that all your answers are surrounded by an "
    "underscore, such as _My answer_ .";

// Preamble, worked question/answer examples for `kind`, then the current
// story and the open question for the model to answer.
std::string build_prompt(CommunicationKind kind, const StoryDocument& doc);

// Trimmed content of the first "_..._" span. Throws NoDelimitedSpan.
std::string parse_generated(std::string_view raw);

struct GenerationRequest {
  CommunicationKind kind;
  const StoryDocument& document;
  std::string prompt;
};

class Generator {
 public:
  virtual ~Generator() = default;
  // Raw model continuation. Throws BackendError / BackendTimeout.
  virtual std::string generate(const GenerationRequest& request) = 0;
};

// Offline generator. Output depends only on (seed, kind, document fields).
class MockGenerator final : public Generator {
 public:
  explicit MockGenerator(std::uint64_t seed) : seed_(seed) {}
  std::string generate(const GenerationRequest& request) override;
  std::uint64_t seed() const noexcept { return seed_; }

 private:
  std::uint64_t seed_;
};

struct HttpGeneratorConfig {
  std::string endpoint;  // e.g. http://127.0.0.1:8080/generate
  std::string model;
  int timeout_ms = 30000;
  std::string auth_token_env;  // name of the env var holding a bearer token
  int max_tokens = 256;
  double temperature = 0.7;
  std::string response_pointer = "/text";  // JSON pointer into the reply
};

// One POST {prompt, max_tokens, temperature[, model]} per call. At most one
// request in flight per instance.
class HttpGenerator final : public Generator {
 public:
  explicit HttpGenerator(HttpGeneratorConfig config);
  std::string generate(const GenerationRequest& request) override;
  const HttpGeneratorConfig& config() const noexcept { return config_; }

 private:
  HttpGeneratorConfig config_;
  std::string base_;  // scheme://host:port
  std::string path_;
  std::mutex in_flight_;
};

enum class GeneratorBackend { mock, http };

struct GeneratorConfig {
  GeneratorBackend backend = GeneratorBackend::mock;
  std::uint64_t seed = 0;
  HttpGeneratorConfig http;
};

std::unique_ptr<Generator> make_generator(const GeneratorConfig& config);

// Builds the prompt, calls the generator once and interprets the answer.
// Rewrite kinds yield replacement text for exactly their two fields; review
// yields review_text only. Throws BackendError when the answer is unusable.
CommOutcome execute_communication(CommunicationKind kind, const StoryDocument& doc,
                                  Generator& generator);

}  // namespace cocreate
