#include <cstdlib>

#include <httplib.h>

#include "cocreate/communications.hpp"
#include "cocreate/errors.hpp"

namespace cocreate {
namespace {

// Splits "http://host:port/path" into ("http://host:port", "/path").
std::pair<std::string, std::string> split_endpoint(const std::string& endpoint) {
  const auto scheme_end = endpoint.find("://");
  if (scheme_end == std::string::npos) {
    throw InvalidArgument("generator endpoint must include a scheme: " + endpoint);
  }
  const auto path_start = endpoint.find('/', scheme_end + 3);
  if (path_start == std::string::npos) return {endpoint, "/"};
  return {endpoint.substr(0, path_start), endpoint.substr(path_start)};
}

std::optional<std::string> extract_text(const nlohmann::json& body, const std::string& pointer) {
  const std::array<std::string, 5> candidates = {pointer, "/text", "/response", "/content",
                                                 "/choices/0/text"};
  for (const auto& candidate : candidates) {
    if (candidate.empty()) continue;
    const nlohmann::json::json_pointer ptr(candidate);
    if (body.contains(ptr) && body.at(ptr).is_string()) return body.at(ptr).get<std::string>();
  }
  return std::nullopt;
}

}  // namespace

HttpGenerator::HttpGenerator(HttpGeneratorConfig config) : config_(std::move(config)) {
  if (config_.endpoint.empty()) throw InvalidArgument("http generator needs an endpoint");
  if (config_.timeout_ms <= 0) throw InvalidArgument("generator timeout must be positive");
  if (!config_.response_pointer.empty() && config_.response_pointer.front() != '/') {
    throw InvalidArgument("response pointer must start with '/': " + config_.response_pointer);
  }
  std::tie(base_, path_) = split_endpoint(config_.endpoint);
}

std::string HttpGenerator::generate(const GenerationRequest& request) {
  std::lock_guard lock(in_flight_);

  httplib::Client client(base_);
  const auto seconds = config_.timeout_ms / 1000;
  const auto micros = (config_.timeout_ms % 1000) * 1000;
  client.set_connection_timeout(seconds, micros);
  client.set_read_timeout(seconds, micros);
  client.set_write_timeout(seconds, micros);

  httplib::Headers headers;
  if (!config_.auth_token_env.empty()) {
    if (const char* token = std::getenv(config_.auth_token_env.c_str()); token && *token) {
      headers.emplace("Authorization", std::string("Bearer ") + token);
    }
  }

  nlohmann::json body = {{"prompt", request.prompt},
                         {"max_tokens", config_.max_tokens},
                         {"temperature", config_.temperature}};
  if (!config_.model.empty()) body["model"] = config_.model;

  auto result = client.Post(path_, headers, body.dump(), "application/json");
  if (!result) {
    const auto err = result.error();
    if (err == httplib::Error::Read || err == httplib::Error::ConnectionTimeout) {
      throw BackendTimeout("generator request timed out: " + httplib::to_string(err));
    }
    throw BackendError("generator request failed: " + httplib::to_string(err));
  }
  if (result->status < 200 || result->status >= 300) {
    throw BackendError("generator returned HTTP " + std::to_string(result->status));
  }

  nlohmann::json reply;
  try {
    reply = nlohmann::json::parse(result->body);
  } catch (const nlohmann::json::parse_error&) {
    // Plain-text backends.
    return result->body;
  }
  if (reply.is_string()) return reply.get<std::string>();
  if (auto text = extract_text(reply, config_.response_pointer)) return *text;
  throw BackendError("generator reply has no text at " + config_.response_pointer);
}

}  // namespace cocreate
