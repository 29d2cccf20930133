#pragma once

#include <condition_variable>
#include <cstdint>
#include <filesystem>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <thread>

#include <nlohmann/json.hpp>

#include "cocreate/communications.hpp"
#include "cocreate/errors.hpp"
#include "cocreate/event_log.hpp"
#include "cocreate/session.hpp"

namespace cocreate {

class SessionNotFound : public Error {
 public:
  explicit SessionNotFound(const std::string& id) : Error("unknown session: " + id) {}
};

struct ServerConfig {
  std::string host = "127.0.0.1";
  int port = 8787;  // 0 binds an ephemeral port
  std::optional<std::filesystem::path> data_dir;
  GeneratorConfig generator;
  bool debug = false;              // expose bandit internals in every view
  bool async_agent_turns = true;   // agent turns run after the request returns
  Clock clock = utc_clock();
};

// Owns every live session. Requests for one session are serialized on that
// session's mutex; distinct sessions never wait on each other. Agent turns
// select the arm under the lock, call the generator outside it, and apply
// the result under the lock again, so GET always reads a consistent state.
class SessionManager {
 public:
  explicit SessionManager(ServerConfig config);
  ~SessionManager();

  SessionManager(const SessionManager&) = delete;
  SessionManager& operator=(const SessionManager&) = delete;

  // Body fields: policy, epsilon, max_turns, ablation, seed (all optional).
  nlohmann::json create(const nlohmann::json& body);
  nlohmann::json view(const std::string& id, bool debug = false);

  nlohmann::json edit(const std::string& id, const nlohmann::json& body);
  nlohmann::json switch_field(const std::string& id, const nlohmann::json& body);
  nlohmann::json leave_field(const std::string& id, const nlohmann::json& body);
  nlohmann::json skip(const std::string& id);
  nlohmann::json feedback(const std::string& id, const nlohmann::json& body);

  // Full JSONL log of a session.
  std::string log_jsonl(const std::string& id);

  // Blocks until no agent turn is running for `id`.
  void wait_idle(const std::string& id);

  const ServerConfig& config() const noexcept { return config_; }

 private:
  struct Entry;

  std::shared_ptr<Entry> find(const std::string& id);
  template <typename Op>
  nlohmann::json mutate(const std::string& id, Op&& op);
  void schedule_agent_turn(const std::shared_ptr<Entry>& entry, std::unique_lock<std::mutex>& lock);
  nlohmann::json view_locked(const Entry& entry, bool debug) const;
  std::string next_id();
  void append_index(const std::string& id, const std::filesystem::path& file, const std::string& created_at);

  ServerConfig config_;
  std::mutex sessions_mu_;
  std::map<std::string, std::shared_ptr<Entry>> sessions_;
  std::uint64_t counter_ = 0;
  std::mutex index_mu_;
};

// JSON-over-HTTP front end for SessionManager.
class ApiServer {
 public:
  explicit ApiServer(ServerConfig config);
  ~ApiServer();

  ApiServer(const ApiServer&) = delete;
  ApiServer& operator=(const ApiServer&) = delete;

  // Binds the listening socket; returns the bound port. Throws Error.
  int bind();
  // Serves until stop(). bind() must have succeeded.
  void listen();
  // bind() + listen() on a background thread.
  int start();
  void stop();

  SessionManager& sessions() noexcept;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace cocreate
