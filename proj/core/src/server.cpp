#include "cocreate/server.hpp"

#include <cstdio>
#include <fstream>
#include <iostream>
#include <random>

#include <httplib.h>

#include "cocreate/random.hpp"

namespace cocreate {
namespace {

constexpr std::uint64_t kGeneratorStream = 1;

std::optional<StoryField> optional_field(const nlohmann::json& body, const char* key) {
  if (!body.contains(key) || body.at(key).is_null()) return std::nullopt;
  return parse_field(body.at(key).get<std::string>());
}

std::optional<Rating> optional_rating(const nlohmann::json& body, const char* key) {
  if (!body.contains(key) || body.at(key).is_null()) return std::nullopt;
  return parse_rating(body.at(key).get<std::string>());
}

std::string require_string(const nlohmann::json& body, const char* key) {
  if (!body.contains(key) || !body.at(key).is_string()) {
    throw InvalidArgument(std::string("request needs a string \"") + key + "\"");
  }
  return body.at(key).get<std::string>();
}

}  // namespace

struct SessionManager::Entry {
  std::mutex mu;
  std::condition_variable idle;
  std::unique_ptr<Session> session;
  std::unique_ptr<Generator> generator;
  std::string created_at;
  bool agent_busy = false;
  bool warned_write_error = false;
  std::jthread worker;
};

SessionManager::SessionManager(ServerConfig config) : config_(std::move(config)) {
  if (config_.data_dir) std::filesystem::create_directories(*config_.data_dir);
}

SessionManager::~SessionManager() {
  std::map<std::string, std::shared_ptr<Entry>> sessions;
  {
    std::lock_guard lock(sessions_mu_);
    sessions.swap(sessions_);
  }
  for (auto& [_, entry] : sessions) {
    if (entry->worker.joinable()) entry->worker.join();
  }
}

std::string SessionManager::next_id() {
  static thread_local std::mt19937_64 salt{std::random_device{}()};
  char buf[48];
  std::snprintf(buf, sizeof buf, "s%06llu-%08llx", static_cast<unsigned long long>(++counter_),
                static_cast<unsigned long long>(salt() & 0xffffffffULL));
  return buf;
}

void SessionManager::append_index(const std::string& id, const std::filesystem::path& file,
                                  const std::string& created_at) {
  std::lock_guard lock(index_mu_);
  std::ofstream index(*config_.data_dir / "index.jsonl", std::ios::app | std::ios::binary);
  const nlohmann::json line = {{"session_id", id}, {"file", file.filename().string()}, {"created_at", created_at}};
  index << line.dump() << '\n';
  if (!index) std::cerr << "cocreate: failed to update session index for " << id << '\n';
}

nlohmann::json SessionManager::create(const nlohmann::json& body) {
  nlohmann::json request = body.is_null() ? nlohmann::json::object() : body;
  if (!request.contains("seed")) request["seed"] = std::random_device{}();
  const SessionConfig session_config = session_config_from_json(request);

  auto entry = std::make_shared<Entry>();
  std::string id;
  {
    std::lock_guard lock(sessions_mu_);
    id = next_id();
  }
  entry->session = std::make_unique<Session>(id, session_config, config_.clock);
  entry->created_at = entry->session->log().records().front().ts;

  GeneratorConfig generator = config_.generator;
  generator.seed = derive_seed(session_config.seed, config_.generator.seed, kGeneratorStream);
  entry->generator = make_generator(generator);

  if (config_.data_dir) {
    const auto file = *config_.data_dir / (id + ".jsonl");
    entry->session->log().attach_file(file);
    append_index(id, file, entry->created_at);
  }

  nlohmann::json response;
  {
    std::lock_guard lock(entry->mu);
    response = {{"session_id", id},
                {"created_at", entry->created_at},
                {"config", session_config},
                {"state", view_locked(*entry, config_.debug)}};
  }
  std::lock_guard lock(sessions_mu_);
  sessions_.emplace(id, std::move(entry));
  return response;
}

std::shared_ptr<SessionManager::Entry> SessionManager::find(const std::string& id) {
  std::lock_guard lock(sessions_mu_);
  const auto it = sessions_.find(id);
  if (it == sessions_.end()) throw SessionNotFound(id);
  return it->second;
}

nlohmann::json SessionManager::view_locked(const Entry& entry, bool debug) const {
  nlohmann::json view = state_view(entry.session->id(), entry.session->state(), debug || config_.debug);
  view["agent_busy"] = entry.agent_busy;
  view["config"] = entry.session->config();
  if (const auto& err = entry.session->log().write_error()) view["log_write_error"] = *err;
  return view;
}

nlohmann::json SessionManager::view(const std::string& id, bool debug) {
  auto entry = find(id);
  std::lock_guard lock(entry->mu);
  return view_locked(*entry, debug);
}

template <typename Op>
nlohmann::json SessionManager::mutate(const std::string& id, Op&& op) {
  auto entry = find(id);
  std::unique_lock lock(entry->mu);
  op(*entry->session);
  if (entry->session->state().phase == Phase::agent_initiative && !entry->agent_busy) {
    schedule_agent_turn(entry, lock);
  }
  if (const auto& err = entry->session->log().write_error(); err && !entry->warned_write_error) {
    std::cerr << "cocreate: session log write failed: " << *err << '\n';
    entry->warned_write_error = true;
  }
  return view_locked(*entry, false);
}

void SessionManager::schedule_agent_turn(const std::shared_ptr<Entry>& entry,
                                         std::unique_lock<std::mutex>& lock) {
  entry->agent_busy = true;
  const AgentTurnPlan plan = entry->session->begin_agent_turn();

  auto run = [entry, plan](bool relock) {
    std::optional<CommOutcome> outcome;
    std::string error;
    for (int attempt = 1; attempt <= Session::kGeneratorAttempts && !outcome; ++attempt) {
      try {
        outcome = execute_communication(plan.kind, plan.document, *entry->generator);
      } catch (const std::exception& e) {
        error = e.what();
      }
    }
    std::unique_lock<std::mutex> guard(entry->mu, std::defer_lock);
    if (relock) guard.lock();
    if (outcome) {
      entry->session->complete_agent_turn(plan, std::move(*outcome));
    } else {
      entry->session->fail_agent_turn(plan, error, Session::kGeneratorAttempts);
    }
    entry->agent_busy = false;
    if (relock) guard.unlock();
    entry->idle.notify_all();
  };

  if (!config_.async_agent_turns) {
    run(false);
    return;
  }
  if (entry->worker.joinable()) {
    // The previous turn already finished (agent_busy was false); reap it.
    lock.unlock();
    entry->worker.join();
    lock.lock();
  }
  entry->worker = std::jthread([run] { run(true); });
}

nlohmann::json SessionManager::edit(const std::string& id, const nlohmann::json& body) {
  const StoryField field = parse_field(require_string(body, "field"));
  std::string text = require_string(body, "text");
  return mutate(id, [&](Session& s) { s.edit(field, std::move(text)); });
}

nlohmann::json SessionManager::switch_field(const std::string& id, const nlohmann::json& body) {
  auto to = optional_field(body, "to");
  if (!to) to = optional_field(body, "field");
  if (!to) throw InvalidArgument("switch_field needs \"to\"");
  return mutate(id, [&](Session& s) { s.switch_field(*to); });
}

nlohmann::json SessionManager::leave_field(const std::string& id, const nlohmann::json& body) {
  const auto field = body.is_object() ? optional_field(body, "field") : std::nullopt;
  return mutate(id, [&](Session& s) { s.leave_field(field); });
}

nlohmann::json SessionManager::skip(const std::string& id) {
  return mutate(id, [](Session& s) { s.skip(); });
}

nlohmann::json SessionManager::feedback(const std::string& id, const nlohmann::json& body) {
  if (!body.is_object()) throw InvalidArgument("feedback body must be a JSON object");
  const auto action = optional_rating(body, "action");
  const auto content = optional_rating(body, "content");
  return mutate(id, [&](Session& s) { s.submit_feedback(action, content); });
}

std::string SessionManager::log_jsonl(const std::string& id) {
  auto entry = find(id);
  std::lock_guard lock(entry->mu);
  return entry->session->log().to_jsonl();
}

void SessionManager::wait_idle(const std::string& id) {
  auto entry = find(id);
  std::unique_lock lock(entry->mu);
  entry->idle.wait(lock, [&] { return !entry->agent_busy; });
}

// ---- HTTP front end ------------------------------------------------------

struct ApiServer::Impl {
  explicit Impl(ServerConfig config) : manager(config), host(config.host), port(config.port) {}

  SessionManager manager;
  httplib::Server http;
  std::string host;
  int port;
  int bound_port = -1;
  std::thread thread;
};

namespace {

void send_json(httplib::Response& res, int status, const nlohmann::json& body) {
  res.status = status;
  res.set_content(body.dump(), "application/json");
}

nlohmann::json parse_body(const httplib::Request& req) {
  if (req.body.empty()) return nlohmann::json::object();
  try {
    return nlohmann::json::parse(req.body);
  } catch (const nlohmann::json::parse_error& e) {
    throw InvalidArgument(std::string("request body is not valid JSON: ") + e.what());
  }
}

template <typename Handler>
void guarded(httplib::Response& res, Handler&& handler) {
  try {
    handler();
  } catch (const SessionNotFound& e) {
    send_json(res, 404, {{"error", e.what()}});
  } catch (const WrongPhase& e) {
    send_json(res, 409, {{"error", e.what()}, {"phase", e.phase()}});
  } catch (const InvalidArgument& e) {
    send_json(res, 400, {{"error", e.what()}});
  } catch (const UnknownField& e) {
    send_json(res, 400, {{"error", e.what()}});
  } catch (const nlohmann::json::exception& e) {
    send_json(res, 400, {{"error", e.what()}});
  } catch (const std::exception& e) {
    send_json(res, 500, {{"error", e.what()}});
  }
}

}  // namespace

ApiServer::ApiServer(ServerConfig config) : impl_(std::make_unique<Impl>(std::move(config))) {
  auto& http = impl_->http;
  auto& manager = impl_->manager;

  http.set_default_headers({{"Access-Control-Allow-Origin", "*"},
                            {"Access-Control-Allow-Headers", "Content-Type"},
                            {"Access-Control-Allow-Methods", "GET, POST, OPTIONS"}});
  http.Options(R"(/.*)", [](const httplib::Request&, httplib::Response& res) { res.status = 204; });

  http.Get("/healthz", [](const httplib::Request&, httplib::Response& res) {
    send_json(res, 200, {{"status", "ok"}});
  });

  http.Post("/sessions", [&manager](const httplib::Request& req, httplib::Response& res) {
    guarded(res, [&] { send_json(res, 201, manager.create(parse_body(req))); });
  });

  http.Get(R"(/sessions/([^/]+))", [&manager](const httplib::Request& req, httplib::Response& res) {
    guarded(res, [&] {
      const bool debug = req.has_param("debug") && req.get_param_value("debug") != "0";
      send_json(res, 200, manager.view(req.matches[1], debug));
    });
  });

  http.Get(R"(/sessions/([^/]+)/log)", [&manager](const httplib::Request& req, httplib::Response& res) {
    guarded(res, [&] {
      res.status = 200;
      res.set_content(manager.log_jsonl(req.matches[1]), "application/x-ndjson");
    });
  });

  http.Post(R"(/sessions/([^/]+)/(edit|switch_field|leave_field|skip|feedback))",
            [&manager](const httplib::Request& req, httplib::Response& res) {
              guarded(res, [&] {
                const std::string id = req.matches[1];
                const std::string op = req.matches[2];
                const nlohmann::json body = parse_body(req);
                nlohmann::json view;
                if (op == "edit") {
                  view = manager.edit(id, body);
                } else if (op == "switch_field") {
                  view = manager.switch_field(id, body);
                } else if (op == "leave_field") {
                  view = manager.leave_field(id, body);
                } else if (op == "skip") {
                  view = manager.skip(id);
                } else {
                  view = manager.feedback(id, body);
                }
                send_json(res, 200, view);
              });
            });
}

ApiServer::~ApiServer() { stop(); }

SessionManager& ApiServer::sessions() noexcept { return impl_->manager; }

int ApiServer::bind() {
  if (impl_->bound_port > 0) return impl_->bound_port;
  if (impl_->port == 0) {
    impl_->bound_port = impl_->http.bind_to_any_port(impl_->host);
  } else if (impl_->http.bind_to_port(impl_->host, impl_->port)) {
    impl_->bound_port = impl_->port;
  }
  if (impl_->bound_port <= 0) {
    throw Error("cannot bind " + impl_->host + ":" + std::to_string(impl_->port));
  }
  return impl_->bound_port;
}

void ApiServer::listen() { impl_->http.listen_after_bind(); }

int ApiServer::start() {
  const int port = bind();
  impl_->thread = std::thread([this] { listen(); });
  impl_->http.wait_until_ready();
  return port;
}

void ApiServer::stop() {
  if (!impl_) return;
  impl_->http.stop();
  if (impl_->thread.joinable()) impl_->thread.join();
}

}  // namespace cocreate
