#pragma once

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

namespace cocreate {

struct EventRecord {
  std::uint64_t seq = 0;
  std::string ts;
  std::string event;
  nlohmann::json payload = nlohmann::json::object();

  // One JSONL line (no trailing newline), keys in {seq, ts, event, payload} order.
  std::string to_line() const;
  // Throws nlohmann::json::exception on malformed input.
  static EventRecord from_line(const std::string& line);

  // Equality of everything except the timestamp.
  bool same_event(const EventRecord& other) const {
    return seq == other.seq && event == other.event && payload == other.payload;
  }

  friend bool operator==(const EventRecord&, const EventRecord&) = default;
};

using Clock = std::function<std::string()>;

// ISO-8601 UTC wall clock with millisecond precision.
Clock utc_clock();

// Append-only session log. Sequence numbers start at 1 and increase by one.
// When a file sink is attached every record is also written there; a failed
// write is remembered in write_error() and never thrown, and the in-memory
// buffer always keeps the record.
class EventLog {
 public:
  explicit EventLog(Clock clock = utc_clock()) : clock_(std::move(clock)) {}

  EventLog(const EventLog&) = delete;
  EventLog& operator=(const EventLog&) = delete;
  EventLog(EventLog&&) = default;
  EventLog& operator=(EventLog&&) = default;

  void attach_file(const std::filesystem::path& path);

  const EventRecord& append(std::string event, nlohmann::json payload);

  const std::vector<EventRecord>& records() const noexcept { return records_; }
  const std::optional<std::string>& write_error() const noexcept { return write_error_; }
  const std::optional<std::filesystem::path>& file() const noexcept { return path_; }

  std::string to_jsonl() const;

 private:
  void write_through(const EventRecord& record);

  Clock clock_;
  std::vector<EventRecord> records_;
  std::optional<std::filesystem::path> path_;
  std::ofstream out_;
  std::optional<std::string> write_error_;
};

}  // namespace cocreate
