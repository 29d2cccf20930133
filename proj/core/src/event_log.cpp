#include "cocreate/event_log.hpp"

#include <chrono>
#include <cstdio>
#include <ctime>

namespace cocreate {

std::string EventRecord::to_line() const {
  nlohmann::ordered_json line;
  line["seq"] = seq;
  line["ts"] = ts;
  line["event"] = event;
  line["payload"] = payload;
  return line.dump();
}

EventRecord EventRecord::from_line(const std::string& line) {
  const auto j = nlohmann::json::parse(line);
  EventRecord record;
  record.seq = j.at("seq").get<std::uint64_t>();
  record.ts = j.at("ts").get<std::string>();
  record.event = j.at("event").get<std::string>();
  record.payload = j.at("payload");
  if (!record.payload.is_object()) {
    throw nlohmann::json::type_error::create(302, "payload must be an object", &j);
  }
  return record;
}

Clock utc_clock() {
  return [] {
    using namespace std::chrono;
    const auto now = system_clock::now();
    const auto ms = duration_cast<milliseconds>(now.time_since_epoch()).count() % 1000;
    const std::time_t secs = system_clock::to_time_t(now);
    std::tm tm{};
    gmtime_r(&secs, &tm);
    char date[24];
    std::strftime(date, sizeof date, "%Y-%m-%dT%H:%M:%S", &tm);
    char frac[8];
    std::snprintf(frac, sizeof frac, ".%03dZ", static_cast<int>(ms));
    return std::string(date) + frac;
  };
}

void EventLog::attach_file(const std::filesystem::path& path) {
  path_ = path;
  out_.open(path, std::ios::out | std::ios::app | std::ios::binary);
  if (!out_) {
    write_error_ = "cannot open " + path.string();
    return;
  }
  for (const auto& record : records_) write_through(record);
}

const EventRecord& EventLog::append(std::string event, nlohmann::json payload) {
  EventRecord record;
  record.seq = records_.size() + 1;
  record.ts = clock_();
  record.event = std::move(event);
  record.payload = std::move(payload);
  records_.push_back(std::move(record));
  if (path_) write_through(records_.back());
  return records_.back();
}

void EventLog::write_through(const EventRecord& record) {
  if (!out_.is_open()) {
    out_.clear();
    out_.open(*path_, std::ios::out | std::ios::app | std::ios::binary);
  }
  out_ << record.to_line() << '\n';
  out_.flush();
  if (!out_) {
    write_error_ = "write to " + path_->string() + " failed at seq " + std::to_string(record.seq);
    out_.close();
  }
}

std::string EventLog::to_jsonl() const {
  std::string out;
  for (const auto& record : records_) {
    out += record.to_line();
    out += '\n';
  }
  return out;
}

}  // namespace cocreate
