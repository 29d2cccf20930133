#pragma once

#include <cstddef>
#include <istream>
#include <optional>
#include <string>
#include <vector>

#include "cocreate/event_log.hpp"
#include "cocreate/session.hpp"

namespace cocreate {

struct ParsedLog {
  std::vector<EventRecord> records;
  // Set when the final line was cut short; everything before it is usable.
  std::optional<std::string> truncation_warning;
};

// Reads JSONL session records. A malformed final line without a trailing
// newline is treated as truncation; any other malformed line, or a sequence
// gap, throws LogCorruption naming the first bad sequence number.
ParsedLog parse_log(std::istream& in);

struct ReplayResult {
  std::string session_id;
  SessionConfig config;
  SessionState state;
  std::vector<EventRecord> regenerated;  // records the fresh engine produced
  std::optional<std::string> warning;    // the log ends mid-operation
};

// Re-drives a fresh Session with the human inputs and the recorded agent
// choices/outputs, then checks every record the engine emits against the
// original. Throws LogCorruption at the first divergence.
ReplayResult replay_log(const std::vector<EventRecord>& records);

}  // namespace cocreate
