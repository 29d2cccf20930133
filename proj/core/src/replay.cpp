#include "cocreate/replay.hpp"

#include <memory>

#include "cocreate/errors.hpp"

namespace cocreate {
namespace {

std::optional<Rating> optional_rating(const nlohmann::json& payload, std::string_view question) {
  if (payload.at("question").get<std::string>() != question) return std::nullopt;
  return parse_rating(payload.at("rating").get<std::string>());
}

// The fresh engine stamps its records with the original timestamps so that a
// faithful replay regenerates the log byte for byte.
struct ReplayClock {
  const std::vector<EventRecord>* source;
  std::shared_ptr<std::size_t> next;

  std::string operator()() const {
    const std::size_t i = (*next)++;
    return i < source->size() ? (*source)[i].ts : std::string{};
  }
};

}  // namespace

ParsedLog parse_log(std::istream& in) {
  ParsedLog parsed;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const bool last_line_unterminated = in.eof();
    if (line.empty()) continue;
    const std::uint64_t expected_seq = parsed.records.size() + 1;
    EventRecord record;
    try {
      record = EventRecord::from_line(line);
    } catch (const nlohmann::json::exception& e) {
      if (last_line_unterminated) {
        parsed.truncation_warning = "log truncated at line " + std::to_string(line_no) +
                                    " (sequence " + std::to_string(expected_seq) + ")";
        break;
      }
      throw LogCorruption("line " + std::to_string(line_no) + ": " + e.what(), expected_seq, line_no);
    }
    if (record.seq != expected_seq) {
      throw LogCorruption("line " + std::to_string(line_no) + ": expected sequence " +
                              std::to_string(expected_seq) + ", found " + std::to_string(record.seq),
                          expected_seq, line_no);
    }
    parsed.records.push_back(std::move(record));
  }
  return parsed;
}

ReplayResult replay_log(const std::vector<EventRecord>& records) {
  if (records.empty() || records.front().event != "session_created") {
    throw LogCorruption("log does not start with session_created", records.empty() ? 1 : records.front().seq, 1);
  }

  const auto& created = records.front().payload;
  SessionConfig config;
  std::string session_id;
  try {
    config = session_config_from_json(created);
    session_id = created.at("session_id").get<std::string>();
  } catch (const std::exception& e) {
    throw LogCorruption(std::string("bad session_created record: ") + e.what(), 1, 1);
  }

  auto cursor = std::make_shared<std::size_t>(0);
  Session session(session_id, config, ReplayClock{&records, cursor});

  ReplayResult result;
  result.session_id = session_id;
  result.config = config;

  const auto corrupt = [&](std::size_t index, const std::string& why) -> LogCorruption {
    return LogCorruption("sequence " + std::to_string(records[index].seq) + " (" +
                             records[index].event + "): " + why,
                         records[index].seq, index + 1);
  };

  std::size_t pos = 1;
  while (pos < records.size()) {
    const EventRecord& rec = records[pos];
    const auto& p = rec.payload;
    const std::size_t before = session.log().records().size();

    try {
      if (rec.event == "edit") {
        session.edit(parse_field(p.at("field").get<std::string>()), p.at("text").get<std::string>());
      } else if (rec.event == "switch_field" && p.value("implicit", false)) {
        // An edit outside the focused field logs its focus move first.
        if (pos + 1 >= records.size()) {
          result.warning = "log ends inside an edit at sequence " + std::to_string(rec.seq);
          break;
        }
        const EventRecord& edit = records[pos + 1];
        if (edit.event != "edit") throw corrupt(pos + 1, "expected edit after implicit switch_field");
        session.edit(parse_field(edit.payload.at("field").get<std::string>()),
                     edit.payload.at("text").get<std::string>());
      } else if (rec.event == "switch_field") {
        session.switch_field(parse_field(p.at("to").get<std::string>()));
      } else if (rec.event == "leave_field") {
        std::optional<StoryField> field;
        if (p.contains("field") && !p.at("field").is_null()) {
          field = parse_field(p.at("field").get<std::string>());
        }
        session.leave_field(field);
      } else if (rec.event == "skip") {
        session.skip();
      } else if (rec.event == "arm_pulled") {
        if (pos + 1 >= records.size()) {
          result.warning = "log ends inside agent turn at sequence " + std::to_string(rec.seq);
          break;
        }
        const EventRecord& output = records[pos + 1];
        if (output.event != "agent_output") throw corrupt(pos + 1, "expected agent_output");
        const std::size_t arm = p.at("arm").get<std::size_t>();
        AgentTurnPlan turn{arm, kind_for_arm(arm), session.state().document};
        session.complete_agent_turn(turn, output.payload.at("outcome").get<CommOutcome>());
      } else if (rec.event == "generation_failed") {
        const std::size_t arm = p.at("arm").get<std::size_t>();
        AgentTurnPlan turn{arm, kind_for_arm(arm), session.state().document};
        session.fail_agent_turn(turn, p.at("error").get<std::string>(), p.at("attempts").get<int>());
      } else if (rec.event == "feedback") {
        session.submit_feedback(optional_rating(p, "action"), optional_rating(p, "content"));
      } else {
        throw corrupt(pos, "unexpected record");
      }
    } catch (const LogCorruption&) {
      throw;
    } catch (const std::exception& e) {
      throw corrupt(pos, e.what());
    }
    const auto& regen = session.log().records();
    if (regen.size() == before) throw corrupt(pos, "record produced no events");
    for (std::size_t i = before; i < regen.size(); ++i) {
      if (i >= records.size()) {
        result.warning = "log truncated after sequence " + std::to_string(records.back().seq);
        break;
      }
      if (!regen[i].same_event(records[i])) {
        throw corrupt(i, "does not match the replayed session (expected " + regen[i].to_line() + ")");
      }
    }
    pos = regen.size();
    if (result.warning) break;
  }

  result.state = session.state();
  result.regenerated = session.log().records();
  return result;
}

}  // namespace cocreate
