#include "cocreate/story.hpp"

#include <cctype>

#include "cocreate/errors.hpp"

namespace cocreate {
namespace {

constexpr std::array<std::string_view, kStoryFieldCount> kFieldNames = {
    "beginning", "development", "climax", "conclusion"};

WordCountReport::Flag classify(std::size_t n, std::size_t lo, std::size_t hi) {
  if (n < lo) return WordCountReport::Flag::low;
  if (n > hi) return WordCountReport::Flag::high;
  return WordCountReport::Flag::ok;
}

std::size_t count_words(std::string_view text) {
  std::size_t words = 0;
  bool in_word = false;
  for (const unsigned char c : text) {
    if (std::isspace(c)) {
      in_word = false;
    } else if (!in_word) {
      in_word = true;
      ++words;
    }
  }
  return words;
}

}  // namespace

std::string_view field_name(StoryField field) noexcept {
  return kFieldNames[static_cast<std::size_t>(field)];
}

StoryField parse_field(std::string_view name) {
  for (std::size_t i = 0; i < kFieldNames.size(); ++i) {
    if (kFieldNames[i] == name) return static_cast<StoryField>(i);
  }
  throw UnknownField("unknown story field: " + std::string(name));
}

std::size_t utf8_length(std::string_view text) noexcept {
  std::size_t n = 0;
  for (const unsigned char c : text) {
    if ((c & 0xC0) != 0x80) ++n;
  }
  return n;
}

EditDelta apply_edit(StoryDocument& doc, StoryField field, std::string new_text) {
  const auto index = static_cast<std::size_t>(field);
  if (index >= kStoryFieldCount) throw UnknownField("unknown story field index");
  auto& slot = doc.fields[index];
  const std::size_t before = utf8_length(slot);
  const std::size_t after = utf8_length(new_text);
  slot = std::move(new_text);
  doc.revision += 1;
  return EditDelta{field, after > before ? after - before : 0, false};
}

void replace_fields(StoryDocument& doc, const std::map<StoryField, std::string>& replacements) {
  for (const auto& [field, text] : replacements) {
    if (static_cast<std::size_t>(field) >= kStoryFieldCount) throw UnknownField("unknown story field index");
    doc[field] = text;
  }
  doc.revision += 1;
}

Snapshot take_snapshot(const StoryDocument& doc, std::uint64_t turn, std::string session_id) {
  return Snapshot(doc, turn, std::move(session_id));
}

void revert(StoryDocument& doc, const Snapshot& snap, std::string_view session_id) {
  if (snap.session_id() != session_id) {
    throw StaleSnapshot("snapshot belongs to session " + snap.session_id());
  }
  doc.fields = snap.document().fields;
  doc.revision += 1;
}

WordCountReport word_count_report(const StoryDocument& doc) {
  WordCountReport report;
  for (std::size_t i = 0; i < kStoryFieldCount; ++i) {
    report.counts[i] = count_words(doc.fields[i]);
    report.flags[i] = classify(report.counts[i], WordCountReport::kFieldMin, WordCountReport::kFieldMax);
    report.total += report.counts[i];
  }
  report.total_flag = classify(report.total, WordCountReport::kTotalTarget - WordCountReport::kTotalSlack,
                               WordCountReport::kTotalTarget + WordCountReport::kTotalSlack);
  return report;
}

std::string_view flag_name(WordCountReport::Flag flag) noexcept {
  switch (flag) {
    case WordCountReport::Flag::ok:
      return "ok";
    case WordCountReport::Flag::low:
      return "low";
    case WordCountReport::Flag::high:
      return "high";
  }
  return "ok";
}

void to_json(nlohmann::json& j, const StoryDocument& doc) {
  j = nlohmann::json::object();
  for (const auto f : kAllStoryFields) j[std::string(field_name(f))] = doc[f];
  j["revision"] = doc.revision;
}

void from_json(const nlohmann::json& j, StoryDocument& doc) {
  for (const auto f : kAllStoryFields) doc[f] = j.value(std::string(field_name(f)), std::string{});
  doc.revision = j.value("revision", std::uint64_t{0});
}

void to_json(nlohmann::json& j, const WordCountReport& report) {
  j = nlohmann::json::object();
  for (const auto f : kAllStoryFields) {
    const auto i = static_cast<std::size_t>(f);
    j["fields"][std::string(field_name(f))] = {{"words", report.counts[i]},
                                               {"flag", flag_name(report.flags[i])}};
  }
  j["total"] = {{"words", report.total}, {"flag", flag_name(report.total_flag)}};
}

}  // namespace cocreate
