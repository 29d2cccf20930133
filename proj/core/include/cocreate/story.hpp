#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <map>
#include <string>
#include <string_view>

#include <nlohmann/json.hpp>

namespace cocreate {

// The four parts of the story, in document order.
enum class StoryField : std::uint8_t { beginning = 0, development = 1, climax = 2, conclusion = 3 };

inline constexpr std::size_t kStoryFieldCount = 4;
inline constexpr std::array<StoryField, kStoryFieldCount> kAllStoryFields = {
    StoryField::beginning, StoryField::development, StoryField::climax, StoryField::conclusion};

std::string_view field_name(StoryField field) noexcept;
// Throws UnknownField.
StoryField parse_field(std::string_view name);

struct StoryDocument {
  std::array<std::string, kStoryFieldCount> fields;
  std::uint64_t revision = 0;

  const std::string& operator[](StoryField f) const { return fields[static_cast<std::size_t>(f)]; }
  std::string& operator[](StoryField f) { return fields[static_cast<std::size_t>(f)]; }

  // Content equality, ignoring revision.
  bool same_content(const StoryDocument& other) const { return fields == other.fields; }

  friend bool operator==(const StoryDocument&, const StoryDocument&) = default;
};

struct EditDelta {
  StoryField field = StoryField::beginning;
  std::size_t chars_added = 0;
  bool field_switched = false;

  friend bool operator==(const EditDelta&, const EditDelta&) = default;
};

enum class SnapshotCause { pre_agent_edit };

// Copy of a document taken before an agent edit. Immutable once taken.
class Snapshot {
 public:
  Snapshot(StoryDocument document, std::uint64_t turn, std::string session_id)
      : document_(std::move(document)), turn_(turn), session_id_(std::move(session_id)) {}

  const StoryDocument& document() const noexcept { return document_; }
  std::uint64_t taken_at_turn() const noexcept { return turn_; }
  SnapshotCause cause() const noexcept { return SnapshotCause::pre_agent_edit; }
  const std::string& session_id() const noexcept { return session_id_; }

 private:
  StoryDocument document_;
  std::uint64_t turn_;
  std::string session_id_;
};

// Number of Unicode code points in UTF-8 `text`. Stray continuation bytes
// are not counted.
std::size_t utf8_length(std::string_view text) noexcept;

// Replaces one field. chars_added is the net positive change in character
// count; deletions add nothing. The revision always advances.
EditDelta apply_edit(StoryDocument& doc, StoryField field, std::string new_text);

// Replaces several fields as a single mutation (revision + 1).
void replace_fields(StoryDocument& doc, const std::map<StoryField, std::string>& replacements);

Snapshot take_snapshot(const StoryDocument& doc, std::uint64_t turn, std::string session_id);

// Restores all four fields from `snap`. Throws StaleSnapshot when `snap`
// belongs to a different session. Counts as a mutation (revision + 1).
void revert(StoryDocument& doc, const Snapshot& snap, std::string_view session_id);

struct WordCountReport {
  static constexpr std::size_t kFieldMin = 20;
  static constexpr std::size_t kFieldMax = 30;
  static constexpr std::size_t kTotalTarget = 100;
  static constexpr std::size_t kTotalSlack = 30;

  enum class Flag { ok, low, high };

  std::array<std::size_t, kStoryFieldCount> counts{};
  std::array<Flag, kStoryFieldCount> flags{};
  std::size_t total = 0;
  Flag total_flag = Flag::ok;
};

// Whitespace-delimited word counts. Advisory only.
WordCountReport word_count_report(const StoryDocument& doc);

std::string_view flag_name(WordCountReport::Flag flag) noexcept;

void to_json(nlohmann::json& j, const StoryDocument& doc);
void from_json(const nlohmann::json& j, StoryDocument& doc);
void to_json(nlohmann::json& j, const WordCountReport& report);

}  // namespace cocreate
