#include <gtest/gtest.h>

#include "cocreate/errors.hpp"
#include "cocreate/story.hpp"

using namespace cocreate;

TEST(StoryField, NamesRoundTrip) {
  for (const StoryField f : kAllStoryFields) EXPECT_EQ(parse_field(field_name(f)), f);
  EXPECT_THROW(parse_field("prologue"), UnknownField);
}

TEST(Utf8, CountsCodePoints) {
  EXPECT_EQ(utf8_length(""), 0u);
  EXPECT_EQ(utf8_length("abc"), 3u);
  EXPECT_EQ(utf8_length("caf\xc3\xa9"), 4u);         // café
  EXPECT_EQ(utf8_length("\xe2\x9c\x93 ok"), 4u);     // check mark
  EXPECT_EQ(utf8_length("\xf0\x9f\x90\x89"), 1u);    // dragon emoji
}

TEST(ApplyEdit, CountsOnlyGrowth) {
  StoryDocument doc;
  auto d = apply_edit(doc, StoryField::beginning, "Hello world");
  EXPECT_EQ(d.chars_added, 11u);
  EXPECT_EQ(doc.revision, 1u);
  d = apply_edit(doc, StoryField::beginning, "Hello");
  EXPECT_EQ(d.chars_added, 0u);
  EXPECT_EQ(doc.revision, 2u);
  d = apply_edit(doc, StoryField::beginning, "Jello");
  EXPECT_EQ(d.chars_added, 0u);
  d = apply_edit(doc, StoryField::beginning, "Jello there");
  EXPECT_EQ(d.chars_added, 6u);
  EXPECT_EQ(doc[StoryField::beginning], "Jello there");
  EXPECT_EQ(doc[StoryField::climax], "");
}

TEST(ReplaceFields, IsOneMutationAndIsolatesFields) {
  StoryDocument doc;
  doc[StoryField::beginning] = "b";
  doc[StoryField::development] = "d";
  doc[StoryField::climax] = "c";
  doc[StoryField::conclusion] = "z";
  replace_fields(doc, {{StoryField::climax, "C2"}, {StoryField::conclusion, "Z2"}});
  EXPECT_EQ(doc.revision, 1u);
  EXPECT_EQ(doc[StoryField::beginning], "b");
  EXPECT_EQ(doc[StoryField::development], "d");
  EXPECT_EQ(doc[StoryField::climax], "C2");
  EXPECT_EQ(doc[StoryField::conclusion], "Z2");
}

TEST(Snapshot, RevertRestoresContentAndAdvancesRevision) {
  StoryDocument doc;
  apply_edit(doc, StoryField::beginning, "original");
  const Snapshot snap = take_snapshot(doc, 3, "s1");
  EXPECT_EQ(snap.taken_at_turn(), 3u);
  EXPECT_EQ(snap.session_id(), "s1");
  replace_fields(doc, {{StoryField::beginning, "new"}, {StoryField::development, "more"}});
  revert(doc, snap, "s1");
  EXPECT_TRUE(doc.same_content(snap.document()));
  EXPECT_EQ(doc.revision, 3u);
}

TEST(Snapshot, ForeignSnapshotIsStale) {
  StoryDocument doc;
  const Snapshot snap = take_snapshot(doc, 0, "s1");
  EXPECT_THROW(revert(doc, snap, "s2"), StaleSnapshot);
  EXPECT_EQ(doc.revision, 0u);
}

TEST(WordCount, FlagsFieldsAndTotal) {
  StoryDocument doc;
  std::string twenty_five;
  for (int i = 0; i < 25; ++i) twenty_five += "word ";
  for (const StoryField f : kAllStoryFields) doc[f] = twenty_five;
  doc[StoryField::climax] = "too short";
  const auto report = word_count_report(doc);
  EXPECT_EQ(report.counts[0], 25u);
  EXPECT_EQ(report.counts[2], 2u);
  EXPECT_EQ(report.flags[0], WordCountReport::Flag::ok);
  EXPECT_EQ(report.flags[2], WordCountReport::Flag::low);
  EXPECT_EQ(report.total, 77u);
  EXPECT_EQ(report.total_flag, WordCountReport::Flag::ok);

  std::string forty;
  for (int i = 0; i < 40; ++i) forty += "w ";
  for (const StoryField f : kAllStoryFields) doc[f] = forty;
  const auto high = word_count_report(doc);
  EXPECT_EQ(high.flags[1], WordCountReport::Flag::high);
  EXPECT_EQ(high.total_flag, WordCountReport::Flag::high);
}

TEST(StoryJson, RoundTripsWithFixedKeys) {
  StoryDocument doc;
  apply_edit(doc, StoryField::development, "middle");
  const nlohmann::json j = doc;
  EXPECT_EQ(j.size(), 5u);
  EXPECT_EQ(j.at("development"), "middle");
  EXPECT_EQ(j.at("revision"), 1);
  EXPECT_EQ(j.get<StoryDocument>(), doc);
}
