#include "cocreate/communications.hpp"

#include <algorithm>
#include <cctype>
#include <random>
#include <vector>

#include "cocreate/errors.hpp"
#include "cocreate/random.hpp"

namespace cocreate {
namespace {

constexpr std::array<std::string_view, kCommunicationCount> kKindNames = {
    "rewrite_opening", "rewrite_closing", "review"};

std::string_view trim(std::string_view s) {
  const auto is_space = [](unsigned char c) { return std::isspace(c) != 0; };
  while (!s.empty() && is_space(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && is_space(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

std::string capitalized_label(StoryField f) {
  std::string label(field_name(f));
  label[0] = static_cast<char>(std::toupper(static_cast<unsigned char>(label[0])));
  return label;
}

// ---- prompt construction ------------------------------------------------

struct Shot {
  std::array<std::string_view, kStoryFieldCount> story;
  std::string_view answer;
};

// Worked examples shown before the real question. Authored for this engine.
constexpr std::array<std::string_view, kStoryFieldCount> kShotStory = {
    "A young baker named Ila finds a recipe card hidden inside an old flour sack.",
    "The card leads her to a closed bakery across town, where the owner refuses to talk.",
    "On the night of the city fair, Ila bakes the recipe and the whole square falls silent.",
    "The owner tastes the bread, smiles for the first time in years, and hands Ila the keys."};

constexpr Shot kOpeningShot{
    kShotStory,
    "_Beginning: Ila, a shy baker's apprentice, discovers a faded recipe card sewn into the lining "
    "of a flour sack her grandmother left behind.\nDevelopment: Following the card's strange "
    "symbols, she reaches a shuttered bakery whose bitter owner slams the door, though his eyes "
    "linger on the card._"};

constexpr Shot kClosingShot{
    kShotStory,
    "_Climax: At the crowded fair, Ila's bread fills the square with a scent so familiar that the "
    "old owner pushes through the crowd in tears.\nConclusion: He reveals the recipe was his "
    "lost sister's, and he asks Ila to reopen the bakery in her name._"};

constexpr Shot kReviewShot{
    kShotStory,
    "_Positive: The recipe card is a charming hook that ties the whole story together. Negative: "
    "The owner's change of heart happens too quickly. Suggestion: Add one scene where Ila fails "
    "before the fair._"};

std::string_view instruction_for(CommunicationKind kind) {
  switch (kind) {
    case CommunicationKind::rewrite_opening:
      return "Rewrite the beginning and development of the story, 20 to 30 words each, keeping "
             "them consistent with the climax and conclusion. Answer as \"Beginning: ...\" "
             "followed by \"Development: ...\" on the next line.";
    case CommunicationKind::rewrite_closing:
      return "Rewrite the climax and conclusion of the story, 20 to 30 words each, keeping them "
             "consistent with the beginning and development. Answer as \"Climax: ...\" followed "
             "by \"Conclusion: ...\" on the next line.";
    case CommunicationKind::review:
      return "Write a review of the story: one sentence positive, one negative, and one "
             "suggestion for improvements.";
  }
  return "";
}

const Shot& shot_for(CommunicationKind kind) {
  switch (kind) {
    case CommunicationKind::rewrite_opening:
      return kOpeningShot;
    case CommunicationKind::rewrite_closing:
      return kClosingShot;
    case CommunicationKind::review:
      return kReviewShot;
  }
  return kReviewShot;
}

template <typename Fields>
void append_story(std::string& out, const Fields& fields) {
  out += "Story:\n";
  for (const auto f : kAllStoryFields) {
    out += capitalized_label(f);
    out += ": ";
    out += fields[static_cast<std::size_t>(f)];
    out += '\n';
  }
}

// ---- answer interpretation ---------------------------------------------

std::map<StoryField, std::string> split_rewrite(CommunicationKind kind, std::string_view answer) {
  const auto [first, second] = rewrite_fields(kind);
  const std::string first_label = capitalized_label(first) + ":";
  const std::string second_label = capitalized_label(second) + ":";

  std::string_view a;
  std::string_view b;
  const auto second_at = answer.find(second_label);
  if (second_at != std::string_view::npos) {
    a = answer.substr(0, second_at);
    b = answer.substr(second_at + second_label.size());
    a = trim(a);
    if (a.starts_with(first_label)) a.remove_prefix(first_label.size());
  } else {
    const auto nl = answer.find('\n');
    if (nl == std::string_view::npos) {
      throw BackendError("rewrite answer does not contain two parts");
    }
    a = answer.substr(0, nl);
    b = answer.substr(nl + 1);
  }
  a = trim(a);
  b = trim(b);
  if (a.empty() || b.empty()) throw BackendError("rewrite answer has an empty part");
  return {{first, std::string(a)}, {second, std::string(b)}};
}

// ---- mock generator ------------------------------------------------------

constexpr std::uint64_t fnv1a(std::string_view s, std::uint64_t h = 0xcbf29ce484222325ULL) {
  for (const unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::uint64_t document_hash(const StoryDocument& doc) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (const auto& field : doc.fields) {
    h = fnv1a(field, h);
    h = fnv1a(std::string_view("\x1f", 1), h);
  }
  return h;
}

// Longest alphabetic word of four or more letters; falls back to a stock name.
std::string story_subject(const StoryDocument& doc) {
  std::string best;
  for (const auto& field : doc.fields) {
    std::string word;
    for (std::size_t i = 0; i <= field.size(); ++i) {
      const unsigned char c = i < field.size() ? static_cast<unsigned char>(field[i]) : ' ';
      if (std::isalpha(c)) {
        word += static_cast<char>(c);
      } else {
        if (word.size() >= 4 && word.size() > best.size()) best = word;
        word.clear();
      }
    }
  }
  return best.empty() ? std::string("the wanderer") : best;
}

using Bank = std::vector<std::string_view>;

const Bank kOpenings = {
    "In a quiet harbor town, {s} kept a secret that the tide seemed to whisper back every night.",
    "Long ago, beyond the northern hills, {s} woke to find the old bell tower ringing on its own.",
    "Nobody in the valley remembered the day {s} arrived, only the strange lantern left behind.",
    "Every spring {s} walked the long road to the market, until one morning the road was gone."};
const Bank kDevelopments = {
    "Curious and stubborn, {s} followed the clues through crowded streets and forgotten maps, "
    "gathering unlikely friends along the way.",
    "Days turned into weeks as {s} tested every rumor, and each answer only opened a stranger "
    "door.",
    "A rival appeared chasing the same prize, and {s} had to decide whom to trust as the stakes "
    "kept rising."};
const Bank kClimaxes = {
    "At the edge of the storm, {s} faced the choice at last, holding a truth that could save or "
    "ruin everyone.",
    "When the bridge began to fall, {s} turned back, risking everything to pull a friend from the "
    "dark water.",
    "The final door opened onto an empty room, and {s} understood what the search had really been "
    "about."};
const Bank kConclusions = {
    "By morning the town was calm again, and {s} smiled, knowing the tale would be told for years.",
    "Life returned to its slow rhythm, yet {s} never passed the old tower without a quiet nod.",
    "Some questions remained, but {s} finally felt at home, ready for whatever the next season "
    "might bring."};
const Bank kPositives = {"The opening sets a vivid mood around {s}.",
                         "The story has a clear arc and an engaging central figure in {s}.",
                         "The imagery is concrete and easy to picture."};
const Bank kNegatives = {"The climax arrives too quickly to feel earned.",
                         "The development repeats ideas instead of raising the stakes.",
                         "Some sentences run long and blur the pacing."};
const Bank kSuggestions = {"Consider adding one concrete obstacle before the climax.",
                           "Try giving {s} a clearer motivation in the beginning.",
                           "A short line of dialogue could sharpen the conclusion."};

std::string fill(std::string_view tmpl, const std::string& subject) {
  std::string out(tmpl);
  const auto at = out.find("{s}");
  if (at != std::string::npos) out.replace(at, 3, subject);
  return out;
}

std::string draw(const Bank& bank, Rng& rng, const std::string& subject) {
  std::uniform_int_distribution<std::size_t> pick(0, bank.size() - 1);
  return fill(bank[pick(rng)], subject);
}

}  // namespace

std::string_view kind_name(CommunicationKind kind) noexcept {
  return kKindNames[static_cast<std::size_t>(kind)];
}

CommunicationKind parse_kind(std::string_view name) {
  for (std::size_t i = 0; i < kKindNames.size(); ++i) {
    if (kKindNames[i] == name) return static_cast<CommunicationKind>(i);
  }
  throw InvalidArgument("unknown communication kind: " + std::string(name));
}

CommunicationKind kind_for_arm(std::size_t arm) {
  if (arm >= kCommunicationCount) {
    throw OutOfRange("no communication for arm " + std::to_string(arm));
  }
  return static_cast<CommunicationKind>(arm);
}

std::array<StoryField, 2> rewrite_fields(CommunicationKind kind) {
  if (kind == CommunicationKind::rewrite_opening) {
    return {StoryField::beginning, StoryField::development};
  }
  return {StoryField::climax, StoryField::conclusion};
}

void to_json(nlohmann::json& j, const CommOutcome& outcome) {
  j = nlohmann::json::object();
  j["kind"] = kind_name(outcome.kind);
  if (outcome.new_fields) {
    auto& fields = j["new_fields"] = nlohmann::json::object();
    for (const auto& [field, text] : *outcome.new_fields) fields[std::string(field_name(field))] = text;
  }
  if (outcome.review_text) j["review_text"] = *outcome.review_text;
  j["raw_response"] = outcome.raw_response;
  if (outcome.parse_warning) j["parse_warning"] = true;
}

void from_json(const nlohmann::json& j, CommOutcome& outcome) {
  outcome.kind = parse_kind(j.at("kind").get<std::string>());
  outcome.new_fields.reset();
  outcome.review_text.reset();
  if (j.contains("new_fields")) {
    std::map<StoryField, std::string> fields;
    for (const auto& [name, text] : j.at("new_fields").items()) {
      fields.emplace(parse_field(name), text.get<std::string>());
    }
    outcome.new_fields = std::move(fields);
  }
  if (j.contains("review_text")) outcome.review_text = j.at("review_text").get<std::string>();
  outcome.raw_response = j.value("raw_response", std::string{});
  outcome.parse_warning = j.value("parse_warning", false);
  if (outcome.new_fields.has_value() == outcome.review_text.has_value()) {
    throw InvalidArgument("outcome must carry exactly one of new_fields and review_text");
  }
}

std::string build_prompt(CommunicationKind kind, const StoryDocument& doc) {
  std::string out(kPromptPreamble);
  out += "\n\n";

  const Shot& shot = shot_for(kind);
  out += "Question: ";
  out += instruction_for(kind);
  out += '\n';
  append_story(out, shot.story);
  out += "Answer: ";
  out += shot.answer;
  out += "\n\n";

  out += "Question: ";
  out += instruction_for(kind);
  out += '\n';
  append_story(out, doc.fields);
  out += "Answer:";
  return out;
}

std::string parse_generated(std::string_view raw) {
  const auto open = raw.find('_');
  if (open != std::string_view::npos) {
    const auto close = raw.find('_', open + 1);
    if (close != std::string_view::npos) {
      return std::string(trim(raw.substr(open + 1, close - open - 1)));
    }
  }
  throw NoDelimitedSpan("response has no underscore-delimited answer");
}

std::string MockGenerator::generate(const GenerationRequest& request) {
  Rng rng(derive_seed(seed_, document_hash(request.document), arm_for_kind(request.kind)));
  const std::string subject = story_subject(request.document);
  std::string answer;
  switch (request.kind) {
    case CommunicationKind::rewrite_opening:
      answer = "Beginning: " + draw(kOpenings, rng, subject) +
               "\nDevelopment: " + draw(kDevelopments, rng, subject);
      break;
    case CommunicationKind::rewrite_closing:
      answer = "Climax: " + draw(kClimaxes, rng, subject) +
               "\nConclusion: " + draw(kConclusions, rng, subject);
      break;
    case CommunicationKind::review:
      answer = "Positive: " + draw(kPositives, rng, subject) +
               " Negative: " + draw(kNegatives, rng, subject) +
               " Suggestion: " + draw(kSuggestions, rng, subject);
      break;
  }
  std::erase(answer, '_');
  return " _" + answer + "_";
}

std::unique_ptr<Generator> make_generator(const GeneratorConfig& config) {
  if (config.backend == GeneratorBackend::http) return std::make_unique<HttpGenerator>(config.http);
  return std::make_unique<MockGenerator>(config.seed);
}

CommOutcome execute_communication(CommunicationKind kind, const StoryDocument& doc,
                                  Generator& generator) {
  CommOutcome outcome;
  outcome.kind = kind;
  outcome.raw_response = generator.generate(GenerationRequest{kind, doc, build_prompt(kind, doc)});

  std::string answer;
  try {
    answer = parse_generated(outcome.raw_response);
  } catch (const NoDelimitedSpan&) {
    answer = std::string(trim(outcome.raw_response));
    outcome.parse_warning = true;
  }
  if (answer.empty()) throw BackendError("generator returned an empty answer");

  if (is_rewrite(kind)) {
    outcome.new_fields = split_rewrite(kind, answer);
  } else {
    outcome.review_text = std::move(answer);
  }
  return outcome;
}

}  // namespace cocreate
