#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include <nlohmann/json.hpp>

#include "cocreate/bandit.hpp"
#include "cocreate/communications.hpp"
#include "cocreate/event_log.hpp"
#include "cocreate/random.hpp"
#include "cocreate/story.hpp"

namespace cocreate {

enum class Phase {
  human_initiative,
  agent_initiative,
  awaiting_action_feedback,
  awaiting_content_feedback,
  finished
};

std::string_view phase_name(Phase phase) noexcept;
Phase parse_phase(std::string_view name);

// Human rating of an agent turn. "keep" / "revert" are accepted as aliases
// for good / bad in the content question.
enum class Rating { bad = 0, good = 1 };

std::string_view rating_name(Rating rating) noexcept;
Rating parse_rating(std::string_view text);
inline double rating_value(Rating r) noexcept { return r == Rating::good ? 1.0 : 0.0; }

// Human-initiative point heuristic.
inline constexpr std::uint64_t kPointsPerChar = 5;
inline constexpr std::uint64_t kFieldSwitchPoints = 100;
inline constexpr std::uint64_t kInitiativeThreshold = 200;

// Weights of the two feedback answers in the composed reward.
inline constexpr double kActionWeight = 0.8;
inline constexpr double kContentWeight = 0.2;

double compose_reward(Rating action, Rating content) noexcept;

struct FeedbackSignal {
  std::optional<Rating> action;
  std::optional<Rating> content;
  double composed = 0.0;
};

struct SessionConfig {
  std::uint64_t max_turns = 10;
  Policy policy = Policy::thompson();
  bool ablation = false;
  std::uint64_t seed = 0;

  // Throws InvalidArgument.
  void validate() const;

  // Ablation sessions never learn and pick Communications uniformly.
  Policy effective_policy() const { return ablation ? Policy::uniform_random() : policy; }
};

void to_json(nlohmann::json& j, const SessionConfig& config);
// Missing keys keep their defaults. Throws InvalidArgument on bad values.
SessionConfig session_config_from_json(const nlohmann::json& j);

struct SessionState {
  Phase phase = Phase::human_initiative;
  std::uint64_t turn = 0;
  std::uint64_t max_turns = 10;
  std::uint64_t points = 0;
  std::optional<StoryField> last_edited_field;  // field holding focus
  bool focused_field_modified = false;          // characters added since focus
  StoryDocument document;
  std::optional<CommOutcome> pending_outcome;
  std::optional<Snapshot> pending_snapshot;
  std::optional<std::size_t> pending_arm;
  std::optional<Rating> pending_action;
  BanditState bandit;
  bool ablation_mode = false;
  std::uint64_t failed_turns = 0;
  std::vector<double> rewards;  // composed reward per completed turn (full system)
};

// Human-initiative point events.
struct CharsAdded {
  std::size_t count = 0;
};
struct FieldSwitchAfterChange {};
struct FieldLeave {};
using PointEvent = std::variant<CharsAdded, FieldSwitchAfterChange, FieldLeave>;

// Applies one point event. Returns true when it hands the initiative to the
// agent (points reset to 0). Throws WrongPhase outside human_initiative.
bool accrue_points(SessionState& state, const PointEvent& event);

// What the agent decided to do this turn, before the generator ran.
struct AgentTurnPlan {
  std::size_t arm = 0;
  CommunicationKind kind = CommunicationKind::review;
  StoryDocument document;
};

// One co-writing session. Not thread-safe: callers serialize access.
class Session {
 public:
  static constexpr int kGeneratorAttempts = 2;  // first call plus one retry

  // Logs "session_created". `clock` stamps every log record.
  Session(std::string id, SessionConfig config, Clock clock = utc_clock());

  const std::string& id() const noexcept { return id_; }
  const SessionConfig& config() const noexcept { return config_; }
  const SessionState& state() const noexcept { return state_; }
  const EventLog& log() const noexcept { return log_; }
  EventLog& log() noexcept { return log_; }

  // Whole-field commit. Editing a field other than the focused one first
  // moves focus there (crediting the switch bonus when due).
  EditDelta edit(StoryField field, std::string text);
  // Focus moves to `to`. Returns true when the switch bonus was credited.
  bool switch_field(StoryField to);
  // The human leaves a field. Returns true when the agent takes initiative.
  bool leave_field(std::optional<StoryField> field = std::nullopt);
  // Forces agent initiative.
  void skip();

  // Picks the Communication for this turn. Consumes bandit randomness only;
  // the session is not modified until complete/fail is called.
  AgentTurnPlan begin_agent_turn();
  void complete_agent_turn(const AgentTurnPlan& plan, CommOutcome outcome);
  void fail_agent_turn(const AgentTurnPlan& plan, std::string_view error, int attempts);

  // begin + execute_communication (one retry) + complete/fail.
  void run_agent_turn(Generator& generator);

  // Accepts any part that is due now. Returns the composed signal once the
  // turn's feedback is complete.
  std::optional<FeedbackSignal> submit_feedback(std::optional<Rating> action,
                                                std::optional<Rating> content);

 private:
  void require_phase(Phase expected, std::string_view operation) const;
  void transition(Phase to);
  void transition(Phase from, Phase to);
  void log_document(std::string_view cause);
  bool do_switch(StoryField to, bool implicit);
  void enter_agent_initiative();

  std::string id_;
  SessionConfig config_;
  SessionState state_;
  EventLog log_;
  Rng rng_;
};

// GET view of a session. α/β are only included when `debug` is set.
nlohmann::json state_view(const std::string& session_id, const SessionState& state, bool debug = false);

// Questions the human still owes in the current phase.
std::vector<std::string> questions_due(const SessionState& state);

}  // namespace cocreate
