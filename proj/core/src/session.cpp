#include "cocreate/session.hpp"

#include <array>

#include "cocreate/errors.hpp"

namespace cocreate {
namespace {

constexpr std::array<std::string_view, 5> kPhaseNames = {
    "human_initiative", "agent_initiative", "awaiting_action_feedback",
    "awaiting_content_feedback", "finished"};

constexpr std::uint64_t kBanditStream = 0;

nlohmann::json field_or_null(const std::optional<StoryField>& field) {
  if (!field) return nullptr;
  return field_name(*field);
}

}  // namespace

std::string_view phase_name(Phase phase) noexcept {
  return kPhaseNames[static_cast<std::size_t>(phase)];
}

Phase parse_phase(std::string_view name) {
  for (std::size_t i = 0; i < kPhaseNames.size(); ++i) {
    if (kPhaseNames[i] == name) return static_cast<Phase>(i);
  }
  throw InvalidArgument("unknown phase: " + std::string(name));
}

std::string_view rating_name(Rating rating) noexcept {
  return rating == Rating::good ? "good" : "bad";
}

Rating parse_rating(std::string_view text) {
  if (text == "good" || text == "keep") return Rating::good;
  if (text == "bad" || text == "revert") return Rating::bad;
  throw InvalidArgument("rating must be good/bad (or keep/revert): " + std::string(text));
}

double compose_reward(Rating action, Rating content) noexcept {
  return kActionWeight * rating_value(action) + kContentWeight * rating_value(content);
}

void SessionConfig::validate() const {
  if (max_turns < 1) throw InvalidArgument("max_turns must be at least 1");
  if (policy.kind == PolicyKind::epsilon_greedy && !(policy.epsilon >= 0.0 && policy.epsilon <= 1.0)) {
    throw InvalidArgument("epsilon must lie in [0, 1]");
  }
}

void to_json(nlohmann::json& j, const SessionConfig& config) {
  j = nlohmann::json{{"max_turns", config.max_turns},
                     {"policy", config.policy.name()},
                     {"ablation", config.ablation},
                     {"seed", config.seed}};
  if (config.policy.kind == PolicyKind::epsilon_greedy) j["epsilon"] = config.policy.epsilon;
}

SessionConfig session_config_from_json(const nlohmann::json& j) {
  if (!j.is_object()) throw InvalidArgument("session config must be a JSON object");
  SessionConfig config;
  try {
    if (j.contains("policy")) config.policy = Policy::parse(j.at("policy").get<std::string>());
    if (j.contains("epsilon")) {
      if (config.policy.kind != PolicyKind::epsilon_greedy) {
        throw InvalidArgument("epsilon only applies to epsilon_greedy");
      }
      config.policy.epsilon = j.at("epsilon").get<double>();
    }
    if (j.contains("max_turns")) {
      const auto& mt = j.at("max_turns");
      if (!mt.is_number_integer() || mt.get<std::int64_t>() < 1) {
        throw InvalidArgument("max_turns must be an integer >= 1");
      }
      config.max_turns = mt.get<std::uint64_t>();
    }
    if (j.contains("ablation")) config.ablation = j.at("ablation").get<bool>();
    if (j.contains("seed")) config.seed = j.at("seed").get<std::uint64_t>();
  } catch (const nlohmann::json::exception& e) {
    throw InvalidArgument(std::string("bad session config: ") + e.what());
  }
  config.validate();
  return config;
}

bool accrue_points(SessionState& state, const PointEvent& event) {
  if (state.phase != Phase::human_initiative) {
    throw WrongPhase("point accrual", std::string(phase_name(state.phase)));
  }
  if (const auto* chars = std::get_if<CharsAdded>(&event)) {
    state.points += kPointsPerChar * chars->count;
    return false;
  }
  if (std::holds_alternative<FieldSwitchAfterChange>(event)) {
    state.points += kFieldSwitchPoints;
    return false;
  }
  if (state.points < kInitiativeThreshold) return false;
  state.phase = Phase::agent_initiative;
  state.points = 0;
  state.last_edited_field.reset();
  state.focused_field_modified = false;
  return true;
}

Session::Session(std::string id, SessionConfig config, Clock clock)
    : id_(std::move(id)),
      config_(config),
      log_(std::move(clock)),
      rng_(derive_seed(config.seed, 0, kBanditStream)) {
  config_.validate();
  state_.max_turns = config_.max_turns;
  state_.ablation_mode = config_.ablation;
  state_.bandit = BanditState::create(kCommunicationCount, config_.effective_policy(), config_.seed);

  nlohmann::json payload = config_;
  payload["session_id"] = id_;
  payload["ablation_mode"] = config_.ablation;
  payload["arms"] = kCommunicationCount;
  log_.append("session_created", std::move(payload));
}

void Session::require_phase(Phase expected, std::string_view operation) const {
  if (state_.phase != expected) {
    throw WrongPhase(std::string(operation), std::string(phase_name(state_.phase)));
  }
}

void Session::transition(Phase to) { transition(state_.phase, to); }

void Session::transition(Phase from, Phase to) {
  state_.phase = to;
  log_.append("transition",
              {{"from", phase_name(from)}, {"to", phase_name(to)}, {"turn", state_.turn}});
}

void Session::log_document(std::string_view cause) {
  log_.append("document_revised", {{"revision", state_.document.revision},
                                   {"cause", cause},
                                   {"document", state_.document}});
}

bool Session::do_switch(StoryField to, bool implicit) {
  const auto from = state_.last_edited_field;
  const bool credited = from.has_value() && *from != to && state_.focused_field_modified;
  if (credited) accrue_points(state_, FieldSwitchAfterChange{});
  if (from != to) {
    state_.last_edited_field = to;
    state_.focused_field_modified = false;
  }
  log_.append("switch_field", {{"from", field_or_null(from)},
                               {"to", field_name(to)},
                               {"credited", credited},
                               {"implicit", implicit},
                               {"points", state_.points}});
  return credited;
}

void Session::enter_agent_initiative() {
  state_.points = 0;
  state_.last_edited_field.reset();
  state_.focused_field_modified = false;
  transition(Phase::human_initiative, Phase::agent_initiative);
}

EditDelta Session::edit(StoryField field, std::string text) {
  require_phase(Phase::human_initiative, "edit");
  bool switched = false;
  if (state_.last_edited_field != field) switched = do_switch(field, /*implicit=*/true);

  EditDelta delta = apply_edit(state_.document, field, std::move(text));
  delta.field_switched = switched;
  if (delta.chars_added > 0) {
    accrue_points(state_, CharsAdded{delta.chars_added});
    state_.focused_field_modified = true;
  }
  log_.append("edit", {{"field", field_name(field)},
                       {"text", state_.document[field]},
                       {"chars_added", delta.chars_added},
                       {"points", state_.points}});
  log_document("human_edit");
  return delta;
}

bool Session::switch_field(StoryField to) {
  require_phase(Phase::human_initiative, "switch_field");
  return do_switch(to, /*implicit=*/false);
}

bool Session::leave_field(std::optional<StoryField> field) {
  require_phase(Phase::human_initiative, "leave_field");
  const std::uint64_t before = state_.points;
  const bool triggered = accrue_points(state_, FieldLeave{});
  log_.append("leave_field",
              {{"field", field_or_null(field)}, {"points", before}, {"triggered", triggered}});
  if (triggered) enter_agent_initiative();
  return triggered;
}

void Session::skip() {
  require_phase(Phase::human_initiative, "skip");
  log_.append("skip", {{"points", state_.points}});
  enter_agent_initiative();
}

AgentTurnPlan Session::begin_agent_turn() {
  require_phase(Phase::agent_initiative, "agent turn");
  const std::size_t arm = select_arm(state_.bandit, rng_);
  return AgentTurnPlan{arm, kind_for_arm(arm), state_.document};
}

void Session::complete_agent_turn(const AgentTurnPlan& plan, CommOutcome outcome) {
  require_phase(Phase::agent_initiative, "agent turn");
  if (outcome.kind != plan.kind || arm_for_kind(plan.kind) != plan.arm) {
    throw InvalidArgument("outcome kind does not match the pulled arm");
  }
  if (is_rewrite(plan.kind)) {
    const auto [first, second] = rewrite_fields(plan.kind);
    if (!outcome.new_fields || outcome.review_text || outcome.new_fields->size() != 2 ||
        !outcome.new_fields->contains(first) || !outcome.new_fields->contains(second)) {
      throw InvalidArgument("rewrite outcome must replace exactly its two fields");
    }
  } else if (outcome.new_fields || !outcome.review_text) {
    throw InvalidArgument("review outcome must carry review text only");
  }

  state_.turn += 1;
  log_.append("arm_pulled",
              {{"arm", plan.arm}, {"kind", kind_name(plan.kind)}, {"turn", state_.turn}});
  log_.append("agent_output", {{"arm", plan.arm}, {"outcome", outcome}});

  if (is_rewrite(plan.kind)) {
    state_.pending_snapshot = take_snapshot(state_.document, state_.turn, id_);
    log_.append("snapshot", {{"turn", state_.turn}, {"revision", state_.document.revision}});
    replace_fields(state_.document, *outcome.new_fields);
    log_document("agent_edit");
  } else {
    state_.pending_snapshot.reset();
  }

  state_.pending_arm = plan.arm;
  state_.pending_outcome = std::move(outcome);
  state_.pending_action.reset();
  transition(state_.ablation_mode ? Phase::awaiting_content_feedback
                                  : Phase::awaiting_action_feedback);
}

void Session::fail_agent_turn(const AgentTurnPlan& plan, std::string_view error, int attempts) {
  require_phase(Phase::agent_initiative, "agent turn");
  state_.failed_turns += 1;
  log_.append("generation_failed", {{"arm", plan.arm},
                                    {"kind", kind_name(plan.kind)},
                                    {"attempts", attempts},
                                    {"error", error}});
  transition(Phase::human_initiative);
}

void Session::run_agent_turn(Generator& generator) {
  const AgentTurnPlan plan = begin_agent_turn();
  std::string last_error;
  for (int attempt = 1; attempt <= kGeneratorAttempts; ++attempt) {
    try {
      CommOutcome outcome = execute_communication(plan.kind, plan.document, generator);
      complete_agent_turn(plan, std::move(outcome));
      return;
    } catch (const BackendError& e) {
      last_error = e.what();
    }
  }
  fail_agent_turn(plan, last_error, kGeneratorAttempts);
}

std::optional<FeedbackSignal> Session::submit_feedback(std::optional<Rating> action,
                                                       std::optional<Rating> content) {
  if (!action && !content) throw InvalidArgument("feedback needs an action or content rating");

  switch (state_.phase) {
    case Phase::awaiting_action_feedback:
      if (!action) throw WrongPhase("content feedback", std::string(phase_name(state_.phase)));
      if (!state_.pending_outcome) throw MissingPendingOutcome();
      state_.pending_action = *action;
      log_.append("feedback", {{"question", "action"}, {"rating", rating_name(*action)}});
      transition(Phase::awaiting_content_feedback);
      if (!content) return std::nullopt;
      break;
    case Phase::awaiting_content_feedback:
      if (action) throw WrongPhase("action feedback", std::string(phase_name(state_.phase)));
      break;
    default:
      throw WrongPhase("feedback", std::string(phase_name(state_.phase)));
  }

  if (!state_.pending_outcome || !state_.pending_arm) throw MissingPendingOutcome();
  const Rating rating = *content;
  log_.append("feedback", {{"question", "content"}, {"rating", rating_name(rating)}});

  FeedbackSignal signal;
  signal.content = rating;
  const std::size_t arm = *state_.pending_arm;
  const CommunicationKind kind = state_.pending_outcome->kind;
  if (state_.ablation_mode) {
    signal.composed = rating_value(rating);
  } else {
    signal.action = state_.pending_action;
    signal.composed = compose_reward(*state_.pending_action, rating);
    update(state_.bandit, arm, signal.composed);
    state_.rewards.push_back(signal.composed);
    log_.append("reward", {{"arm", arm},
                           {"kind", kind_name(kind)},
                           {"action", rating_name(*signal.action)},
                           {"content", rating_name(rating)},
                           {"composed", signal.composed}});
  }

  if (rating == Rating::bad && is_rewrite(kind) && state_.pending_snapshot) {
    revert(state_.document, *state_.pending_snapshot, id_);
    log_.append("revert", {{"turn", state_.turn}, {"revision", state_.document.revision}});
    log_document("revert");
  }

  state_.pending_outcome.reset();
  state_.pending_snapshot.reset();
  state_.pending_arm.reset();
  state_.pending_action.reset();
  transition(state_.turn >= state_.max_turns ? Phase::finished : Phase::human_initiative);
  return signal;
}

std::vector<std::string> questions_due(const SessionState& state) {
  switch (state.phase) {
    case Phase::awaiting_action_feedback:
      return {"action", "content"};
    case Phase::awaiting_content_feedback:
      if (state.ablation_mode) return {"keep_or_revert"};
      return {"content"};
    default:
      return {};
  }
}

nlohmann::json state_view(const std::string& session_id, const SessionState& state, bool debug) {
  nlohmann::json view;
  view["session_id"] = session_id;
  view["phase"] = phase_name(state.phase);
  view["turn"] = state.turn;
  view["max_turns"] = state.max_turns;
  view["points"] = state.points;
  view["points_threshold"] = kInitiativeThreshold;
  view["document"] = state.document;
  view["word_counts"] = word_count_report(state.document);
  view["ablation_mode"] = state.ablation_mode;
  view["failed_turns"] = state.failed_turns;
  view["questions_due"] = questions_due(state);

  if (state.pending_outcome) {
    nlohmann::json pending{{"kind", kind_name(state.pending_outcome->kind)}};
    if (state.pending_outcome->review_text) pending["review_text"] = *state.pending_outcome->review_text;
    if (state.pending_outcome->new_fields) {
      auto& changed = pending["changed_fields"] = nlohmann::json::array();
      for (const auto& [field, _] : *state.pending_outcome->new_fields) changed.push_back(field_name(field));
    }
    view["pending"] = std::move(pending);
  } else {
    view["pending"] = nullptr;
  }

  if (debug) {
    view["bandit"] = state.bandit;
    view["rewards"] = state.rewards;
  }
  return view;
}

}  // namespace cocreate
