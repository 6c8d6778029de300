#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "affectcouple/estimator.hpp"

namespace affectcouple {

enum class SessionState { proposed, committed, manual_required, abandoned };

std::string_view to_string(SessionState s) noexcept;
bool is_terminal(SessionState s) noexcept;

struct FeedbackEvent {
  enum class Action { accept, reject, adjust, abandon };

  Action action = Action::abandon;
  std::size_t index = 0;  // accept / reject
  double val = 0.0;       // adjust
  double ar = 0.0;

  static FeedbackEvent accept(std::size_t i) { return {Action::accept, i, 0.0, 0.0}; }
  static FeedbackEvent reject(std::size_t i) { return {Action::reject, i, 0.0, 0.0}; }
  static FeedbackEvent adjust(double v, double a) { return {Action::adjust, 0, v, a}; }
  static FeedbackEvent abandon() { return {Action::abandon, 0, 0.0, 0.0}; }
};

std::string_view to_string(FeedbackEvent::Action a) noexcept;
/// Throws Error{validation} for unknown action names.
FeedbackEvent::Action parse_action(std::string_view name);

struct HistoryEntry {
  std::uint64_t seq = 0;  // 1-based, +1 per applied event
  FeedbackEvent event;
};

/// One question-answer exchange between the estimator and an expert for a
/// single unannotated stimulus.
///
///     proposed --accept/adjust--> committed
///     proposed --reject--------> proposed | manual_required (none left)
///     proposed --abandon-------> abandoned
///
/// Every state other than proposed absorbs further events.
struct AnnotationSession {
  std::string session_id;
  StimulusDocument target;
  std::vector<CandidateAnnotation> candidates;
  SessionState state = SessionState::proposed;
  std::vector<HistoryEntry> history;
  bool fallback = false;
  std::uint64_t corpus_revision = 0;

  std::uint64_t seq() const noexcept { return history.size(); }
  bool terminal() const noexcept { return is_terminal(state); }
};

/// Throws Error{validation} when the target already carries a rating. A
/// corpus without annotated documents yields a manual_required session.
AnnotationSession open_session(const StimulusDocument& target, const Corpus& corpus,
                               const Taxonomy& taxonomy, const EstimationConfig& cfg,
                               std::string session_id = {}, std::uint64_t corpus_revision = 0);

/// Returns the successor session. Throws Error{session_closed} on terminal
/// sessions, Error{validation} for a bad candidate index and Error{range}
/// for an out-of-range adjustment.
AnnotationSession apply_feedback(AnnotationSession session, const FeedbackEvent& event);

}  // namespace affectcouple
