#include "affectcouple/session.hpp"

#include "affectcouple/error.hpp"

namespace affectcouple {

std::string_view to_string(SessionState s) noexcept {
  switch (s) {
    case SessionState::proposed: return "proposed";
    case SessionState::committed: return "committed";
    case SessionState::manual_required: return "manual_required";
    case SessionState::abandoned: return "abandoned";
  }
  return "proposed";
}

bool is_terminal(SessionState s) noexcept { return s != SessionState::proposed; }

std::string_view to_string(FeedbackEvent::Action a) noexcept {
  switch (a) {
    case FeedbackEvent::Action::accept: return "accept";
    case FeedbackEvent::Action::reject: return "reject";
    case FeedbackEvent::Action::adjust: return "adjust";
    case FeedbackEvent::Action::abandon: return "abandon";
  }
  return "abandon";
}

FeedbackEvent::Action parse_action(std::string_view name) {
  using A = FeedbackEvent::Action;
  for (auto a : {A::accept, A::reject, A::adjust, A::abandon}) {
    if (to_string(a) == name) return a;
  }
  throw Error(ErrorCode::validation, "unknown action '" + std::string(name) + "'", "action");
}

AnnotationSession open_session(const StimulusDocument& target, const Corpus& corpus,
                               const Taxonomy& taxonomy, const EstimationConfig& cfg,
                               std::string session_id, std::uint64_t corpus_revision) {
  if (target.annotated()) {
    throw Error(ErrorCode::validation, "document '" + target.id + "' is already annotated",
                "document_id");
  }
  AnnotationSession s;
  s.session_id = std::move(session_id);
  s.target = target;
  s.corpus_revision = corpus_revision;
  auto refs = reference_documents(corpus, cfg);
  if (refs.empty()) {
    cfg.validate();
    target.profile.resolve(taxonomy);
    s.state = SessionState::manual_required;
    return s;
  }
  auto est = estimate(target.profile, refs, taxonomy, cfg);
  s.candidates = std::move(est.candidates);
  s.fallback = est.fallback;
  s.state = SessionState::proposed;
  return s;
}

AnnotationSession apply_feedback(AnnotationSession s, const FeedbackEvent& event) {
  using A = FeedbackEvent::Action;
  if (s.terminal()) {
    throw Error(ErrorCode::session_closed,
                "session closed (state " + std::string(to_string(s.state)) + ")", "state");
  }
  auto check_index = [&] {
    if (event.index >= s.candidates.size()) {
      throw Error(ErrorCode::validation,
                  "candidate index " + std::to_string(event.index) + " out of range (" +
                      std::to_string(s.candidates.size()) + " candidates)",
                  "index");
    }
  };

  switch (event.action) {
    case A::accept: {
      check_index();
      const auto& c = s.candidates[event.index];
      AffectiveRating r;
      r.val_mean = c.emotion.val;
      r.ar_mean = c.emotion.ar;
      r.val_sd = c.val_spread;
      r.ar_sd = c.ar_spread;
      s.target.rating = r;
      s.target.provenance = Provenance::estimated;
      s.state = SessionState::committed;
      break;
    }
    case A::reject: {
      check_index();
      s.candidates.erase(s.candidates.begin() + static_cast<std::ptrdiff_t>(event.index));
      double total = 0.0;
      for (const auto& c : s.candidates) total += c.likelihood;
      for (auto& c : s.candidates) c.likelihood /= total;
      if (s.candidates.empty()) s.state = SessionState::manual_required;
      break;
    }
    case A::adjust: {
      EmotionPoint p{event.val, event.ar, std::nullopt};
      p.validate();
      AffectiveRating r;
      r.val_mean = p.val;
      r.ar_mean = p.ar;
      s.target.rating = r;
      s.target.provenance = Provenance::manual;
      s.state = SessionState::committed;
      break;
    }
    case A::abandon:
      s.state = SessionState::abandoned;
      break;
  }
  s.history.push_back({s.history.size() + 1, event});
  return s;
}

}  // namespace affectcouple
