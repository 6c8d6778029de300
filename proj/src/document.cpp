#include "affectcouple/document.hpp"

#include "affectcouple/error.hpp"

namespace affectcouple {

std::string_view to_string(Provenance p) noexcept {
  switch (p) {
    case Provenance::manifest: return "manifest";
    case Provenance::folder_convention: return "folder_convention";
    case Provenance::estimated: return "estimated";
    case Provenance::manual: return "manual";
  }
  return "manifest";
}

Provenance parse_provenance(std::string_view name) {
  for (auto p : {Provenance::manifest, Provenance::folder_convention, Provenance::estimated,
                 Provenance::manual}) {
    if (to_string(p) == name) return p;
  }
  throw Error(ErrorCode::parse, "unknown provenance '" + std::string(name) + "'", "provenance");
}

void CouplingThresholds::validate() const {
  if (!(eps_sem > 0.0)) throw Error(ErrorCode::validation, "eps_sem must be positive", "eps_sem");
  if (!(eps_emo > 0.0)) throw Error(ErrorCode::validation, "eps_emo must be positive", "eps_emo");
}

EmotionPoint StimulusDocument::emotion() const {
  if (!rating) {
    throw Error(ErrorCode::validation, "unannotated document '" + id + "'", id);
  }
  return rating->point();
}

void StimulusDocument::validate() const {
  if (id.empty()) throw Error(ErrorCode::validation, "empty document id", "id");
  if (uri.empty()) throw Error(ErrorCode::validation, "empty uri for '" + id + "'", "uri");
  if (profile.empty()) throw Error(ErrorCode::validation, "empty semantic profile", "tags");
  if (rating) rating->validate();
  if (provenance == Provenance::estimated && !rating) {
    throw Error(ErrorCode::validation, "estimated document '" + id + "' has no rating",
                "provenance");
  }
}

}  // namespace affectcouple
