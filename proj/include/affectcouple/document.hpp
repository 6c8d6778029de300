#pragma once

#include <optional>
#include <string>
#include <string_view>

#include "affectcouple/affect.hpp"
#include "affectcouple/semantic.hpp"

namespace affectcouple {

enum class Provenance { manifest, folder_convention, estimated, manual };

std::string_view to_string(Provenance p) noexcept;
/// Throws Error{parse} for unknown names.
Provenance parse_provenance(std::string_view name);

/// Neighborhood radii for the coupling predicate.
struct CouplingThresholds {
  double eps_sem = 2.0;
  double eps_emo = 1.5;

  void validate() const;

  friend bool operator==(const CouplingThresholds&, const CouplingThresholds&) = default;
};

/// A stimulus: identifier, opaque resource locator, descriptor set and, once
/// annotated, its affective rating.
struct StimulusDocument {
  std::string id;
  std::string uri;
  SemanticProfile profile;
  std::optional<AffectiveRating> rating;
  Provenance provenance = Provenance::manifest;

  bool annotated() const noexcept { return rating.has_value(); }

  /// Rating means as a point; throws Error{validation} "unannotated document".
  EmotionPoint emotion() const;

  /// Field-level invariants (ids, uri, profile, rating ranges, provenance).
  void validate() const;

  friend bool operator==(const StimulusDocument&, const StimulusDocument&) = default;
};

}  // namespace affectcouple
