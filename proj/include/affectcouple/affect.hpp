#pragma once

#include <cmath>
#include <optional>

namespace affectcouple {

inline constexpr double kRatingMin = 1.0;
inline constexpr double kRatingMax = 9.0;

/// Default floor applied to d_Emo before taking its reciprocal.
inline constexpr double kDefaultSingularityCap = 1e-6;

/// A coordinate in the valence x arousal plane. Dominance is carried along
/// but never enters a distance.
struct EmotionPoint {
  double val = 5.0;
  double ar = 5.0;
  std::optional<double> dom;

  /// Throws Error{range} naming the first offending field.
  void validate() const;

  friend bool operator==(const EmotionPoint&, const EmotionPoint&) = default;
};

/// Aggregated subject ratings (mean and SD per axis).
struct AffectiveRating {
  double val_mean = 5.0;
  double val_sd = 0.0;
  double ar_mean = 5.0;
  double ar_sd = 0.0;
  std::optional<double> dom_mean;
  std::optional<double> dom_sd;

  void validate() const;

  /// Means only; SDs never feed a distance.
  EmotionPoint point() const { return {val_mean, ar_mean, dom_mean}; }

  friend bool operator==(const AffectiveRating&, const AffectiveRating&) = default;
};

struct EmotionNeighborhood {
  double eps_emo = 1.0;

  void validate() const;
};

/// Euclidean distance over (val, ar).
double emotion_distance(const EmotionPoint& a, const EmotionPoint& b);

/// 1 / max(d_Emo, cap).
double emotion_similarity(const EmotionPoint& a, const EmotionPoint& b,
                          double singularity_cap = kDefaultSingularityCap);

/// d_Emo(a, b) <= eps_emo, boundary inclusive.
bool within_neighborhood(const EmotionPoint& a, const EmotionPoint& b,
                         const EmotionNeighborhood& nb);

/// Distance without range validation, for hot loops over already
/// validated corpus points.
inline double emotion_distance_unchecked(const EmotionPoint& a,
                                         const EmotionPoint& b) noexcept {
  return std::hypot(a.val - b.val, a.ar - b.ar);
}

bool in_rating_range(double v) noexcept;

}  // namespace affectcouple
