#include "affectcouple/affect.hpp"

#include <algorithm>
#include <string>

#include "affectcouple/error.hpp"

namespace affectcouple {

namespace {

void check_mean(double v, const char* field) {
  if (!in_rating_range(v)) {
    throw Error(ErrorCode::range, std::string(field) + " out of [1,9]", field);
  }
}

void check_sd(double v, const char* field) {
  if (!(v >= 0.0) || !std::isfinite(v)) {
    throw Error(ErrorCode::range, std::string(field) + " must be non-negative", field);
  }
}

}  // namespace

bool in_rating_range(double v) noexcept {
  return v >= kRatingMin && v <= kRatingMax;
}

void EmotionPoint::validate() const {
  check_mean(val, "val");
  check_mean(ar, "ar");
  if (dom) check_mean(*dom, "dom");
}

void AffectiveRating::validate() const {
  check_mean(val_mean, "val_mean");
  check_sd(val_sd, "val_sd");
  check_mean(ar_mean, "ar_mean");
  check_sd(ar_sd, "ar_sd");
  if (dom_mean.has_value() != dom_sd.has_value()) {
    throw Error(ErrorCode::validation, "dom_mean and dom_sd must be given together",
                dom_mean ? "dom_sd" : "dom_mean");
  }
  if (dom_mean) check_mean(*dom_mean, "dom_mean");
  if (dom_sd) check_sd(*dom_sd, "dom_sd");
}

void EmotionNeighborhood::validate() const {
  if (!(eps_emo > 0.0)) {
    throw Error(ErrorCode::validation, "eps_emo must be positive", "eps_emo");
  }
}

double emotion_distance(const EmotionPoint& a, const EmotionPoint& b) {
  a.validate();
  b.validate();
  return emotion_distance_unchecked(a, b);
}

double emotion_similarity(const EmotionPoint& a, const EmotionPoint& b,
                          double singularity_cap) {
  if (!(singularity_cap > 0.0)) {
    throw Error(ErrorCode::validation, "singularity cap must be positive");
  }
  return 1.0 / std::max(emotion_distance(a, b), singularity_cap);
}

bool within_neighborhood(const EmotionPoint& a, const EmotionPoint& b,
                         const EmotionNeighborhood& nb) {
  nb.validate();
  return emotion_distance(a, b) <= nb.eps_emo;
}

}  // namespace affectcouple
