#include "affectcouple/semantic.hpp"

#include <algorithm>

#include "affectcouple/error.hpp"
#include "text.hpp"

namespace affectcouple {

SemanticProfile SemanticProfile::from_terms(const std::vector<std::string>& terms) {
  SemanticProfile p;
  for (const auto& raw : terms) {
    if (text::trim(raw).empty()) continue;
    p.terms_.push_back(normalize_term(raw));
  }
  if (p.terms_.empty()) {
    throw Error(ErrorCode::validation, "empty semantic profile", "tags");
  }
  std::sort(p.terms_.begin(), p.terms_.end());
  p.terms_.erase(std::unique(p.terms_.begin(), p.terms_.end()), p.terms_.end());
  return p;
}

SemanticProfile SemanticProfile::from_terms(std::initializer_list<std::string_view> terms) {
  return from_terms(std::vector<std::string>(terms.begin(), terms.end()));
}

SemanticProfile SemanticProfile::parse(std::string_view tag_list) {
  return from_terms(text::split(tag_list, ';'));
}

std::string SemanticProfile::to_string() const { return text::join(terms_, ";"); }

void SemanticProfile::resolve(const Taxonomy& t) const {
  if (terms_.empty()) throw Error(ErrorCode::validation, "empty semantic profile", "tags");
  for (const auto& term : terms_) t.require(term);
}

void SemanticNeighborhood::validate() const {
  if (!(eps_sem > 0.0)) {
    throw Error(ErrorCode::validation, "eps_sem must be positive", "eps_sem");
  }
}

double PathMeasure::similarity(std::size_t a, std::size_t b, const Taxonomy& t) const {
  return 1.0 / (1.0 + static_cast<double>(t.path_length(a, b)));
}

const TermMeasure& default_term_measure() {
  static const PathMeasure measure;
  return measure;
}

double term_similarity(std::string_view a, std::string_view b, const Taxonomy& t) {
  return default_term_measure().similarity(t.require(a), t.require(b), t);
}

namespace {

std::vector<std::size_t> indices(const SemanticProfile& s, const Taxonomy& t) {
  if (s.empty()) throw Error(ErrorCode::validation, "empty semantic profile", "tags");
  std::vector<std::size_t> out;
  out.reserve(s.size());
  for (const auto& term : s.terms()) out.push_back(t.require(term));
  return out;
}

}  // namespace

double profile_similarity(const SemanticProfile& s1, const SemanticProfile& s2,
                          const Taxonomy& t, const TermMeasure& measure) {
  auto a = indices(s1, t);
  auto b = indices(s2, t);
  if (a == b) return 1.0;

  // sim[i][j] shared by both best-match passes.
  std::vector<double> sim(a.size() * b.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    for (std::size_t j = 0; j < b.size(); ++j) {
      sim[i * b.size() + j] = measure.similarity(a[i], b[j], t);
    }
  }
  double forward = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    double best = 0.0;
    for (std::size_t j = 0; j < b.size(); ++j) best = std::max(best, sim[i * b.size() + j]);
    forward += best;
  }
  double backward = 0.0;
  for (std::size_t j = 0; j < b.size(); ++j) {
    double best = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) best = std::max(best, sim[i * b.size() + j]);
    backward += best;
  }
  return (forward + backward) / static_cast<double>(a.size() + b.size());
}

double semantic_distance(const SemanticProfile& s1, const SemanticProfile& s2,
                         const Taxonomy& t, const TermMeasure& measure) {
  return 1.0 / profile_similarity(s1, s2, t, measure);
}

bool within_semantic_neighborhood(const SemanticProfile& s1, const SemanticProfile& s2,
                                  const Taxonomy& t, const SemanticNeighborhood& nb) {
  nb.validate();
  return semantic_distance(s1, s2, t) <= nb.eps_sem;
}

}  // namespace affectcouple
