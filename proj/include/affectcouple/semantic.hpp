#pragma once

#include <initializer_list>
#include <string>
#include <string_view>
#include <vector>

#include "affectcouple/taxonomy.hpp"

namespace affectcouple {

/// Non-empty, duplicate-free, order-free set of normalized descriptor terms.
class SemanticProfile {
 public:
  SemanticProfile() = default;

  /// Normalized terms, sorted without duplicates. Throws Error{validation}
  /// "empty semantic profile" when no term remains.
  static SemanticProfile from_terms(const std::vector<std::string>& terms);
  static SemanticProfile from_terms(std::initializer_list<std::string_view> terms);

  /// Parses the `a;b;c` tag-list form used in manifests and on the CLI.
  static SemanticProfile parse(std::string_view tag_list);

  const std::vector<std::string>& terms() const noexcept { return terms_; }
  std::size_t size() const noexcept { return terms_.size(); }
  bool empty() const noexcept { return terms_.empty(); }

  /// `a;b;c` in sorted order.
  std::string to_string() const;

  /// Throws Error{lookup} naming the first term missing from `t`.
  void resolve(const Taxonomy& t) const;

  friend bool operator==(const SemanticProfile&, const SemanticProfile&) = default;

 private:
  std::vector<std::string> terms_;
};

struct SemanticNeighborhood {
  double eps_sem = 2.0;

  void validate() const;
};

/// Term-level similarity over a taxonomy. Implementations must be symmetric,
/// return values in (0, 1] and give 1 for identical nodes.
class TermMeasure {
 public:
  virtual ~TermMeasure() = default;
  virtual double similarity(std::size_t a, std::size_t b, const Taxonomy& t) const = 0;
};

/// 1 / (1 + L), L = shortest undirected path length over is-a edges.
class PathMeasure final : public TermMeasure {
 public:
  double similarity(std::size_t a, std::size_t b, const Taxonomy& t) const override;
};

const TermMeasure& default_term_measure();

double term_similarity(std::string_view a, std::string_view b, const Taxonomy& t);

/// Symmetric best-match average of term similarities.
double profile_similarity(const SemanticProfile& s1, const SemanticProfile& s2,
                          const Taxonomy& t,
                          const TermMeasure& measure = default_term_measure());

/// 1 / profile_similarity. Never below 1, and exactly 1 for equal profiles.
double semantic_distance(const SemanticProfile& s1, const SemanticProfile& s2,
                         const Taxonomy& t,
                         const TermMeasure& measure = default_term_measure());

bool within_semantic_neighborhood(const SemanticProfile& s1, const SemanticProfile& s2,
                                  const Taxonomy& t, const SemanticNeighborhood& nb);

}  // namespace affectcouple
