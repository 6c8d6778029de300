#pragma once

#include <string>
#include <vector>

#include "affectcouple/document.hpp"
#include "affectcouple/taxonomy.hpp"

namespace affectcouple {

/// Outcome of the coupling predicate for one document pair.
struct CouplingVerdict {
  std::string doc_a;
  std::string doc_b;
  double d_sem = 0.0;
  double d_emo = 0.0;
  bool coupled = false;
  bool identical_semantics = false;
  CouplingThresholds thresholds;
};

/// Two annotated documents are coupled when their descriptor sets differ,
/// d_Sem <= eps_sem and d_Emo <= eps_emo. Throws Error{validation}
/// "unannotated document" when either side has no rating.
CouplingVerdict couple(const StimulusDocument& a, const StimulusDocument& b, const Taxonomy& t,
                       const CouplingThresholds& th);

/// Row-major n x n matrices over `ids` (input order).
struct CouplingMatrix {
  std::vector<std::string> ids;
  std::vector<char> coupled;
  std::vector<double> d_sem;
  std::vector<double> d_emo;

  std::size_t size() const noexcept { return ids.size(); }
  bool at(std::size_t i, std::size_t j) const { return coupled[i * ids.size() + j] != 0; }
  double sem(std::size_t i, std::size_t j) const { return d_sem[i * ids.size() + j]; }
  double emo(std::size_t i, std::size_t j) const { return d_emo[i * ids.size() + j]; }
  std::size_t coupled_pairs() const;
};

CouplingMatrix coupling_matrix(const std::vector<StimulusDocument>& docs, const Taxonomy& t,
                               const CouplingThresholds& th);

/// Connected components of the coupling graph. Members keep input order;
/// clusters are ordered by their first member.
std::vector<std::vector<std::string>> coupled_clusters(const std::vector<StimulusDocument>& docs,
                                                       const Taxonomy& t,
                                                       const CouplingThresholds& th);

std::vector<std::vector<std::string>> clusters_from_matrix(const CouplingMatrix& m);

}  // namespace affectcouple
