#pragma once

#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "affectcouple/corpus.hpp"

namespace affectcouple {

/// How a hypothesis cluster's mass is counted when forming likelihoods.
enum class LikelihoodMass {
  count,       // one vote per supporting document
  similarity,  // sum of profile similarities to the target
};

struct EstimationConfig {
  double eps_sem = 2.0;
  double eps_emo = 1.5;
  std::size_t k_fallback = 5;
  std::size_t min_support = 1;
  LikelihoodMass mass = LikelihoodMass::count;
  /// Use documents whose rating came from an earlier estimate as references.
  bool include_estimated = true;

  void validate() const;

  /// Default config with the corpus-level thresholds.
  static EstimationConfig from_defaults(const CouplingThresholds& th);
};

struct CandidateAnnotation {
  EmotionPoint emotion;
  double likelihood = 0.0;
  std::vector<std::string> support;  // sorted ids
  double mean_semantic_distance = 0.0;
  /// Similarity-weighted SD of the support about the centroid, per axis.
  double val_spread = 0.0;
  double ar_spread = 0.0;
};

struct Estimate {
  std::vector<CandidateAnnotation> candidates;
  bool fallback = false;  // no reference within eps_sem; k nearest used
  std::size_t neighbor_count = 0;
};

/// Ranked emotion hypotheses for a descriptor set:
///  1. d_Sem from the target to every reference document;
///  2. neighbors within eps_sem, else the k_fallback nearest;
///  3. single-linkage over neighbor emotions, link when d_Emo <= eps_emo;
///  4. per cluster a similarity-weighted centroid and a mass share;
///  5. sort by likelihood desc, mean d_Sem asc, smallest support id.
/// Throws Error{no_reference} without annotated references and
/// Error{lookup} for unresolved target terms.
Estimate estimate(const SemanticProfile& target, const std::vector<const StimulusDocument*>& refs,
                  const Taxonomy& taxonomy, const EstimationConfig& cfg);

/// References are the corpus' annotated documents (see include_estimated).
Estimate estimate(const SemanticProfile& target, const Corpus& corpus, const Taxonomy& taxonomy,
                  const EstimationConfig& cfg);

std::vector<const StimulusDocument*> reference_documents(const Corpus& corpus,
                                                         const EstimationConfig& cfg);

// --- leave-one-out --------------------------------------------------------------

struct LooRow {
  std::string doc_id;
  EmotionPoint truth;
  EmotionPoint predicted;
  double top1_error = 0.0;
  /// 1-based rank of the first candidate within eps_emo of truth; 0 if none.
  std::size_t first_hit_rank = 0;
  std::string group;

  bool hit_at(std::size_t k) const { return first_hit_rank != 0 && first_hit_rank <= k; }
};

struct LooSummary {
  std::size_t count = 0;
  double mean_top1_error = 0.0;
  double median_top1_error = 0.0;
  double hit_at_1 = 0.0;
  double hit_at_3 = 0.0;
};

struct LooReport {
  std::vector<LooRow> rows;
  LooSummary overall;
  std::map<std::string, LooSummary> by_group;

  /// Fraction of rows with a hit in the top k.
  double hit_rate(std::size_t k) const;
};

LooSummary summarize(const std::vector<const LooRow*>& rows);

/// Hides each annotated document in turn and estimates it from the rest.
/// `groups` (doc id -> group) enables the per-group breakdown.
LooReport leave_one_out(const Corpus& corpus, const Taxonomy& taxonomy,
                        const EstimationConfig& cfg,
                        const std::map<std::string, std::string>* groups = nullptr);

/// `doc_id,true_val,true_ar,pred_val,pred_ar,top1_error,hit_at_1,hit_at_3`
void write_loo_csv(const LooReport& report, std::ostream& out);
void write_loo_summary(const LooReport& report, std::ostream& out);

}  // namespace affectcouple
