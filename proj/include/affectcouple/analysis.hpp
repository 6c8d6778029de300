#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "affectcouple/corpus.hpp"

namespace affectcouple {

struct GroupQuery {
  std::string name;
  SemanticProfile tags;
};

/// `name=tag1;tag2|name2=tag3`. Also accepts one `name=tags` per line
/// (blank lines and `#` comments skipped).
std::vector<GroupQuery> parse_group_queries(std::string_view spec);

struct GroupMember {
  std::string id;
  EmotionPoint emotion;
};

/// Annotated documents sharing any descriptor with a tag-cloud query.
struct StimulusGroup {
  std::string name;
  SemanticProfile query_tags;
  std::vector<GroupMember> members;
  std::optional<EmotionPoint> centroid;  // absent for empty groups
  double sd_val = 0.0;                   // population SD per axis
  double sd_ar = 0.0;

  bool empty() const noexcept { return members.empty(); }
  std::vector<std::string> member_ids() const;
};

/// A document joins a group when any of its descriptors has term similarity
/// >= match_threshold with any query tag (1.0 = exact term). Groups may
/// overlap; empty groups are kept.
std::vector<StimulusGroup> build_groups(const Corpus& corpus, const Taxonomy& taxonomy,
                                        const std::vector<GroupQuery>& queries,
                                        double match_threshold = 1.0);

/// Names of groups with at least one member within eps_emo (inclusive).
std::vector<std::string> point_coverage(const EmotionPoint& point,
                                        const std::vector<StimulusGroup>& groups, double eps_emo);

struct Outlier {
  std::string id;
  double distance = 0.0;  // d_Emo to the group centroid
  double score = 0.0;     // distance / sigma_group
};

/// Members farther than c * sqrt(sd_val^2 + sd_ar^2) from the centroid,
/// farthest first. Needs at least 3 members.
std::vector<Outlier> group_outliers(const StimulusGroup& group, double c);

/// `group,name_count,centroid_val,centroid_ar,sd_val,sd_ar,outlier_count`;
/// name_count is the member count. Groups under 3 members report 0 outliers.
void write_group_report(const std::vector<StimulusGroup>& groups, double outlier_c,
                        std::ostream& out);

/// `doc_id,group,val,ar`, one row per group membership. Annotated documents
/// in no group appear once with an empty group.
void write_scatter(const Corpus& corpus, const std::vector<StimulusGroup>& groups,
                   std::ostream& out);

}  // namespace affectcouple
