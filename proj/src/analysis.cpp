#include "affectcouple/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <set>

#include "affectcouple/error.hpp"
#include "text.hpp"

namespace affectcouple {

std::vector<GroupQuery> parse_group_queries(std::string_view spec) {
  std::vector<GroupQuery> out;
  std::string flat(spec);
  std::replace(flat.begin(), flat.end(), '\n', '|');
  for (const auto& part : text::split(flat, '|')) {
    auto body = text::trim(part);
    if (body.empty() || body.front() == '#') continue;
    auto eq = body.find('=');
    if (eq == std::string_view::npos) {
      throw Error(ErrorCode::parse, "group spec '" + std::string(body) + "': expected name=tags",
                  "spec");
    }
    GroupQuery q;
    q.name = std::string(text::trim(body.substr(0, eq)));
    if (q.name.empty()) throw Error(ErrorCode::parse, "group spec: empty group name", "spec");
    q.tags = SemanticProfile::parse(body.substr(eq + 1));
    out.push_back(std::move(q));
  }
  if (out.empty()) throw Error(ErrorCode::validation, "no group queries", "spec");
  return out;
}

std::vector<std::string> StimulusGroup::member_ids() const {
  std::vector<std::string> ids;
  for (const auto& m : members) ids.push_back(m.id);
  return ids;
}

std::vector<StimulusGroup> build_groups(const Corpus& corpus, const Taxonomy& taxonomy,
                                        const std::vector<GroupQuery>& queries,
                                        double match_threshold) {
  if (queries.empty()) throw Error(ErrorCode::validation, "no group queries", "spec");
  std::vector<StimulusGroup> groups;
  for (const auto& q : queries) {
    q.tags.resolve(taxonomy);
    StimulusGroup g;
    g.name = q.name;
    g.query_tags = q.tags;
    for (const auto& doc : corpus.documents()) {
      if (!doc.annotated()) continue;
      bool match = false;
      for (const auto& term : doc.profile.terms()) {
        for (const auto& tag : q.tags.terms()) {
          if (term == tag || term_similarity(term, tag, taxonomy) >= match_threshold) {
            match = true;
            break;
          }
        }
        if (match) break;
      }
      if (match) g.members.push_back({doc.id, doc.emotion()});
    }
    if (!g.members.empty()) {
      const double n = static_cast<double>(g.members.size());
      // Offsets from the first member keep equal emotions exact.
      const auto& ref = g.members.front().emotion;
      double sv = 0.0, sa = 0.0;
      for (const auto& m : g.members) {
        sv += m.emotion.val - ref.val;
        sa += m.emotion.ar - ref.ar;
      }
      EmotionPoint c{ref.val + sv / n, ref.ar + sa / n, std::nullopt};
      double vv = 0.0, va = 0.0;
      for (const auto& m : g.members) {
        vv += (m.emotion.val - c.val) * (m.emotion.val - c.val);
        va += (m.emotion.ar - c.ar) * (m.emotion.ar - c.ar);
      }
      g.centroid = c;
      g.sd_val = std::sqrt(vv / n);
      g.sd_ar = std::sqrt(va / n);
    }
    groups.push_back(std::move(g));
  }
  return groups;
}

std::vector<std::string> point_coverage(const EmotionPoint& point,
                                        const std::vector<StimulusGroup>& groups, double eps_emo) {
  point.validate();
  if (!(eps_emo >= 0.0)) throw Error(ErrorCode::validation, "eps_emo must be >= 0", "eps_emo");
  std::vector<std::string> names;
  for (const auto& g : groups) {
    bool covered = std::any_of(g.members.begin(), g.members.end(), [&](const GroupMember& m) {
      return emotion_distance_unchecked(point, m.emotion) <= eps_emo;
    });
    if (covered) names.push_back(g.name);
  }
  return names;
}

std::vector<Outlier> group_outliers(const StimulusGroup& group, double c) {
  if (group.members.size() < 3) {
    throw Error(ErrorCode::validation,
                "insufficient members in group '" + group.name + "' (need at least 3)", "group");
  }
  if (!(c > 0.0)) throw Error(ErrorCode::validation, "c must be positive", "c");
  const double sigma = std::hypot(group.sd_val, group.sd_ar);
  std::vector<Outlier> out;
  for (const auto& m : group.members) {
    double d = emotion_distance_unchecked(m.emotion, *group.centroid);
    if (d > c * sigma) out.push_back({m.id, d, sigma > 0.0 ? d / sigma : 0.0});
  }
  std::sort(out.begin(), out.end(), [](const Outlier& a, const Outlier& b) {
    if (a.distance != b.distance) return a.distance > b.distance;
    return a.id < b.id;
  });
  return out;
}

void write_group_report(const std::vector<StimulusGroup>& groups, double outlier_c,
                        std::ostream& out) {
  auto num = [](double v) { return text::format_fixed(v, 6); };
  out << "group,name_count,centroid_val,centroid_ar,sd_val,sd_ar,outlier_count\n";
  for (const auto& g : groups) {
    out << text::csv_field(g.name) << ',' << g.members.size() << ',';
    if (g.centroid) {
      auto outliers = g.members.size() >= 3 ? group_outliers(g, outlier_c).size() : 0;
      out << num(g.centroid->val) << ',' << num(g.centroid->ar) << ',' << num(g.sd_val) << ','
          << num(g.sd_ar) << ',' << outliers;
    } else {
      out << ",,,,0";
    }
    out << '\n';
  }
}

void write_scatter(const Corpus& corpus, const std::vector<StimulusGroup>& groups,
                   std::ostream& out) {
  auto num = [](double v) { return text::format_fixed(v, 6); };
  out << "doc_id,group,val,ar\n";
  std::set<std::string> grouped;
  for (const auto& g : groups) {
    for (const auto& m : g.members) {
      grouped.insert(m.id);
      out << text::csv_field(m.id) << ',' << text::csv_field(g.name) << ',' << num(m.emotion.val)
          << ',' << num(m.emotion.ar) << '\n';
    }
  }
  for (const auto& d : corpus.documents()) {
    if (!d.annotated() || grouped.count(d.id)) continue;
    auto e = d.emotion();
    out << text::csv_field(d.id) << ",," << num(e.val) << ',' << num(e.ar) << '\n';
  }
}

}  // namespace affectcouple
