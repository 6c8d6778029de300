#include "affectcouple/estimator.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <ostream>

#include "affectcouple/error.hpp"
#include "text.hpp"

namespace affectcouple {

void EstimationConfig::validate() const {
  if (!(eps_sem > 0.0)) throw Error(ErrorCode::validation, "eps_sem must be positive", "eps_sem");
  if (!(eps_emo > 0.0)) throw Error(ErrorCode::validation, "eps_emo must be positive", "eps_emo");
  if (k_fallback < 1) throw Error(ErrorCode::validation, "k_fallback must be >= 1", "k_fallback");
  if (min_support < 1) {
    throw Error(ErrorCode::validation, "min_support must be >= 1", "min_support");
  }
}

EstimationConfig EstimationConfig::from_defaults(const CouplingThresholds& th) {
  EstimationConfig cfg;
  cfg.eps_sem = th.eps_sem;
  cfg.eps_emo = th.eps_emo;
  return cfg;
}

std::vector<const StimulusDocument*> reference_documents(const Corpus& corpus,
                                                         const EstimationConfig& cfg) {
  std::vector<const StimulusDocument*> refs;
  for (const auto& d : corpus.documents()) {
    if (!d.annotated()) continue;
    if (!cfg.include_estimated && d.provenance == Provenance::estimated) continue;
    refs.push_back(&d);
  }
  return refs;
}

namespace {

struct Neighbor {
  const StimulusDocument* doc;
  EmotionPoint emotion;
  double similarity;
  double distance;
};

CandidateAnnotation summarize_cluster(std::vector<const Neighbor*> members) {
  std::sort(members.begin(), members.end(),
            [](const Neighbor* a, const Neighbor* b) { return a->doc->id < b->doc->id; });
  CandidateAnnotation c;
  // Offsets from the first member keep equal emotions exact.
  const auto& ref = members.front()->emotion;
  double weight = 0.0, dv = 0.0, da = 0.0, dist = 0.0;
  double lo_v = ref.val, hi_v = ref.val, lo_a = ref.ar, hi_a = ref.ar;
  for (const auto* m : members) {
    weight += m->similarity;
    dv += m->similarity * (m->emotion.val - ref.val);
    da += m->similarity * (m->emotion.ar - ref.ar);
    dist += m->distance;
    lo_v = std::min(lo_v, m->emotion.val);
    hi_v = std::max(hi_v, m->emotion.val);
    lo_a = std::min(lo_a, m->emotion.ar);
    hi_a = std::max(hi_a, m->emotion.ar);
    c.support.push_back(m->doc->id);
  }
  c.emotion.val = std::clamp(ref.val + dv / weight, lo_v, hi_v);
  c.emotion.ar = std::clamp(ref.ar + da / weight, lo_a, hi_a);
  double var_v = 0.0, var_a = 0.0;
  for (const auto* m : members) {
    var_v += m->similarity * (m->emotion.val - c.emotion.val) * (m->emotion.val - c.emotion.val);
    var_a += m->similarity * (m->emotion.ar - c.emotion.ar) * (m->emotion.ar - c.emotion.ar);
  }
  c.val_spread = std::sqrt(var_v / weight);
  c.ar_spread = std::sqrt(var_a / weight);
  c.mean_semantic_distance = dist / static_cast<double>(members.size());
  // Temporarily holds the raw weight; the caller turns it into a mass.
  c.likelihood = weight;
  return c;
}

}  // namespace

Estimate estimate(const SemanticProfile& target, const std::vector<const StimulusDocument*>& refs,
                  const Taxonomy& taxonomy, const EstimationConfig& cfg) {
  cfg.validate();
  target.resolve(taxonomy);
  if (refs.empty()) {
    throw Error(ErrorCode::no_reference, "no reference annotations");
  }

  std::vector<Neighbor> all;
  all.reserve(refs.size());
  for (const auto* doc : refs) {
    double sim = profile_similarity(target, doc->profile, taxonomy);
    all.push_back({doc, doc->emotion(), sim, 1.0 / sim});
  }

  Estimate result;
  std::vector<Neighbor> neighbors;
  std::copy_if(all.begin(), all.end(), std::back_inserter(neighbors),
               [&](const Neighbor& n) { return n.distance <= cfg.eps_sem; });
  if (neighbors.empty()) {
    result.fallback = true;
    std::sort(all.begin(), all.end(), [](const Neighbor& a, const Neighbor& b) {
      if (a.distance != b.distance) return a.distance < b.distance;
      return a.doc->id < b.doc->id;
    });
    all.resize(std::min(all.size(), cfg.k_fallback));
    neighbors = std::move(all);
  }
  result.neighbor_count = neighbors.size();

  // Single linkage: components of the graph linking d_Emo <= eps_emo.
  const auto n = neighbors.size();
  std::vector<std::size_t> parent(n);
  std::iota(parent.begin(), parent.end(), 0);
  auto root = [&](std::size_t x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  };
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      if (emotion_distance_unchecked(neighbors[i].emotion, neighbors[j].emotion) <= cfg.eps_emo) {
        parent[root(j)] = root(i);
      }
    }
  }
  std::map<std::size_t, std::vector<const Neighbor*>> clusters;
  for (std::size_t i = 0; i < n; ++i) clusters[root(i)].push_back(&neighbors[i]);

  std::vector<CandidateAnnotation> candidates;
  for (auto& [_, members] : clusters) {
    auto c = summarize_cluster(members);
    if (cfg.mass == LikelihoodMass::count) c.likelihood = static_cast<double>(c.support.size());
    candidates.push_back(std::move(c));
  }
  if (std::any_of(candidates.begin(), candidates.end(),
                  [&](const auto& c) { return c.support.size() >= cfg.min_support; })) {
    std::erase_if(candidates, [&](const auto& c) { return c.support.size() < cfg.min_support; });
  }

  // Masses compare exactly before normalization, so ordering is decided on
  // them and the shared denominator cannot introduce ties.
  std::sort(candidates.begin(), candidates.end(),
            [](const CandidateAnnotation& a, const CandidateAnnotation& b) {
              if (a.likelihood != b.likelihood) return a.likelihood > b.likelihood;
              if (a.mean_semantic_distance != b.mean_semantic_distance) {
                return a.mean_semantic_distance < b.mean_semantic_distance;
              }
              return a.support.front() < b.support.front();
            });
  double total = 0.0;
  for (const auto& c : candidates) total += c.likelihood;
  for (auto& c : candidates) c.likelihood /= total;
  result.candidates = std::move(candidates);
  return result;
}

Estimate estimate(const SemanticProfile& target, const Corpus& corpus, const Taxonomy& taxonomy,
                  const EstimationConfig& cfg) {
  return estimate(target, reference_documents(corpus, cfg), taxonomy, cfg);
}

// --- leave-one-out --------------------------------------------------------------

double LooReport::hit_rate(std::size_t k) const {
  if (rows.empty()) return 0.0;
  auto hits = std::count_if(rows.begin(), rows.end(), [k](const LooRow& r) { return r.hit_at(k); });
  return static_cast<double>(hits) / static_cast<double>(rows.size());
}

LooSummary summarize(const std::vector<const LooRow*>& rows) {
  LooSummary s;
  s.count = rows.size();
  if (rows.empty()) return s;
  std::vector<double> errors;
  std::size_t h1 = 0, h3 = 0;
  for (const auto* r : rows) {
    errors.push_back(r->top1_error);
    h1 += r->hit_at(1);
    h3 += r->hit_at(3);
  }
  s.mean_top1_error = std::accumulate(errors.begin(), errors.end(), 0.0) / errors.size();
  std::sort(errors.begin(), errors.end());
  auto mid = errors.size() / 2;
  s.median_top1_error =
      errors.size() % 2 ? errors[mid] : 0.5 * (errors[mid - 1] + errors[mid]);
  s.hit_at_1 = static_cast<double>(h1) / rows.size();
  s.hit_at_3 = static_cast<double>(h3) / rows.size();
  return s;
}

LooReport leave_one_out(const Corpus& corpus, const Taxonomy& taxonomy,
                        const EstimationConfig& cfg,
                        const std::map<std::string, std::string>* groups) {
  cfg.validate();
  auto refs = reference_documents(corpus, cfg);
  if (refs.size() < 2) {
    throw Error(ErrorCode::no_reference, "leave-one-out needs at least 2 annotated documents");
  }
  LooReport report;
  std::vector<const StimulusDocument*> rest;
  rest.reserve(refs.size() - 1);
  for (const auto* held_out : refs) {
    rest.clear();
    for (const auto* d : refs) {
      if (d != held_out) rest.push_back(d);
    }
    auto est = estimate(held_out->profile, rest, taxonomy, cfg);
    LooRow row;
    row.doc_id = held_out->id;
    row.truth = held_out->emotion();
    row.truth.dom.reset();
    row.predicted = est.candidates.front().emotion;
    row.top1_error = emotion_distance_unchecked(row.predicted, row.truth);
    for (std::size_t r = 0; r < est.candidates.size(); ++r) {
      if (emotion_distance_unchecked(est.candidates[r].emotion, row.truth) <= cfg.eps_emo) {
        row.first_hit_rank = r + 1;
        break;
      }
    }
    if (groups) {
      if (auto it = groups->find(row.doc_id); it != groups->end()) row.group = it->second;
    }
    report.rows.push_back(std::move(row));
  }

  std::vector<const LooRow*> all;
  std::map<std::string, std::vector<const LooRow*>> per_group;
  for (const auto& r : report.rows) {
    all.push_back(&r);
    if (groups && !r.group.empty()) per_group[r.group].push_back(&r);
  }
  report.overall = summarize(all);
  for (const auto& [g, rows] : per_group) report.by_group[g] = summarize(rows);
  return report;
}

void write_loo_csv(const LooReport& report, std::ostream& out) {
  auto num = [](double v) { return text::format_fixed(v, 6); };
  out << "doc_id,true_val,true_ar,pred_val,pred_ar,top1_error,hit_at_1,hit_at_3\n";
  for (const auto& r : report.rows) {
    out << text::csv_field(r.doc_id) << ',' << num(r.truth.val) << ',' << num(r.truth.ar) << ','
        << num(r.predicted.val) << ',' << num(r.predicted.ar) << ',' << num(r.top1_error) << ','
        << (r.hit_at(1) ? 1 : 0) << ',' << (r.hit_at(3) ? 1 : 0) << '\n';
  }
}

void write_loo_summary(const LooReport& report, std::ostream& out) {
  auto line = [&out](const std::string& label, const LooSummary& s) {
    out << label << ": n=" << s.count << " mean_top1_error=" << text::format_fixed(s.mean_top1_error, 6)
        << " median_top1_error=" << text::format_fixed(s.median_top1_error, 6)
        << " hit@1=" << text::format_fixed(s.hit_at_1, 4)
        << " hit@3=" << text::format_fixed(s.hit_at_3, 4) << '\n';
  };
  line("overall", report.overall);
  for (const auto& [g, s] : report.by_group) line("group " + g, s);
}

}  // namespace affectcouple
