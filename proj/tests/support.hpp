#pragma once

// Fixtures and independent oracles shared by the unit and acceptance tests.
// Nothing here calls into the library's distance or estimator code paths.

#include <algorithm>
#include <array>
#include <optional>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <map>
#include <queue>
#include <random>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "affectcouple/corpus.hpp"
#include "affectcouple/error.hpp"
#include "affectcouple/estimator.hpp"
#include "affectcouple/session.hpp"
#include "affectcouple/synthetic.hpp"
#include "affectcouple/taxonomy.hpp"

namespace testing_support {

using namespace affectcouple;

/// dog->animal, cat->animal, animal->entity.
inline Taxonomy animal_taxonomy() {
  return Taxonomy::from_edges({{"dog", "animal"}, {"cat", "animal"}, {"animal", "entity"}});
}

/// snake, viper under reptile; beach under place.
inline Taxonomy reptile_taxonomy() {
  return Taxonomy::from_edges({{"snake", "reptile"},
                               {"viper", "reptile"},
                               {"reptile", "animal"},
                               {"animal", "entity"},
                               {"beach", "place"},
                               {"place", "entity"}});
}

inline StimulusDocument make_doc(std::string id, std::initializer_list<std::string_view> tags,
                                 std::optional<std::pair<double, double>> emotion) {
  StimulusDocument d;
  d.id = std::move(id);
  d.uri = "stimuli/" + d.id + ".jpg";
  d.profile = SemanticProfile::from_terms(tags);
  if (emotion) {
    AffectiveRating r;
    r.val_mean = emotion->first;
    r.ar_mean = emotion->second;
    r.val_sd = 1.0;
    r.ar_sd = 1.0;
    d.rating = r;
  }
  return d;
}

inline StimulusDocument make_doc(std::string id, const std::vector<std::string>& tags,
                                 double val, double ar) {
  StimulusDocument d;
  d.id = std::move(id);
  d.uri = "stimuli/" + d.id;
  d.profile = SemanticProfile::from_terms(tags);
  AffectiveRating r;
  r.val_mean = val;
  r.ar_mean = ar;
  d.rating = r;
  return d;
}

// --- random taxonomies -----------------------------------------------------

struct RandomTaxonomy {
  std::vector<std::string> names;                   // names[0] is the root
  std::vector<std::pair<std::size_t, std::size_t>> edges;  // child, parent
  Taxonomy taxonomy;
};

/// Random rooted DAG: node i > 0 picks 1-2 parents among nodes < i.
inline RandomTaxonomy random_taxonomy(std::mt19937_64& rng, std::size_t max_nodes = 50) {
  std::uniform_int_distribution<std::size_t> size_dist(2, max_nodes);
  std::size_t n = size_dist(rng);
  RandomTaxonomy out;
  out.names.push_back("entity");
  // Zero-padded so lexicographic order equals index order.
  for (std::size_t i = 1; i < n; ++i) {
    out.names.push_back((i < 10 ? "t0" : "t") + std::to_string(i));
  }
  std::vector<Taxonomy::Edge> edges;
  for (std::size_t i = 1; i < n; ++i) {
    std::uniform_int_distribution<std::size_t> parent(0, i - 1);
    std::set<std::size_t> ps{parent(rng)};
    if (i > 1 && std::bernoulli_distribution(0.3)(rng)) ps.insert(parent(rng));
    for (auto p : ps) {
      out.edges.emplace_back(i, p);
      edges.emplace_back(out.names[i], out.names[p]);
    }
  }
  out.taxonomy = Taxonomy::from_edges(edges);
  return out;
}

/// Exhaustive BFS over an adjacency matrix built straight from the edge
/// list; all-pairs shortest undirected path lengths.
inline std::vector<std::vector<int>> bfs_all_pairs(std::size_t n,
                                                   const std::vector<std::pair<std::size_t, std::size_t>>& edges) {
  std::vector<std::vector<char>> adj(n, std::vector<char>(n, 0));
  for (auto [c, p] : edges) adj[c][p] = adj[p][c] = 1;
  std::vector<std::vector<int>> dist(n, std::vector<int>(n, -1));
  for (std::size_t s = 0; s < n; ++s) {
    std::queue<std::size_t> q;
    dist[s][s] = 0;
    q.push(s);
    while (!q.empty()) {
      auto u = q.front();
      q.pop();
      for (std::size_t v = 0; v < n; ++v) {
        if (adj[u][v] && dist[s][v] < 0) {
          dist[s][v] = dist[s][u] + 1;
          q.push(v);
        }
      }
    }
  }
  return dist;
}

// --- brute-force estimator -------------------------------------------------

struct OracleDoc {
  std::string id;
  std::vector<std::size_t> tags;  // node indices
  double val;
  double ar;
};

struct OracleCandidate {
  double val;
  double ar;
  double likelihood;
  std::vector<std::string> support;
};

/// Best-match average from an all-pairs path-length table.
inline double oracle_profile_similarity(const std::vector<std::size_t>& a,
                                        const std::vector<std::size_t>& b,
                                        const std::vector<std::vector<int>>& dist) {
  auto sim = [&](std::size_t x, std::size_t y) { return 1.0 / (1.0 + dist[x][y]); };
  double total = 0.0;
  for (auto x : a) {
    double best = 0.0;
    for (auto y : b) best = std::max(best, sim(x, y));
    total += best;
  }
  for (auto y : b) {
    double best = 0.0;
    for (auto x : a) best = std::max(best, sim(y, x));
    total += best;
  }
  return total / static_cast<double>(a.size() + b.size());
}

/// The five-step pipeline written out directly: neighbor filter (or k
/// nearest), naive agglomerative single linkage, weighted centroids and
/// count-mass likelihoods, then the documented ordering.
inline std::vector<OracleCandidate> oracle_estimate(const std::vector<std::size_t>& target,
                                                    const std::vector<OracleDoc>& docs,
                                                    const std::vector<std::vector<int>>& dist,
                                                    double eps_sem, double eps_emo,
                                                    std::size_t k_fallback,
                                                    bool similarity_mass = false) {
  struct N {
    const OracleDoc* doc;
    double sim;
    double d;
  };
  std::vector<N> all;
  for (const auto& d : docs) {
    auto s = oracle_profile_similarity(target, d.tags, dist);
    all.push_back({&d, s, 1.0 / s});
  }
  std::vector<N> nb;
  for (const auto& x : all) {
    if (x.d <= eps_sem) nb.push_back(x);
  }
  if (nb.empty()) {
    auto sorted = all;
    std::sort(sorted.begin(), sorted.end(), [](const N& a, const N& b) {
      return a.d != b.d ? a.d < b.d : a.doc->id < b.doc->id;
    });
    sorted.resize(std::min(sorted.size(), k_fallback));
    nb = sorted;
  }
  std::vector<std::vector<std::size_t>> clusters;
  for (std::size_t i = 0; i < nb.size(); ++i) clusters.push_back({i});
  bool merged = true;
  while (merged) {
    merged = false;
    for (std::size_t a = 0; a < clusters.size() && !merged; ++a) {
      for (std::size_t b = a + 1; b < clusters.size() && !merged; ++b) {
        double linkage = std::numeric_limits<double>::infinity();
        for (auto i : clusters[a]) {
          for (auto j : clusters[b]) {
            double dv = nb[i].doc->val - nb[j].doc->val;
            double da = nb[i].doc->ar - nb[j].doc->ar;
            linkage = std::min(linkage, std::sqrt(dv * dv + da * da));
          }
        }
        if (linkage <= eps_emo) {
          clusters[a].insert(clusters[a].end(), clusters[b].begin(), clusters[b].end());
          clusters.erase(clusters.begin() + static_cast<std::ptrdiff_t>(b));
          merged = true;
        }
      }
    }
  }
  struct Row {
    OracleCandidate c;
    double mass;
    double mean_d;
  };
  std::vector<Row> rows;
  double total = 0.0;
  for (auto& members : clusters) {
    std::sort(members.begin(), members.end(),
              [&](std::size_t x, std::size_t y) { return nb[x].doc->id < nb[y].doc->id; });
    double w = 0.0, wv = 0.0, wa = 0.0, dsum = 0.0;
    Row r{};
    for (auto i : members) {
      w += nb[i].sim;
      wv += nb[i].sim * nb[i].doc->val;
      wa += nb[i].sim * nb[i].doc->ar;
      dsum += nb[i].d;
      r.c.support.push_back(nb[i].doc->id);
    }
    r.c.val = wv / w;
    r.c.ar = wa / w;
    r.mass = similarity_mass ? w : static_cast<double>(members.size());
    r.mean_d = dsum / static_cast<double>(members.size());
    total += r.mass;
    rows.push_back(r);
  }
  std::sort(rows.begin(), rows.end(), [](const Row& a, const Row& b) {
    if (a.mass != b.mass) return a.mass > b.mass;
    if (a.mean_d != b.mean_d) return a.mean_d < b.mean_d;
    return a.c.support.front() < b.c.support.front();
  });
  std::vector<OracleCandidate> out;
  for (auto& r : rows) {
    r.c.likelihood = r.mass / total;
    out.push_back(r.c);
  }
  return out;
}


// --- three-document coupling scenarios --------------------------------------

struct TripleScenario {
  RandomTaxonomy tax;
  std::vector<StimulusDocument> docs;  // doc1, doc2, doc3
  CouplingThresholds thresholds;
};

/// Draws a triple whose semantic and emotion distances are both ordered
/// d(1,2) < d(1,3) <= d(2,3), then thresholds admitting (1,2) on both axes
/// while excluding the (1,3)/(2,3) pairs on at least one axis. Distances
/// come from the BFS oracle, not the library.
inline TripleScenario random_triple(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::uniform_real_distribution<double> coord(1.0, 9.0);
  while (true) {
    TripleScenario sc{random_taxonomy(rng, 30), {}, {}};
    const auto& names = sc.tax.names;
    auto dist = bfs_all_pairs(names.size(), sc.tax.edges);
    std::uniform_int_distribution<std::size_t> pick(0, names.size() - 1);
    std::uniform_int_distribution<int> how_many(1, 3);
    std::vector<std::vector<std::size_t>> prof(3);
    for (auto& p : prof) {
      std::set<std::size_t> s;
      for (int i = how_many(rng); i > 0; --i) s.insert(pick(rng));
      p.assign(s.begin(), s.end());
    }
    std::vector<std::pair<double, double>> emo(3);
    for (auto& e : emo) e = {coord(rng), coord(rng)};

    auto dsem = [&](std::size_t a, std::size_t b) {
      return 1.0 / oracle_profile_similarity(prof[a], prof[b], dist);
    };
    auto demo = [&](std::size_t a, std::size_t b) {
      return std::hypot(emo[a].first - emo[b].first, emo[a].second - emo[b].second);
    };
    // Labelings (x, y, z) with d(x,y) < d(x,z) <= d(y,z). The strict step
    // needs a real gap: profiles at mathematically equal distance can round
    // apart by an ulp and would otherwise pass as ordered.
    auto order = [](auto&& d) -> std::optional<std::array<std::size_t, 3>> {
      std::array<std::size_t, 3> idx{0, 1, 2};
      do {
        auto [x, y, z] = idx;
        if (d(x, y) + 1e-9 < d(x, z) && d(x, z) <= d(y, z)) return idx;
      } while (std::next_permutation(idx.begin(), idx.end()));
      return std::nullopt;
    };
    auto sem_order = order(dsem);
    auto emo_order = order(demo);
    if (!sem_order || !emo_order) continue;
    auto [s1, s2, s3] = *sem_order;
    auto [e1, e2, e3] = *emo_order;
    if (prof[s1] == prof[s2]) continue;

    double sem12 = dsem(s1, s2), sem13 = dsem(s1, s3);
    double emo12 = demo(e1, e2), emo13 = demo(e1, e3);
    auto between = [&](double lo, double hi) { return lo + unit(rng) * (hi - lo); };
    if (unit(rng) < 0.5) {
      sc.thresholds.eps_sem = between(sem12, sem13 - 1e-9);
      sc.thresholds.eps_emo = emo12 + unit(rng) * 3.0;
    } else {
      sc.thresholds.eps_emo = between(emo12, emo13 - 1e-9);
      sc.thresholds.eps_sem = sem12 + unit(rng) * 3.0;
    }

    std::array<std::size_t, 3> sem_roles{s1, s2, s3};
    std::array<std::size_t, 3> emo_roles{e1, e2, e3};
    for (std::size_t k = 0; k < 3; ++k) {
      std::vector<std::string> tags;
      for (auto n : prof[sem_roles[k]]) tags.push_back(names[n]);
      const auto& e = emo[emo_roles[k]];
      sc.docs.push_back(make_doc("doc" + std::to_string(k + 1), tags, e.first, e.second));
    }
    return sc;
  }
}

// --- three-group scenario ----------------------------------------------------

/// Three disjoint subtrees, each hung below its own realm node so that any
/// two groups are at least 4 edges apart while a group spans at most 2.
inline Taxonomy group_taxonomy() {
  return Taxonomy::from_edges({{"realm a", "entity"},  {"realm b", "entity"},
                               {"realm c", "entity"},  {"food", "realm a"},
                               {"cake", "food"},       {"beer", "food"},
                               {"soup", "food"},       {"fruit", "food"},
                               {"nature", "realm b"},  {"cave", "nature"},
                               {"sunset", "nature"},   {"river", "nature"},
                               {"forest", "nature"},   {"sports", "realm c"},
                               {"rafting", "sports"},  {"skydiving", "sports"},
                               {"surfing", "sports"},  {"climbing", "sports"}});
}

/// 35 food, 24 nature, 13 sports; centroids pairwise more than 3 apart.
inline SyntheticSpec group_spec(double noise_sd) {
  SyntheticSpec spec;
  spec.groups = {{"food", "food", 6.0, 5.0, noise_sd, 35, 1.0},
                 {"nature", "nature", 7.5, 2.0, noise_sd, 24, 1.0},
                 {"sports", "sports", 6.8, 8.1, noise_sd, 13, 1.0}};
  return spec;
}

// --- random estimator instances ----------------------------------------------

struct EstimatorCase {
  RandomTaxonomy tax;
  std::vector<std::vector<int>> dist;
  std::vector<OracleDoc> oracle_docs;
  std::vector<StimulusDocument> docs;
  std::vector<std::size_t> target;
  SemanticProfile target_profile;
  double eps_sem;
  double eps_emo;
  std::size_t k_fallback;
};

/// Up to 20 documents on a random taxonomy. Emotions scatter around a few
/// random centers so that clusters of several members are common.
inline EstimatorCase random_estimator_case(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  EstimatorCase ec{random_taxonomy(rng, 25), {}, {}, {}, {}, {}, 0.0, 0.0, 0};
  const auto& names = ec.tax.names;
  ec.dist = bfs_all_pairs(names.size(), ec.tax.edges);
  std::uniform_int_distribution<std::size_t> pick(0, names.size() - 1);
  std::uniform_int_distribution<int> tag_count(1, 3);
  auto draw_tags = [&] {
    std::set<std::size_t> s;
    for (int i = tag_count(rng); i > 0; --i) s.insert(pick(rng));
    return std::vector<std::size_t>(s.begin(), s.end());
  };
  auto names_of = [&](const std::vector<std::size_t>& idx) {
    std::vector<std::string> out;
    for (auto i : idx) out.push_back(names[i]);
    return out;
  };
  std::uniform_int_distribution<int> center_count(1, 4);
  std::vector<std::pair<double, double>> centers(static_cast<std::size_t>(center_count(rng)));
  for (auto& c : centers) c = {2.0 + 6.0 * unit(rng), 2.0 + 6.0 * unit(rng)};
  std::uniform_int_distribution<std::size_t> which(0, centers.size() - 1);
  std::normal_distribution<double> jitter(0.0, 0.6);
  std::uniform_int_distribution<int> doc_count(1, 20);
  int n = doc_count(rng);
  for (int i = 0; i < n; ++i) {
    const auto& c = centers[which(rng)];
    double v = std::clamp(c.first + jitter(rng), 1.0, 9.0);
    double a = std::clamp(c.second + jitter(rng), 1.0, 9.0);
    auto tags = draw_tags();
    std::string id = (i < 10 ? "d0" : "d") + std::to_string(i);
    ec.oracle_docs.push_back({id, tags, v, a});
    ec.docs.push_back(make_doc(id, names_of(tags), v, a));
  }
  ec.target = draw_tags();
  ec.target_profile = SemanticProfile::from_terms(names_of(ec.target));
  // Below 1 every case falls back to the k nearest.
  ec.eps_sem = unit(rng) < 0.2 ? 0.5 : 1.0 + 4.0 * unit(rng);
  ec.eps_emo = 0.2 + 2.5 * unit(rng);
  ec.k_fallback = std::uniform_int_distribution<std::size_t>(1, 6)(rng);
  return ec;
}

// --- session model check -----------------------------------------------------

/// Target {snake} over six references forming clusters of sizes 3/2/1
/// (likelihoods 1/2, 1/3, 1/6) at eps_sem 10, eps_emo 1.
inline AnnotationSession three_candidate_session() {
  auto t = reptile_taxonomy();
  Corpus c("reptiles");
  c.add(make_doc("a1", {"snake"}, std::pair{2.0, 6.0}));
  c.add(make_doc("a2", {"snake"}, std::pair{2.2, 6.1}));
  c.add(make_doc("a3", {"viper"}, std::pair{2.4, 6.4}));
  c.add(make_doc("b1", {"beach"}, std::pair{7.5, 3.0}));
  c.add(make_doc("b2", {"snake"}, std::pair{7.6, 3.1}));
  c.add(make_doc("c1", {"reptile"}, std::pair{5.0, 8.5}));
  EstimationConfig cfg;
  cfg.eps_sem = 10.0;
  cfg.eps_emo = 1.0;
  return open_session(make_doc("new", {"snake"}, std::nullopt), c, t, cfg, "s1");
}

struct SessionCheckResult {
  std::size_t sequences = 0;
  std::size_t events = 0;
  std::vector<std::string> failures;
};

/// Runs every event sequence up to `max_len` over an alphabet that includes
/// out-of-range indices and an out-of-range adjustment, comparing each step
/// against a reference model that tracks which original candidates remain.
inline SessionCheckResult check_session_machine(const AnnotationSession& start, std::size_t max_len,
                                                 double ratio_tol = 1e-12) {
  using A = FeedbackEvent::Action;
  const std::size_t n = start.candidates.size();
  std::vector<FeedbackEvent> alphabet;
  for (std::size_t i = 0; i <= n; ++i) alphabet.push_back(FeedbackEvent::accept(i));
  for (std::size_t i = 0; i <= n; ++i) alphabet.push_back(FeedbackEvent::reject(i));
  alphabet.push_back(FeedbackEvent::adjust(5.0, 5.0));
  alphabet.push_back(FeedbackEvent::adjust(9.5, 5.0));
  alphabet.push_back(FeedbackEvent::abandon());

  struct Model {
    AnnotationSession session;
    std::vector<std::size_t> remaining;  // indices into start.candidates
    std::set<std::size_t> rejected;
  };
  SessionCheckResult result;
  auto fail = [&](const std::vector<std::size_t>& seq, const std::string& what) {
    if (result.failures.size() >= 20) return;
    std::string s;
    for (auto e : seq) s += std::to_string(e) + ' ';
    result.failures.push_back("[" + s + "] " + what);
  };
  auto same_ids = [&](const Model& m) {
    if (m.session.candidates.size() != m.remaining.size()) return false;
    for (std::size_t i = 0; i < m.remaining.size(); ++i) {
      if (m.session.candidates[i].support != start.candidates[m.remaining[i]].support) return false;
    }
    return true;
  };

  std::vector<std::size_t> seq;
  std::vector<std::size_t> rem0(n);
  for (std::size_t i = 0; i < n; ++i) rem0[i] = i;
  std::function<void(const Model&)> walk = [&](const Model& m) {
    ++result.sequences;
    if (seq.size() == max_len) return;
    for (std::size_t e = 0; e < alphabet.size(); ++e) {
      seq.push_back(e);
      const auto& ev = alphabet[e];
      ++result.events;
      const bool terminal = m.session.terminal();
      bool bad_index = (ev.action == A::accept || ev.action == A::reject) &&
                       ev.index >= m.session.candidates.size();
      bool bad_adjust = ev.action == A::adjust && !in_rating_range(ev.val);
      std::optional<ErrorCode> want_error;
      if (terminal) want_error = ErrorCode::session_closed;
      else if (bad_index) want_error = ErrorCode::validation;
      else if (bad_adjust) want_error = ErrorCode::range;

      std::optional<AnnotationSession> next;
      std::optional<ErrorCode> got_error;
      try {
        next = apply_feedback(m.session, ev);
      } catch (const Error& err) {
        got_error = err.code();
      }
      if (want_error != got_error) fail(seq, "unexpected error outcome");
      if (got_error || !next) {
        // A rejected event leaves the session as it was.
        walk(m);
        seq.pop_back();
        continue;
      }
      Model nm{*next, m.remaining, m.rejected};
      if (nm.session.history.size() != m.session.history.size() + 1 ||
          nm.session.history.back().seq != nm.session.history.size()) {
        fail(seq, "history did not grow by one");
      }
      switch (ev.action) {
        case A::accept: {
          const auto& c = start.candidates[m.remaining[ev.index]];
          if (nm.session.state != SessionState::committed) fail(seq, "accept did not commit");
          if (nm.session.target.provenance != Provenance::estimated) fail(seq, "accept provenance");
          if (!nm.session.target.rating || nm.session.target.rating->val_mean != c.emotion.val ||
              nm.session.target.rating->ar_mean != c.emotion.ar) {
            fail(seq, "accept stored the wrong emotion");
          }
          break;
        }
        case A::adjust:
          if (nm.session.state != SessionState::committed) fail(seq, "adjust did not commit");
          if (nm.session.target.provenance != Provenance::manual) fail(seq, "adjust provenance");
          if (!nm.session.target.rating || nm.session.target.rating->val_mean != ev.val ||
              nm.session.target.rating->ar_mean != ev.ar) {
            fail(seq, "adjust stored the wrong emotion");
          }
          break;
        case A::reject: {
          nm.rejected.insert(nm.remaining[ev.index]);
          nm.remaining.erase(nm.remaining.begin() + static_cast<std::ptrdiff_t>(ev.index));
          auto want_state = nm.remaining.empty() ? SessionState::manual_required : SessionState::proposed;
          if (nm.session.state != want_state) fail(seq, "reject state");
          if (!same_ids(nm)) fail(seq, "reject left the wrong candidates");
          double sum = 0.0;
          for (const auto& c : nm.session.candidates) sum += c.likelihood;
          if (!nm.remaining.empty() && std::abs(sum - 1.0) > ratio_tol) fail(seq, "not renormalized");
          for (std::size_t i = 0; i < nm.remaining.size(); ++i) {
            for (std::size_t j = 0; j < nm.remaining.size(); ++j) {
              double got = nm.session.candidates[i].likelihood / nm.session.candidates[j].likelihood;
              double want = start.candidates[nm.remaining[i]].likelihood /
                            start.candidates[nm.remaining[j]].likelihood;
              if (std::abs(got - want) > ratio_tol * want) fail(seq, "likelihood ratio changed");
            }
          }
          for (const auto& c : nm.session.candidates) {
            for (auto r : nm.rejected) {
              if (c.support == start.candidates[r].support) fail(seq, "rejected candidate reappeared");
            }
          }
          break;
        }
        case A::abandon:
          if (nm.session.state != SessionState::abandoned) fail(seq, "abandon state");
          break;
      }
      if (nm.session.state != SessionState::committed && nm.session.target.rating) {
        fail(seq, "uncommitted session carries a rating");
      }
      walk(nm);
      seq.pop_back();
    }
  };
  walk(Model{start, rem0, {}});
  return result;
}

}  // namespace testing_support
