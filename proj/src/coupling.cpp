#include "affectcouple/coupling.hpp"

#include <numeric>

#include "affectcouple/error.hpp"

namespace affectcouple {

CouplingVerdict couple(const StimulusDocument& a, const StimulusDocument& b, const Taxonomy& t,
                       const CouplingThresholds& th) {
  th.validate();
  auto ea = a.emotion();
  auto eb = b.emotion();
  CouplingVerdict v;
  v.doc_a = a.id;
  v.doc_b = b.id;
  v.thresholds = th;
  v.identical_semantics = a.profile == b.profile;
  v.d_sem = semantic_distance(a.profile, b.profile, t);
  v.d_emo = emotion_distance(ea, eb);
  v.coupled = !v.identical_semantics && v.d_sem <= th.eps_sem && v.d_emo <= th.eps_emo;
  return v;
}

std::size_t CouplingMatrix::coupled_pairs() const {
  std::size_t n = 0;
  for (std::size_t i = 0; i < size(); ++i)
    for (std::size_t j = i + 1; j < size(); ++j) n += at(i, j);
  return n;
}

CouplingMatrix coupling_matrix(const std::vector<StimulusDocument>& docs, const Taxonomy& t,
                               const CouplingThresholds& th) {
  th.validate();
  const auto n = docs.size();
  CouplingMatrix m;
  m.ids.reserve(n);
  for (const auto& d : docs) {
    d.emotion();
    m.ids.push_back(d.id);
  }
  m.coupled.assign(n * n, 0);
  m.d_sem.assign(n * n, 1.0);
  m.d_emo.assign(n * n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      auto v = couple(docs[i], docs[j], t, th);
      m.coupled[i * n + j] = m.coupled[j * n + i] = v.coupled;
      m.d_sem[i * n + j] = m.d_sem[j * n + i] = v.d_sem;
      m.d_emo[i * n + j] = m.d_emo[j * n + i] = v.d_emo;
    }
  }
  return m;
}

std::vector<std::vector<std::string>> clusters_from_matrix(const CouplingMatrix& m) {
  const auto n = m.size();
  std::vector<std::size_t> parent(n);
  std::iota(parent.begin(), parent.end(), 0);
  auto root = [&](std::size_t x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  };
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      if (!m.at(i, j)) continue;
      auto ri = root(i), rj = root(j);
      // Smaller index wins so a component's root is its first member.
      if (ri != rj) parent[std::max(ri, rj)] = std::min(ri, rj);
    }
  }
  std::vector<std::vector<std::string>> clusters;
  std::vector<std::size_t> slot(n, n);
  for (std::size_t i = 0; i < n; ++i) {
    auto r = root(i);
    if (slot[r] == n) {
      slot[r] = clusters.size();
      clusters.emplace_back();
    }
    clusters[slot[r]].push_back(m.ids[i]);
  }
  return clusters;
}

std::vector<std::vector<std::string>> coupled_clusters(const std::vector<StimulusDocument>& docs,
                                                       const Taxonomy& t,
                                                       const CouplingThresholds& th) {
  return clusters_from_matrix(coupling_matrix(docs, t, th));
}

}  // namespace affectcouple
