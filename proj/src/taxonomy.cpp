#include "affectcouple/taxonomy.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <limits>
#include <mutex>
#include <queue>
#include <shared_mutex>
#include <sstream>

#include "affectcouple/error.hpp"
#include "text.hpp"

namespace affectcouple {

namespace {

constexpr std::uint32_t kUnreachable = std::numeric_limits<std::uint32_t>::max();

}  // namespace

struct Taxonomy::PathCache {
  std::shared_mutex mutex;
  std::unordered_map<std::size_t, std::vector<std::uint32_t>> by_source;
};

std::string normalize_term(std::string_view raw) {
  std::string out;
  bool pending_space = false;
  for (char c : text::trim(raw)) {
    if (std::isspace(static_cast<unsigned char>(c))) {
      pending_space = true;
      continue;
    }
    if (pending_space) out += ' ';
    pending_space = false;
    out += static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  }
  if (out.empty()) {
    throw Error(ErrorCode::validation, "empty term");
  }
  return out;
}

Taxonomy::Taxonomy() : cache_(std::make_shared<PathCache>()) {
  intern(std::string(kDefaultRoot));
}

std::size_t Taxonomy::intern(const std::string& term) {
  auto [it, inserted] = index_.try_emplace(term, terms_.size());
  if (inserted) {
    terms_.push_back(term);
    parents_.emplace_back();
    children_.emplace_back();
  }
  return it->second;
}

Taxonomy Taxonomy::from_edges(const std::vector<Edge>& edges, std::string_view root,
                              std::string name) {
  Taxonomy t;
  t.terms_.clear();
  t.index_.clear();
  t.parents_.clear();
  t.children_.clear();
  t.name_ = std::move(name);
  t.root_ = t.intern(normalize_term(root));
  for (const auto& [child_raw, parent_raw] : edges) {
    auto child = t.intern(normalize_term(child_raw));
    auto parent = t.intern(normalize_term(parent_raw));
    if (child == parent) {
      throw Error(ErrorCode::validation, "self-loop on '" + t.terms_[child] + "'",
                  t.terms_[child]);
    }
    auto& ps = t.parents_[child];
    if (std::find(ps.begin(), ps.end(), parent) == ps.end()) {
      ps.push_back(parent);
      t.children_[parent].push_back(child);
    }
  }
  t.check_structure();
  return t;
}

void Taxonomy::check_structure() const {
  if (!parents_[root_].empty()) {
    throw Error(ErrorCode::validation, "root '" + terms_[root_] + "' must not have a parent",
                terms_[root_]);
  }
  // Iterative DFS colouring over parent links finds cycles; a node whose
  // parent chain never ends at the root has no parents and is not the root.
  enum class Mark : unsigned char { fresh, active, done };
  std::vector<Mark> mark(terms_.size(), Mark::fresh);
  for (std::size_t start = 0; start < terms_.size(); ++start) {
    if (mark[start] != Mark::fresh) continue;
    std::vector<std::pair<std::size_t, std::size_t>> stack{{start, 0}};
    mark[start] = Mark::active;
    while (!stack.empty()) {
      auto& [node, next] = stack.back();
      if (next < parents_[node].size()) {
        auto parent = parents_[node][next++];
        if (mark[parent] == Mark::active) {
          throw Error(ErrorCode::validation, "cycle through '" + terms_[parent] + "'",
                      terms_[parent]);
        }
        if (mark[parent] == Mark::fresh) {
          mark[parent] = Mark::active;
          stack.emplace_back(parent, 0);
        }
      } else {
        mark[node] = Mark::done;
        stack.pop_back();
      }
    }
  }
  for (std::size_t i = 0; i < terms_.size(); ++i) {
    if (i != root_ && parents_[i].empty()) {
      throw Error(ErrorCode::validation,
                  "'" + terms_[i] + "' does not reach root '" + terms_[root_] + "'", terms_[i]);
    }
  }
}

Taxonomy Taxonomy::parse(std::istream& in, std::string name) {
  std::vector<Edge> edges;
  std::optional<std::string> root;
  std::string line;
  std::size_t line_no = 0;
  while (text::read_line(in, line)) {
    ++line_no;
    auto body = text::trim(line);
    if (body.empty() || body.front() == '#') continue;
    auto where = "line " + std::to_string(line_no);
    auto fields = text::split(body, ',');
    if (fields.size() != 2) {
      throw Error(ErrorCode::parse, where + ": expected 'child,parent'", where);
    }
    try {
      if (fields[0] == "!root") {
        if (root) throw Error(ErrorCode::parse, "root declared twice");
        root = normalize_term(fields[1]);
      } else {
        edges.emplace_back(normalize_term(fields[0]), normalize_term(fields[1]));
      }
    } catch (const Error& e) {
      throw Error(ErrorCode::parse, where + ": " + e.what(), where);
    }
  }
  return from_edges(edges, root.value_or(std::string(kDefaultRoot)), std::move(name));
}

Taxonomy Taxonomy::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) {
    throw Error(ErrorCode::io, "cannot read taxonomy '" + path.string() + "'", path.string());
  }
  return parse(in, path.stem().string());
}

std::optional<std::size_t> Taxonomy::find(std::string_view term) const {
  auto it = index_.find(std::string(term));
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

bool Taxonomy::contains(std::string_view term) const { return find(term).has_value(); }

std::size_t Taxonomy::require(std::string_view term) const {
  if (auto idx = find(term)) return *idx;
  throw Error(ErrorCode::lookup, "unknown term '" + std::string(term) + "'", std::string(term));
}

std::vector<std::string> Taxonomy::subtree(std::string_view term) const {
  auto start = require(term);
  std::vector<bool> seen(terms_.size(), false);
  std::vector<std::size_t> stack{start};
  seen[start] = true;
  std::vector<std::string> out;
  while (!stack.empty()) {
    auto node = stack.back();
    stack.pop_back();
    out.push_back(terms_[node]);
    for (auto c : children_[node]) {
      if (!seen[c]) {
        seen[c] = true;
        stack.push_back(c);
      }
    }
  }
  std::sort(out.begin(), out.end());
  return out;
}

const std::vector<std::uint32_t>& Taxonomy::distances_from(std::size_t source) const {
  {
    std::shared_lock lock(cache_->mutex);
    if (auto it = cache_->by_source.find(source); it != cache_->by_source.end()) {
      return it->second;
    }
  }
  std::vector<std::uint32_t> dist(terms_.size(), kUnreachable);
  std::queue<std::size_t> frontier;
  dist[source] = 0;
  frontier.push(source);
  while (!frontier.empty()) {
    auto node = frontier.front();
    frontier.pop();
    auto visit = [&](std::size_t next) {
      if (dist[next] == kUnreachable) {
        dist[next] = dist[node] + 1;
        frontier.push(next);
      }
    };
    for (auto p : parents_[node]) visit(p);
    for (auto c : children_[node]) visit(c);
  }
  std::unique_lock lock(cache_->mutex);
  // Unordered_map references stay valid across rehashing.
  auto [it, inserted] = cache_->by_source.try_emplace(source, std::move(dist));
  return it->second;
}

std::uint32_t Taxonomy::path_length(std::size_t a, std::size_t b) const {
  if (a >= terms_.size() || b >= terms_.size()) {
    throw Error(ErrorCode::lookup, "term index out of range");
  }
  if (a == b) return 0;
  return distances_from(std::min(a, b))[std::max(a, b)];
}

std::uint32_t Taxonomy::path_length(std::string_view a, std::string_view b) const {
  return path_length(require(a), require(b));
}

std::string Taxonomy::to_text() const {
  std::vector<std::string> lines;
  for (std::size_t child = 0; child < terms_.size(); ++child) {
    for (auto parent : parents_[child]) lines.push_back(terms_[child] + "," + terms_[parent]);
  }
  std::sort(lines.begin(), lines.end());
  std::ostringstream out;
  out << "!root," << terms_[root_] << '\n';
  for (const auto& l : lines) out << l << '\n';
  return out.str();
}

}  // namespace affectcouple
