#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

namespace affectcouple {

inline constexpr std::string_view kDefaultRoot = "entity";

/// ASCII-lowercased term with whitespace runs collapsed to single spaces and
/// the ends trimmed. Throws Error{validation} when nothing is left.
std::string normalize_term(std::string_view raw);

/// Immutable is-a graph (child -> parent links, rooted DAG) over
/// normalized terms.
///
/// Text grammar, one record per line:
///
///     # comment
///     !root,entity
///     child,parent
///
/// Blank lines are ignored. A node may have several parents. Every node
/// must reach the root through parent links and the root has no parent.
class Taxonomy {
 public:
  using Edge = std::pair<std::string, std::string>;  // child, parent

  Taxonomy();

  static Taxonomy from_edges(const std::vector<Edge>& edges,
                             std::string_view root = kDefaultRoot,
                             std::string name = {});
  static Taxonomy parse(std::istream& in, std::string name = {});
  static Taxonomy load(const std::filesystem::path& path);

  const std::string& name() const noexcept { return name_; }
  const std::string& root() const noexcept { return terms_[root_]; }
  std::size_t size() const noexcept { return terms_.size(); }

  bool contains(std::string_view term) const;
  std::optional<std::size_t> find(std::string_view term) const;
  /// Index of a normalized term; throws Error{lookup} naming the term.
  std::size_t require(std::string_view term) const;

  const std::string& term(std::size_t index) const { return terms_.at(index); }
  const std::vector<std::size_t>& parents(std::size_t index) const { return parents_.at(index); }
  const std::vector<std::size_t>& children(std::size_t index) const { return children_.at(index); }

  /// The term and all of its descendants, sorted.
  std::vector<std::string> subtree(std::string_view term) const;

  /// Edge count of the shortest undirected path between two nodes.
  /// Results are memoized per source node.
  std::uint32_t path_length(std::size_t a, std::size_t b) const;
  std::uint32_t path_length(std::string_view a, std::string_view b) const;

  /// Edges in the text grammar above, sorted for stable output.
  std::string to_text() const;

 private:
  struct PathCache;

  std::size_t intern(const std::string& term);
  void check_structure() const;
  const std::vector<std::uint32_t>& distances_from(std::size_t source) const;

  std::string name_;
  std::size_t root_ = 0;
  std::vector<std::string> terms_;
  std::unordered_map<std::string, std::size_t> index_;
  std::vector<std::vector<std::size_t>> parents_;
  std::vector<std::vector<std::size_t>> children_;
  std::shared_ptr<PathCache> cache_;
};

}  // namespace affectcouple
