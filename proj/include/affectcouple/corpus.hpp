#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <memory>
#include <mutex>
#include <string>
#include <unordered_map>
#include <vector>

#include "affectcouple/document.hpp"
#include "affectcouple/taxonomy.hpp"

namespace affectcouple {

inline constexpr std::string_view kManifestHeader = "id,uri,tags,val_mean,val_sd,ar_mean,ar_sd";
inline constexpr std::string_view kManifestHeaderWithDominance =
    "id,uri,tags,val_mean,val_sd,ar_mean,ar_sd,dom_mean,dom_sd";
inline constexpr std::string_view kCorpusVersionLine = "affectcouple-corpus v1";

/// An emotionally annotated database: documents in insertion order, keyed
/// by id, plus the taxonomy name and default coupling thresholds.
class Corpus {
 public:
  explicit Corpus(std::string taxonomy_ref = {}, CouplingThresholds defaults = {});

  /// Validates the document and rejects duplicate ids (Error{duplicate}).
  void add(StimulusDocument doc);

  const std::vector<StimulusDocument>& documents() const noexcept { return docs_; }
  std::size_t size() const noexcept { return docs_.size(); }
  bool empty() const noexcept { return docs_.empty(); }
  std::size_t annotated_count() const noexcept;

  const StimulusDocument* find(std::string_view id) const;
  /// Throws Error{not_found}.
  const StimulusDocument& at(std::string_view id) const;

  /// Copy with the rating and provenance of one document replaced.
  Corpus with_annotation(std::string_view id, const AffectiveRating& rating,
                         Provenance provenance) const;

  const std::string& taxonomy_ref() const noexcept { return taxonomy_ref_; }
  void set_taxonomy_ref(std::string name) { taxonomy_ref_ = std::move(name); }
  const CouplingThresholds& defaults() const noexcept { return defaults_; }
  void set_defaults(const CouplingThresholds& th);

  /// Re-checks every document invariant and, when given, that every
  /// descriptor resolves in the taxonomy.
  void validate(const Taxonomy* taxonomy = nullptr) const;

  friend bool operator==(const Corpus& a, const Corpus& b) {
    return a.taxonomy_ref_ == b.taxonomy_ref_ && a.defaults_ == b.defaults_ && a.docs_ == b.docs_;
  }

 private:
  std::string taxonomy_ref_;
  CouplingThresholds defaults_;
  std::vector<StimulusDocument> docs_;
  std::unordered_map<std::string, std::size_t> index_;
};

/// CSV manifest `id,uri,tags,val_mean,val_sd,ar_mean,ar_sd[,dom_mean,dom_sd]`
/// with a verbatim header. Rows with all rating fields empty load as
/// unannotated documents. Errors cite "line N" and the offending field.
Corpus parse_manifest(std::istream& in, const Taxonomy& taxonomy);
Corpus load_manifest(const std::filesystem::path& path, const Taxonomy& taxonomy);
void write_manifest(const Corpus& corpus, std::ostream& out);

struct FolderLoadResult {
  Corpus corpus;
  std::vector<std::string> warnings;
};

struct FolderMapping {
  std::string folder;
  SemanticProfile profile;
  std::optional<AffectiveRating> rating;
};

/// Sidecar lines `folder_name -> tag1;tag2 [@ val_mean,val_sd,ar_mean,ar_sd]`.
std::vector<FolderMapping> parse_folder_mapping(std::istream& in);

/// Every regular file directly inside a mapped sub-folder of `root` becomes
/// a document (id = file name, uri = folder/file). Unmapped folders and
/// stray files are reported in `warnings`.
FolderLoadResult load_folder_convention(const std::filesystem::path& root,
                                        const std::filesystem::path& mapping_file,
                                        const Taxonomy& taxonomy);

void write_corpus(const Corpus& corpus, std::ostream& out);
Corpus read_corpus(std::istream& in);
void save_corpus(const Corpus& corpus, const std::filesystem::path& path);
Corpus load_corpus(const std::filesystem::path& path);

/// Single-writer revision log over immutable corpus snapshots.
class CorpusStore {
 public:
  explicit CorpusStore(Corpus initial);

  std::shared_ptr<const Corpus> snapshot() const;
  std::uint64_t revision() const;

  /// Adds an (unannotated or annotated) document; returns the new revision.
  std::uint64_t add_document(StimulusDocument doc);

  /// Annotates a document that is still unannotated in the latest revision.
  /// Throws Error{conflict} if another writer annotated it first.
  std::uint64_t commit_annotation(std::string_view id, const AffectiveRating& rating,
                                  Provenance provenance);

 private:
  mutable std::mutex mutex_;
  std::shared_ptr<const Corpus> current_;
  std::uint64_t revision_ = 1;
};

}  // namespace affectcouple
