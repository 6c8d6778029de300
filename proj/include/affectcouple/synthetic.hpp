#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <string>
#include <vector>

#include "affectcouple/corpus.hpp"

namespace affectcouple {

struct SyntheticGroup {
  std::string name;
  std::string subtree;  // taxonomy node whose descendants supply tags
  double centroid_val = 5.0;
  double centroid_ar = 5.0;
  double noise_sd = 0.0;
  std::size_t count = 0;
  double rating_sd = 1.0;  // SD written into each generated rating
};

struct SyntheticSpec {
  std::vector<SyntheticGroup> groups;
  std::string uri_prefix = "synthetic/";
  CouplingThresholds defaults;

  /// {"groups": [{"name", "subtree", "centroid": [v, a], "noise_sd",
  ///   "count", "rating_sd"?}], "uri_prefix"?, "defaults"?: {"eps_sem", "eps_emo"}}
  static SyntheticSpec from_json(std::string_view json_text);
  static SyntheticSpec load(const std::filesystem::path& path);
};

struct SyntheticCorpus {
  Corpus corpus;
  std::map<std::string, std::string> ground_truth;  // doc id -> group name
};

/// Deterministic for equal (spec, taxonomy, seed). Each document draws 1-4
/// distinct tags from its group's subtree and an emotion from a Gaussian
/// around the centroid, re-drawn when outside [1,9] (100 attempts, then
/// clamped). Drawn coordinates are rounded to 6 fractional digits.
SyntheticCorpus generate_synthetic(const SyntheticSpec& spec, const Taxonomy& taxonomy,
                                   std::uint64_t seed);

/// `doc_id,group` CSV.
void write_ground_truth(const std::map<std::string, std::string>& truth, std::ostream& out);
std::map<std::string, std::string> read_ground_truth(std::istream& in);

}  // namespace affectcouple
