#include "affectcouple/synthetic.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <random>
#include <sstream>

#include <json.hpp>

#include "affectcouple/error.hpp"
#include "text.hpp"

namespace affectcouple {

using nlohmann::json;

SyntheticSpec SyntheticSpec::from_json(std::string_view json_text) {
  SyntheticSpec spec;
  try {
    auto j = json::parse(json_text);
    spec.uri_prefix = j.value("uri_prefix", spec.uri_prefix);
    if (j.contains("defaults")) {
      spec.defaults.eps_sem = j["defaults"].value("eps_sem", spec.defaults.eps_sem);
      spec.defaults.eps_emo = j["defaults"].value("eps_emo", spec.defaults.eps_emo);
    }
    for (const auto& g : j.at("groups")) {
      SyntheticGroup group;
      group.name = g.at("name").get<std::string>();
      group.subtree = g.at("subtree").get<std::string>();
      const auto& c = g.at("centroid");
      if (!c.is_array() || c.size() != 2) {
        throw Error(ErrorCode::validation, "centroid must be [val, ar]", "centroid");
      }
      group.centroid_val = c[0].get<double>();
      group.centroid_ar = c[1].get<double>();
      group.noise_sd = g.value("noise_sd", 0.0);
      group.count = g.at("count").get<std::size_t>();
      group.rating_sd = g.value("rating_sd", 1.0);
      spec.groups.push_back(std::move(group));
    }
  } catch (const json::exception& e) {
    throw Error(ErrorCode::parse, std::string("synthetic spec: ") + e.what());
  }
  return spec;
}

SyntheticSpec SyntheticSpec::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::io, "cannot read synthetic spec '" + path.string() + "'");
  std::stringstream buf;
  buf << in.rdbuf();
  return from_json(buf.str());
}

namespace {

double round6(double v) { return std::round(v * 1e6) / 1e6; }

double draw_coordinate(std::mt19937_64& rng, double centre, double sd) {
  if (sd == 0.0) return centre;
  std::normal_distribution<double> gauss(centre, sd);
  for (int attempt = 0; attempt < 100; ++attempt) {
    double v = round6(gauss(rng));
    if (in_rating_range(v)) return v;
  }
  return std::clamp(round6(gauss(rng)), kRatingMin, kRatingMax);
}

}  // namespace

SyntheticCorpus generate_synthetic(const SyntheticSpec& spec, const Taxonomy& taxonomy,
                                   std::uint64_t seed) {
  spec.defaults.validate();
  SyntheticCorpus out{Corpus(taxonomy.name(), spec.defaults), {}};
  std::mt19937_64 rng(seed);
  for (const auto& g : spec.groups) {
    if (!in_rating_range(g.centroid_val) || !in_rating_range(g.centroid_ar)) {
      throw Error(ErrorCode::range, "group '" + g.name + "': centroid out of [1,9]", "centroid");
    }
    if (!(g.noise_sd >= 0.0) || !(g.rating_sd >= 0.0)) {
      throw Error(ErrorCode::range, "group '" + g.name + "': SD must be non-negative", "noise_sd");
    }
    if (g.name.empty()) throw Error(ErrorCode::validation, "group without a name", "name");
    std::vector<std::string> pool;
    try {
      pool = taxonomy.subtree(normalize_term(g.subtree));
    } catch (const Error& e) {
      throw Error(e.code(), "group '" + g.name + "': " + e.what(), "subtree");
    }
    if (pool.empty()) {
      throw Error(ErrorCode::validation, "group '" + g.name + "': empty subtree", "subtree");
    }
    const std::size_t max_tags = std::min<std::size_t>(4, pool.size());
    for (std::size_t i = 0; i < g.count; ++i) {
      std::uniform_int_distribution<std::size_t> how_many(1, max_tags);
      std::vector<std::string> tags;
      std::sample(pool.begin(), pool.end(), std::back_inserter(tags), how_many(rng), rng);

      StimulusDocument doc;
      char suffix[16];
      std::snprintf(suffix, sizeof suffix, "-%04zu", i + 1);
      doc.id = g.name + suffix;
      doc.uri = spec.uri_prefix + doc.id;
      doc.profile = SemanticProfile::from_terms(tags);
      AffectiveRating r;
      r.val_mean = draw_coordinate(rng, g.centroid_val, g.noise_sd);
      r.ar_mean = draw_coordinate(rng, g.centroid_ar, g.noise_sd);
      r.val_sd = g.rating_sd;
      r.ar_sd = g.rating_sd;
      doc.rating = r;
      doc.provenance = Provenance::manifest;
      out.ground_truth[doc.id] = g.name;
      out.corpus.add(std::move(doc));
    }
  }
  return out;
}

void write_ground_truth(const std::map<std::string, std::string>& truth, std::ostream& out) {
  out << "doc_id,group\n";
  for (const auto& [id, group] : truth) {
    out << text::csv_field(id) << ',' << text::csv_field(group) << '\n';
  }
}

std::map<std::string, std::string> read_ground_truth(std::istream& in) {
  std::map<std::string, std::string> truth;
  std::string line;
  if (!text::read_line(in, line) || line != "doc_id,group") {
    throw Error(ErrorCode::parse, "ground truth: expected header 'doc_id,group'");
  }
  std::size_t line_no = 1;
  while (text::read_line(in, line)) {
    ++line_no;
    if (text::trim(line).empty()) continue;
    auto f = text::split_csv(line);
    if (f.size() != 2) {
      throw Error(ErrorCode::parse, "ground truth line " + std::to_string(line_no) +
                                        ": expected 2 columns");
    }
    truth[f[0]] = f[1];
  }
  return truth;
}

}  // namespace affectcouple
