#include "affectcouple/corpus.hpp"

#include <algorithm>
#include <fstream>
#include <map>
#include <sstream>

#include "affectcouple/error.hpp"
#include "text.hpp"

namespace affectcouple {

namespace fs = std::filesystem;

Corpus::Corpus(std::string taxonomy_ref, CouplingThresholds defaults)
    : taxonomy_ref_(std::move(taxonomy_ref)), defaults_(defaults) {
  defaults_.validate();
}

void Corpus::add(StimulusDocument doc) {
  doc.validate();
  auto [it, inserted] = index_.try_emplace(doc.id, docs_.size());
  if (!inserted) {
    throw Error(ErrorCode::duplicate, "duplicate id '" + doc.id + "'", doc.id);
  }
  docs_.push_back(std::move(doc));
}

std::size_t Corpus::annotated_count() const noexcept {
  return static_cast<std::size_t>(
      std::count_if(docs_.begin(), docs_.end(), [](const auto& d) { return d.annotated(); }));
}

const StimulusDocument* Corpus::find(std::string_view id) const {
  auto it = index_.find(std::string(id));
  return it == index_.end() ? nullptr : &docs_[it->second];
}

const StimulusDocument& Corpus::at(std::string_view id) const {
  if (const auto* doc = find(id)) return *doc;
  throw Error(ErrorCode::not_found, "unknown document '" + std::string(id) + "'",
              std::string(id));
}

Corpus Corpus::with_annotation(std::string_view id, const AffectiveRating& rating,
                               Provenance provenance) const {
  rating.validate();
  Corpus next = *this;
  auto it = next.index_.find(std::string(id));
  if (it == next.index_.end()) {
    throw Error(ErrorCode::not_found, "unknown document '" + std::string(id) + "'",
                std::string(id));
  }
  auto& doc = next.docs_[it->second];
  doc.rating = rating;
  doc.provenance = provenance;
  return next;
}

void Corpus::set_defaults(const CouplingThresholds& th) {
  th.validate();
  defaults_ = th;
}

void Corpus::validate(const Taxonomy* taxonomy) const {
  defaults_.validate();
  std::unordered_map<std::string_view, int> seen;
  for (const auto& doc : docs_) {
    doc.validate();
    if (seen[doc.id]++) throw Error(ErrorCode::duplicate, "duplicate id '" + doc.id + "'", doc.id);
    if (taxonomy) {
      try {
        doc.profile.resolve(*taxonomy);
      } catch (const Error& e) {
        throw Error(e.code(), "document '" + doc.id + "': " + e.what(), e.detail());
      }
    }
  }
}

// --- manifest ---------------------------------------------------------------

namespace {

struct RowContext {
  std::size_t line;

  [[noreturn]] void fail(ErrorCode code, const std::string& field, const std::string& msg) const {
    throw Error(code, "line " + std::to_string(line) + ": " + msg, field);
  }

  double number(const std::string& raw, const std::string& field) const {
    auto v = text::parse_double(raw);
    if (!v) fail(ErrorCode::parse, field, field + " is not a number: '" + raw + "'");
    return *v;
  }

  /// Means within [1,9], SDs non-negative.
  void check(const AffectiveRating& r) const {
    try {
      r.validate();
    } catch (const Error& e) {
      fail(e.code(), e.detail(), e.what());
    }
  }
};

std::optional<AffectiveRating> parse_rating_fields(const RowContext& ctx,
                                                   const std::vector<std::string>& f,
                                                   std::size_t first, bool with_dom) {
  static const char* names[] = {"val_mean", "val_sd", "ar_mean", "ar_sd", "dom_mean", "dom_sd"};
  std::size_t present = 0;
  for (std::size_t i = 0; i < 4; ++i) present += !text::trim(f[first + i]).empty();
  bool dom_given = false;
  if (with_dom) {
    bool m = !text::trim(f[first + 4]).empty();
    bool s = !text::trim(f[first + 5]).empty();
    if (m != s) ctx.fail(ErrorCode::validation, m ? "dom_sd" : "dom_mean",
                         "dom_mean and dom_sd must be given together");
    dom_given = m;
  }
  if (present == 0) {
    if (dom_given) ctx.fail(ErrorCode::validation, "val_mean", "dominance without valence/arousal");
    return std::nullopt;
  }
  if (present != 4) {
    for (std::size_t i = 0; i < 4; ++i) {
      if (text::trim(f[first + i]).empty()) {
        ctx.fail(ErrorCode::validation, names[i], "incomplete rating: " + std::string(names[i]) +
                                                       " missing");
      }
    }
  }
  AffectiveRating r;
  r.val_mean = ctx.number(f[first + 0], names[0]);
  r.val_sd = ctx.number(f[first + 1], names[1]);
  r.ar_mean = ctx.number(f[first + 2], names[2]);
  r.ar_sd = ctx.number(f[first + 3], names[3]);
  if (dom_given) {
    r.dom_mean = ctx.number(f[first + 4], names[4]);
    r.dom_sd = ctx.number(f[first + 5], names[5]);
  }
  ctx.check(r);
  return r;
}

}  // namespace

Corpus parse_manifest(std::istream& in, const Taxonomy& taxonomy) {
  std::string line;
  std::size_t line_no = 0;
  if (!text::read_line(in, line)) {
    throw Error(ErrorCode::parse, "line 1: missing header", "header");
  }
  ++line_no;
  if (line.size() >= 3 && line.compare(0, 3, "\xEF\xBB\xBF") == 0) line.erase(0, 3);
  bool with_dom = false;
  if (line == kManifestHeaderWithDominance) {
    with_dom = true;
  } else if (line != kManifestHeader) {
    throw Error(ErrorCode::parse,
                "line 1: header must be '" + std::string(kManifestHeader) + "[,dom_mean,dom_sd]'",
                "header");
  }
  const std::size_t columns = with_dom ? 9 : 7;

  Corpus corpus(taxonomy.name());
  std::map<std::string, std::size_t> first_line;
  while (text::read_line(in, line)) {
    ++line_no;
    if (text::trim(line).empty()) continue;
    RowContext ctx{line_no};
    auto f = text::split_csv(line);
    if (f.size() != columns) {
      ctx.fail(ErrorCode::parse, "columns",
               "expected " + std::to_string(columns) + " columns, found " +
                   std::to_string(f.size()));
    }
    StimulusDocument doc;
    doc.id = std::string(text::trim(f[0]));
    doc.uri = std::string(text::trim(f[1]));
    if (doc.id.empty()) ctx.fail(ErrorCode::validation, "id", "empty id");
    if (doc.uri.empty()) ctx.fail(ErrorCode::validation, "uri", "empty uri");
    try {
      doc.profile = SemanticProfile::parse(f[2]);
      doc.profile.resolve(taxonomy);
    } catch (const Error& e) {
      ctx.fail(e.code(), e.code() == ErrorCode::lookup ? e.detail() : "tags", e.what());
    }
    doc.rating = parse_rating_fields(ctx, f, 3, with_dom);
    doc.provenance = Provenance::manifest;

    auto [it, inserted] = first_line.try_emplace(doc.id, line_no);
    if (!inserted) {
      ctx.fail(ErrorCode::duplicate, "id",
               "duplicate id '" + doc.id + "' (first seen at line " + std::to_string(it->second) +
                   ")");
    }
    corpus.add(std::move(doc));
  }
  return corpus;
}

Corpus load_manifest(const fs::path& path, const Taxonomy& taxonomy) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::io, "cannot read manifest '" + path.string() + "'");
  return parse_manifest(in, taxonomy);
}

void write_manifest(const Corpus& corpus, std::ostream& out) {
  bool with_dom = std::any_of(corpus.documents().begin(), corpus.documents().end(),
                              [](const auto& d) { return d.rating && d.rating->dom_mean; });
  out << (with_dom ? kManifestHeaderWithDominance : kManifestHeader) << '\n';
  auto num = [](double v) { return text::format_fixed(v, 6); };
  for (const auto& d : corpus.documents()) {
    out << text::csv_field(d.id) << ',' << text::csv_field(d.uri) << ','
        << text::csv_field(d.profile.to_string());
    if (d.rating) {
      const auto& r = *d.rating;
      out << ',' << num(r.val_mean) << ',' << num(r.val_sd) << ',' << num(r.ar_mean) << ','
          << num(r.ar_sd);
      if (with_dom) {
        out << ',' << (r.dom_mean ? num(*r.dom_mean) : "") << ','
            << (r.dom_sd ? num(*r.dom_sd) : "");
      }
    } else {
      out << (with_dom ? ",,,,,," : ",,,,");
    }
    out << '\n';
  }
}

// --- folder convention -------------------------------------------------------

std::vector<FolderMapping> parse_folder_mapping(std::istream& in) {
  std::vector<FolderMapping> out;
  std::string line;
  std::size_t line_no = 0;
  while (text::read_line(in, line)) {
    ++line_no;
    auto body = text::trim(line);
    if (body.empty() || body.front() == '#') continue;
    auto where = "line " + std::to_string(line_no);
    auto arrow = body.find("->");
    if (arrow == std::string_view::npos) {
      throw Error(ErrorCode::parse, where + ": expected 'folder -> tags'", where);
    }
    FolderMapping m;
    m.folder = std::string(text::trim(body.substr(0, arrow)));
    if (m.folder.empty()) throw Error(ErrorCode::parse, where + ": empty folder name", where);
    auto rest = body.substr(arrow + 2);
    auto at = rest.find('@');
    try {
      m.profile = SemanticProfile::parse(text::trim(rest.substr(0, at)));
    } catch (const Error& e) {
      throw Error(e.code(), where + ": " + e.what(), where);
    }
    if (at != std::string_view::npos) {
      auto nums = text::split(rest.substr(at + 1), ',');
      if (nums.size() != 4) {
        throw Error(ErrorCode::parse, where + ": rating must be 'val_mean,val_sd,ar_mean,ar_sd'",
                    where);
      }
      RowContext ctx{line_no};
      AffectiveRating r;
      r.val_mean = ctx.number(nums[0], "val_mean");
      r.val_sd = ctx.number(nums[1], "val_sd");
      r.ar_mean = ctx.number(nums[2], "ar_mean");
      r.ar_sd = ctx.number(nums[3], "ar_sd");
      ctx.check(r);
      m.rating = r;
    }
    out.push_back(std::move(m));
  }
  return out;
}

FolderLoadResult load_folder_convention(const fs::path& root, const fs::path& mapping_file,
                                        const Taxonomy& taxonomy) {
  std::ifstream in(mapping_file);
  if (!in) throw Error(ErrorCode::io, "cannot read mapping '" + mapping_file.string() + "'");
  auto mappings = parse_folder_mapping(in);
  std::map<std::string, const FolderMapping*> by_folder;
  for (const auto& m : mappings) {
    m.profile.resolve(taxonomy);
    by_folder[m.folder] = &m;
  }

  std::error_code ec;
  if (!fs::is_directory(root, ec)) {
    throw Error(ErrorCode::io, "cannot read directory '" + root.string() + "'", root.string());
  }
  auto sorted_entries = [](const fs::path& dir) {
    std::vector<fs::directory_entry> entries;
    std::error_code err;
    fs::directory_iterator it(dir, err);
    if (err) throw Error(ErrorCode::io, "cannot read directory '" + dir.string() + "'");
    for (const auto& e : it) {
      if (e.path().filename().string().starts_with(".")) continue;
      entries.push_back(e);
    }
    std::sort(entries.begin(), entries.end(),
              [](const auto& a, const auto& b) { return a.path().filename() < b.path().filename(); });
    return entries;
  };

  FolderLoadResult result{Corpus(taxonomy.name()), {}};
  std::map<std::string, bool> seen_folder;
  for (const auto& entry : sorted_entries(root)) {
    auto name = entry.path().filename().string();
    if (!entry.is_directory()) {
      result.warnings.push_back("file outside any folder: " + name);
      continue;
    }
    auto it = by_folder.find(name);
    if (it == by_folder.end()) {
      result.warnings.push_back("unmapped folder: " + name);
      continue;
    }
    seen_folder[name] = true;
    for (const auto& file : sorted_entries(entry.path())) {
      if (!file.is_regular_file()) continue;
      StimulusDocument doc;
      doc.id = file.path().filename().string();
      doc.uri = name + "/" + doc.id;
      doc.profile = it->second->profile;
      doc.rating = it->second->rating;
      doc.provenance = Provenance::folder_convention;
      result.corpus.add(std::move(doc));
    }
  }
  for (const auto& m : mappings) {
    if (!seen_folder.count(m.folder)) result.warnings.push_back("mapped folder missing: " + m.folder);
  }
  return result;
}

// --- persistence --------------------------------------------------------------

namespace {

constexpr std::string_view kCorpusColumns =
    "id,uri,tags,provenance,val_mean,val_sd,ar_mean,ar_sd,dom_mean,dom_sd";

std::string opt_number(const std::optional<double>& v) {
  return v ? text::format_number(*v) : std::string();
}

}  // namespace

void write_corpus(const Corpus& corpus, std::ostream& out) {
  out << kCorpusVersionLine << '\n';
  out << "taxonomy," << text::csv_field(corpus.taxonomy_ref()) << '\n';
  out << "defaults," << text::format_number(corpus.defaults().eps_sem) << ','
      << text::format_number(corpus.defaults().eps_emo) << '\n';
  out << "documents," << corpus.size() << '\n';
  out << kCorpusColumns << '\n';
  for (const auto& d : corpus.documents()) {
    out << text::csv_field(d.id) << ',' << text::csv_field(d.uri) << ','
        << text::csv_field(d.profile.to_string()) << ',' << to_string(d.provenance);
    if (d.rating) {
      const auto& r = *d.rating;
      out << ',' << text::format_number(r.val_mean) << ',' << text::format_number(r.val_sd) << ','
          << text::format_number(r.ar_mean) << ',' << text::format_number(r.ar_sd) << ','
          << opt_number(r.dom_mean) << ',' << opt_number(r.dom_sd);
    } else {
      out << ",,,,,,";
    }
    out << '\n';
  }
}

Corpus read_corpus(std::istream& in) {
  std::string line;
  std::size_t line_no = 0;
  auto next = [&](const char* what) {
    if (!text::read_line(in, line)) {
      throw Error(ErrorCode::parse, "line " + std::to_string(line_no + 1) + ": missing " + what);
    }
    ++line_no;
    return text::split_csv(line);
  };

  if (!text::read_line(in, line)) throw Error(ErrorCode::parse, "empty corpus file");
  ++line_no;
  if (line != kCorpusVersionLine) {
    if (line.starts_with("affectcouple-corpus ")) {
      throw Error(ErrorCode::version,
                  "unsupported corpus format '" + line + "' (expected '" +
                      std::string(kCorpusVersionLine) + "')",
                  "version");
    }
    throw Error(ErrorCode::parse, "line 1: not an affectcouple corpus file", "version");
  }
  auto tax = next("taxonomy line");
  if (tax.size() != 2 || tax[0] != "taxonomy") {
    throw Error(ErrorCode::parse, "line 2: expected 'taxonomy,<name>'");
  }
  auto def = next("defaults line");
  RowContext ctx{line_no};
  if (def.size() != 3 || def[0] != "defaults") {
    ctx.fail(ErrorCode::parse, "defaults", "expected 'defaults,<eps_sem>,<eps_emo>'");
  }
  CouplingThresholds th{ctx.number(def[1], "eps_sem"), ctx.number(def[2], "eps_emo")};
  auto count_line = next("documents line");
  std::optional<long long> expected;
  if (count_line.size() == 2 && count_line[0] == "documents") expected = text::parse_int(count_line[1]);
  if (!expected || *expected < 0) {
    throw Error(ErrorCode::parse, "line 4: expected 'documents,<count>'");
  }
  next("column header");
  if (line != kCorpusColumns) throw Error(ErrorCode::parse, "line 5: unexpected column header");

  Corpus corpus(tax[1], th);
  while (text::read_line(in, line)) {
    ++line_no;
    if (text::trim(line).empty()) continue;
    RowContext row{line_no};
    auto f = text::split_csv(line);
    if (f.size() != 10) row.fail(ErrorCode::parse, "columns", "expected 10 columns");
    StimulusDocument doc;
    doc.id = f[0];
    doc.uri = f[1];
    try {
      doc.profile = SemanticProfile::parse(f[2]);
      doc.provenance = parse_provenance(f[3]);
    } catch (const Error& e) {
      row.fail(e.code(), e.detail(), e.what());
    }
    doc.rating = parse_rating_fields(row, f, 4, true);
    try {
      corpus.add(std::move(doc));
    } catch (const Error& e) {
      row.fail(e.code(), e.detail(), e.what());
    }
  }
  if (corpus.size() != static_cast<std::size_t>(*expected)) {
    throw Error(ErrorCode::parse, "document count mismatch: header says " +
                                      std::to_string(*expected) + ", found " +
                                      std::to_string(corpus.size()));
  }
  return corpus;
}

void save_corpus(const Corpus& corpus, const fs::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::io, "cannot write corpus '" + path.string() + "'");
  write_corpus(corpus, out);
  if (!out) throw Error(ErrorCode::io, "write failed for '" + path.string() + "'");
}

Corpus load_corpus(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::io, "cannot read corpus '" + path.string() + "'");
  return read_corpus(in);
}

// --- revision store -----------------------------------------------------------

CorpusStore::CorpusStore(Corpus initial)
    : current_(std::make_shared<const Corpus>(std::move(initial))) {}

std::shared_ptr<const Corpus> CorpusStore::snapshot() const {
  std::lock_guard lock(mutex_);
  return current_;
}

std::uint64_t CorpusStore::revision() const {
  std::lock_guard lock(mutex_);
  return revision_;
}

std::uint64_t CorpusStore::add_document(StimulusDocument doc) {
  std::lock_guard lock(mutex_);
  auto next = std::make_shared<Corpus>(*current_);
  next->add(std::move(doc));
  current_ = std::move(next);
  return ++revision_;
}

std::uint64_t CorpusStore::commit_annotation(std::string_view id, const AffectiveRating& rating,
                                             Provenance provenance) {
  std::lock_guard lock(mutex_);
  const auto& doc = current_->at(id);
  if (doc.annotated()) {
    throw Error(ErrorCode::conflict,
                "document '" + std::string(id) + "' was already annotated", std::string(id));
  }
  current_ = std::make_shared<const Corpus>(current_->with_annotation(id, rating, provenance));
  return ++revision_;
}

}  // namespace affectcouple
