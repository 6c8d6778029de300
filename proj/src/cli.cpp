#include "affectcouple/cli.hpp"

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <ostream>
#include <sstream>

#include <CLI11.hpp>

#include "affectcouple/analysis.hpp"
#include "affectcouple/coupling.hpp"
#include "affectcouple/error.hpp"
#include "affectcouple/estimator.hpp"
#include "affectcouple/service.hpp"
#include "affectcouple/synthetic.hpp"
#include "text.hpp"

namespace affectcouple {

namespace fs = std::filesystem;

namespace {

struct CliConfig {
  std::string corpus;
  std::string taxonomy;
  std::optional<double> eps_sem;
  std::optional<double> eps_emo;
  std::string output;
  std::uint64_t seed = 1;
};

Error usage(const std::string& msg) { return Error(ErrorCode::usage, msg); }

Taxonomy need_taxonomy(const CliConfig& cfg) {
  if (cfg.taxonomy.empty()) throw usage("--taxonomy (or AFFECTCOUPLE_TAXONOMY) is required");
  return Taxonomy::load(cfg.taxonomy);
}

Corpus need_corpus(const CliConfig& cfg) {
  if (cfg.corpus.empty()) throw usage("--corpus (or AFFECTCOUPLE_CORPUS) is required");
  return load_corpus(cfg.corpus);
}

CouplingThresholds thresholds(const CliConfig& cfg, CouplingThresholds base) {
  if (cfg.eps_sem) base.eps_sem = *cfg.eps_sem;
  if (cfg.eps_emo) base.eps_emo = *cfg.eps_emo;
  base.validate();
  return base;
}

/// Writes CSV text to --output when given.
void maybe_write(const CliConfig& cfg, const std::string& csv) {
  if (cfg.output.empty()) return;
  std::ofstream f(cfg.output, std::ios::binary | std::ios::trunc);
  if (!f) throw Error(ErrorCode::io, "cannot write '" + cfg.output + "'");
  f << csv;
}

std::string fixed(double v, int digits) {
  std::ostringstream s;
  s << std::fixed << std::setprecision(digits) << v;
  return s.str();
}

void cmd_ingest(const CliConfig& cfg, const std::string& manifest, const std::string& folders,
                const std::string& mapping, std::ostream& out) {
  auto taxonomy = need_taxonomy(cfg);
  auto target = cfg.output.empty() ? cfg.corpus : cfg.output;
  if (target.empty()) throw usage("ingest needs --output or --corpus for the result");
  std::vector<std::string> warnings;
  Corpus corpus;
  if (!manifest.empty() == !folders.empty()) {
    throw usage("give exactly one of --manifest or --folders");
  }
  if (!manifest.empty()) {
    corpus = load_manifest(manifest, taxonomy);
  } else {
    if (mapping.empty()) throw usage("--folders requires --mapping");
    auto loaded = load_folder_convention(folders, mapping, taxonomy);
    corpus = std::move(loaded.corpus);
    warnings = std::move(loaded.warnings);
  }
  corpus.set_defaults(thresholds(cfg, corpus.defaults()));
  save_corpus(corpus, target);
  auto annotated = corpus.annotated_count();
  out << "documents: " << corpus.size() << " (annotated " << annotated << ", unannotated "
      << corpus.size() - annotated << ")\n";
  for (const auto& w : warnings) out << "warning: " << w << '\n';
  out << "wrote " << target << '\n';
}

void cmd_validate(const CliConfig& cfg, std::ostream& out) {
  auto corpus = need_corpus(cfg);
  std::optional<Taxonomy> taxonomy;
  if (!cfg.taxonomy.empty()) taxonomy = Taxonomy::load(cfg.taxonomy);
  corpus.validate(taxonomy ? &*taxonomy : nullptr);
  out << "ok: " << corpus.size() << " documents, " << corpus.annotated_count() << " annotated"
      << (taxonomy ? ", all descriptors resolved" : "") << '\n';
}

void cmd_estimate(const CliConfig& cfg, const std::string& tags, std::size_t k_fallback,
                  std::ostream& out) {
  auto taxonomy = need_taxonomy(cfg);
  auto corpus = need_corpus(cfg);
  auto ecfg = EstimationConfig::from_defaults(thresholds(cfg, corpus.defaults()));
  ecfg.k_fallback = k_fallback;
  auto est = estimate(SemanticProfile::parse(tags), corpus, taxonomy, ecfg);

  out << std::left << std::setw(6) << "rank" << std::setw(9) << "val" << std::setw(9) << "ar"
      << std::setw(12) << "likelihood" << std::setw(9) << "support" << "mean_d_sem\n";
  std::ostringstream csv;
  csv << "rank,val,ar,likelihood,support,mean_semantic_distance\n";
  for (std::size_t i = 0; i < est.candidates.size(); ++i) {
    const auto& c = est.candidates[i];
    out << std::left << std::setw(6) << i + 1 << std::setw(9) << fixed(c.emotion.val, 4)
        << std::setw(9) << fixed(c.emotion.ar, 4) << std::setw(12) << fixed(c.likelihood, 4)
        << std::setw(9) << c.support.size() << fixed(c.mean_semantic_distance, 4) << '\n';
    csv << i + 1 << ',' << text::format_fixed(c.emotion.val, 6) << ','
        << text::format_fixed(c.emotion.ar, 6) << ',' << text::format_fixed(c.likelihood, 6)
        << ',' << text::csv_field(text::join(c.support, ";")) << ','
        << text::format_fixed(c.mean_semantic_distance, 6) << '\n';
  }
  if (est.fallback) out << "note: no reference within eps_sem; used nearest neighbors\n";
  out << '\n' << csv.str();
  maybe_write(cfg, csv.str());
}

std::vector<StimulusDocument> annotated_docs(const Corpus& corpus) {
  std::vector<StimulusDocument> docs;
  for (const auto& d : corpus.documents()) {
    if (d.annotated()) docs.push_back(d);
  }
  return docs;
}

void cmd_couple(const CliConfig& cfg, std::ostream& out) {
  auto taxonomy = need_taxonomy(cfg);
  auto corpus = need_corpus(cfg);
  auto th = thresholds(cfg, corpus.defaults());
  auto m = coupling_matrix(annotated_docs(corpus), taxonomy, th);
  auto clusters = clusters_from_matrix(m);
  out << "eps_sem=" << text::format_number(th.eps_sem) << " eps_emo="
      << text::format_number(th.eps_emo) << " coupled_pairs=" << m.coupled_pairs()
      << " clusters=" << clusters.size() << '\n';
  std::ostringstream csv;
  csv << "cluster,doc_id\n";
  for (std::size_t i = 0; i < clusters.size(); ++i) {
    out << "cluster " << i + 1 << " (" << clusters[i].size() << "): "
        << text::join(clusters[i], " ") << '\n';
    for (const auto& id : clusters[i]) csv << i + 1 << ',' << text::csv_field(id) << '\n';
  }
  maybe_write(cfg, csv.str());
}

std::string read_spec_argument(const std::string& spec) {
  std::error_code ec;
  if (fs::is_regular_file(spec, ec)) {
    std::ifstream in(spec);
    std::stringstream buf;
    buf << in.rdbuf();
    return buf.str();
  }
  return spec;
}

void cmd_analyze(const CliConfig& cfg, const std::string& spec, double outlier_c,
                 const std::string& scatter_path, std::ostream& out) {
  auto taxonomy = need_taxonomy(cfg);
  auto corpus = need_corpus(cfg);
  auto groups = build_groups(corpus, taxonomy, parse_group_queries(read_spec_argument(spec)));
  std::ostringstream report, scatter;
  write_group_report(groups, outlier_c, report);
  write_scatter(corpus, groups, scatter);
  out << report.str();
  maybe_write(cfg, report.str());
  if (scatter_path.empty()) {
    out << '\n' << scatter.str();
  } else {
    std::ofstream f(scatter_path, std::ios::binary | std::ios::trunc);
    if (!f) throw Error(ErrorCode::io, "cannot write '" + scatter_path + "'");
    f << scatter.str();
  }
}

void cmd_loo(const CliConfig& cfg, const std::string& truth_path, std::ostream& out) {
  auto taxonomy = need_taxonomy(cfg);
  auto corpus = need_corpus(cfg);
  auto ecfg = EstimationConfig::from_defaults(thresholds(cfg, corpus.defaults()));
  std::optional<std::map<std::string, std::string>> truth;
  if (!truth_path.empty()) {
    std::ifstream in(truth_path);
    if (!in) throw Error(ErrorCode::io, "cannot read '" + truth_path + "'");
    truth = read_ground_truth(in);
  }
  auto report = leave_one_out(corpus, taxonomy, ecfg, truth ? &*truth : nullptr);
  std::ostringstream csv;
  write_loo_csv(report, csv);
  out << csv.str() << '\n';
  write_loo_summary(report, out);
  maybe_write(cfg, csv.str());
}

void cmd_gen_synth(const CliConfig& cfg, const std::string& spec_path, std::ostream& out) {
  auto taxonomy = need_taxonomy(cfg);
  auto target = cfg.output.empty() ? cfg.corpus : cfg.output;
  if (target.empty()) throw usage("gen-synth needs --output or --corpus");
  auto spec = SyntheticSpec::load(spec_path);
  spec.defaults = thresholds(cfg, spec.defaults);
  auto synth = generate_synthetic(spec, taxonomy, cfg.seed);
  save_corpus(synth.corpus, target);
  auto truth_path = target + ".truth.csv";
  std::ofstream truth(truth_path, std::ios::binary | std::ios::trunc);
  if (!truth) throw Error(ErrorCode::io, "cannot write '" + truth_path + "'");
  write_ground_truth(synth.ground_truth, truth);
  out << "documents: " << synth.corpus.size() << " groups: " << spec.groups.size() << " seed: "
      << cfg.seed << '\n'
      << "wrote " << target << " and " << truth_path << '\n';
}

void cmd_serve(const CliConfig& cfg, const std::string& addr, std::ostream& out) {
  auto colon = addr.rfind(':');
  auto port = colon == std::string::npos ? std::nullopt : text::parse_int(addr.substr(colon + 1));
  if (!port || *port <= 0 || *port > 65535) throw usage("--addr must be host:port");
  auto host = addr.substr(0, colon);
  Api api(need_taxonomy(cfg), need_corpus(cfg));
  out << "serving on " << host << ':' << *port << std::endl;
  if (!serve(api, host, static_cast<int>(*port))) {
    throw Error(ErrorCode::io, "cannot listen on " + addr);
  }
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Semantic-affective coupling engine for emotionally annotated databases",
               "affectcouple"};
  app.require_subcommand(1);
  app.fallthrough();

  CliConfig cfg;
  app.add_option("--corpus", cfg.corpus, "Corpus file")->envname("AFFECTCOUPLE_CORPUS");
  app.add_option("--taxonomy", cfg.taxonomy, "Taxonomy file")->envname("AFFECTCOUPLE_TAXONOMY");
  app.add_option("--eps-sem", cfg.eps_sem, "Semantic neighborhood radius")
      ->check(CLI::PositiveNumber);
  app.add_option("--eps-emo", cfg.eps_emo, "Emotion neighborhood radius")
      ->check(CLI::PositiveNumber);
  app.add_option("--output,-o", cfg.output, "Output path");
  app.add_option("--seed", cfg.seed, "Random seed");

  std::string manifest, folders, mapping;
  auto* ingest = app.add_subcommand("ingest", "Load a manifest or folder database and save a corpus");
  ingest->add_option("--manifest", manifest, "Manifest CSV");
  ingest->add_option("--folders", folders, "Root of a folder-named database");
  ingest->add_option("--mapping", mapping, "Folder mapping sidecar");

  auto* validate = app.add_subcommand("validate", "Re-check every corpus invariant");

  std::string tags;
  std::size_t k_fallback = 5;
  auto* est = app.add_subcommand("estimate", "Rank candidate annotations for a tag set");
  est->add_option("--tags", tags, "Descriptors, ';'-separated")->required();
  est->add_option("--k-fallback", k_fallback, "Neighbors used when none is within eps_sem")
      ->check(CLI::PositiveNumber);

  auto* couple_cmd = app.add_subcommand("couple", "Print coupled clusters");

  std::string group_spec, scatter_path;
  double outlier_c = 2.0;
  auto* analyze = app.add_subcommand("analyze", "Tag-cloud group report and scatter data");
  analyze->add_option("--groups", group_spec, "name=tag;tag|name=tag, or a file of such lines")
      ->required();
  analyze->add_option("--outlier-c", outlier_c, "Outlier threshold multiplier")
      ->check(CLI::PositiveNumber);
  analyze->add_option("--scatter", scatter_path, "Scatter CSV output path");

  std::string truth_path;
  auto* loo = app.add_subcommand("loo-eval", "Leave-one-out evaluation");
  loo->add_option("--truth", truth_path, "Ground-truth groups CSV for per-group breakdown");

  std::string synth_spec;
  auto* gen = app.add_subcommand("gen-synth", "Generate a synthetic corpus");
  gen->add_option("--spec", synth_spec, "Synthetic spec JSON")->required();

  std::string addr = "127.0.0.1:8080";
  auto* serve_cmd = app.add_subcommand("serve", "Run the JSON API");
  serve_cmd->add_option("--addr", addr, "host:port")->envname("AFFECTCOUPLE_ADDR");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return 0;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return 0;
  } catch (const CLI::ParseError& e) {
    err << "error[USAGE]: " << e.what() << '\n';
    return 2;
  }

  try {
    if (*ingest) cmd_ingest(cfg, manifest, folders, mapping, out);
    else if (*validate) cmd_validate(cfg, out);
    else if (*est) cmd_estimate(cfg, tags, k_fallback, out);
    else if (*couple_cmd) cmd_couple(cfg, out);
    else if (*analyze) cmd_analyze(cfg, group_spec, outlier_c, scatter_path, out);
    else if (*loo) cmd_loo(cfg, truth_path, out);
    else if (*gen) cmd_gen_synth(cfg, synth_spec, out);
    else if (*serve_cmd) cmd_serve(cfg, addr, out);
  } catch (const Error& e) {
    err << "error[" << to_string(e.code()) << "]: " << e.what() << '\n';
    return e.code() == ErrorCode::usage ? 2 : 1;
  } catch (const std::exception& e) {
    err << "error[INTERNAL]: " << e.what() << '\n';
    return 1;
  }
  return 0;
}

}  // namespace affectcouple
