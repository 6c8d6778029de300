#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

#include "affectcouple/corpus.hpp"
#include "affectcouple/error.hpp"
#include "affectcouple/synthetic.hpp"
#include "support.hpp"

using namespace affectcouple;
namespace fs = std::filesystem;

namespace {

Taxonomy flower_taxonomy() {
  return Taxonomy::from_edges({{"flower", "nature"}, {"nature", "entity"}, {"snake", "animal"},
                               {"animal", "entity"}});
}

Error manifest_error(const std::string& body) {
  std::istringstream in(std::string(kManifestHeader) + "\n" + body);
  try {
    parse_manifest(in, flower_taxonomy());
  } catch (const Error& e) {
    return e;
  }
  FAIL("manifest unexpectedly accepted");
  return Error(ErrorCode::validation, "");
}

fs::path temp_dir(const std::string& name) {
  auto dir = fs::temp_directory_path() / ("affectcouple-" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

}  // namespace

TEST_CASE("manifest row parses into a document") {
  std::istringstream in(std::string(kManifestHeader) +
                        "\n5200,stimuli/5200.jpg,flower;nature,7.20,1.10,3.10,1.90\n");
  auto c = parse_manifest(in, flower_taxonomy());
  REQUIRE(c.size() == 1);
  const auto& d = c.at("5200");
  CHECK(d.uri == "stimuli/5200.jpg");
  CHECK(d.profile.terms() == std::vector<std::string>{"flower", "nature"});
  CHECK(d.rating->val_mean == 7.2);
  CHECK(d.rating->val_sd == 1.1);
  CHECK(d.rating->ar_mean == 3.1);
  CHECK(d.rating->ar_sd == 1.9);
  CHECK(d.provenance == Provenance::manifest);
}

TEST_CASE("manifest with dominance and unannotated rows") {
  std::istringstream in(std::string(kManifestHeaderWithDominance) +
                        "\na,x/a.jpg,flower,7,1,3,1,5.5,0.5\n"
                        "b,x/b.jpg,snake,,,,,,\n");
  auto c = parse_manifest(in, flower_taxonomy());
  CHECK(*c.at("a").rating->dom_mean == 5.5);
  CHECK_FALSE(c.at("b").annotated());
  CHECK(c.annotated_count() == 1);
}

TEST_CASE("manifest errors cite line and field") {
  SUBCASE("range") {
    auto e = manifest_error("1,u,flower,9.5,1,3,1\n");
    CHECK(e.code() == ErrorCode::range);
    CHECK(std::string(e.what()) == "line 2: val_mean out of [1,9]");
    CHECK(e.detail() == "val_mean");
  }
  SUBCASE("empty profile") {
    auto e = manifest_error("1,u,,5,1,3,1\n");
    CHECK(e.code() == ErrorCode::validation);
    CHECK(std::string(e.what()).find("empty semantic profile") != std::string::npos);
  }
  SUBCASE("column count") {
    auto e = manifest_error("1,u,flower,5,1,3\n");
    CHECK(e.code() == ErrorCode::parse);
    CHECK(std::string(e.what()).find("line 2") != std::string::npos);
  }
  SUBCASE("unparsable number") {
    auto e = manifest_error("1,u,flower,5,1,abc,1\n");
    CHECK(e.code() == ErrorCode::parse);
    CHECK(e.detail() == "ar_mean");
  }
  SUBCASE("negative SD") {
    auto e = manifest_error("1,u,flower,5,-1,3,1\n");
    CHECK(e.code() == ErrorCode::range);
  }
  SUBCASE("duplicate id names both lines") {
    auto e = manifest_error("1,u,flower,5,1,3,1\n1,v,flower,5,1,3,1\n");
    CHECK(e.code() == ErrorCode::duplicate);
    CHECK(std::string(e.what()).find("line 3") != std::string::npos);
    CHECK(std::string(e.what()).find("line 2") != std::string::npos);
  }
  SUBCASE("unknown tag names the row and term") {
    auto e = manifest_error("1,u,flower,5,1,3,1\n2,u,unicorn,5,1,3,1\n");
    CHECK(e.code() == ErrorCode::lookup);
    CHECK(e.detail() == "unicorn");
    CHECK(std::string(e.what()).find("line 3") != std::string::npos);
  }
  SUBCASE("partial rating") {
    auto e = manifest_error("1,u,flower,5,,3,1\n");
    CHECK(e.code() == ErrorCode::validation);
  }
  SUBCASE("header") {
    std::istringstream in("id,uri,tags\n");
    CHECK_THROWS_AS(parse_manifest(in, flower_taxonomy()), Error);
  }
}

TEST_CASE("manifest export reads back") {
  Corpus c("demo");
  c.add(testing_support::make_doc("a,1", {"flower"}, std::pair{7.123456, 3.5}));
  c.add(testing_support::make_doc("b", {"snake", "animal"}, std::nullopt));
  std::stringstream buf;
  write_manifest(c, buf);
  auto back = parse_manifest(buf, flower_taxonomy());
  CHECK(back.size() == 2);
  CHECK(back.at("a,1").rating->val_mean == 7.123456);
  CHECK_FALSE(back.at("b").annotated());
}

TEST_CASE("folder convention") {
  auto root = temp_dir("folders");
  fs::create_directories(root / "Snakes");
  fs::create_directories(root / "Unknown");
  for (auto f : {"Sn001.bmp", "Sn002.bmp", "Sn003.bmp"}) std::ofstream(root / "Snakes" / f) << "x";
  std::ofstream(root / "Unknown" / "U1.bmp") << "x";
  auto mapping = root.parent_path() / "affectcouple-mapping.txt";
  std::ofstream(mapping) << "# sidecar\nSnakes -> snake;animal @ 2.5,1.0,6.0,1.0\n";

  auto t = flower_taxonomy();
  auto r = load_folder_convention(root, mapping, t);
  REQUIRE(r.corpus.size() == 3);
  for (const auto& d : r.corpus.documents()) {
    CHECK(d.profile.terms() == std::vector<std::string>{"animal", "snake"});
    CHECK(d.rating->val_mean == 2.5);
    CHECK(d.rating->ar_mean == 6.0);
    CHECK(d.provenance == Provenance::folder_convention);
  }
  CHECK(r.corpus.at("Sn002.bmp").uri == "Snakes/Sn002.bmp");
  REQUIRE(r.warnings.size() == 1);
  CHECK(r.warnings[0] == "unmapped folder: Unknown");

  SUBCASE("empty root") {
    auto empty = temp_dir("folders-empty");
    auto e = load_folder_convention(empty, mapping, t);
    CHECK(e.corpus.empty());
  }
  SUBCASE("missing root") {
    CHECK_THROWS_AS(load_folder_convention(root / "nope", mapping, t), Error);
  }
}

TEST_CASE("folder convention at full database scale") {
  auto root = temp_dir("large");
  auto mapping = root.parent_path() / "affectcouple-large-mapping.txt";
  std::ofstream m(mapping);
  // 730 files, largest folder 159.
  std::vector<std::pair<std::string, int>> folders{{"A", 159}, {"H", 150}, {"N", 140},
                                                   {"P", 121}, {"Sn", 80}, {"Sp", 80}};
  int total = 0;
  for (const auto& [name, count] : folders) {
    fs::create_directories(root / name);
    for (int i = 0; i < count; ++i) std::ofstream(root / name / (name + std::to_string(i) + ".bmp"));
    m << name << " -> flower\n";
    total += count;
  }
  m.close();
  REQUIRE(total == 730);
  auto r = load_folder_convention(root, mapping, flower_taxonomy());
  CHECK(r.corpus.size() == 730);
  CHECK(r.warnings.empty());
}

TEST_CASE("corpus persistence") {
  SUBCASE("empty corpus round-trips") {
    Corpus c("tax", {2.5, 1.25});
    std::stringstream buf;
    write_corpus(c, buf);
    CHECK(read_corpus(buf) == c);
  }
  SUBCASE("unknown version") {
    std::istringstream in("affectcouple-corpus v2\n");
    try {
      read_corpus(in);
      FAIL("expected version error");
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::version);
    }
  }
  SUBCASE("not a corpus") {
    std::istringstream in("hello\n");
    CHECK_THROWS_AS(read_corpus(in), Error);
  }
  SUBCASE("tampered rating is rejected") {
    Corpus c("tax");
    c.add(testing_support::make_doc("a", {"flower"}, std::pair{5.0, 5.0}));
    std::stringstream buf;
    write_corpus(c, buf);
    auto text = buf.str();
    text.replace(text.find(",5,1,5,1"), 8, ",0.5,1,5,1");
    std::istringstream in(text);
    try {
      read_corpus(in);
      FAIL("expected range error");
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::range);
    }
  }
  SUBCASE("random corpora round-trip exactly") {
    std::mt19937_64 rng(99);
    std::uniform_real_distribution<double> coord(1.0, 9.0), sd(0.0, 3.0);
    Corpus c("tax", {1.7, 0.9});
    for (int i = 0; i < 300; ++i) {
      StimulusDocument d;
      d.id = "doc \"" + std::to_string(i) + "\", x";
      d.uri = "media/" + std::to_string(i) + ".jpg";
      d.profile = SemanticProfile::from_terms({i % 2 ? "flower" : "snake", "nature"});
      if (i % 5) {
        AffectiveRating r{coord(rng), sd(rng), coord(rng), sd(rng), std::nullopt, std::nullopt};
        if (i % 3 == 0) {
          r.dom_mean = coord(rng);
          r.dom_sd = sd(rng);
        }
        d.rating = r;
        d.provenance = i % 7 == 0 ? Provenance::estimated : Provenance::manifest;
      } else {
        d.provenance = Provenance::folder_convention;
      }
      c.add(d);
    }
    auto path = fs::temp_directory_path() / "affectcouple-roundtrip.affc";
    save_corpus(c, path);
    CHECK(load_corpus(path) == c);
  }
}

TEST_CASE("corpus invariants") {
  Corpus c("tax");
  auto d = testing_support::make_doc("a", {"flower"}, std::nullopt);
  d.provenance = Provenance::estimated;
  CHECK_THROWS_AS(c.add(d), Error);
  d.provenance = Provenance::manifest;
  c.add(d);
  CHECK_THROWS_AS(c.add(d), Error);
  CHECK_THROWS_AS(c.at("missing"), Error);
  auto next = c.with_annotation("a", {6, 1, 4, 1, std::nullopt, std::nullopt}, Provenance::manual);
  CHECK(next.at("a").annotated());
  CHECK_FALSE(c.at("a").annotated());

  auto bad = testing_support::make_doc("b", {"unicorn"}, std::nullopt);
  c.add(bad);
  CHECK_THROWS_AS(c.validate(new Taxonomy(flower_taxonomy())), Error);
}

TEST_CASE("corpus store serializes writers") {
  Corpus c("tax");
  c.add(testing_support::make_doc("a", {"flower"}, std::nullopt));
  c.add(testing_support::make_doc("b", {"flower"}, std::nullopt));
  CorpusStore store(c);
  auto before = store.snapshot();
  AffectiveRating r{6, 1, 4, 1, std::nullopt, std::nullopt};
  CHECK(store.commit_annotation("a", r, Provenance::estimated) == 2);
  CHECK(store.commit_annotation("b", r, Provenance::manual) == 3);
  CHECK_FALSE(before->at("a").annotated());
  CHECK(store.snapshot()->annotated_count() == 2);
  try {
    store.commit_annotation("a", r, Provenance::manual);
    FAIL("expected conflict");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::conflict);
  }
}

TEST_CASE("synthetic generation") {
  auto t = Taxonomy::from_edges({{"food", "entity"},   {"cake", "food"},     {"beer", "food"},
                                 {"nature", "entity"}, {"cave", "nature"},   {"sunset", "nature"},
                                 {"sports", "entity"}, {"rafting", "sports"}});
  SyntheticSpec spec;
  spec.groups = {{"food", "food", 6.5, 4.5, 0.0, 35, 1.0},
                 {"nature", "nature", 7.2, 2.5, 0.0, 24, 1.0},
                 {"sports", "sports", 6.8, 7.2, 0.0, 13, 1.0}};
  auto s = generate_synthetic(spec, t, 42);
  CHECK(s.corpus.size() == 72);
  CHECK(s.ground_truth.size() == 72);
  for (const auto& d : s.corpus.documents()) {
    const auto& g = s.ground_truth.at(d.id);
    auto pool = t.subtree(g);
    CHECK(d.profile.size() >= 1);
    CHECK(d.profile.size() <= 4);
    for (const auto& term : d.profile.terms()) {
      CHECK(std::find(pool.begin(), pool.end(), term) != pool.end());
    }
    for (const auto& group : spec.groups) {
      if (group.name == g) {
        CHECK(d.rating->val_mean == group.centroid_val);
        CHECK(d.rating->ar_mean == group.centroid_ar);
      }
    }
  }

  SUBCASE("determinism") {
    for (auto& g : spec.groups) g.noise_sd = 1.5;
    auto a = generate_synthetic(spec, t, 7);
    auto b = generate_synthetic(spec, t, 7);
    CHECK(a.corpus == b.corpus);
    CHECK(a.ground_truth == b.ground_truth);
    auto c = generate_synthetic(spec, t, 8);
    CHECK_FALSE(a.corpus == c.corpus);
    for (const auto& d : a.corpus.documents()) {
      CHECK(in_rating_range(d.rating->val_mean));
      CHECK(in_rating_range(d.rating->ar_mean));
    }
  }
  SUBCASE("errors") {
    spec.groups[0].centroid_val = 9.5;
    CHECK_THROWS_AS(generate_synthetic(spec, t, 1), Error);
    spec.groups[0].centroid_val = 6.5;
    spec.groups[0].subtree = "nothing";
    CHECK_THROWS_AS(generate_synthetic(spec, t, 1), Error);
  }
  SUBCASE("json spec and ground truth file") {
    auto parsed = SyntheticSpec::from_json(
        R"({"groups": [{"name": "food", "subtree": "food", "centroid": [6.5, 4.5], "noise_sd": 0.2, "count": 3}]})");
    REQUIRE(parsed.groups.size() == 1);
    CHECK(parsed.groups[0].count == 3);
    CHECK_THROWS_AS(SyntheticSpec::from_json(R"({"groups": [{"name": "x"}]})"), Error);
    std::stringstream buf;
    write_ground_truth(s.ground_truth, buf);
    CHECK(read_ground_truth(buf) == s.ground_truth);
  }
}
