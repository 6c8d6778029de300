#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include <sstream>

#include "affectcouple/analysis.hpp"
#include "affectcouple/corpus.hpp"
#include "affectcouple/coupling.hpp"
#include "affectcouple/error.hpp"
#include "affectcouple/estimator.hpp"
#include "affectcouple/session.hpp"
#include "affectcouple/synthetic.hpp"

namespace py = pybind11;
using namespace affectcouple;

namespace {

py::dict candidate_dict(const CandidateAnnotation& c) {
  py::dict d;
  d["val"] = c.emotion.val;
  d["ar"] = c.emotion.ar;
  d["likelihood"] = c.likelihood;
  d["support"] = c.support;
  d["mean_semantic_distance"] = c.mean_semantic_distance;
  d["val_spread"] = c.val_spread;
  d["ar_spread"] = c.ar_spread;
  return d;
}

py::dict document_dict(const StimulusDocument& doc) {
  py::dict d;
  d["id"] = doc.id;
  d["uri"] = doc.uri;
  d["tags"] = doc.profile.terms();
  d["provenance"] = std::string(to_string(doc.provenance));
  if (doc.rating) {
    d["val"] = doc.rating->val_mean;
    d["ar"] = doc.rating->ar_mean;
  } else {
    d["val"] = py::none();
    d["ar"] = py::none();
  }
  return d;
}

EstimationConfig make_config(double eps_sem, double eps_emo, std::size_t k_fallback,
                             std::size_t min_support, const std::string& mass) {
  EstimationConfig cfg;
  cfg.eps_sem = eps_sem;
  cfg.eps_emo = eps_emo;
  cfg.k_fallback = k_fallback;
  cfg.min_support = min_support;
  if (mass == "similarity") cfg.mass = LikelihoodMass::similarity;
  else if (mass != "count") throw Error(ErrorCode::validation, "mass must be 'count' or 'similarity'");
  return cfg;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Semantic-affective coupling engine";

  // Leaked so the type outlives interpreter teardown.
  static auto* error_type = new py::exception<Error>(m, "AffectcoupleError", PyExc_ValueError);
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const Error& e) {
      py::object exc = py::handle(error_type->ptr())(e.what());
      exc.attr("code") = std::string(to_string(e.code()));
      exc.attr("detail") = e.detail();
      PyErr_SetObject(error_type->ptr(), exc.ptr());
    }
  });

  m.def("emotion_distance",
        [](double v1, double a1, double v2, double a2) {
          return emotion_distance({v1, a1, std::nullopt}, {v2, a2, std::nullopt});
        },
        py::arg("val1"), py::arg("ar1"), py::arg("val2"), py::arg("ar2"));

  py::class_<Taxonomy>(m, "Taxonomy")
      .def_static("load", &Taxonomy::load, py::arg("path"))
      .def_static("from_edges",
                  [](const std::vector<std::pair<std::string, std::string>>& edges,
                     const std::string& root) {
                    std::vector<Taxonomy::Edge> e(edges.begin(), edges.end());
                    return Taxonomy::from_edges(e, root);
                  },
                  py::arg("edges"), py::arg("root") = "entity")
      .def_static("parse",
                  [](const std::string& text, const std::string& name) {
                    std::istringstream in(text);
                    return Taxonomy::parse(in, name);
                  },
                  py::arg("text"), py::arg("name") = "taxonomy")
      .def_property_readonly("name", &Taxonomy::name)
      .def_property_readonly("root", &Taxonomy::root)
      .def("__len__", &Taxonomy::size)
      .def("__contains__", [](const Taxonomy& t, const std::string& s) { return t.contains(s); })
      .def("path_length",
           [](const Taxonomy& t, const std::string& a, const std::string& b) {
             return t.path_length(a, b);
           })
      .def("term_similarity",
           [](const Taxonomy& t, const std::string& a, const std::string& b) {
             return term_similarity(a, b, t);
           })
      .def("profile_similarity",
           [](const Taxonomy& t, const std::vector<std::string>& a, const std::vector<std::string>& b) {
             return profile_similarity(SemanticProfile::from_terms(a), SemanticProfile::from_terms(b), t);
           })
      .def("semantic_distance",
           [](const Taxonomy& t, const std::vector<std::string>& a, const std::vector<std::string>& b) {
             return semantic_distance(SemanticProfile::from_terms(a), SemanticProfile::from_terms(b), t);
           });

  py::class_<Corpus>(m, "Corpus")
      .def_static("load", &load_corpus, py::arg("path"))
      .def_static("from_manifest", &load_manifest, py::arg("path"), py::arg("taxonomy"))
      .def("save", [](const Corpus& c, const std::filesystem::path& p) { save_corpus(c, p); })
      .def("__len__", &Corpus::size)
      .def_property_readonly("annotated_count", &Corpus::annotated_count)
      .def_property_readonly("taxonomy_ref", &Corpus::taxonomy_ref)
      .def("documents",
           [](const Corpus& c) {
             py::list out;
             for (const auto& d : c.documents()) out.append(document_dict(d));
             return out;
           })
      .def("document", [](const Corpus& c, const std::string& id) { return document_dict(c.at(id)); })
      .def("__eq__", [](const Corpus& a, const Corpus& b) { return a == b; });

  m.def("generate_synthetic",
        [](const std::string& spec_json, const Taxonomy& t, std::uint64_t seed) {
          auto s = generate_synthetic(SyntheticSpec::from_json(spec_json), t, seed);
          return py::make_tuple(std::move(s.corpus), s.ground_truth);
        },
        py::arg("spec_json"), py::arg("taxonomy"), py::arg("seed"));

  m.def("estimate",
        [](const std::vector<std::string>& tags, const Corpus& c, const Taxonomy& t, double eps_sem,
           double eps_emo, std::size_t k_fallback, std::size_t min_support, const std::string& mass) {
          auto e = estimate(SemanticProfile::from_terms(tags), c, t,
                            make_config(eps_sem, eps_emo, k_fallback, min_support, mass));
          py::list out;
          for (const auto& cand : e.candidates) out.append(candidate_dict(cand));
          return out;
        },
        py::arg("tags"), py::arg("corpus"), py::arg("taxonomy"), py::arg("eps_sem") = 2.0,
        py::arg("eps_emo") = 1.5, py::arg("k_fallback") = 5, py::arg("min_support") = 1,
        py::arg("mass") = "count");

  m.def("coupled_clusters",
        [](const Corpus& c, const Taxonomy& t, double eps_sem, double eps_emo) {
          std::vector<StimulusDocument> docs;
          for (const auto& d : c.documents()) {
            if (d.annotated()) docs.push_back(d);
          }
          return coupled_clusters(docs, t, {eps_sem, eps_emo});
        },
        py::arg("corpus"), py::arg("taxonomy"), py::arg("eps_sem"), py::arg("eps_emo"));

  m.def("leave_one_out",
        [](const Corpus& c, const Taxonomy& t, double eps_sem, double eps_emo) {
          auto r = leave_one_out(c, t, make_config(eps_sem, eps_emo, 5, 1, "count"));
          py::dict d;
          d["count"] = r.overall.count;
          d["mean_top1_error"] = r.overall.mean_top1_error;
          d["median_top1_error"] = r.overall.median_top1_error;
          d["hit_at_1"] = r.overall.hit_at_1;
          d["hit_at_3"] = r.overall.hit_at_3;
          return d;
        },
        py::arg("corpus"), py::arg("taxonomy"), py::arg("eps_sem") = 2.0, py::arg("eps_emo") = 1.5);

  m.def("build_groups",
        [](const Corpus& c, const Taxonomy& t, const std::string& spec) {
          py::list out;
          for (const auto& g : build_groups(c, t, parse_group_queries(spec))) {
            py::dict d;
            d["name"] = g.name;
            d["members"] = g.member_ids();
            if (g.centroid) d["centroid"] = py::make_tuple(g.centroid->val, g.centroid->ar);
            else d["centroid"] = py::none();
            d["sd_val"] = g.sd_val;
            d["sd_ar"] = g.sd_ar;
            py::list outliers;
            if (g.members.size() >= 3) {
              for (const auto& o : group_outliers(g, 2.0)) outliers.append(o.id);
            }
            d["outliers_c2"] = outliers;
            out.append(d);
          }
          return out;
        },
        py::arg("corpus"), py::arg("taxonomy"), py::arg("spec"));

  py::class_<AnnotationSession>(m, "Session")
      .def_property_readonly("state", [](const AnnotationSession& s) { return std::string(to_string(s.state)); })
      .def_property_readonly("candidates",
                             [](const AnnotationSession& s) {
                               py::list out;
                               for (const auto& c : s.candidates) out.append(candidate_dict(c));
                               return out;
                             })
      .def_property_readonly("target", [](const AnnotationSession& s) { return document_dict(s.target); })
      .def_property_readonly("seq", &AnnotationSession::seq)
      .def("accept", [](const AnnotationSession& s, std::size_t i) { return apply_feedback(s, FeedbackEvent::accept(i)); })
      .def("reject", [](const AnnotationSession& s, std::size_t i) { return apply_feedback(s, FeedbackEvent::reject(i)); })
      .def("adjust", [](const AnnotationSession& s, double v, double a) { return apply_feedback(s, FeedbackEvent::adjust(v, a)); })
      .def("abandon", [](const AnnotationSession& s) { return apply_feedback(s, FeedbackEvent::abandon()); });

  m.def("open_session",
        [](const std::string& doc_id, const Corpus& c, const Taxonomy& t, double eps_sem, double eps_emo) {
          return open_session(c.at(doc_id), c, t, make_config(eps_sem, eps_emo, 5, 1, "count"), doc_id);
        },
        py::arg("document_id"), py::arg("corpus"), py::arg("taxonomy"), py::arg("eps_sem") = 2.0,
        py::arg("eps_emo") = 1.5);
}
