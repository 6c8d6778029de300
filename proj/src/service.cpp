#include "affectcouple/service.hpp"

#include <algorithm>
#include <set>
#include <sstream>

#include <httplib.h>

#include "affectcouple/analysis.hpp"
#include "affectcouple/coupling.hpp"
#include "text.hpp"

namespace affectcouple {

using nlohmann::json;

int http_status(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::range:
    case ErrorCode::validation:
    case ErrorCode::parse:
    case ErrorCode::usage: return 400;
    case ErrorCode::not_found: return 404;
    case ErrorCode::session_closed:
    case ErrorCode::conflict:
    case ErrorCode::duplicate: return 409;
    case ErrorCode::lookup:
    case ErrorCode::no_reference: return 422;
    case ErrorCode::version:
    case ErrorCode::io: return 500;
  }
  return 500;
}

json api_error(const Error& e) {
  json err = {{"code", to_string(e.code())}, {"message", e.what()}};
  err["detail"] = e.detail().empty() ? json(nullptr) : json(e.detail());
  return {{"error", err}};
}

json to_json(const StimulusDocument& doc) {
  json j = {{"id", doc.id},
            {"uri", doc.uri},
            {"tags", doc.profile.terms()},
            {"provenance", to_string(doc.provenance)}};
  if (doc.rating) {
    const auto& r = *doc.rating;
    json rating = {{"val_mean", r.val_mean}, {"val_sd", r.val_sd},
                   {"ar_mean", r.ar_mean},   {"ar_sd", r.ar_sd}};
    if (r.dom_mean) rating["dom_mean"] = *r.dom_mean;
    if (r.dom_sd) rating["dom_sd"] = *r.dom_sd;
    j["rating"] = rating;
  } else {
    j["rating"] = nullptr;
  }
  return j;
}

json to_json(const CandidateAnnotation& c) {
  return {{"emotion", {{"val", c.emotion.val}, {"ar", c.emotion.ar}}},
          {"likelihood", c.likelihood},
          {"support", c.support},
          {"mean_semantic_distance", c.mean_semantic_distance},
          {"val_spread", c.val_spread},
          {"ar_spread", c.ar_spread}};
}

json to_json(const Estimate& e) {
  json candidates = json::array();
  for (const auto& c : e.candidates) candidates.push_back(to_json(c));
  return {{"candidates", candidates},
          {"fallback", e.fallback},
          {"neighbor_count", e.neighbor_count}};
}

json to_json(const AnnotationSession& s) {
  json candidates = json::array();
  for (const auto& c : s.candidates) candidates.push_back(to_json(c));
  json history = json::array();
  for (const auto& h : s.history) {
    json ev = {{"seq", h.seq}, {"action", to_string(h.event.action)}};
    using A = FeedbackEvent::Action;
    if (h.event.action == A::accept || h.event.action == A::reject) ev["index"] = h.event.index;
    if (h.event.action == A::adjust) {
      ev["val"] = h.event.val;
      ev["ar"] = h.event.ar;
    }
    history.push_back(ev);
  }
  return {{"session_id", s.session_id},
          {"target", to_json(s.target)},
          {"candidates", candidates},
          {"state", to_string(s.state)},
          {"history", history},
          {"seq", s.seq()},
          {"fallback", s.fallback},
          {"corpus_revision", s.corpus_revision}};
}

namespace {

json parse_body(const std::string& body) {
  if (text::trim(body).empty()) return json::object();
  try {
    auto j = json::parse(body);
    if (!j.is_object()) throw Error(ErrorCode::validation, "request body must be a JSON object");
    return j;
  } catch (const json::parse_error& e) {
    throw Error(ErrorCode::parse, std::string("malformed JSON: ") + e.what(), "body");
  }
}

double number_field(const json& body, const char* field) {
  if (!body.contains(field)) {
    throw Error(ErrorCode::validation, std::string("missing field '") + field + "'", field);
  }
  const auto& v = body[field];
  if (!v.is_number()) {
    throw Error(ErrorCode::validation, std::string("field '") + field + "' must be a number", field);
  }
  return v.get<double>();
}

std::string string_field(const json& body, const char* field) {
  if (!body.contains(field) || !body[field].is_string()) {
    throw Error(ErrorCode::validation, std::string("missing string field '") + field + "'", field);
  }
  return body[field].get<std::string>();
}

SemanticProfile tags_field(const json& body) {
  if (!body.contains("tags")) throw Error(ErrorCode::validation, "missing field 'tags'", "tags");
  const auto& t = body["tags"];
  if (t.is_string()) return SemanticProfile::parse(t.get<std::string>());
  if (t.is_array() && std::all_of(t.begin(), t.end(), [](const json& x) { return x.is_string(); })) {
    return SemanticProfile::from_terms(t.get<std::vector<std::string>>());
  }
  throw Error(ErrorCode::validation, "'tags' must be a string or an array of strings", "tags");
}

std::optional<double> query_number(const ApiRequest& r, const std::string& key) {
  auto it = r.query.find(key);
  if (it == r.query.end() || it->second.empty()) return std::nullopt;
  auto v = text::parse_double(it->second);
  if (!v) throw Error(ErrorCode::validation, "query '" + key + "' must be a number", key);
  return v;
}

std::vector<std::string> split_path(const std::string& path) {
  std::vector<std::string> parts;
  for (auto& p : text::split(path, '/')) {
    if (!p.empty()) parts.push_back(std::move(p));
  }
  return parts;
}

}  // namespace

Api::Api(Taxonomy taxonomy, Corpus corpus)
    : taxonomy_(std::move(taxonomy)), store_((corpus.validate(&taxonomy_), std::move(corpus))) {}

EstimationConfig Api::config(const json* overrides) const {
  auto cfg = EstimationConfig::from_defaults(store_.snapshot()->defaults());
  if (overrides && !overrides->is_null()) {
    if (!overrides->is_object()) throw Error(ErrorCode::validation, "'config' must be an object", "config");
    const auto& o = *overrides;
    if (o.contains("eps_sem")) cfg.eps_sem = number_field(o, "eps_sem");
    if (o.contains("eps_emo")) cfg.eps_emo = number_field(o, "eps_emo");
    if (o.contains("k_fallback")) cfg.k_fallback = static_cast<std::size_t>(number_field(o, "k_fallback"));
    if (o.contains("min_support")) cfg.min_support = static_cast<std::size_t>(number_field(o, "min_support"));
    if (o.contains("include_estimated")) cfg.include_estimated = o["include_estimated"].get<bool>();
    if (o.contains("mass")) {
      auto m = string_field(o, "mass");
      if (m == "count") cfg.mass = LikelihoodMass::count;
      else if (m == "similarity") cfg.mass = LikelihoodMass::similarity;
      else throw Error(ErrorCode::validation, "mass must be 'count' or 'similarity'", "mass");
    }
  }
  cfg.validate();
  return cfg;
}

ApiResponse Api::handle(const ApiRequest& r) {
  try {
    auto parts = split_path(r.path);
    const bool get = r.method == "GET";
    const bool post = r.method == "POST";
    auto n = parts.size();
    if (n == 1 && parts[0] == "corpus" && get) return get_corpus();
    if (n == 1 && parts[0] == "documents") {
      if (get) return get_documents(r);
      if (post) return post_document(parse_body(r.body));
    }
    if (n == 3 && parts[0] == "documents" && parts[2] == "annotation" && post) {
      return post_annotation(parts[1], parse_body(r.body));
    }
    if (n == 1 && parts[0] == "estimate" && post) return post_estimate(parse_body(r.body));
    if (n == 1 && parts[0] == "sessions" && post) return post_session(parse_body(r.body));
    if (n == 2 && parts[0] == "sessions" && get) return get_session(parts[1]);
    if (n == 3 && parts[0] == "sessions" && parts[2] == "feedback" && post) {
      return post_feedback(parts[1], parse_body(r.body));
    }
    if (n == 2 && parts[0] == "analysis" && parts[1] == "groups" && get) return get_groups(r);
    if (n == 2 && parts[0] == "analysis" && parts[1] == "coupling" && get) return get_coupling(r);
    if (n == 1 && parts[0] == "scatter" && get) return get_scatter(r);
    throw Error(ErrorCode::not_found, "no route for " + r.method + " " + r.path, r.path);
  } catch (const Error& e) {
    return {http_status(e.code()), api_error(e)};
  } catch (const json::exception& e) {
    Error err(ErrorCode::validation, std::string("bad JSON value: ") + e.what());
    return {400, api_error(err)};
  }
}

ApiResponse Api::get_corpus() {
  auto snap = store_.snapshot();
  auto annotated = snap->annotated_count();
  return {200,
          {{"taxonomy", snap->taxonomy_ref()},
           {"documents", snap->size()},
           {"annotated", annotated},
           {"unannotated", snap->size() - annotated},
           {"revision", store_.revision()},
           {"defaults", {{"eps_sem", snap->defaults().eps_sem}, {"eps_emo", snap->defaults().eps_emo}}}}};
}

ApiResponse Api::get_documents(const ApiRequest& r) {
  auto snap = store_.snapshot();
  std::optional<bool> annotated;
  if (auto it = r.query.find("annotated"); it != r.query.end() && !it->second.empty()) {
    if (it->second == "true" || it->second == "1") annotated = true;
    else if (it->second == "false" || it->second == "0") annotated = false;
    else throw Error(ErrorCode::validation, "'annotated' must be true or false", "annotated");
  }
  auto offset = query_number(r, "offset").value_or(0.0);
  auto limit = query_number(r, "limit").value_or(100.0);
  if (offset < 0 || limit < 1 || limit > 1000) {
    throw Error(ErrorCode::validation, "offset >= 0 and 1 <= limit <= 1000 required", "limit");
  }
  std::vector<const StimulusDocument*> selected;
  for (const auto& d : snap->documents()) {
    if (!annotated || d.annotated() == *annotated) selected.push_back(&d);
  }
  json docs = json::array();
  auto first = static_cast<std::size_t>(offset);
  auto count = static_cast<std::size_t>(limit);
  for (std::size_t i = first; i < selected.size() && i < first + count; ++i) {
    docs.push_back(to_json(*selected[i]));
  }
  return {200, {{"total", selected.size()}, {"offset", first}, {"limit", count}, {"documents", docs}}};
}

ApiResponse Api::post_document(const json& body) {
  StimulusDocument doc;
  doc.id = string_field(body, "id");
  doc.uri = string_field(body, "uri");
  doc.profile = tags_field(body);
  doc.profile.resolve(taxonomy_);
  doc.provenance = Provenance::manual;
  doc.validate();
  store_.add_document(doc);
  return {201, to_json(doc)};
}

ApiResponse Api::post_annotation(const std::string& id, const json& body) {
  AffectiveRating r;
  r.val_mean = number_field(body, "val");
  r.ar_mean = number_field(body, "ar");
  r.validate();
  store_.commit_annotation(id, r, Provenance::manual);
  return {200, to_json(store_.snapshot()->at(id))};
}

ApiResponse Api::post_estimate(const json& body) {
  auto profile = tags_field(body);
  auto cfg = config(body.contains("config") ? &body["config"] : nullptr);
  return {200, to_json(estimate(profile, *store_.snapshot(), taxonomy_, cfg))};
}

ApiResponse Api::post_session(const json& body) {
  auto doc_id = string_field(body, "document_id");
  auto cfg = config(body.contains("config") ? &body["config"] : nullptr);
  auto revision = store_.revision();
  auto snap = store_.snapshot();
  const auto& target = snap->at(doc_id);
  std::string id;
  {
    std::lock_guard lock(sessions_mutex_);
    id = "s" + std::to_string(next_session_++);
  }
  auto slot_ptr = std::make_shared<SessionSlot>();
  slot_ptr->session = open_session(target, *snap, taxonomy_, cfg, id, revision);
  json out = to_json(slot_ptr->session);
  {
    std::lock_guard lock(sessions_mutex_);
    sessions_[id] = std::move(slot_ptr);
  }
  return {201, out};
}

std::shared_ptr<Api::SessionSlot> Api::slot(const std::string& id) {
  std::lock_guard lock(sessions_mutex_);
  auto it = sessions_.find(id);
  if (it == sessions_.end()) throw Error(ErrorCode::not_found, "unknown session '" + id + "'", id);
  return it->second;
}

ApiResponse Api::get_session(const std::string& id) {
  auto s = slot(id);
  std::lock_guard lock(s->mutex);
  return {200, to_json(s->session)};
}

ApiResponse Api::post_feedback(const std::string& id, const json& body) {
  auto s = slot(id);
  auto action = parse_action(string_field(body, "action"));
  FeedbackEvent event{action, 0, 0.0, 0.0};
  using A = FeedbackEvent::Action;
  if (action == A::accept || action == A::reject) {
    auto index = number_field(body, "index");
    if (index < 0 || index != static_cast<double>(static_cast<std::size_t>(index))) {
      throw Error(ErrorCode::validation, "index must be a non-negative integer", "index");
    }
    event.index = static_cast<std::size_t>(index);
  } else if (action == A::adjust) {
    event.val = number_field(body, "val");
    event.ar = number_field(body, "ar");
  }

  std::lock_guard lock(s->mutex);
  if (body.contains("seq")) {
    auto expected = s->session.seq() + 1;
    if (!body["seq"].is_number_unsigned() || body["seq"].get<std::uint64_t>() != expected) {
      throw Error(ErrorCode::conflict,
                  "out-of-order feedback: expected seq " + std::to_string(expected), "seq");
    }
  }
  auto next = apply_feedback(s->session, event);
  if (next.state == SessionState::committed) {
    store_.commit_annotation(next.target.id, *next.target.rating, next.target.provenance);
  }
  s->session = std::move(next);
  return {200, to_json(s->session)};
}

namespace {

std::vector<StimulusGroup> groups_from_query(const ApiRequest& r, const Corpus& corpus,
                                             const Taxonomy& taxonomy) {
  auto it = r.query.find("spec");
  if (it == r.query.end() || it->second.empty()) {
    throw Error(ErrorCode::validation, "missing query 'spec'", "spec");
  }
  auto threshold = query_number(r, "threshold").value_or(1.0);
  return build_groups(corpus, taxonomy, parse_group_queries(it->second), threshold);
}

}  // namespace

ApiResponse Api::get_groups(const ApiRequest& r) {
  auto snap = store_.snapshot();
  auto groups = groups_from_query(r, *snap, taxonomy_);
  auto c = query_number(r, "c").value_or(2.0);
  json out = json::array();
  for (const auto& g : groups) {
    json outliers = json::array();
    if (g.members.size() >= 3) {
      for (const auto& o : group_outliers(g, c)) {
        outliers.push_back({{"id", o.id}, {"distance", o.distance}, {"score", o.score}});
      }
    }
    json centroid = nullptr;
    if (g.centroid) centroid = {{"val", g.centroid->val}, {"ar", g.centroid->ar}};
    out.push_back({{"name", g.name},
                   {"query_tags", g.query_tags.terms()},
                   {"member_ids", g.member_ids()},
                   {"empty", g.empty()},
                   {"centroid", centroid},
                   {"sd_val", g.sd_val},
                   {"sd_ar", g.sd_ar},
                   {"outliers", outliers}});
  }
  return {200, {{"groups", out}, {"c", c}}};
}

ApiResponse Api::get_coupling(const ApiRequest& r) {
  auto snap = store_.snapshot();
  CouplingThresholds th = snap->defaults();
  if (auto v = query_number(r, "eps_sem")) th.eps_sem = *v;
  if (auto v = query_number(r, "eps_emo")) th.eps_emo = *v;
  std::vector<StimulusDocument> docs;
  for (const auto& d : snap->documents()) {
    if (d.annotated()) docs.push_back(d);
  }
  auto m = coupling_matrix(docs, taxonomy_, th);
  return {200,
          {{"thresholds", {{"eps_sem", th.eps_sem}, {"eps_emo", th.eps_emo}}},
           {"coupled_pairs", m.coupled_pairs()},
           {"clusters", clusters_from_matrix(m)}}};
}

ApiResponse Api::get_scatter(const ApiRequest& r) {
  auto snap = store_.snapshot();
  std::vector<StimulusGroup> groups;
  if (auto it = r.query.find("spec"); it != r.query.end() && !it->second.empty()) {
    groups = groups_from_query(r, *snap, taxonomy_);
  }
  json rows = json::array();
  std::set<std::string> grouped;
  for (const auto& g : groups) {
    for (const auto& m : g.members) {
      grouped.insert(m.id);
      rows.push_back({{"doc_id", m.id}, {"group", g.name}, {"val", m.emotion.val},
                      {"ar", m.emotion.ar},
                      {"provenance", to_string(snap->at(m.id).provenance)}});
    }
  }
  for (const auto& d : snap->documents()) {
    if (!d.annotated() || grouped.count(d.id)) continue;
    rows.push_back({{"doc_id", d.id}, {"group", ""}, {"val", d.rating->val_mean},
                    {"ar", d.rating->ar_mean}, {"provenance", to_string(d.provenance)}});
  }
  return {200, {{"rows", rows}}};
}

void mount(httplib::Server& server, Api& api) {
  auto forward = [&api](const char* method) {
    return [&api, method](const httplib::Request& req, httplib::Response& res) {
      ApiRequest r{method, req.path, {}, req.body};
      for (const auto& [k, v] : req.params) r.query.emplace(k, v);
      auto out = api.handle(r);
      res.status = out.status;
      res.set_content(out.body.dump(), "application/json");
    };
  };
  server.Get(R"(/.*)", forward("GET"));
  server.Post(R"(/.*)", forward("POST"));
}

bool serve(Api& api, const std::string& host, int port) {
  httplib::Server server;
  mount(server, api);
  return server.listen(host, port);
}

}  // namespace affectcouple
