#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <mutex>
#include <string>

#include <json.hpp>

#include "affectcouple/corpus.hpp"
#include "affectcouple/error.hpp"
#include "affectcouple/estimator.hpp"
#include "affectcouple/session.hpp"

namespace httplib {
class Server;
}

namespace affectcouple {

struct ApiRequest {
  std::string method;  // "GET" / "POST"
  std::string path;
  std::map<std::string, std::string> query;
  std::string body;
};

struct ApiResponse {
  int status = 200;
  nlohmann::json body;
};

/// HTTP status for an error code (400, 404, 409, 422, 500).
int http_status(ErrorCode code) noexcept;

/// `{"error": {"code", "message", "detail"}}`.
nlohmann::json api_error(const Error& e);

nlohmann::json to_json(const StimulusDocument& doc);
nlohmann::json to_json(const CandidateAnnotation& c);
nlohmann::json to_json(const Estimate& e);
nlohmann::json to_json(const AnnotationSession& s);

/// Transport-independent JSON API over a corpus store, a taxonomy and the
/// live annotation sessions. Each route is a thin adapter over the core
/// operation of the same name.
class Api {
 public:
  Api(Taxonomy taxonomy, Corpus corpus);

  ApiResponse handle(const ApiRequest& request);

  const Taxonomy& taxonomy() const noexcept { return taxonomy_; }
  CorpusStore& store() noexcept { return store_; }

  /// Estimation config with the corpus defaults and any JSON overrides.
  EstimationConfig config(const nlohmann::json* overrides = nullptr) const;

 private:
  struct SessionSlot {
    std::mutex mutex;
    AnnotationSession session;
  };

  ApiResponse get_corpus();
  ApiResponse get_documents(const ApiRequest& r);
  ApiResponse post_document(const nlohmann::json& body);
  ApiResponse post_annotation(const std::string& id, const nlohmann::json& body);
  ApiResponse post_estimate(const nlohmann::json& body);
  ApiResponse post_session(const nlohmann::json& body);
  ApiResponse get_session(const std::string& id);
  ApiResponse post_feedback(const std::string& id, const nlohmann::json& body);
  ApiResponse get_groups(const ApiRequest& r);
  ApiResponse get_coupling(const ApiRequest& r);
  ApiResponse get_scatter(const ApiRequest& r);

  std::shared_ptr<SessionSlot> slot(const std::string& id);

  Taxonomy taxonomy_;
  CorpusStore store_;
  std::mutex sessions_mutex_;
  std::map<std::string, std::shared_ptr<SessionSlot>> sessions_;
  std::uint64_t next_session_ = 1;
};

/// Routes every request on `server` through `api`.
void mount(httplib::Server& server, Api& api);

/// Blocks serving `api` on `host:port`. Returns false if binding fails.
bool serve(Api& api, const std::string& host, int port);

}  // namespace affectcouple
