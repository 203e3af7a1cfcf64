#include "itrace/service/http_server.hpp"

#include <fstream>
#include <sstream>

#include <httplib.h>
#include <fmt/format.h>
#include <spdlog/spdlog.h>

#include "itrace/errors.hpp"

namespace fs = std::filesystem;

namespace itrace::service {

int status_for(const std::exception& e) {
  if (dynamic_cast<const ValidationError*>(&e) || dynamic_cast<const ParseError*>(&e) ||
      dynamic_cast<const VersionError*>(&e)) {
    return 422;
  }
  if (dynamic_cast<const DecodeError*>(&e)) return 415;
  if (dynamic_cast<const NotFoundError*>(&e)) return 404;
  if (dynamic_cast<const ConflictError*>(&e)) return 409;
  return 500;
}

namespace {

void send_json(httplib::Response& res, int status, const nlohmann::json& body) {
  res.status = status;
  res.set_content(body.dump(), "application/json");
}

std::string content_type_for(const fs::path& p) {
  const auto ext = p.extension().string();
  if (ext == ".avi") return "video/x-msvideo";
  return "video/mp4";
}

void send_file(httplib::Response& res, const fs::path& path, const std::string& job_id) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(fmt::format("result {} is missing", path.string()));
  std::stringstream buf;
  buf << in.rdbuf();
  res.status = 200;
  res.set_header("X-Job-Id", job_id);
  res.set_header("Content-Disposition", fmt::format("attachment; filename=\"{}\"", path.filename().string()));
  res.set_content(buf.str(), content_type_for(path));
}

/// Runs a handler and turns exceptions into JSON error responses.
template <class F>
httplib::Server::Handler guarded(F f) {
  return [f](const httplib::Request& req, httplib::Response& res) {
    try {
      f(req, res);
    } catch (const std::exception& e) {
      const int status = status_for(e);
      if (status == 500) spdlog::error("{} {}: {}", req.method, req.path, e.what());
      send_json(res, status, {{"error", e.what()}});
    }
  };
}

std::string field(const httplib::Request& req, const std::string& key) {
  if (!req.has_file(key)) throw ValidationError(fmt::format("missing multipart field '{}'", key));
  return req.get_file_value(key).content;
}

}  // namespace

HttpServer::HttpServer(SessionService& service, std::string host, int port)
    : service_(service), host_(std::move(host)), port_(port), server_(std::make_unique<httplib::Server>()) {
  server_->set_payload_max_length(std::size_t{2} << 30);
  server_->set_read_timeout(std::chrono::seconds(60));
  server_->set_write_timeout(std::chrono::seconds(60));
  routes();
}

HttpServer::~HttpServer() { stop(); }

void HttpServer::routes() {
  auto& s = *server_;
  s.Get("/health", guarded([this](const httplib::Request&, httplib::Response& res) {
          send_json(res, 200, service_.health());
        }));

  s.Post("/api/v1/heatmap/video", guarded([this](const httplib::Request& req, httplib::Response& res) {
           if (!req.is_multipart_form_data()) throw ValidationError("expected multipart/form-data");
           Upload video;
           if (!req.has_file("video")) throw ValidationError("missing multipart field 'video'");
           const auto part = req.get_file_value("video");
           video.filename = part.filename;
           video.bytes = part.content;
           const std::string gaze = field(req, "gaze");
           bool background = false;
           if (req.has_file("background")) {
             const std::string v = req.get_file_value("background").content;
             if (v == "true") {
               background = true;
             } else if (v != "false" && !v.empty()) {
               throw ValidationError(fmt::format("background must be \"true\" or \"false\", got '{}'", v));
             }
           }
           const auto outcome = service_.submit_video(video, gaze, background);
           if (background || !outcome.finished) {
             send_json(res, 202, {{"job_id", outcome.job_id}, {"state", std::string(to_string(
                                      service_.job(outcome.job_id).state))}});
             return;
           }
           if (outcome.finished->state == JobState::failed) {
             send_json(res, 500, {{"job_id", outcome.job_id}, {"error", outcome.finished->error_message}});
             return;
           }
           send_file(res, outcome.finished->result_path, outcome.job_id);
         }));

  s.Get(R"(/api/v1/jobs/([^/]+))", guarded([this](const httplib::Request& req, httplib::Response& res) {
          send_json(res, 200, to_json(service_.job(req.matches[1])));
        }));

  s.Get(R"(/api/v1/jobs/([^/]+)/result)", guarded([this](const httplib::Request& req, httplib::Response& res) {
          const std::string id = req.matches[1];
          send_file(res, service_.job_result(id), id);
        }));

  s.Post("/api/v1/spatial/start", guarded([this](const httplib::Request&, httplib::Response& res) {
           const auto h = service_.spatial_start();
           send_json(res, 200, {{"recording_id", h.recording_id}, {"started_at", h.started_at}});
         }));

  s.Post("/api/v1/spatial/stop", guarded([this](const httplib::Request& req, httplib::Response& res) {
           send_json(res, 200, {{"job_id", service_.spatial_stop(req.body)}});
         }));

  s.Post("/api/v1/alignment/check", guarded([this](const httplib::Request& req, httplib::Response& res) {
           if (!req.is_multipart_form_data()) throw ValidationError("expected multipart/form-data");
           nlohmann::json request;
           try {
             request = nlohmann::json::parse(field(req, "request"));
           } catch (const nlohmann::json::parse_error& e) {
             throw ParseError(fmt::format("alignment request: malformed JSON at byte {}", e.byte));
           }
           send_json(res, 200, service_.alignment_check(request, field(req, "reference")));
         }));
}

int HttpServer::start() {
  if (thread_.joinable()) return port_;
  if (port_ == 0) {
    port_ = server_->bind_to_any_port(host_);
    if (port_ < 0) throw Error(fmt::format("cannot bind {}", host_));
  } else if (!server_->bind_to_port(host_, port_)) {
    throw Error(fmt::format("cannot bind {}:{}", host_, port_));
  }
  thread_ = std::thread([this] { server_->listen_after_bind(); });
  server_->wait_until_ready();
  return port_;
}

void HttpServer::stop() {
  if (!thread_.joinable()) return;
  server_->stop();
  thread_.join();
}

}  // namespace itrace::service
