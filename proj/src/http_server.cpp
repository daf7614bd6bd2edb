#include "vsuspect/http_server.hpp"

#include <charconv>

#include "httplib.h"
#include "vsuspect/errors.hpp"

namespace vsuspect {

using nlohmann::json;

namespace {

void send_json(httplib::Response& res, int status, const json& body) {
  res.status = status;
  res.set_content(body.dump(), "application/json");
}

std::string bearer_token(const httplib::Request& req) {
  const auto header = req.get_header_value("Authorization");
  constexpr std::string_view kPrefix = "Bearer ";
  if (header.rfind(kPrefix, 0) == 0) return header.substr(kPrefix.size());
  return req.get_param_value("token");
}

std::uint64_t uint_param(const httplib::Request& req, const char* name, std::uint64_t fallback) {
  if (!req.has_param(name)) return fallback;
  const auto text = req.get_param_value(name);
  std::uint64_t value = 0;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc{} || ptr != text.data() + text.size()) {
    throw ApiError(400, "bad_request", std::string("parameter '") + name + "' must be a non-negative integer", name);
  }
  return value;
}

json parse_body(const httplib::Request& req) {
  try {
    return json::parse(req.body);
  } catch (const json::parse_error&) {
    throw ApiError(400, "bad_request", "request body is not valid JSON");
  }
}

// Runs a handler, mapping failures onto the `{code, message, field?}` body.
template <typename Fn>
void guarded(httplib::Response& res, Fn&& fn) {
  try {
    fn();
  } catch (const ApiError& e) {
    send_json(res, e.status(), e.body());
  } catch (const ValidationError& e) {
    send_json(res, 400, ApiError(400, "invalid_document", e.what()).body());
  } catch (const EngineError& e) {
    send_json(res, 400, ApiError(400, e.code(), e.what(), e.field()).body());
  } catch (const std::exception& e) {
    send_json(res, 500, ApiError(500, "engine_fault", e.what()).body());
  }
}

}  // namespace

HttpServer::HttpServer(std::shared_ptr<SessionService> service)
    : service_(std::move(service)), server_(std::make_unique<httplib::Server>()) {
  auto& srv = *server_;
  auto svc = service_;

  srv.Get("/scenarios", [svc](const httplib::Request&, httplib::Response& res) {
    guarded(res, [&] { send_json(res, 200, svc->list_scenarios()); });
  });

  srv.Post("/sessions", [svc](const httplib::Request& req, httplib::Response& res) {
    guarded(res, [&] { send_json(res, 201, svc->create_session(CreateSessionRequest::from_json(parse_body(req)))); });
  });

  srv.Get(R"(/sessions/([^/]+)/templates)", [svc](const httplib::Request& req, httplib::Response& res) {
    guarded(res, [&] { send_json(res, 200, svc->list_templates(req.matches[1], bearer_token(req))); });
  });

  srv.Post(R"(/sessions/([^/]+)/statements)", [svc](const httplib::Request& req, httplib::Response& res) {
    guarded(res, [&] {
      const json body = parse_body(req);
      if (!body.is_object() || !body.contains("template") || !body["template"].is_string()) {
        throw ApiError(400, "bad_request", "missing template id", "template");
      }
      FieldValues values;
      if (body.contains("fields")) {
        if (!body["fields"].is_object()) throw ApiError(400, "bad_request", "fields must be an object", "fields");
        for (const auto& [name, value] : body["fields"].items()) {
          if (!value.is_string()) throw ApiError(400, "type_mismatch", "field values are strings", name);
          values[name] = value.get<std::string>();
        }
      }
      send_json(res, 200,
                svc->submit_statement(req.matches[1], bearer_token(req), body["template"].get<std::string>(), values));
    });
  });

  srv.Get(R"(/sessions/([^/]+)/transcript)", [svc](const httplib::Request& req, httplib::Response& res) {
    guarded(res, [&] {
      const std::string view_text = req.has_param("view") ? req.get_param_value("view") : "trainee";
      const auto view = parse_transcript_view(view_text);
      if (!view) throw ApiError(400, "bad_request", "view must be trainee or instructor", "view");
      // Same serialization as export_transcript, so instructor downloads
      // compare byte-for-byte with CLI output.
      res.status = 200;
      res.set_content(dump_document(svc->transcript(req.matches[1], bearer_token(req), *view)), "application/json");
    });
  });

  srv.Get(R"(/sessions/([^/]+)/state)", [this, svc](const httplib::Request& req, httplib::Response& res) {
    guarded(res, [&] {
      const std::string id = req.matches[1];
      const std::string token = bearer_token(req);
      const std::uint64_t from = std::max<std::uint64_t>(1, uint_param(req, "from", 1));
      const std::uint64_t limit = uint_param(req, "limit", 0);
      // Authorizes before any streaming starts.
      auto initial = svc->state_records(id, token, from);
      if (req.has_param("poll") && req.get_param_value("poll") != "0") {
        send_json(res, 200, json{{"records", initial}});
        return;
      }
      auto next = std::make_shared<std::uint64_t>(from);
      auto sent = std::make_shared<std::uint64_t>(0);
      res.status = 200;
      res.set_chunked_content_provider(
          "application/x-ndjson", [this, svc, id, token, next, sent, limit](std::size_t, httplib::DataSink& sink) {
            if (stopping_) {
              sink.done();
              return true;
            }
            svc->wait_for_turn(id, token, *next, std::chrono::milliseconds(200));
            for (const auto& record : svc->state_records(id, token, *next)) {
              const std::string line = record.dump() + "\n";
              if (!sink.write(line.data(), line.size())) return false;
              *next = record["turn"].get<std::uint64_t>() + 1;
              if (limit != 0 && ++*sent >= limit) {
                sink.done();
                return true;
              }
            }
            return sink.is_writable();
          });
    });
  });
}

HttpServer::~HttpServer() { stop(); }

int HttpServer::bind(const std::string& host, int port) {
  if (port == 0) return server_->bind_to_any_port(host);
  return server_->bind_to_port(host, port) ? port : -1;
}

void HttpServer::listen() { server_->listen_after_bind(); }

void HttpServer::stop() {
  stopping_ = true;
  server_->stop();
}

}  // namespace vsuspect
