#include "oranval/gateway/gateway.hpp"

#include <httplib.h>

#include "oranval/common/text.hpp"
#include "oranval/orchestrator/repository.hpp"
#include "oranval/validation/matrix_export.hpp"

namespace oranval {

using nlohmann::json;

int http_status(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::NotFound: return 404;
    case ErrorKind::State:
    case ErrorKind::Report: return 409;
    case ErrorKind::Parse:
    case ErrorKind::Schema:
    case ErrorKind::EmptySequence:
    case ErrorKind::Precondition:
    case ErrorKind::Load:
    case ErrorKind::Usage: return 400;
    default: return 500;
  }
}

json error_body(const std::exception& e) {
  json err{{"message", e.what()}};
  if (const auto* oe = dynamic_cast<const Error*>(&e)) {
    err["code"] = to_string(oe->kind());
    if (const auto* se = dynamic_cast<const SchemaError*>(&e)) err["field"] = se->field();
    if (const auto* le = dynamic_cast<const LoadError*>(&e)) err["field"] = le->field();
    if (const auto* pe = dynamic_cast<const ParseError*>(&e)) err["byte_offset"] = pe->byte_offset();
  } else {
    err["code"] = "internal_error";
  }
  return {{"error", err}};
}

namespace {

constexpr const char* kJson = "application/json";

void send_json(httplib::Response& res, int status, const json& body) {
  res.status = status;
  res.set_content(body.dump(2) + "\n", kJson);
}

void send_error(httplib::Response& res, const std::exception& e) {
  int status = 500;
  if (const auto* oe = dynamic_cast<const Error*>(&e)) status = http_status(oe->kind());
  send_json(res, status, error_body(e));
}

json parse_body(const httplib::Request& req) {
  if (req.body.empty()) return json::object();
  try {
    return json::parse(req.body);
  } catch (const json::parse_error& e) {
    throw SchemaError(std::string("request body is not valid JSON: ") + e.what(), "$");
  }
}

const json& field(const json& body, const char* key, json::value_t type, const char* type_name) {
  auto it = body.find(key);
  if (it == body.end()) throw SchemaError(std::string("missing field $.") + key, std::string("$.") + key);
  if (it->type() != type) {
    throw SchemaError(std::string("field $.") + key + " must be " + type_name, std::string("$.") + key);
  }
  return *it;
}

json run_summary(const RunRecord& run) {
  json j = to_json(run);
  j.erase("schema");
  j.erase("artifacts");
  j["schema"] = "oranval.run/v1";
  return j;
}

std::vector<StepEdit> parse_edits(const json& body) {
  std::vector<StepEdit> edits;
  if (!body.contains("edits")) return edits;
  const auto& arr = body.at("edits");
  if (!arr.is_array()) throw SchemaError("field $.edits must be an array", "$.edits");
  for (std::size_t i = 0; i < arr.size(); ++i) {
    const std::string path = "$.edits[" + std::to_string(i) + "]";
    const auto& e = arr[i];
    if (!e.is_object()) throw SchemaError(path + " must be an object", path);
    if (!e.contains("ordinal") || !e.at("ordinal").is_number_integer()) {
      throw SchemaError(path + ".ordinal must be an integer", path + ".ordinal");
    }
    if (!e.contains("description") || !e.at("description").is_string()) {
      throw SchemaError(path + ".description must be a string", path + ".description");
    }
    edits.push_back({e.at("ordinal").get<int>(), e.at("description").get<std::string>()});
  }
  return edits;
}

}  // namespace

struct GatewayRoutes {
  Gateway& g;

  bool authorized(const httplib::Request& req, httplib::Response& res) const {
    if (g.options_.token.empty()) return true;
    const auto header = req.get_header_value("Authorization");
    if (header == "Bearer " + g.options_.token) return true;
    send_json(res, 401, {{"error", {{"code", "unauthorized"}, {"message", "missing or invalid bearer token"}}}});
    return false;
  }

  template <typename Fn>
  void read(const httplib::Request& req, httplib::Response& res, Fn&& fn) const {
    if (!authorized(req, res)) return;
    try {
      fn();
    } catch (const std::exception& e) {
      send_error(res, e);
    }
  }

  template <typename Fn>
  void mutate(const httplib::Request& req, httplib::Response& res, Fn&& fn) const {
    if (!authorized(req, res)) return;
    const auto key = req.get_header_value("Idempotency-Key");
    if (key.empty()) {
      read(req, res, fn);
      return;
    }
    auto slot = g.idem_slot(req.method + " " + req.path + " " + key);
    std::lock_guard lock(slot->mu);
    const std::string body_hash = text::fnv1a64_hex(req.body);
    if (slot->replay) {
      if (slot->replay->body_hash != body_hash) {
        send_json(res, 422, {{"error", {{"code", "idempotency_conflict"},
                                        {"message", "Idempotency-Key reused with a different request body"}}}});
        return;
      }
      res.status = slot->replay->status;
      res.set_content(slot->replay->body, slot->replay->content_type);
      res.set_header("Idempotent-Replay", "true");
      return;
    }
    read(req, res, fn);
    slot->replay = Gateway::Replay{body_hash, res.status, res.body, res.get_header_value("Content-Type")};
  }

  void install(httplib::Server& s) {
    s.Get("/api/v1/health", [this](const httplib::Request&, httplib::Response& res) {
      send_json(res, 200, {{"schema", "oranval.health/v1"},
                           {"status", "ok"},
                           {"test_cases", g.orch_.test_cases().size()},
                           {"config_hash", config_hash(g.orch_.config())}});
    });

    s.Get("/api/v1/openapi.json",
          [](const httplib::Request&, httplib::Response& res) { send_json(res, 200, Gateway::openapi()); });

    s.Get("/api/v1/test-cases", [this](const httplib::Request& req, httplib::Response& res) {
      read(req, res, [&] {
        json list = json::array();
        for (const auto& tc : g.orch_.test_cases()) list.push_back(to_json(tc));
        send_json(res, 200, {{"schema", "oranval.test_cases/v1"}, {"test_cases", list}});
      });
    });

    s.Get(R"(/api/v1/test-cases/([^/]+))", [this](const httplib::Request& req, httplib::Response& res) {
      read(req, res, [&] {
        json j = to_json(g.orch_.test_case(req.matches[1]));
        j["schema"] = "oranval.test_case/v1";
        send_json(res, 200, j);
      });
    });

    s.Get("/api/v1/runs", [this](const httplib::Request& req, httplib::Response& res) {
      read(req, res, [&] {
        json list = json::array();
        for (const auto& id : g.orch_.list_runs()) {
          try {
            const auto run = g.orch_.get_run(id);
            list.push_back({{"run_id", run.run_id}, {"test_case_id", run.test_case_id}, {"state", to_string(run.state)}});
          } catch (const Error& e) {
            list.push_back({{"run_id", id}, {"error", error_body(e).at("error")}});
          }
        }
        send_json(res, 200, {{"schema", "oranval.runs/v1"}, {"runs", list}});
      });
    });

    s.Post("/api/v1/runs", [this](const httplib::Request& req, httplib::Response& res) {
      mutate(req, res, [&] {
        std::string tc_id;
        LogUpload upload;
        std::optional<std::string> run_id;
        if (req.is_multipart_form_data()) {
          if (!req.has_file("test_case_id")) throw SchemaError("missing form field test_case_id", "test_case_id");
          if (!req.has_file("log")) throw SchemaError("missing form file log", "log");
          tc_id = req.get_file_value("test_case_id").content;
          const auto file = req.get_file_value("log");
          upload = {file.filename, file.content};
          if (req.has_file("run_id")) run_id = req.get_file_value("run_id").content;
        } else {
          const json body = parse_body(req);
          tc_id = field(body, "test_case_id", json::value_t::string, "a string");
          const auto& log = field(body, "log", json::value_t::object, "an object");
          if (!log.contains("content") || !log.at("content").is_string()) {
            throw SchemaError("field $.log.content must be a string", "$.log.content");
          }
          upload.content = log.at("content").get<std::string>();
          upload.name = log.value("name", "");
          if (body.contains("run_id")) run_id = field(body, "run_id", json::value_t::string, "a string").get<std::string>();
        }
        const auto run = g.orch_.start_run(tc_id, upload, run_id);
        send_json(res, 201, run_summary(run));
      });
    });

    s.Get(R"(/api/v1/runs/([^/]+))", [this](const httplib::Request& req, httplib::Response& res) {
      read(req, res, [&] { send_json(res, 200, run_summary(g.orch_.get_run(req.matches[1]))); });
    });

    s.Get(R"(/api/v1/runs/([^/]+)/approval)", [this](const httplib::Request& req, httplib::Response& res) {
      read(req, res, [&] {
        const std::string id = req.matches[1];
        json j = to_json(g.orch_.pending_approval(id));
        j["schema"] = "oranval.approval/v1";
        j["run_id"] = id;
        j["state"] = to_string(RunState::AwaitingApproval);
        send_json(res, 200, j);
      });
    });

    s.Post(R"(/api/v1/runs/([^/]+)/approval)", [this](const httplib::Request& req, httplib::Response& res) {
      mutate(req, res, [&] {
        const std::string id = req.matches[1];
        const auto operator_id = std::string(text::trim(req.get_header_value("X-Operator-Id")));
        if (operator_id.empty()) throw SchemaError("approval requires the X-Operator-Id header", "header:X-Operator-Id");
        const json body = parse_body(req);
        const std::string decision = field(body, "decision", json::value_t::string, "a string");
        ApprovalDecision d;
        if (decision == "approve") d.decision = Decision::Approve;
        else if (decision == "reject") d.decision = Decision::Reject;
        else throw SchemaError("field $.decision must be approve or reject", "$.decision");
        d.operator_id = operator_id;
        d.edits = parse_edits(body);
        send_json(res, 200, run_summary(g.orch_.decide(id, d)));
      });
    });

    s.Post(R"(/api/v1/runs/([^/]+)/resubmit)", [this](const httplib::Request& req, httplib::Response& res) {
      mutate(req, res, [&] { send_json(res, 200, run_summary(g.orch_.resubmit(req.matches[1]))); });
    });

    s.Get(R"(/api/v1/runs/([^/]+)/verdicts)", [this](const httplib::Request& req, httplib::Response& res) {
      read(req, res, [&] {
        const auto run = g.orch_.get_run(req.matches[1]);
        send_json(res, 200, {{"schema", "oranval.verdicts/v1"},
                             {"run_id", run.run_id},
                             {"state", to_string(run.state)},
                             {"val", run.val_verdict ? to_json(*run.val_verdict) : json(nullptr)},
                             {"debug", run.debug_verdict ? to_json(*run.debug_verdict) : json(nullptr)}});
      });
    });

    s.Get(R"(/api/v1/runs/([^/]+)/matrix)", [this](const httplib::Request& req, httplib::Response& res) {
      read(req, res, [&] {
        const std::string id = req.matches[1];
        const auto format = req.has_param("format") ? req.get_param_value("format") : std::string("json");
        if (format == "csv") {
          res.status = 200;
          res.set_content(g.orch_.matrix_csv(id), "text/csv");
        } else if (format == "json") {
          send_json(res, 200, matrix_to_json(g.orch_.matrix(id)));
        } else {
          throw SchemaError("query parameter format must be json or csv", "query:format");
        }
      });
    });

    s.Get(R"(/api/v1/runs/([^/]+)/report)", [this](const httplib::Request& req, httplib::Response& res) {
      read(req, res, [&] { send_json(res, 200, g.orch_.report(req.matches[1])); });
    });
  }
};

Gateway::Gateway(Orchestrator& orchestrator, GatewayOptions options)
    : orch_(orchestrator), options_(std::move(options)) {}

Gateway::~Gateway() { stop(); }

std::shared_ptr<Gateway::IdemSlot> Gateway::idem_slot(const std::string& key) {
  std::lock_guard lock(idem_mu_);
  auto& slot = idem_[key];
  if (!slot) {
    slot = std::make_shared<IdemSlot>();
    idem_order_.push_back(key);
    while (idem_order_.size() > options_.idempotency_capacity) {
      idem_.erase(idem_order_.front());
      idem_order_.pop_front();
    }
  }
  return slot;
}

void Gateway::install(httplib::Server& server) {
  routes_.push_back(std::make_shared<GatewayRoutes>(GatewayRoutes{*this}));
  routes_.back()->install(server);
}

bool Gateway::listen(const std::string& host, int port) {
  server_ = std::make_unique<httplib::Server>();
  install(*server_);
  return server_->listen(host, port);
}

int Gateway::start_background(const std::string& host) {
  server_ = std::make_unique<httplib::Server>();
  install(*server_);
  const int port = server_->bind_to_any_port(host);
  if (port < 0) throw Error(ErrorKind::Config, "cannot bind gateway socket on " + host);
  thread_ = std::make_unique<std::thread>([this] { server_->listen_after_bind(); });
  server_->wait_until_ready();
  return port;
}

void Gateway::stop() {
  if (server_) server_->stop();
  if (thread_ && thread_->joinable()) thread_->join();
  thread_.reset();
}

}  // namespace oranval
