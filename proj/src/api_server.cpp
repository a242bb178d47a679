#include "gatechain/api_server.hpp"

#include <charconv>
#include <mutex>
#include <unordered_map>

#include "gatechain/dates.hpp"
#include "gatechain/error.hpp"
#include "gatechain/views.hpp"
#include "httplib.h"

namespace gatechain::api {
namespace {

using authority::Action;
using nlohmann::json;
using SteadyClock = std::chrono::steady_clock;

// Carries an HTTP status out of a handler.
struct HttpError {
  int status;
  std::string code;
  std::string message;
};

[[noreturn]] void fail(int status, std::string code, std::string message) {
  throw HttpError{status, std::move(code), std::move(message)};
}

int status_for(Errc code) {
  switch (code) {
    case Errc::permission_denied: return 403;
    case Errc::duplicate_open_entry:
    case Errc::duplicate_key:
    case Errc::already_revoked:
    case Errc::append_rejected:
    case Errc::duplicate_block:
    case Errc::clock_regression: return 409;
    case Errc::exit_without_open_entry:
    case Errc::unknown_key: return 404;
    case Errc::validation:
    case Errc::expired_passport:
    case Errc::serialization: return 422;
    default: return 500;
  }
}

void reply(httplib::Response& res, int status, const json& body) {
  res.status = status;
  res.set_content(body.dump(), "application/json");
}

json parse_body(const httplib::Request& req) {
  try {
    auto body = json::parse(req.body);
    if (!body.is_object()) fail(422, "validation", "request body must be a JSON object");
    return body;
  } catch (const json::exception&) {
    fail(422, "validation", "request body is not valid JSON");
  }
}

std::string required_string(const json& body, const char* key) {
  const auto it = body.find(key);
  if (it == body.end() || !it->is_string()) fail(422, "validation", std::string("'") + key + "' must be a string");
  return it->get<std::string>();
}

std::string optional_string(const json& body, const char* key) {
  const auto it = body.find(key);
  if (it == body.end() || it->is_null()) return {};
  if (!it->is_string()) fail(422, "validation", std::string("'") + key + "' must be a string");
  return it->get<std::string>();
}

std::optional<std::chrono::sys_days> date_param(const httplib::Request& req, const char* name) {
  if (!req.has_param(name) || req.get_param_value(name).empty()) return std::nullopt;
  const auto d = dates::parse_date(req.get_param_value(name));
  if (!d) fail(422, "validation", std::string("'") + name + "' must be YYYY-MM-DD");
  return d;
}

std::size_t size_param(const httplib::Request& req, const char* name, std::size_t fallback, std::size_t max) {
  if (!req.has_param(name)) return fallback;
  const auto text = req.get_param_value(name);
  std::size_t value = 0;
  auto [p, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc{} || p != text.data() + text.size() || value > max) {
    fail(422, "validation", std::string("'") + name + "' must be an integer in [0, " + std::to_string(max) + "]");
  }
  return value;
}

}  // namespace

crypto::HexDigest login_digest(std::string_view challenge) {
  return crypto::sha256_hex("gatechain-login:" + std::string(challenge));
}

struct ApiServer::Impl {
  struct Session {
    std::string public_key;
    SteadyClock::time_point expires;
  };
  struct Challenge {
    std::string public_key;
    SteadyClock::time_point expires;
  };

  Node& node;
  ServerOptions options;
  httplib::Server server;
  std::mutex mutex;
  std::unordered_map<std::string, Session> sessions;
  std::unordered_map<std::string, Challenge> challenges;

  Impl(Node& n, ServerOptions o) : node(n), options(o) {
    // The library default is SO_REUSEPORT, which lets a second node bind the
    // same port and silently split traffic. A busy port must fail instead.
    server.set_socket_options([](socket_t sock) {
      int yes = 1;
      ::setsockopt(sock, SOL_SOCKET, SO_REUSEADDR, &yes, sizeof(yes));
    });
    routes();
  }

  registry::Registry& reg() { return node.registry(); }

  std::string authenticate(const httplib::Request& req) {
    const auto header = req.get_header_value("Authorization");
    constexpr std::string_view kBearer = "Bearer ";
    if (header.rfind(kBearer, 0) != 0) fail(401, "unauthenticated", "missing bearer token");
    const auto token = header.substr(kBearer.size());
    std::string key;
    {
      std::lock_guard lock(mutex);
      const auto it = sessions.find(token);
      if (it == sessions.end()) fail(401, "unauthenticated", "unknown session");
      if (SteadyClock::now() >= it->second.expires) {
        sessions.erase(it);
        fail(401, "unauthenticated", "session expired");
      }
      key = it->second.public_key;
    }
    const auto authorities = reg().authorities();
    const auto* record = authorities.find(key);
    if (!record || record->status != authority::Status::active) {
      fail(401, "unauthenticated", "authority is no longer active");
    }
    return key;
  }

  std::string authorize(const httplib::Request& req, Action action) {
    auto key = authenticate(req);
    if (!reg().check_permission(key, action)) {
      fail(403, "permission_denied", "role does not grant " + std::string(authority::to_string(action)));
    }
    return key;
  }

  crypto::KeyPair signer_for(const std::string& key) {
    if (!node.hosts(key)) fail(403, "permission_denied", "signing key for this identity is not hosted on this node");
    return node.identity(key);
  }

  template <typename Handler>
  httplib::Server::Handler wrap(Handler handler) {
    return [this, handler](const httplib::Request& req, httplib::Response& res) {
      try {
        handler(req, res);
      } catch (const HttpError& e) {
        reply(res, e.status, {{"error", e.code}, {"message", e.message}});
      } catch (const Error& e) {
        reply(res, status_for(e.code()), {{"error", to_string(e.code())}, {"message", e.what()}});
      } catch (const std::exception& e) {
        reply(res, 500, {{"error", "internal"}, {"message", e.what()}});
      }
    };
  }

  registry::TravelRecordView find_view(const std::string& caller, const std::string& passport,
                                       std::uint64_t block_index) {
    registry::RecordFilter f;
    f.passport_number = passport;
    for (auto& v : reg().list_travel_records(caller, f)) {
      if (v.entry_block_index == block_index || v.exit_block_index == block_index) return v;
    }
    fail(500, "internal", "registered block not found in merged records");
  }

  void routes() {
    server.Post("/api/login/challenge", wrap([this](const httplib::Request& req, httplib::Response& res) {
      const auto body = parse_body(req);
      auto key = required_string(body, "public_key");
      const auto challenge = crypto::to_hex(crypto::random_bytes(32));
      {
        std::lock_guard lock(mutex);
        const auto now = SteadyClock::now();
        std::erase_if(challenges, [&](const auto& kv) { return kv.second.expires <= now; });
        challenges[challenge] = {std::move(key), now + options.challenge_ttl};
      }
      reply(res, 200, {{"challenge", challenge}});
    }));

    server.Post("/api/login", wrap([this](const httplib::Request& req, httplib::Response& res) {
      const auto body = parse_body(req);
      const auto key = required_string(body, "public_key");
      const auto challenge = required_string(body, "challenge");
      const auto signature = required_string(body, "signature");
      {
        std::lock_guard lock(mutex);
        const auto it = challenges.find(challenge);
        // Each challenge is usable once, by the key it was issued to.
        if (it == challenges.end()) fail(401, "unauthenticated", "unknown or already used challenge");
        const bool fresh = SteadyClock::now() < it->second.expires && it->second.public_key == key;
        challenges.erase(it);
        if (!fresh) fail(401, "unauthenticated", "challenge expired or issued to another key");
      }
      const auto authorities = reg().authorities();
      const auto* record = authorities.find(key);
      if (!record || record->status != authority::Status::active) {
        fail(401, "unauthenticated", "unknown or revoked authority");
      }
      if (!crypto::verify_signature(key, login_digest(challenge), signature)) {
        fail(401, "unauthenticated", "bad challenge signature");
      }
      const auto token = crypto::to_hex(crypto::random_bytes(32));
      {
        std::lock_guard lock(mutex);
        sessions[token] = {key, SteadyClock::now() + options.session_ttl};
      }
      reply(res, 200,
            {{"token", token},
             {"public_key", key},
             {"role", authority::to_string(record->role)},
             {"expires_in_s", std::chrono::duration_cast<std::chrono::seconds>(options.session_ttl).count()}});
    }));

    server.Post("/api/entries", wrap([this](const httplib::Request& req, httplib::Response& res) {
      const auto caller = authorize(req, Action::register_entry);
      const auto body = parse_body(req);
      registry::EntryForm form;
      form.passport_number = required_string(body, "passport_number");
      form.name_surname = required_string(body, "name_surname");
      form.nationality = required_string(body, "nationality");
      form.birthdate = required_string(body, "birthdate");
      form.passport_validity_date = required_string(body, "passport_validity_date");
      form.entry_gate = required_string(body, "entry_gate");
      form.entry_datetime = required_string(body, "entry_datetime");
      form.plate = optional_string(body, "plate");
      const auto block = reg().register_entry(form, signer_for(caller));
      reply(res, 201, {{"block_index", block.index},
                       {"record", views::to_json(find_view(caller, form.passport_number, block.index))}});
    }));

    server.Post("/api/exits", wrap([this](const httplib::Request& req, httplib::Response& res) {
      const auto caller = authorize(req, Action::register_exit);
      const auto body = parse_body(req);
      registry::ExitForm form;
      form.passport_number = required_string(body, "passport_number");
      form.exit_gate = required_string(body, "exit_gate");
      form.exit_datetime = required_string(body, "exit_datetime");
      form.plate = optional_string(body, "plate");
      const auto block = reg().register_exit(form, signer_for(caller));
      reply(res, 201, {{"block_index", block.index},
                       {"record", views::to_json(find_view(caller, form.passport_number, block.index))}});
    }));

    server.Get("/api/records", wrap([this](const httplib::Request& req, httplib::Response& res) {
      const auto caller = authorize(req, Action::list_records);
      registry::RecordFilter f;
      auto text = [&](const char* name) -> std::optional<std::string> {
        if (!req.has_param(name) || req.get_param_value(name).empty()) return std::nullopt;
        return req.get_param_value(name);
      };
      f.passport_number = text("passport");
      f.nationality = text("nationality");
      f.gate = text("gate");
      f.from = date_param(req, "from");
      f.to = date_param(req, "to");
      if (const auto s = text("status")) {
        f.status = registry::parse_trip_status(*s);
        if (!f.status) fail(422, "validation", "'status' must be open or closed");
      }
      const auto limit = size_param(req, "limit", 100, options.max_page_size);
      const auto offset = size_param(req, "offset", 0, std::numeric_limits<std::uint32_t>::max());
      const auto records = reg().list_travel_records(caller, f);
      json page = json::array();
      for (std::size_t i = offset; i < records.size() && i < offset + limit; ++i) {
        page.push_back(views::to_json(records[i]));
      }
      reply(res, 200, {{"records", page}, {"total", records.size()}, {"limit", limit}, {"offset", offset}});
    }));

    server.Get("/api/chain/verify", wrap([this](const httplib::Request& req, httplib::Response& res) {
      const auto caller = authorize(req, Action::verify_chain);
      auto body = views::to_json(reg().verify_chain(caller));
      body["blocks"] = reg().chain_size();
      reply(res, 200, body);
    }));

    server.Get("/api/stats", wrap([this](const httplib::Request& req, httplib::Response& res) {
      const auto caller = authorize(req, Action::view_stats);
      const auto from = date_param(req, "from");
      const auto to = date_param(req, "to");
      reply(res, 200, views::to_json(reg().compute_statistics(caller, from, to)));
    }));

    server.Get("/api/authorities", wrap([this](const httplib::Request& req, httplib::Response& res) {
      authorize(req, Action::manage_authorities);
      json list = json::array();
      const auto authorities = reg().authorities();
      for (const auto& r : authorities.records()) list.push_back(views::to_json(r));
      reply(res, 200, {{"authorities", list}});
    }));

    server.Post("/api/authorities", wrap([this](const httplib::Request& req, httplib::Response& res) {
      const auto caller = authorize(req, Action::manage_authorities);
      const auto body = parse_body(req);
      const auto role = authority::parse_role(required_string(body, "role"));
      if (!role) fail(422, "validation", "'role' must be admin, officer or auditor");
      const auto record = reg().add_authority(caller, required_string(body, "public_key"),
                                              optional_string(body, "display_name"), *role);
      reply(res, 201, views::to_json(record));
    }));

    server.Delete(R"(/api/authorities/([0-9a-fA-F]+))", wrap([this](const httplib::Request& req,
                                                                      httplib::Response& res) {
      const auto caller = authorize(req, Action::manage_authorities);
      reply(res, 200, views::to_json(reg().revoke_authority(caller, req.matches[1].str())));
    }));
  }
};

ApiServer::ApiServer(Node& node, ServerOptions options) : impl_(std::make_unique<Impl>(node, options)) {}

ApiServer::~ApiServer() { stop(); }

int ApiServer::bind(const std::string& host, int port) {
  if (port == 0) return impl_->server.bind_to_any_port(host);
  return impl_->server.bind_to_port(host, port) ? port : -1;
}

bool ApiServer::serve() { return impl_->server.listen_after_bind(); }

void ApiServer::stop() {
  if (impl_) impl_->server.stop();
}

bool ApiServer::running() const { return impl_->server.is_running(); }

}  // namespace gatechain::api
