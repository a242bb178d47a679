#pragma once

#include <chrono>
#include <memory>
#include <string>
#include <string_view>

#include "gatechain/crypto.hpp"
#include "gatechain/node.hpp"

namespace gatechain::api {

struct ServerOptions {
  std::chrono::milliseconds session_ttl = std::chrono::hours(8);
  std::chrono::milliseconds challenge_ttl = std::chrono::minutes(2);
  std::size_t max_page_size = 1000;
};

/// What a client signs to log in: the server's challenge, domain-separated
/// so a login signature can never double as a block signature.
crypto::HexDigest login_digest(std::string_view challenge);

/// REST interface over a Node.
///
///   POST   /api/login/challenge   {"public_key"}              -> {"challenge","expires_at"}
///   POST   /api/login             {"public_key","challenge","signature"} -> session token
///   POST   /api/entries           EntryForm                   -> 201
///   POST   /api/exits             ExitForm                    -> 201
///   GET    /api/records           passport,nationality,from,to,gate,status,limit,offset
///   GET    /api/chain/verify
///   GET    /api/stats             from,to
///   GET    /api/authorities
///   POST   /api/authorities       {"public_key","display_name","role"}
///   DELETE /api/authorities/{public_key}
///
/// All but the login endpoints need "Authorization: Bearer <token>".
class ApiServer {
 public:
  ApiServer(Node& node, ServerOptions options = {});
  ~ApiServer();
  ApiServer(const ApiServer&) = delete;
  ApiServer& operator=(const ApiServer&) = delete;

  /// Binds and returns the port (an ephemeral one if `port` is 0); -1 on failure.
  int bind(const std::string& host, int port);
  /// Serves until stop(); returns false if the listener failed.
  bool serve();
  void stop();
  bool running() const;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace gatechain::api
