#pragma once

#include <filesystem>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include "gatechain/registry.hpp"
#include "gatechain/store.hpp"

namespace gatechain {

struct NodePaths {
  std::filesystem::path chain;
  std::filesystem::path keystore;
};

/// A registry wired to its on-disk chain file and key store: every accepted
/// block is appended to the chain file and every authority change rewrites
/// the key store.
class Node {
 public:
  /// Creates both files (neither may exist) with a fresh data key, a
  /// bootstrap admin and the genesis block.
  static std::unique_ptr<Node> init(const NodePaths& paths, std::string admin_name = "bootstrap admin",
                                    registry::Options options = {});
  /// Loads both files. Torn-write warnings are appended to `warnings`.
  static std::unique_ptr<Node> open(const NodePaths& paths, std::vector<std::string>& warnings,
                                    registry::Options options = {});

  registry::Registry& registry() { return *registry_; }
  const registry::Registry& registry() const { return *registry_; }

  const std::string& admin_key() const { return admin_key_; }
  /// Private key of a hosted identity; Error(unknown_key) otherwise.
  crypto::KeyPair identity(std::string_view public_key) const;
  bool hosts(std::string_view public_key) const;

  /// Registers `key` and keeps its private half in the key store.
  authority::AuthorityRecord add_hosted_authority(std::string_view actor_key, const crypto::KeyPair& key,
                                                  std::string display_name, authority::Role role);

 private:
  Node(NodePaths paths, store::KeyStore keystore, store::ChainStore chain_store,
       std::unique_ptr<registry::Registry> registry);
  void wire();

  NodePaths paths_;
  mutable std::mutex keystore_mutex_;
  store::KeyStore keystore_;
  store::ChainStore chain_store_;
  std::unique_ptr<registry::Registry> registry_;
  std::string admin_key_;
};

}  // namespace gatechain
