#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "gatechain/authority.hpp"
#include "gatechain/block.hpp"
#include "gatechain/crypto.hpp"

namespace gatechain::store {

struct LoadResult {
  std::vector<chain::Block> blocks;
  std::vector<std::string> warnings;
  std::uintmax_t valid_bytes = 0;  // length of the accepted prefix
};

/// Reads a chain file: one canonical block per '\n'-terminated line, line i
/// holding index i. An unterminated final line is a torn write and is
/// dropped with a warning. Throws Error(io) if the file cannot be read and
/// Error(load_error) naming the 1-based line for any other bad line.
LoadResult load_chain(const std::filesystem::path& path);

/// Append-only writer for a chain file. Each append is flushed with fsync
/// before returning.
class ChainStore {
 public:
  /// New empty file; Error(already_exists) if present.
  static ChainStore create(const std::filesystem::path& path);
  /// Loads the file and cuts off a torn tail so later appends start on a
  /// line boundary.
  static ChainStore open(const std::filesystem::path& path, LoadResult& loaded);

  ChainStore(ChainStore&& other) noexcept;
  ChainStore& operator=(ChainStore&& other) noexcept;
  ChainStore(const ChainStore&) = delete;
  ChainStore& operator=(const ChainStore&) = delete;
  ~ChainStore();

  /// Error(index_mismatch) unless block.index equals line_count();
  /// Error(io) if the write or sync fails.
  void append_block_line(const chain::Block& block);

  std::uint64_t line_count() const { return lines_; }
  const std::filesystem::path& path() const { return path_; }

 private:
  ChainStore(std::filesystem::path path, int fd, std::uint64_t lines);
  std::filesystem::path path_;
  int fd_ = -1;
  std::uint64_t lines_ = 0;
};

/// Node-local secrets and the authority registry, stored as JSON.
class KeyStore {
 public:
  KeyStore(crypto::DataKey data_key, authority::AuthorityRegistry authorities, std::string admin_key);

  /// Throws Error(io) or Error(load_error).
  static KeyStore load(const std::filesystem::path& path);
  /// Writes a temporary file, syncs it and renames it over `path`.
  void save(const std::filesystem::path& path) const;

  const crypto::DataKey& data_key() const { return data_key_; }
  const authority::AuthorityRegistry& authorities() const { return authorities_; }
  void set_authorities(authority::AuthorityRegistry registry) { authorities_ = std::move(registry); }
  /// Public key of the bootstrap admin; the default local identity.
  const std::string& admin_key() const { return admin_key_; }

  void host(const crypto::KeyPair& key);
  bool hosts(std::string_view public_key) const;
  /// Throws Error(unknown_key) if the identity's private key is not held here.
  crypto::KeyPair identity(std::string_view public_key) const;
  std::vector<std::string> hosted_keys() const;

 private:
  crypto::DataKey data_key_;
  authority::AuthorityRegistry authorities_;
  std::string admin_key_;
  std::map<std::string, std::string, std::less<>> hosted_;  // public -> private hex
};

}  // namespace gatechain::store
