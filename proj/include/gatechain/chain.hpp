#pragma once

#include <cstdint>
#include <functional>
#include <limits>
#include <map>
#include <mutex>
#include <optional>
#include <span>
#include <string>
#include <unordered_set>
#include <vector>

#include "gatechain/block.hpp"
#include "gatechain/error.hpp"

namespace gatechain::chain {

enum class ViolationKind {
  HashMismatch,
  LinkMismatch,
  RootMismatch,
  BadSignature,
  UnknownAuthority,
  IndexGap,
  BadTimestampOrder,
  MalformedBlock,
};

std::string_view to_string(ViolationKind kind);

struct Violation {
  std::uint64_t block_index = 0;
  ViolationKind kind = ViolationKind::HashMismatch;
  std::string detail;
};

struct VerificationReport {
  bool valid = true;
  std::vector<Violation> violations;
};

/// Keys permitted to sign blocks, each with the half-open time intervals
/// [from, until) during which it was a signing authority.
class ValidatorSet {
 public:
  static constexpr Timestamp kForever = Timestamp::from_micros(std::numeric_limits<std::int64_t>::max());

  ValidatorSet() = default;
  /// Membership that does not depend on block time.
  static ValidatorSet of(std::span<const std::string> keys);

  void admit(const std::string& key, Timestamp from, Timestamp until = kForever);
  bool admits(std::string_view key, Timestamp at) const;
  bool contains(std::string_view key) const;
  std::size_t size() const { return intervals_.size(); }

 private:
  struct Interval {
    Timestamp from;
    Timestamp until;
  };
  std::map<std::string, std::vector<Interval>, std::less<>> intervals_;
};

/// Remembers (authority, hash, signature) triples that verified. Thread-safe.
class SignatureCache {
 public:
  bool verify(std::string_view authority, const HexDigest& hash, std::string_view signature);
  std::size_t size() const;

 private:
  mutable std::mutex mutex_;
  std::unordered_set<std::string> good_;
};

/// Empty iff the block is internally consistent, signed by an admitted
/// authority and (when `prev` is given) correctly linked to it. `prev` is
/// null only for the genesis position.
std::vector<Violation> verify_block(const Block& block, const Block* prev, const ValidatorSet& validators,
                                    SignatureCache* cache = nullptr);

/// Violations are keyed by position in `blocks`, not by the stored index.
VerificationReport verify_chain(std::span<const Block> blocks, const ValidatorSet& validators,
                                SignatureCache* cache = nullptr);

/// Rejection of a block by Chain::append.
class AppendRejected : public Error {
 public:
  explicit AppendRejected(std::vector<Violation> violations);
  const std::vector<Violation>& violations() const { return violations_; }
  bool has(ViolationKind kind) const;

 private:
  std::vector<Violation> violations_;
};

/// Append-only sequence of verified blocks. Single writer; const access is
/// safe from many readers when externally synchronised with the writer.
class Chain {
 public:
  Chain() = default;
  /// Takes blocks as loaded from storage; verify them separately.
  explicit Chain(std::vector<Block> blocks) : blocks_(std::move(blocks)) {}

  /// Appends `block` if verify_block against the tip is clean. `before_commit`
  /// runs after verification and before the block becomes visible; if it
  /// throws, the chain is unchanged. Throws Error(duplicate_block) if the
  /// index is already present and AppendRejected on any violation.
  void append(Block block, const ValidatorSet& validators,
              const std::function<void(const Block&)>& before_commit = {});

  /// Installs the genesis block of an empty chain.
  void start(Block genesis, const ValidatorSet& validators,
             const std::function<void(const Block&)>& before_commit = {});

  bool empty() const { return blocks_.empty(); }
  std::size_t size() const { return blocks_.size(); }
  const Block& tip() const { return blocks_.back(); }
  const Block& operator[](std::size_t i) const { return blocks_[i]; }
  std::span<const Block> blocks() const { return blocks_; }

 private:
  std::vector<Block> blocks_;
};

}  // namespace gatechain::chain
