#include "gatechain/chain.hpp"

namespace gatechain::chain {

std::string_view to_string(ViolationKind kind) {
  switch (kind) {
    case ViolationKind::HashMismatch: return "HashMismatch";
    case ViolationKind::LinkMismatch: return "LinkMismatch";
    case ViolationKind::RootMismatch: return "RootMismatch";
    case ViolationKind::BadSignature: return "BadSignature";
    case ViolationKind::UnknownAuthority: return "UnknownAuthority";
    case ViolationKind::IndexGap: return "IndexGap";
    case ViolationKind::BadTimestampOrder: return "BadTimestampOrder";
    case ViolationKind::MalformedBlock: return "MalformedBlock";
  }
  return "Unknown";
}

ValidatorSet ValidatorSet::of(std::span<const std::string> keys) {
  ValidatorSet set;
  for (const auto& k : keys) set.admit(k, Timestamp::from_micros(std::numeric_limits<std::int64_t>::min()));
  return set;
}

void ValidatorSet::admit(const std::string& key, Timestamp from, Timestamp until) {
  intervals_[key].push_back({from, until});
}

bool ValidatorSet::admits(std::string_view key, Timestamp at) const {
  const auto it = intervals_.find(key);
  if (it == intervals_.end()) return false;
  for (const auto& iv : it->second) {
    if (iv.from <= at && at < iv.until) return true;
  }
  return false;
}

bool ValidatorSet::contains(std::string_view key) const { return intervals_.find(key) != intervals_.end(); }

bool SignatureCache::verify(std::string_view authority, const HexDigest& hash, std::string_view signature) {
  std::string key;
  key.reserve(authority.size() + hash.str().size() + signature.size() + 2);
  key.append(authority).append(1, '\n').append(hash.str()).append(1, '\n').append(signature);
  {
    std::lock_guard lock(mutex_);
    if (good_.contains(key)) return true;
  }
  if (!crypto::verify_signature(authority, hash, signature)) return false;
  std::lock_guard lock(mutex_);
  good_.insert(std::move(key));
  return true;
}

std::size_t SignatureCache::size() const {
  std::lock_guard lock(mutex_);
  return good_.size();
}

std::vector<Violation> verify_block(const Block& block, const Block* prev, const ValidatorSet& validators,
                                    SignatureCache* cache) {
  std::vector<Violation> out;
  auto report = [&](ViolationKind kind, std::string detail) {
    out.push_back({block.index, kind, std::move(detail)});
  };

  const auto root = compute_transactions_root(block.transactions);
  if (root != block.transactions_root) {
    report(ViolationKind::RootMismatch, "transactions_root " + block.transactions_root.str() + " != recomputed " + root.str());
  }
  // The header hash is recomputed over the recomputed root, so a payload
  // edit shows up as a hash mismatch as well as a root mismatch.
  const auto hash = compute_block_hash(block.index, block.nonce, block.timestamp, block.previous_hash, root,
                                       block.authority);
  if (hash != block.hash) {
    report(ViolationKind::HashMismatch, "hash " + block.hash.str() + " != recomputed " + hash.str());
  }

  if (prev == nullptr) {
    if (block.index != 0) report(ViolationKind::IndexGap, "first block has index " + std::to_string(block.index));
    if (block.previous_hash != HexDigest::zero()) report(ViolationKind::LinkMismatch, "genesis previousHash is not zero");
    if (block.nonce != BlockType::genesis || !block.transactions.empty()) {
      report(ViolationKind::MalformedBlock, "first block is not a genesis block");
    }
  } else {
    if (block.nonce == BlockType::genesis) {
      report(ViolationKind::MalformedBlock, "genesis block type after the first block");
    } else if (block.transactions.size() != 1) {
      report(ViolationKind::MalformedBlock,
             "expected exactly one transaction, found " + std::to_string(block.transactions.size()));
    } else if (auto err = shape_error(block.transactions.front(), block.nonce)) {
      report(ViolationKind::MalformedBlock, *err);
    }
    if (block.index != prev->index + 1) {
      report(ViolationKind::IndexGap,
             "index " + std::to_string(block.index) + " does not follow " + std::to_string(prev->index));
    }
    if (block.previous_hash != prev->hash) {
      report(ViolationKind::LinkMismatch, "previousHash does not match hash of block " + std::to_string(prev->index));
    }
    if (block.timestamp < prev->timestamp) {
      report(ViolationKind::BadTimestampOrder,
             "timestamp " + block.timestamp.to_string() + " precedes " + prev->timestamp.to_string());
    }
  }

  const bool signature_ok = cache ? cache->verify(block.authority, block.hash, block.signature)
                                  : crypto::verify_signature(block.authority, block.hash, block.signature);
  if (!signature_ok) report(ViolationKind::BadSignature, "signature does not verify under authority");
  if (!validators.admits(block.authority, block.timestamp)) {
    report(ViolationKind::UnknownAuthority, "authority is not a signing validator at " + block.timestamp.to_string());
  }
  return out;
}

VerificationReport verify_chain(std::span<const Block> blocks, const ValidatorSet& validators, SignatureCache* cache) {
  VerificationReport report;
  if (blocks.empty()) {
    report.violations.push_back({0, ViolationKind::IndexGap, "chain has no genesis block"});
  }
  for (std::size_t i = 0; i < blocks.size(); ++i) {
    auto v = verify_block(blocks[i], i == 0 ? nullptr : &blocks[i - 1], validators, cache);
    // Report by position: a tampered index field must not move the finding.
    for (auto& violation : v) violation.block_index = i;
    report.violations.insert(report.violations.end(), std::make_move_iterator(v.begin()),
                             std::make_move_iterator(v.end()));
  }
  report.valid = report.violations.empty();
  return report;
}

namespace {

std::string describe(const std::vector<Violation>& violations) {
  std::string what = "block rejected:";
  for (const auto& v : violations) {
    what += " ";
    what += to_string(v.kind);
    what += " (" + v.detail + ");";
  }
  return what;
}

}  // namespace

AppendRejected::AppendRejected(std::vector<Violation> violations)
    : Error(Errc::append_rejected, describe(violations)), violations_(std::move(violations)) {}

bool AppendRejected::has(ViolationKind kind) const {
  for (const auto& v : violations_) {
    if (v.kind == kind) return true;
  }
  return false;
}

void Chain::append(Block block, const ValidatorSet& validators, const std::function<void(const Block&)>& before_commit) {
  if (blocks_.empty()) throw Error(Errc::validation, "chain has no genesis block");
  if (block.index < blocks_.size()) {
    throw Error(Errc::duplicate_block, "block index " + std::to_string(block.index) + " already present");
  }
  auto violations = verify_block(block, &blocks_.back(), validators);
  if (!violations.empty()) throw AppendRejected(std::move(violations));
  if (before_commit) before_commit(block);
  blocks_.push_back(std::move(block));
}

void Chain::start(Block genesis, const ValidatorSet& validators, const std::function<void(const Block&)>& before_commit) {
  if (!blocks_.empty()) throw Error(Errc::duplicate_block, "chain already has a genesis block");
  auto violations = verify_block(genesis, nullptr, validators);
  if (!violations.empty()) throw AppendRejected(std::move(violations));
  if (before_commit) before_commit(genesis);
  blocks_.push_back(std::move(genesis));
}

}  // namespace gatechain::chain
