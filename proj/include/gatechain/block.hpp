#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "gatechain/canonical.hpp"
#include "gatechain/crypto.hpp"

namespace gatechain::chain {

using crypto::HexDigest;

/// Carried in the block's "nonce" field; marks the block type, not a counter.
enum class BlockType { genesis, entry, exit };

std::string_view nonce_code(BlockType type);
std::optional<BlockType> parse_nonce(std::string_view code);

/// One border-crossing event. Identity fields hold CipherField text
/// (base64 AES-256-GCM); the rest is plaintext.
struct EntryExitTransaction {
  std::string passport_number;
  std::string name_surname;
  std::string nationality;
  std::string birthdate;               // YYYY-MM-DD
  std::string passport_validity_date;  // YYYY-MM-DD
  std::string entry_date;              // "YYYY-MM-DD HH:MM" or empty
  std::string entry_gate;
  std::string exit_date;
  std::string exit_gate;
  std::string plate;

  friend bool operator==(const EntryExitTransaction&, const EntryExitTransaction&) = default;
};

canonical::Value to_value(const EntryExitTransaction& tx);

/// Describes why `tx` does not have the shape required for `type`, or
/// nullopt if it does. Genesis blocks carry no transactions, so every tx is
/// malformed for them.
std::optional<std::string> shape_error(const EntryExitTransaction& tx, BlockType type);

struct Block {
  std::uint64_t index = 0;
  BlockType nonce = BlockType::genesis;
  Timestamp timestamp;
  HexDigest previous_hash;
  std::vector<EntryExitTransaction> transactions;
  HexDigest transactions_root;
  std::string authority;
  HexDigest hash;
  std::string signature;

  friend bool operator==(const Block&, const Block&) = default;
};

/// Merkle root over sha256_hex(canonical tx) leaves. Parents hash the
/// concatenated hex text of their children; an odd level repeats its last
/// node; the empty list hashes the empty string.
HexDigest compute_transactions_root(std::span<const EntryExitTransaction> transactions);

/// Hash of the six header fields; `hash` and `signature` are not part of it.
HexDigest compute_block_hash(std::uint64_t index, BlockType nonce, Timestamp timestamp,
                             const HexDigest& previous_hash, const HexDigest& transactions_root,
                             std::string_view authority);
HexDigest compute_block_hash(const Block& block);

Block make_genesis(const crypto::KeyPair& authority, Timestamp timestamp);

/// Everything but the signature: index, link, root and hash are filled in.
/// Throws Error(validation) for a bad type/shape and Error(clock_regression)
/// if `timestamp` precedes `prev`.
Block prepare_block(const Block& prev, BlockType type, EntryExitTransaction tx, std::string_view authority,
                    Timestamp timestamp);

Block build_block(const Block& prev, BlockType type, EntryExitTransaction tx, const crypto::KeyPair& signer,
                  Timestamp timestamp);

canonical::Value to_value(const Block& block);

/// Canonical text of all nine fields, no trailing newline.
std::string serialize_block(const Block& block);

/// Inverse of serialize_block. Rejects unknown or missing keys, wrong value
/// kinds and any text that does not re-serialize to itself.
/// Throws Error(serialization).
Block parse_block(std::string_view text);

}  // namespace gatechain::chain
