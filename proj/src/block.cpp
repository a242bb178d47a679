#include "gatechain/block.hpp"

#include <array>

#include "gatechain/dates.hpp"
#include "gatechain/error.hpp"
#include "json.hpp"

namespace gatechain::chain {
namespace {

using nlohmann::json;

constexpr std::array<const char*, 10> kTxKeys = {
    "Birthdate", "EntryDate",   "EntryGate",      "ExitDate",           "ExitGate",
    "NameSurname", "Nationality", "PassportNumber", "PassportValidityDate", "Plate"};

constexpr std::array<const char*, 9> kBlockKeys = {"authority",    "hash",      "index",
                                                   "nonce",        "previousHash", "signature",
                                                   "timestamp",    "transactions", "transactions_root"};

// Smallest CipherField: base64 of a 12-byte nonce and 16-byte tag.
constexpr std::size_t kMinCipherTextLength = 40;

bool looks_like_cipher(std::string_view field) {
  if (field.size() < kMinCipherTextLength) return false;
  const auto raw = crypto::base64_decode(field);
  return raw && raw->size() >= crypto::kNonceSize + crypto::kTagSize;
}

[[noreturn]] void parse_fail(const std::string& what) { throw Error(Errc::serialization, what); }

void require_keys(const json& obj, std::span<const char* const> keys, const char* what) {
  if (!obj.is_object()) parse_fail(std::string(what) + " is not an object");
  if (obj.size() != keys.size()) parse_fail(std::string(what) + " has unexpected keys");
  for (const char* k : keys) {
    if (!obj.contains(k)) parse_fail(std::string(what) + " is missing '" + k + "'");
  }
}

const std::string& get_string(const json& obj, const char* key) {
  const auto& v = obj.at(key);
  if (!v.is_string()) parse_fail(std::string("'") + key + "' must be a string");
  return v.get_ref<const std::string&>();
}

HexDigest get_digest(const json& obj, const char* key) {
  auto d = HexDigest::parse(get_string(obj, key));
  if (!d) parse_fail(std::string("'") + key + "' is not a hex digest");
  return *d;
}

}  // namespace

std::string_view nonce_code(BlockType type) {
  switch (type) {
    case BlockType::genesis: return "0xFF";
    case BlockType::entry: return "0x00";
    case BlockType::exit: return "0x01";
  }
  return "";
}

std::optional<BlockType> parse_nonce(std::string_view code) {
  if (code == "0xFF") return BlockType::genesis;
  if (code == "0x00") return BlockType::entry;
  if (code == "0x01") return BlockType::exit;
  return std::nullopt;
}

canonical::Value to_value(const EntryExitTransaction& tx) {
  return canonical::Record{
      {"Birthdate", tx.birthdate},
      {"EntryDate", tx.entry_date},
      {"EntryGate", tx.entry_gate},
      {"ExitDate", tx.exit_date},
      {"ExitGate", tx.exit_gate},
      {"NameSurname", tx.name_surname},
      {"Nationality", tx.nationality},
      {"PassportNumber", tx.passport_number},
      {"PassportValidityDate", tx.passport_validity_date},
      {"Plate", tx.plate},
  };
}

std::optional<std::string> shape_error(const EntryExitTransaction& tx, BlockType type) {
  if (type == BlockType::genesis) return "genesis blocks carry no transactions";
  if (!looks_like_cipher(tx.passport_number)) return "PassportNumber is not an encrypted field";
  if (!looks_like_cipher(tx.name_surname)) return "NameSurname is not an encrypted field";
  if (!looks_like_cipher(tx.nationality)) return "Nationality is not an encrypted field";
  if (!dates::parse_date(tx.birthdate)) return "Birthdate must be YYYY-MM-DD";
  if (!dates::parse_date(tx.passport_validity_date)) return "PassportValidityDate must be YYYY-MM-DD";
  if (type == BlockType::entry) {
    if (!dates::parse_datetime(tx.entry_date)) return "EntryDate must be 'YYYY-MM-DD HH:MM'";
    if (tx.entry_gate.empty()) return "EntryGate is required";
    if (!tx.exit_date.empty() || !tx.exit_gate.empty()) return "entry transaction carries exit fields";
  } else {
    if (!dates::parse_datetime(tx.exit_date)) return "ExitDate must be 'YYYY-MM-DD HH:MM'";
    if (tx.exit_gate.empty()) return "ExitGate is required";
    if (!tx.entry_date.empty() || !tx.entry_gate.empty()) return "exit transaction carries entry fields";
  }
  return std::nullopt;
}

HexDigest compute_transactions_root(std::span<const EntryExitTransaction> transactions) {
  if (transactions.empty()) return crypto::sha256_hex("");
  std::vector<HexDigest> level;
  level.reserve(transactions.size());
  for (const auto& tx : transactions) level.push_back(crypto::sha256_hex(canonical::to_bytes(to_value(tx))));
  while (level.size() > 1) {
    if (level.size() % 2 == 1) level.push_back(level.back());
    std::vector<HexDigest> next;
    next.reserve(level.size() / 2);
    for (std::size_t i = 0; i < level.size(); i += 2) {
      next.push_back(crypto::sha256_hex(level[i].str() + level[i + 1].str()));
    }
    level = std::move(next);
  }
  return level.front();
}

HexDigest compute_block_hash(std::uint64_t index, BlockType nonce, Timestamp timestamp,
                             const HexDigest& previous_hash, const HexDigest& transactions_root,
                             std::string_view authority) {
  const canonical::Value header = canonical::Record{
      {"authority", authority},
      {"index", static_cast<std::int64_t>(index)},
      {"nonce", nonce_code(nonce)},
      {"previousHash", previous_hash.str()},
      {"timestamp", timestamp},
      {"transactions_root", transactions_root.str()},
  };
  return crypto::sha256_hex(canonical::to_bytes(header));
}

HexDigest compute_block_hash(const Block& block) {
  return compute_block_hash(block.index, block.nonce, block.timestamp, block.previous_hash,
                            block.transactions_root, block.authority);
}

Block make_genesis(const crypto::KeyPair& authority, Timestamp timestamp) {
  Block b;
  b.index = 0;
  b.nonce = BlockType::genesis;
  b.timestamp = timestamp;
  b.previous_hash = HexDigest::zero();
  b.transactions_root = compute_transactions_root({});
  b.authority = authority.public_key();
  b.hash = compute_block_hash(b);
  b.signature = authority.sign(b.hash);
  return b;
}

Block prepare_block(const Block& prev, BlockType type, EntryExitTransaction tx, std::string_view authority,
                    Timestamp timestamp) {
  if (type == BlockType::genesis) throw Error(Errc::validation, "only entry or exit blocks can be built on a chain");
  if (auto err = shape_error(tx, type)) throw Error(Errc::validation, *err);
  if (timestamp < prev.timestamp) {
    throw Error(Errc::clock_regression,
                "timestamp " + timestamp.to_string() + " precedes previous block " + prev.timestamp.to_string());
  }
  Block b;
  b.index = prev.index + 1;
  b.nonce = type;
  b.timestamp = timestamp;
  b.previous_hash = prev.hash;
  b.transactions.push_back(std::move(tx));
  b.transactions_root = compute_transactions_root(b.transactions);
  b.authority = std::string(authority);
  b.hash = compute_block_hash(b);
  return b;
}

Block build_block(const Block& prev, BlockType type, EntryExitTransaction tx, const crypto::KeyPair& signer,
                  Timestamp timestamp) {
  Block b = prepare_block(prev, type, std::move(tx), signer.public_key(), timestamp);
  b.signature = signer.sign(b.hash);
  return b;
}

canonical::Value to_value(const Block& block) {
  canonical::List txs;
  txs.reserve(block.transactions.size());
  for (const auto& tx : block.transactions) txs.push_back(to_value(tx));
  return canonical::Record{
      {"authority", block.authority},
      {"hash", block.hash.str()},
      {"index", static_cast<std::int64_t>(block.index)},
      {"nonce", nonce_code(block.nonce)},
      {"previousHash", block.previous_hash.str()},
      {"signature", block.signature},
      {"timestamp", block.timestamp},
      {"transactions", std::move(txs)},
      {"transactions_root", block.transactions_root.str()},
  };
}

std::string serialize_block(const Block& block) { return canonical::to_bytes(to_value(block)); }

Block parse_block(std::string_view text) {
  json obj;
  try {
    obj = json::parse(text.begin(), text.end());
  } catch (const json::exception& e) {
    parse_fail(std::string("not valid JSON: ") + e.what());
  }
  require_keys(obj, kBlockKeys, "block");

  Block b;
  const auto& index = obj.at("index");
  if (!index.is_number_unsigned()) parse_fail("'index' must be a non-negative integer");
  b.index = index.get<std::uint64_t>();

  const auto nonce = parse_nonce(get_string(obj, "nonce"));
  if (!nonce) parse_fail("'nonce' is not a known block type");
  b.nonce = *nonce;

  const auto& ts = obj.at("timestamp");
  if (!ts.is_number()) parse_fail("'timestamp' must be a number");
  b.timestamp = ts.is_number_float() ? Timestamp::from_seconds(ts.get<double>())
                                     : Timestamp::from_micros(ts.get<std::int64_t>() * 1'000'000);

  b.previous_hash = get_digest(obj, "previousHash");
  b.transactions_root = get_digest(obj, "transactions_root");
  b.hash = get_digest(obj, "hash");
  b.authority = get_string(obj, "authority");
  b.signature = get_string(obj, "signature");

  const auto& txs = obj.at("transactions");
  if (!txs.is_array()) parse_fail("'transactions' must be a list");
  for (const auto& t : txs) {
    require_keys(t, kTxKeys, "transaction");
    EntryExitTransaction tx;
    tx.birthdate = get_string(t, "Birthdate");
    tx.entry_date = get_string(t, "EntryDate");
    tx.entry_gate = get_string(t, "EntryGate");
    tx.exit_date = get_string(t, "ExitDate");
    tx.exit_gate = get_string(t, "ExitGate");
    tx.name_surname = get_string(t, "NameSurname");
    tx.nationality = get_string(t, "Nationality");
    tx.passport_number = get_string(t, "PassportNumber");
    tx.passport_validity_date = get_string(t, "PassportValidityDate");
    tx.plate = get_string(t, "Plate");
    b.transactions.push_back(std::move(tx));
  }

  if (serialize_block(b) != text) parse_fail("block text is not in canonical form");
  return b;
}

}  // namespace gatechain::chain
