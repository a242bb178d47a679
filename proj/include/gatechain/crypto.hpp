#pragma once

#include <array>
#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

typedef struct evp_pkey_st EVP_PKEY;

namespace gatechain::crypto {

using Bytes = std::vector<std::uint8_t>;

std::string to_hex(std::span<const std::uint8_t> bytes);
/// Lowercase hex only; odd length or any other character yields nullopt.
std::optional<Bytes> from_hex(std::string_view hex);

std::string base64_encode(std::span<const std::uint8_t> bytes);
/// Strict: padded, canonical (re-encodes to the same text), no whitespace.
std::optional<Bytes> base64_decode(std::string_view text);

/// 64 lowercase hex characters.
class HexDigest {
 public:
  HexDigest() : value_(64, '0') {}
  /// Throws Error(validation) unless `hex` is 64 lowercase hex characters.
  explicit HexDigest(std::string hex);
  static std::optional<HexDigest> parse(std::string_view hex);
  static HexDigest zero() { return HexDigest(); }

  const std::string& str() const { return value_; }
  std::array<std::uint8_t, 32> bytes() const;

  friend bool operator==(const HexDigest&, const HexDigest&) = default;
  friend auto operator<=>(const HexDigest&, const HexDigest&) = default;

 private:
  std::string value_;
};

HexDigest sha256_hex(std::string_view data);

/// 256-bit symmetric key for field encryption.
class DataKey {
 public:
  static constexpr std::size_t kSize = 32;

  static DataKey generate();
  /// Throws Error(validation) unless exactly 64 lowercase hex characters.
  static DataKey from_hex(std::string_view hex);
  static DataKey from_bytes(std::span<const std::uint8_t> bytes);

  DataKey(const DataKey&) = default;
  DataKey& operator=(const DataKey&) = default;
  ~DataKey();

  std::span<const std::uint8_t, kSize> bytes() const { return key_; }
  std::string to_hex() const;

 private:
  DataKey() = default;
  std::array<std::uint8_t, kSize> key_{};
};

// AES-256-GCM, 96-bit random nonce, 128-bit tag.
inline constexpr std::size_t kNonceSize = 12;
inline constexpr std::size_t kTagSize = 16;

/// base64(nonce || ciphertext || tag) with a fresh nonce per call.
std::string encrypt_field(const DataKey& key, std::string_view plaintext);
/// Throws Error(decryption) on malformed input, wrong key or failed tag.
std::string decrypt_field(const DataKey& key, std::string_view cipher);

/// ECDSA P-256 identity. Immutable and cheap to copy; safe to share across threads.
class KeyPair {
 public:
  static KeyPair generate();
  /// 32-byte big-endian scalar as lowercase hex. Throws Error(crypto) if out of range.
  static KeyPair from_private_hex(std::string_view hex);

  /// SEC1 compressed point, lowercase hex (66 characters).
  const std::string& public_key() const { return public_hex_; }
  std::string private_key_hex() const;

  /// DER signature over the raw 32 digest bytes, lowercase hex.
  std::string sign(const HexDigest& digest) const;

 private:
  KeyPair(std::shared_ptr<EVP_PKEY> pkey, std::string public_hex)
      : pkey_(std::move(pkey)), public_hex_(std::move(public_hex)) {}
  std::shared_ptr<EVP_PKEY> pkey_;
  std::string public_hex_;
};

inline std::string sign_digest(const KeyPair& key, const HexDigest& digest) { return key.sign(digest); }

/// Any malformed key or signature yields false.
bool verify_signature(std::string_view public_key, const HexDigest& digest, std::string_view signature);

/// True if `public_key` is a compressed SEC1 hex encoding of a point on P-256.
bool is_valid_public_key(std::string_view public_key);

/// Random bytes from the OpenSSL DRBG; throws Error(crypto) on failure.
Bytes random_bytes(std::size_t n);

}  // namespace gatechain::crypto
