#include "gatechain/crypto.hpp"

#include <openssl/bn.h>
#include <openssl/core_names.h>
#include <openssl/crypto.h>
#include <openssl/ec.h>
#include <openssl/evp.h>
#include <openssl/obj_mac.h>
#include <openssl/param_build.h>
#include <openssl/rand.h>

#include "gatechain/error.hpp"

namespace gatechain::crypto {
namespace {

struct CtxFree {
  void operator()(EVP_PKEY_CTX* p) const { EVP_PKEY_CTX_free(p); }
  void operator()(EVP_CIPHER_CTX* p) const { EVP_CIPHER_CTX_free(p); }
  void operator()(EVP_MD_CTX* p) const { EVP_MD_CTX_free(p); }
  void operator()(EVP_PKEY* p) const { EVP_PKEY_free(p); }
  void operator()(BIGNUM* p) const { BN_clear_free(p); }
  void operator()(EC_GROUP* p) const { EC_GROUP_free(p); }
  void operator()(EC_POINT* p) const { EC_POINT_free(p); }
  void operator()(OSSL_PARAM_BLD* p) const { OSSL_PARAM_BLD_free(p); }
  void operator()(OSSL_PARAM* p) const { OSSL_PARAM_free(p); }
};
template <typename T>
using Owned = std::unique_ptr<T, CtxFree>;

constexpr const char* kCurve = "prime256v1";

[[noreturn]] void crypto_fail(const char* what) { throw Error(Errc::crypto, what); }

int hex_value(char c) {
  if (c >= '0' && c <= '9') return c - '0';
  if (c >= 'a' && c <= 'f') return c - 'a' + 10;
  return -1;
}

// Builds an EVP_PKEY from an encoded public point and optional private scalar.
Owned<EVP_PKEY> pkey_from_parts(std::span<const std::uint8_t> pub, const BIGNUM* priv) {
  Owned<OSSL_PARAM_BLD> bld(OSSL_PARAM_BLD_new());
  if (!bld) return nullptr;
  if (!OSSL_PARAM_BLD_push_utf8_string(bld.get(), OSSL_PKEY_PARAM_GROUP_NAME, kCurve, 0) ||
      !OSSL_PARAM_BLD_push_octet_string(bld.get(), OSSL_PKEY_PARAM_PUB_KEY, pub.data(), pub.size())) {
    return nullptr;
  }
  if (priv && !OSSL_PARAM_BLD_push_BN(bld.get(), OSSL_PKEY_PARAM_PRIV_KEY, priv)) return nullptr;
  Owned<OSSL_PARAM> params(OSSL_PARAM_BLD_to_param(bld.get()));
  Owned<EVP_PKEY_CTX> ctx(EVP_PKEY_CTX_new_from_name(nullptr, "EC", nullptr));
  if (!params || !ctx || EVP_PKEY_fromdata_init(ctx.get()) <= 0) return nullptr;
  EVP_PKEY* raw = nullptr;
  if (EVP_PKEY_fromdata(ctx.get(), &raw, priv ? EVP_PKEY_KEYPAIR : EVP_PKEY_PUBLIC_KEY, params.get()) <= 0) {
    return nullptr;
  }
  return Owned<EVP_PKEY>(raw);
}

std::string encoded_public_key(EVP_PKEY* pkey) {
  std::uint8_t buf[65];
  std::size_t len = 0;
  if (EVP_PKEY_get_octet_string_param(pkey, OSSL_PKEY_PARAM_PUB_KEY, buf, sizeof buf, &len) <= 0) {
    crypto_fail("cannot encode public key");
  }
  if (len == 33) return to_hex({buf, len});
  if (len != 65 || buf[0] != 0x04) crypto_fail("unexpected public key encoding");
  // SEC1 compression: parity of y selects the 02/03 prefix, then x.
  buf[0] = (buf[64] & 1) ? 0x03 : 0x02;
  return to_hex({buf, 33});
}

// Decodes a hex public key into a verifying EVP_PKEY; nullptr if malformed
// or not on the curve.
Owned<EVP_PKEY> decode_public_key(std::string_view hex) {
  if (hex.size() != 66) return nullptr;
  auto bytes = from_hex(hex);
  if (!bytes) return nullptr;
  return pkey_from_parts(*bytes, nullptr);
}

}  // namespace

std::string to_hex(std::span<const std::uint8_t> bytes) {
  static constexpr char kHex[] = "0123456789abcdef";
  std::string out;
  out.reserve(bytes.size() * 2);
  for (auto b : bytes) {
    out.push_back(kHex[b >> 4]);
    out.push_back(kHex[b & 0xF]);
  }
  return out;
}

std::optional<Bytes> from_hex(std::string_view hex) {
  if (hex.size() % 2 != 0) return std::nullopt;
  Bytes out(hex.size() / 2);
  for (std::size_t i = 0; i < out.size(); ++i) {
    const int hi = hex_value(hex[2 * i]);
    const int lo = hex_value(hex[2 * i + 1]);
    if (hi < 0 || lo < 0) return std::nullopt;
    out[i] = static_cast<std::uint8_t>((hi << 4) | lo);
  }
  return out;
}

std::string base64_encode(std::span<const std::uint8_t> bytes) {
  std::string out(4 * ((bytes.size() + 2) / 3), '\0');
  const int n = EVP_EncodeBlock(reinterpret_cast<unsigned char*>(out.data()), bytes.data(),
                                static_cast<int>(bytes.size()));
  out.resize(static_cast<std::size_t>(n));
  return out;
}

std::optional<Bytes> base64_decode(std::string_view text) {
  if (text.size() % 4 != 0) return std::nullopt;
  for (std::size_t i = 0; i < text.size(); ++i) {
    const char c = text[i];
    const bool alpha = (c >= 'A' && c <= 'Z') || (c >= 'a' && c <= 'z') || (c >= '0' && c <= '9') ||
                       c == '+' || c == '/';
    const bool pad = c == '=' && i + 2 >= text.size();
    if (!alpha && !pad) return std::nullopt;
  }
  std::size_t padding = 0;
  if (!text.empty() && text.back() == '=') ++padding;
  if (text.size() > 1 && text[text.size() - 2] == '=') {
    if (padding == 0) return std::nullopt;
    ++padding;
  }
  Bytes out(3 * (text.size() / 4));
  const int n = EVP_DecodeBlock(out.data(), reinterpret_cast<const unsigned char*>(text.data()),
                                static_cast<int>(text.size()));
  if (n < 0) return std::nullopt;
  out.resize(static_cast<std::size_t>(n) - padding);
  // Unused low bits in the last quantum must be zero.
  if (base64_encode(out) != text) return std::nullopt;
  return out;
}

HexDigest::HexDigest(std::string hex) : value_(std::move(hex)) {
  if (value_.size() != 64 || !from_hex(value_)) {
    throw Error(Errc::validation, "not a 64-character lowercase hex digest");
  }
}

std::optional<HexDigest> HexDigest::parse(std::string_view hex) {
  if (hex.size() != 64 || !from_hex(hex)) return std::nullopt;
  return HexDigest(std::string(hex));
}

std::array<std::uint8_t, 32> HexDigest::bytes() const {
  std::array<std::uint8_t, 32> out{};
  const auto decoded = from_hex(value_);
  std::copy(decoded->begin(), decoded->end(), out.begin());
  return out;
}

HexDigest sha256_hex(std::string_view data) {
  std::uint8_t md[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(data.data(), data.size(), md, &len, EVP_sha256(), nullptr) != 1) {
    crypto_fail("SHA-256 failed");
  }
  return HexDigest(to_hex({md, len}));
}

Bytes random_bytes(std::size_t n) {
  Bytes out(n);
  if (n > 0 && RAND_bytes(out.data(), static_cast<int>(n)) != 1) crypto_fail("randomness unavailable");
  return out;
}

DataKey DataKey::generate() {
  DataKey k;
  if (RAND_priv_bytes(k.key_.data(), static_cast<int>(kSize)) != 1) crypto_fail("randomness unavailable");
  return k;
}

DataKey DataKey::from_hex(std::string_view hex) {
  const auto bytes = crypto::from_hex(hex);
  if (!bytes || bytes->size() != kSize) {
    throw Error(Errc::validation, "data key must be 64 lowercase hex characters");
  }
  return from_bytes(*bytes);
}

DataKey DataKey::from_bytes(std::span<const std::uint8_t> bytes) {
  if (bytes.size() != kSize) throw Error(Errc::validation, "data key must be 32 bytes");
  DataKey k;
  std::copy(bytes.begin(), bytes.end(), k.key_.begin());
  return k;
}

DataKey::~DataKey() { OPENSSL_cleanse(key_.data(), key_.size()); }

std::string DataKey::to_hex() const { return crypto::to_hex(key_); }

std::string encrypt_field(const DataKey& key, std::string_view plaintext) {
  Bytes out(kNonceSize + plaintext.size() + kTagSize);
  if (RAND_bytes(out.data(), static_cast<int>(kNonceSize)) != 1) crypto_fail("randomness unavailable");

  Owned<EVP_CIPHER_CTX> ctx(EVP_CIPHER_CTX_new());
  int len = 0;
  if (!ctx || EVP_EncryptInit_ex(ctx.get(), EVP_aes_256_gcm(), nullptr, key.bytes().data(), out.data()) != 1 ||
      EVP_EncryptUpdate(ctx.get(), out.data() + kNonceSize, &len,
                        reinterpret_cast<const unsigned char*>(plaintext.data()),
                        static_cast<int>(plaintext.size())) != 1 ||
      EVP_EncryptFinal_ex(ctx.get(), out.data() + kNonceSize + len, &len) != 1 ||
      EVP_CIPHER_CTX_ctrl(ctx.get(), EVP_CTRL_GCM_GET_TAG, static_cast<int>(kTagSize),
                          out.data() + kNonceSize + plaintext.size()) != 1) {
    crypto_fail("AES-256-GCM encryption failed");
  }
  return base64_encode(out);
}

std::string decrypt_field(const DataKey& key, std::string_view cipher) {
  const auto raw = base64_decode(cipher);
  if (!raw) throw Error(Errc::decryption, "cipher field is not canonical base64");
  if (raw->size() < kNonceSize + kTagSize) throw Error(Errc::decryption, "cipher field too short");

  const std::size_t body = raw->size() - kNonceSize - kTagSize;
  std::string plain(body, '\0');
  Bytes tag(raw->end() - kTagSize, raw->end());
  Owned<EVP_CIPHER_CTX> ctx(EVP_CIPHER_CTX_new());
  int len = 0;
  if (!ctx || EVP_DecryptInit_ex(ctx.get(), EVP_aes_256_gcm(), nullptr, key.bytes().data(), raw->data()) != 1 ||
      EVP_DecryptUpdate(ctx.get(), reinterpret_cast<unsigned char*>(plain.data()), &len,
                        raw->data() + kNonceSize, static_cast<int>(body)) != 1 ||
      EVP_CIPHER_CTX_ctrl(ctx.get(), EVP_CTRL_GCM_SET_TAG, static_cast<int>(kTagSize), tag.data()) != 1) {
    throw Error(Errc::decryption, "AES-256-GCM decryption failed");
  }
  if (EVP_DecryptFinal_ex(ctx.get(), reinterpret_cast<unsigned char*>(plain.data()) + len, &len) != 1) {
    OPENSSL_cleanse(plain.data(), plain.size());
    throw Error(Errc::decryption, "authentication tag mismatch");
  }
  return plain;
}

KeyPair KeyPair::generate() {
  EVP_PKEY* raw = EVP_EC_gen(kCurve);
  if (!raw) crypto_fail("P-256 key generation failed");
  std::shared_ptr<EVP_PKEY> pkey(raw, EVP_PKEY_free);
  auto pub = encoded_public_key(pkey.get());
  return KeyPair(std::move(pkey), std::move(pub));
}

KeyPair KeyPair::from_private_hex(std::string_view hex) {
  const auto bytes = from_hex(hex);
  if (!bytes || bytes->size() != 32) crypto_fail("private key must be 64 lowercase hex characters");

  Owned<EC_GROUP> group(EC_GROUP_new_by_curve_name(NID_X9_62_prime256v1));
  Owned<BIGNUM> priv(BN_bin2bn(bytes->data(), static_cast<int>(bytes->size()), nullptr));
  if (!group || !priv) crypto_fail("allocation failed");
  if (BN_is_zero(priv.get()) || BN_cmp(priv.get(), EC_GROUP_get0_order(group.get())) >= 0) {
    crypto_fail("private scalar out of range");
  }
  Owned<EC_POINT> point(EC_POINT_new(group.get()));
  if (!point || EC_POINT_mul(group.get(), point.get(), priv.get(), nullptr, nullptr, nullptr) != 1) {
    crypto_fail("public key derivation failed");
  }
  std::uint8_t pub[65];
  const std::size_t pub_len =
      EC_POINT_point2oct(group.get(), point.get(), POINT_CONVERSION_UNCOMPRESSED, pub, sizeof pub, nullptr);
  auto pkey = pkey_from_parts({pub, pub_len}, priv.get());
  if (!pkey) crypto_fail("cannot import private key");
  std::shared_ptr<EVP_PKEY> shared(pkey.release(), EVP_PKEY_free);
  auto pub_hex = encoded_public_key(shared.get());
  return KeyPair(std::move(shared), std::move(pub_hex));
}

std::string KeyPair::private_key_hex() const {
  BIGNUM* raw = nullptr;
  if (EVP_PKEY_get_bn_param(pkey_.get(), OSSL_PKEY_PARAM_PRIV_KEY, &raw) <= 0) {
    crypto_fail("cannot export private key");
  }
  Owned<BIGNUM> priv(raw);
  std::array<std::uint8_t, 32> buf{};
  if (BN_bn2binpad(priv.get(), buf.data(), static_cast<int>(buf.size())) < 0) crypto_fail("private key too large");
  auto hex = to_hex(buf);
  OPENSSL_cleanse(buf.data(), buf.size());
  return hex;
}

std::string KeyPair::sign(const HexDigest& digest) const {
  const auto md = digest.bytes();
  Owned<EVP_PKEY_CTX> ctx(EVP_PKEY_CTX_new_from_pkey(nullptr, pkey_.get(), nullptr));
  std::uint8_t sig[80];
  std::size_t sig_len = sizeof sig;
  if (!ctx || EVP_PKEY_sign_init(ctx.get()) <= 0 ||
      EVP_PKEY_sign(ctx.get(), sig, &sig_len, md.data(), md.size()) <= 0) {
    crypto_fail("ECDSA signing failed");
  }
  return to_hex({sig, sig_len});
}

bool verify_signature(std::string_view public_key, const HexDigest& digest, std::string_view signature) {
  const auto sig = from_hex(signature);
  if (!sig || sig->empty() || sig->size() > 72) return false;
  auto pkey = decode_public_key(public_key);
  if (!pkey) return false;
  Owned<EVP_PKEY_CTX> ctx(EVP_PKEY_CTX_new_from_pkey(nullptr, pkey.get(), nullptr));
  if (!ctx || EVP_PKEY_verify_init(ctx.get()) <= 0) return false;
  const auto md = digest.bytes();
  return EVP_PKEY_verify(ctx.get(), sig->data(), sig->size(), md.data(), md.size()) == 1;
}

bool is_valid_public_key(std::string_view public_key) { return decode_public_key(public_key) != nullptr; }

}  // namespace gatechain::crypto
