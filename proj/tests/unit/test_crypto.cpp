#include <gtest/gtest.h>

#include <random>

#include "gatechain/crypto.hpp"
#include "gatechain/error.hpp"
#include "oracle/sha256_ref.hpp"

using namespace gatechain::crypto;
using gatechain::Errc;
using gatechain::Error;

namespace {

std::string flip_nibble(std::string hex, std::size_t pos) {
  const char c = hex[pos];
  hex[pos] = c == '0' ? '1' : '0';
  return hex;
}

HexDigest random_digest(std::mt19937_64& rng) {
  std::string s;
  for (int i = 0; i < 64; ++i) s += "0123456789abcdef"[rng() % 16];
  return HexDigest(s);
}

}  // namespace

TEST(Sha256, KnownVectors) {
  EXPECT_EQ(sha256_hex("").str(), "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855");
  EXPECT_EQ(sha256_hex("abc").str(), "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
}

TEST(Sha256, OracleCrossCheck) {
  std::mt19937_64 rng(7);
  for (std::size_t len : {0, 1, 55, 56, 63, 64, 65, 119, 120, 1000}) {
    std::string data(len, '\0');
    for (auto& c : data) c = static_cast<char>(rng());
    EXPECT_EQ(sha256_hex(data).str(), oracle::sha256_ref(data)) << len;
  }
  EXPECT_EQ(oracle::sha256_ref("abc"), "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
}

TEST(HexDigestType, EnforcesLowercase64) {
  EXPECT_TRUE(HexDigest::parse(std::string(64, 'a')));
  EXPECT_FALSE(HexDigest::parse(std::string(64, 'A')));
  EXPECT_FALSE(HexDigest::parse(std::string(63, 'a')));
  EXPECT_FALSE(HexDigest::parse(std::string(64, 'g')));
  EXPECT_THROW(HexDigest("xyz"), Error);
  EXPECT_EQ(HexDigest::zero().str(), std::string(64, '0'));
}

TEST(Encoding, HexAndBase64) {
  const Bytes b{0x00, 0xff, 0x10};
  EXPECT_EQ(to_hex(b), "00ff10");
  EXPECT_EQ(from_hex("00ff10"), b);
  EXPECT_FALSE(from_hex("00FF10"));
  EXPECT_FALSE(from_hex("0"));
  EXPECT_EQ(base64_encode(Bytes{'f', 'o', 'o', 'b'}), "Zm9vYg==");
  EXPECT_EQ(base64_decode("Zm9vYg=="), (Bytes{'f', 'o', 'o', 'b'}));
  // Non-canonical trailing bits and missing padding are not accepted.
  EXPECT_FALSE(base64_decode("Zm9vYh=="));
  EXPECT_FALSE(base64_decode("Zm9vYg"));
  EXPECT_FALSE(base64_decode("Zm9v Yg=="));
}

TEST(Keys, GenerateSignVerify) {
  const auto k = KeyPair::generate();
  EXPECT_TRUE(is_valid_public_key(k.public_key()));
  EXPECT_EQ(k.public_key().size(), 66u);
  const auto h = sha256_hex("payload");
  const auto s = sign_digest(k, h);
  EXPECT_TRUE(verify_signature(k.public_key(), h, s));
  EXPECT_NE(KeyPair::generate().public_key(), k.public_key());
}

TEST(Keys, PublicKeyRederivesFromPrivate) {
  for (int i = 0; i < 20; ++i) {
    const auto k = KeyPair::generate();
    const auto again = KeyPair::from_private_hex(k.private_key_hex());
    EXPECT_EQ(again.public_key(), k.public_key());
    const auto h = sha256_hex(std::to_string(i));
    EXPECT_TRUE(verify_signature(k.public_key(), h, again.sign(h)));
  }
}

TEST(Keys, RejectsBadPrivateKeys) {
  EXPECT_THROW(KeyPair::from_private_hex(std::string(64, '0')), Error);
  EXPECT_THROW(KeyPair::from_private_hex(std::string(64, 'f')), Error);  // above the group order
  EXPECT_THROW(KeyPair::from_private_hex("abcd"), Error);
}

TEST(Signatures, NibbleFlippedDigestFails) {
  std::mt19937_64 rng(11);
  const auto k = KeyPair::generate();
  for (int i = 0; i < 100; ++i) {
    const auto h = random_digest(rng);
    const auto s = k.sign(h);
    const HexDigest other(flip_nibble(h.str(), rng() % 64));
    EXPECT_FALSE(verify_signature(k.public_key(), other, s));
  }
}

TEST(Signatures, WrongKeyFails) {
  const auto k1 = KeyPair::generate();
  const auto k2 = KeyPair::generate();
  const auto h = sha256_hex("x");
  EXPECT_FALSE(verify_signature(k2.public_key(), h, k1.sign(h)));
}

TEST(Signatures, CorruptedSignatureFails) {
  std::mt19937_64 rng(13);
  const auto k = KeyPair::generate();
  const auto h = sha256_hex("y");
  const auto s = k.sign(h);
  for (int i = 0; i < 200; ++i) {
    EXPECT_FALSE(verify_signature(k.public_key(), h, flip_nibble(s, rng() % s.size())));
  }
}

TEST(Signatures, MalformedInputsAreFalseNotCrash) {
  const auto k = KeyPair::generate();
  const auto h = sha256_hex("z");
  const auto s = k.sign(h);
  EXPECT_FALSE(verify_signature(k.public_key(), h, ""));
  EXPECT_FALSE(verify_signature(k.public_key(), h, "zz"));
  EXPECT_FALSE(verify_signature(k.public_key(), h, s.substr(1)));
  EXPECT_FALSE(verify_signature(k.public_key(), h, s + "00"));
  std::string upper = s;
  for (auto& c : upper) c = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
  if (upper != s) EXPECT_FALSE(verify_signature(k.public_key(), h, upper));
  EXPECT_FALSE(verify_signature("", h, s));
  EXPECT_FALSE(verify_signature("02" + std::string(64, '0'), h, s));
  EXPECT_FALSE(verify_signature("04" + k.public_key().substr(2), h, s));
  EXPECT_FALSE(is_valid_public_key("not hex"));
}

TEST(Encryption, RoundTrip) {
  const auto key = DataKey::generate();
  for (std::string text : {std::string(""), std::string("Ali Veli"), std::string("Мария 李雷 🙂"),
                           std::string(10 * 1024, 'x'), std::string("nul\0inside", 10)}) {
    EXPECT_EQ(decrypt_field(key, encrypt_field(key, text)), text);
  }
}

TEST(Encryption, FreshNonceEachCall) {
  const auto key = DataKey::generate();
  EXPECT_NE(encrypt_field(key, "Ali Veli"), encrypt_field(key, "Ali Veli"));
}

TEST(Encryption, LayoutIsNonceCiphertextTag) {
  const auto key = DataKey::generate();
  const auto c = encrypt_field(key, "hello");
  const auto raw = base64_decode(c);
  ASSERT_TRUE(raw);
  EXPECT_EQ(raw->size(), kNonceSize + 5 + kTagSize);
}

TEST(Encryption, EveryBitFlipIsDetected) {
  const auto key = DataKey::generate();
  const auto c = encrypt_field(key, "PASSPORT-123");
  const auto raw = *base64_decode(c);
  for (std::size_t bit = 0; bit < raw.size() * 8; ++bit) {
    auto bad = raw;
    bad[bit / 8] ^= static_cast<std::uint8_t>(1u << (bit % 8));
    try {
      decrypt_field(key, base64_encode(bad));
      FAIL() << "bit " << bit;
    } catch (const Error& e) {
      EXPECT_EQ(e.code(), Errc::decryption);
    }
  }
}

TEST(Encryption, WrongKeysFail) {
  const auto key = DataKey::generate();
  const auto c = encrypt_field(key, "secret");
  for (int i = 0; i < 100; ++i) {
    EXPECT_THROW(decrypt_field(DataKey::generate(), c), Error);
  }
}

TEST(Encryption, GarbageAndShortInputsFail) {
  const auto key = DataKey::generate();
  for (std::string bad : {std::string(""), std::string("!!!"), base64_encode(Bytes(27, 0)), std::string("AAAA")}) {
    try {
      decrypt_field(key, bad);
      FAIL() << bad;
    } catch (const Error& e) {
      EXPECT_EQ(e.code(), Errc::decryption);
    }
  }
}

TEST(DataKeyType, HexRoundTripAndLength) {
  const auto key = DataKey::generate();
  EXPECT_EQ(key.to_hex().size(), 64u);
  EXPECT_EQ(DataKey::from_hex(key.to_hex()).to_hex(), key.to_hex());
  EXPECT_THROW(DataKey::from_hex("abcd"), Error);
  EXPECT_THROW(DataKey::from_bytes(Bytes(31, 1)), Error);
}
