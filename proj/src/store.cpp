#include "gatechain/store.hpp"

#include <fcntl.h>
#include <unistd.h>

#include <cerrno>
#include <cstring>
#include <fstream>
#include <sstream>

#include "gatechain/error.hpp"
#include "json.hpp"

namespace gatechain::store {
namespace {

using nlohmann::json;

[[noreturn]] void io_fail(const std::string& what) {
  throw Error(Errc::io, what + ": " + std::strerror(errno));
}

void write_all(int fd, std::string_view data, const std::filesystem::path& path) {
  while (!data.empty()) {
    const ssize_t n = ::write(fd, data.data(), data.size());
    if (n < 0) {
      if (errno == EINTR) continue;
      io_fail("write to " + path.string());
    }
    data.remove_prefix(static_cast<std::size_t>(n));
  }
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) io_fail("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

LoadResult load_chain(const std::filesystem::path& path) {
  const std::string text = read_file(path);
  LoadResult result;
  std::size_t pos = 0;
  std::uint64_t line_no = 0;
  while (pos < text.size()) {
    const auto nl = text.find('\n', pos);
    ++line_no;
    if (nl == std::string::npos) {
      result.warnings.push_back("discarded torn final line " + std::to_string(line_no) + " (" +
                                std::to_string(text.size() - pos) + " bytes without newline)");
      break;
    }
    const std::string_view line(text.data() + pos, nl - pos);
    chain::Block block;
    try {
      block = chain::parse_block(line);
    } catch (const Error& e) {
      throw Error(Errc::load_error, path.string() + ": line " + std::to_string(line_no) + ": " + e.what());
    }
    if (block.index != line_no - 1) {
      throw Error(Errc::load_error, path.string() + ": line " + std::to_string(line_no) + ": holds block index " +
                                        std::to_string(block.index));
    }
    result.blocks.push_back(std::move(block));
    pos = nl + 1;
    result.valid_bytes = pos;
  }
  return result;
}

ChainStore::ChainStore(std::filesystem::path path, int fd, std::uint64_t lines)
    : path_(std::move(path)), fd_(fd), lines_(lines) {}

ChainStore::ChainStore(ChainStore&& other) noexcept
    : path_(std::move(other.path_)), fd_(std::exchange(other.fd_, -1)), lines_(other.lines_) {}

ChainStore& ChainStore::operator=(ChainStore&& other) noexcept {
  if (this != &other) {
    if (fd_ >= 0) ::close(fd_);
    path_ = std::move(other.path_);
    fd_ = std::exchange(other.fd_, -1);
    lines_ = other.lines_;
  }
  return *this;
}

ChainStore::~ChainStore() {
  if (fd_ >= 0) ::close(fd_);
}

ChainStore ChainStore::create(const std::filesystem::path& path) {
  const int fd = ::open(path.c_str(), O_WRONLY | O_CREAT | O_EXCL | O_APPEND | O_CLOEXEC, 0644);
  if (fd < 0) {
    if (errno == EEXIST) throw Error(Errc::already_exists, path.string() + " already exists");
    io_fail("cannot create " + path.string());
  }
  return ChainStore(path, fd, 0);
}

ChainStore ChainStore::open(const std::filesystem::path& path, LoadResult& loaded) {
  loaded = load_chain(path);
  std::error_code ec;
  if (std::filesystem::file_size(path, ec) != loaded.valid_bytes && !ec) {
    std::filesystem::resize_file(path, loaded.valid_bytes, ec);
    if (ec) throw Error(Errc::io, "cannot truncate torn tail of " + path.string() + ": " + ec.message());
  }
  const int fd = ::open(path.c_str(), O_WRONLY | O_APPEND | O_CLOEXEC);
  if (fd < 0) io_fail("cannot open " + path.string());
  return ChainStore(path, fd, loaded.blocks.size());
}

void ChainStore::append_block_line(const chain::Block& block) {
  if (block.index != lines_) {
    throw Error(Errc::index_mismatch,
                "block index " + std::to_string(block.index) + " does not match line count " + std::to_string(lines_));
  }
  write_all(fd_, chain::serialize_block(block) + "\n", path_);
  if (::fsync(fd_) != 0) io_fail("fsync " + path_.string());
  ++lines_;
}

KeyStore::KeyStore(crypto::DataKey data_key, authority::AuthorityRegistry authorities, std::string admin_key)
    : data_key_(std::move(data_key)), authorities_(std::move(authorities)), admin_key_(std::move(admin_key)) {}

void KeyStore::host(const crypto::KeyPair& key) { hosted_[key.public_key()] = key.private_key_hex(); }

bool KeyStore::hosts(std::string_view public_key) const { return hosted_.find(public_key) != hosted_.end(); }

crypto::KeyPair KeyStore::identity(std::string_view public_key) const {
  const auto it = hosted_.find(public_key);
  if (it == hosted_.end()) throw Error(Errc::unknown_key, "no private key hosted for " + std::string(public_key));
  return crypto::KeyPair::from_private_hex(it->second);
}

std::vector<std::string> KeyStore::hosted_keys() const {
  std::vector<std::string> keys;
  for (const auto& [pub, _] : hosted_) keys.push_back(pub);
  return keys;
}

void KeyStore::save(const std::filesystem::path& path) const {
  json doc;
  doc["version"] = 1;
  doc["data_key"] = data_key_.to_hex();
  doc["admin_key"] = admin_key_;
  doc["authorities"] = json::array();
  for (const auto& r : authorities_.records()) {
    json rec{{"public_key", r.public_key},
             {"display_name", r.display_name},
             {"role", authority::to_string(r.role)},
             {"status", authority::to_string(r.status)},
             {"added_at", r.added_at.to_string()}};
    rec["revoked_at"] = r.revoked_at ? json(r.revoked_at->to_string()) : json(nullptr);
    doc["authorities"].push_back(std::move(rec));
  }
  doc["audit"] = json::array();
  for (const auto& a : authorities_.audit_log()) {
    doc["audit"].push_back(
        {{"at", a.at.to_string()}, {"actor", a.actor}, {"action", a.action}, {"target", a.target}, {"detail", a.detail}});
  }
  doc["hosted_keys"] = json::object();
  for (const auto& [pub, priv] : hosted_) doc["hosted_keys"][pub] = priv;

  const auto tmp = std::filesystem::path(path.string() + ".tmp");
  const int fd = ::open(tmp.c_str(), O_WRONLY | O_CREAT | O_TRUNC | O_CLOEXEC, 0600);
  if (fd < 0) io_fail("cannot create " + tmp.string());
  try {
    write_all(fd, doc.dump(2) + "\n", tmp);
    if (::fsync(fd) != 0) io_fail("fsync " + tmp.string());
  } catch (...) {
    ::close(fd);
    throw;
  }
  ::close(fd);
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) throw Error(Errc::io, "cannot replace " + path.string() + ": " + ec.message());
}

KeyStore KeyStore::load(const std::filesystem::path& path) {
  const std::string text = read_file(path);
  auto fail = [&](const std::string& what) { return Error(Errc::load_error, path.string() + ": " + what); };
  try {
    const json doc = json::parse(text);
    const std::string data_key_hex = doc.at("data_key").get<std::string>();
    if (data_key_hex.size() != 64) throw fail("data_key must be 64 hex characters");
    auto data_key = crypto::DataKey::from_hex(data_key_hex);

    std::vector<authority::AuthorityRecord> records;
    for (const auto& r : doc.at("authorities")) {
      authority::AuthorityRecord rec;
      rec.public_key = r.at("public_key").get<std::string>();
      rec.display_name = r.at("display_name").get<std::string>();
      const auto role = authority::parse_role(r.at("role").get<std::string>());
      if (!role) throw fail("unknown role for " + rec.public_key);
      rec.role = *role;
      const auto status = r.at("status").get<std::string>();
      if (status != "active" && status != "revoked") throw fail("unknown status for " + rec.public_key);
      rec.status = status == "active" ? authority::Status::active : authority::Status::revoked;
      rec.added_at = Timestamp::parse(r.at("added_at").get<std::string>());
      if (r.contains("revoked_at") && !r.at("revoked_at").is_null()) {
        rec.revoked_at = Timestamp::parse(r.at("revoked_at").get<std::string>());
      }
      if ((rec.status == authority::Status::revoked) != rec.revoked_at.has_value()) {
        throw fail("status and revoked_at disagree for " + rec.public_key);
      }
      records.push_back(std::move(rec));
    }
    std::vector<authority::AuditEntry> audit;
    for (const auto& a : doc.value("audit", json::array())) {
      audit.push_back({Timestamp::parse(a.at("at").get<std::string>()), a.at("actor").get<std::string>(),
                       a.at("action").get<std::string>(), a.at("target").get<std::string>(),
                       a.at("detail").get<std::string>()});
    }
    KeyStore ks(std::move(data_key), authority::AuthorityRegistry(std::move(records), std::move(audit)),
                doc.at("admin_key").get<std::string>());
    const json hosted = doc.value("hosted_keys", json::object());
    for (const auto& [pub, priv] : hosted.items()) {
      const auto key = crypto::KeyPair::from_private_hex(priv.get<std::string>());
      if (key.public_key() != pub) throw fail("hosted private key does not match " + pub);
      if (ks.authorities_.find(pub) == nullptr) throw fail("hosted key is not a registered authority: " + pub);
      ks.hosted_[pub] = priv.get<std::string>();
    }
    if (ks.authorities_.find(ks.admin_key_) == nullptr) throw fail("admin_key is not a registered authority");
    return ks;
  } catch (const json::exception& e) {
    throw fail(e.what());
  } catch (const Error& e) {
    if (e.code() == Errc::load_error) throw;
    throw fail(e.what());
  }
}

}  // namespace gatechain::store
