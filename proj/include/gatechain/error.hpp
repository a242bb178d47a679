#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace gatechain {

enum class Errc {
  serialization,
  crypto,
  decryption,
  validation,
  clock_regression,
  duplicate_block,
  append_rejected,
  permission_denied,
  duplicate_key,
  unknown_key,
  already_revoked,
  duplicate_open_entry,
  exit_without_open_entry,
  expired_passport,
  data_integrity,
  io,
  index_mismatch,
  load_error,
  already_exists,
};

std::string_view to_string(Errc code) noexcept;

// Single exception type for the library; callers dispatch on code().
class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& what) : std::runtime_error(what), code_(code) {}
  Errc code() const noexcept { return code_; }

 private:
  Errc code_;
};

}  // namespace gatechain
