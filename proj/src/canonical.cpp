#include "gatechain/canonical.hpp"

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cmath>
#include <cstdio>

#include "gatechain/error.hpp"

namespace gatechain {

std::string_view to_string(Errc code) noexcept {
  switch (code) {
    case Errc::serialization: return "serialization";
    case Errc::crypto: return "crypto";
    case Errc::decryption: return "decryption";
    case Errc::validation: return "validation";
    case Errc::clock_regression: return "clock_regression";
    case Errc::duplicate_block: return "duplicate_block";
    case Errc::append_rejected: return "append_rejected";
    case Errc::permission_denied: return "permission_denied";
    case Errc::duplicate_key: return "duplicate_key";
    case Errc::unknown_key: return "unknown_key";
    case Errc::already_revoked: return "already_revoked";
    case Errc::duplicate_open_entry: return "duplicate_open_entry";
    case Errc::exit_without_open_entry: return "exit_without_open_entry";
    case Errc::expired_passport: return "expired_passport";
    case Errc::data_integrity: return "data_integrity";
    case Errc::io: return "io";
    case Errc::index_mismatch: return "index_mismatch";
    case Errc::load_error: return "load_error";
    case Errc::already_exists: return "already_exists";
  }
  return "unknown";
}

Timestamp Timestamp::from_seconds(double seconds) {
  if (!std::isfinite(seconds)) {
    throw Error(Errc::serialization, "timestamp is not a finite number");
  }
  const double us = std::round(seconds * 1e6);
  if (std::fabs(us) > 9.0e18) {
    throw Error(Errc::serialization, "timestamp out of range");
  }
  return Timestamp(static_cast<std::int64_t>(us));
}

Timestamp Timestamp::parse(std::string_view text) {
  auto fail = [&] {
    return Error(Errc::serialization, "malformed timestamp '" + std::string(text) + "'");
  };
  bool negative = false;
  std::string_view rest = text;
  if (!rest.empty() && rest.front() == '-') {
    negative = true;
    rest.remove_prefix(1);
  }
  const auto dot = rest.find('.');
  const std::string_view whole = rest.substr(0, dot);
  std::string_view frac = dot == std::string_view::npos ? std::string_view{} : rest.substr(dot + 1);
  if (whole.empty() || (dot != std::string_view::npos && (frac.empty() || frac.size() > 6))) {
    throw fail();
  }
  auto all_digits = [](std::string_view s) {
    return std::all_of(s.begin(), s.end(), [](char c) { return c >= '0' && c <= '9'; });
  };
  if (!all_digits(whole) || !all_digits(frac)) throw fail();

  std::int64_t secs = 0;
  auto [p, ec] = std::from_chars(whole.data(), whole.data() + whole.size(), secs);
  if (ec != std::errc{} || p != whole.data() + whole.size() || secs > 9'000'000'000'000LL) {
    throw fail();
  }
  std::int64_t us = 0;
  for (std::size_t i = 0; i < 6; ++i) {
    us = us * 10 + (i < frac.size() ? frac[i] - '0' : 0);
  }
  const std::int64_t total = secs * 1'000'000 + us;
  return Timestamp(negative ? -total : total);
}

Timestamp Timestamp::now() {
  using namespace std::chrono;
  return Timestamp(duration_cast<microseconds>(system_clock::now().time_since_epoch()).count());
}

std::string Timestamp::to_string() const {
  const bool negative = micros_ < 0;
  const auto magnitude = negative ? -static_cast<std::uint64_t>(micros_) : static_cast<std::uint64_t>(micros_);
  char buf[40];
  std::snprintf(buf, sizeof buf, "%s%llu.%06llu", negative ? "-" : "",
                static_cast<unsigned long long>(magnitude / 1'000'000),
                static_cast<unsigned long long>(magnitude % 1'000'000));
  return buf;
}

namespace canonical {
namespace {

// Length of the well-formed UTF-8 sequence starting at s[i], or 0.
std::size_t utf8_sequence_length(std::string_view s, std::size_t i) {
  const auto b0 = static_cast<unsigned char>(s[i]);
  if (b0 < 0x80) return 1;
  std::size_t len;
  std::uint32_t cp;
  if ((b0 & 0xE0) == 0xC0) {
    len = 2;
    cp = b0 & 0x1F;
  } else if ((b0 & 0xF0) == 0xE0) {
    len = 3;
    cp = b0 & 0x0F;
  } else if ((b0 & 0xF8) == 0xF0) {
    len = 4;
    cp = b0 & 0x07;
  } else {
    return 0;
  }
  if (i + len > s.size()) return 0;
  for (std::size_t k = 1; k < len; ++k) {
    const auto b = static_cast<unsigned char>(s[i + k]);
    if ((b & 0xC0) != 0x80) return 0;
    cp = (cp << 6) | (b & 0x3F);
  }
  static constexpr std::uint32_t kMin[] = {0, 0, 0x80, 0x800, 0x10000};
  if (cp < kMin[len] || cp > 0x10FFFF || (cp >= 0xD800 && cp <= 0xDFFF)) return 0;
  return len;
}

void write(std::string& out, const Value& value);

void write_record(std::string& out, const Record& record) {
  std::vector<const std::pair<std::string, Value>*> entries;
  entries.reserve(record.size());
  for (const auto& kv : record) entries.push_back(&kv);
  std::sort(entries.begin(), entries.end(), [](auto* a, auto* b) { return a->first < b->first; });
  out.push_back('{');
  for (std::size_t i = 0; i < entries.size(); ++i) {
    if (i > 0) {
      if (entries[i]->first == entries[i - 1]->first) {
        throw Error(Errc::serialization, "duplicate record key '" + entries[i]->first + "'");
      }
      out.push_back(',');
    }
    append_string(out, entries[i]->first);
    out.push_back(':');
    write(out, entries[i]->second);
  }
  out.push_back('}');
}

void write(std::string& out, const Value& value) {
  std::visit(
      [&](const auto& v) {
        using T = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<T, std::string>) {
          append_string(out, v);
        } else if constexpr (std::is_same_v<T, std::int64_t>) {
          out += std::to_string(v);
        } else if constexpr (std::is_same_v<T, Timestamp>) {
          out += v.to_string();
        } else if constexpr (std::is_same_v<T, List>) {
          out.push_back('[');
          for (std::size_t i = 0; i < v.size(); ++i) {
            if (i > 0) out.push_back(',');
            write(out, v[i]);
          }
          out.push_back(']');
        } else {
          write_record(out, v);
        }
      },
      value.data);
}

}  // namespace

void append_string(std::string& out, std::string_view s) {
  static constexpr char kHex[] = "0123456789abcdef";
  out.push_back('"');
  for (std::size_t i = 0; i < s.size();) {
    const char c = s[i];
    const auto uc = static_cast<unsigned char>(c);
    if (uc >= 0x80) {
      const auto len = utf8_sequence_length(s, i);
      if (len == 0) {
        throw Error(Errc::serialization, "invalid UTF-8 at byte " + std::to_string(i));
      }
      out.append(s.substr(i, len));
      i += len;
      continue;
    }
    switch (c) {
      case '"': out += "\\\""; break;
      case '\\': out += "\\\\"; break;
      case '\b': out += "\\b"; break;
      case '\f': out += "\\f"; break;
      case '\n': out += "\\n"; break;
      case '\r': out += "\\r"; break;
      case '\t': out += "\\t"; break;
      default:
        if (uc < 0x20) {
          out += "\\u00";
          out.push_back(kHex[uc >> 4]);
          out.push_back(kHex[uc & 0xF]);
        } else {
          out.push_back(c);
        }
    }
    ++i;
  }
  out.push_back('"');
}

std::string to_bytes(const Value& value) {
  std::string out;
  write(out, value);
  return out;
}

}  // namespace canonical
}  // namespace gatechain
