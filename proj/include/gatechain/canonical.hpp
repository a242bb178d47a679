#pragma once

#include <compare>
#include <cstdint>
#include <string>
#include <string_view>
#include <utility>
#include <variant>
#include <vector>

namespace gatechain {

/// Epoch time with microsecond resolution. Rendered as seconds with exactly
/// six fractional digits, e.g. "1765221317.255807".
class Timestamp {
 public:
  constexpr Timestamp() = default;

  static constexpr Timestamp from_micros(std::int64_t us) { return Timestamp(us); }
  /// Throws Error(serialization) for NaN or infinities.
  static Timestamp from_seconds(double seconds);
  /// Parses "<int>[.<1..6 digits>]"; throws Error(serialization) otherwise.
  static Timestamp parse(std::string_view text);
  static Timestamp now();

  constexpr std::int64_t micros() const { return micros_; }
  double seconds() const { return static_cast<double>(micros_) / 1e6; }
  std::string to_string() const;

  auto operator<=>(const Timestamp&) const = default;

 private:
  constexpr explicit Timestamp(std::int64_t us) : micros_(us) {}
  std::int64_t micros_ = 0;
};

namespace canonical {

struct Value;
using List = std::vector<Value>;
using Record = std::vector<std::pair<std::string, Value>>;

/// The value kinds that may appear in a hash preimage.
struct Value {
  std::variant<std::string, std::int64_t, Timestamp, List, Record> data;

  Value(std::string s) : data(std::move(s)) {}
  Value(std::string_view s) : data(std::string(s)) {}
  Value(const char* s) : data(std::string(s)) {}
  Value(std::int64_t i) : data(i) {}
  Value(int i) : data(std::int64_t{i}) {}
  Value(Timestamp t) : data(t) {}
  Value(List l) : data(std::move(l)) {}
  Value(Record r) : data(std::move(r)) {}
};

/// Deterministic encoding: record keys sorted bytewise, no whitespace,
/// UTF-8 strings with JSON escaping, timestamps as bare decimals with six
/// fractional digits. Throws Error(serialization) on invalid UTF-8 or
/// duplicate record keys.
std::string to_bytes(const Value& value);

/// Appends the JSON string literal for `s` (validated UTF-8) to `out`.
void append_string(std::string& out, std::string_view s);

}  // namespace canonical
}  // namespace gatechain
