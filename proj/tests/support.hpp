#pragma once

#include <atomic>
#include <cstdio>
#include <filesystem>
#include <memory>
#include <random>
#include <string>
#include <unistd.h>

#include "gatechain/canonical.hpp"
#include "gatechain/crypto.hpp"
#include "gatechain/registry.hpp"

namespace testing_support {

namespace fs = std::filesystem;

/// Scratch directory removed on scope exit.
class TempDir {
 public:
  TempDir() {
    std::string tmpl = (fs::temp_directory_path() / "gatechain-test-XXXXXX").string();
    if (::mkdtemp(tmpl.data()) == nullptr) throw std::runtime_error("mkdtemp failed");
    path_ = tmpl;
  }
  ~TempDir() {
    std::error_code ec;
    fs::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;
  const fs::path& path() const { return path_; }
  fs::path operator/(const std::string& name) const { return path_ / name; }

 private:
  fs::path path_;
};

/// Deterministic clock: one second per reading from a fixed epoch.
struct StepClock {
  std::shared_ptr<std::atomic<std::int64_t>> next =
      std::make_shared<std::atomic<std::int64_t>>(std::int64_t{1'700'000'000} * 1'000'000);
  std::int64_t step_us = 1'000'000;

  gatechain::Timestamp operator()() const { return gatechain::Timestamp::from_micros(next->fetch_add(step_us)); }
};

inline std::string pick(std::mt19937_64& rng, std::initializer_list<const char*> options) {
  std::uniform_int_distribution<std::size_t> d(0, options.size() - 1);
  return *(options.begin() + d(rng));
}

/// Entry datetimes fall on 2024-03-01 .. 2024-03-09 so date filters bite.
inline std::string random_datetime(std::mt19937_64& rng, int min_day = 1) {
  std::uniform_int_distribution<int> day(min_day, 9), hour(0, 23), minute(0, 59);
  char buf[32];
  std::snprintf(buf, sizeof buf, "2024-03-%02d %02d:%02d", day(rng), hour(rng), minute(rng));
  return buf;
}

inline gatechain::registry::EntryForm entry_form(const std::string& passport, std::mt19937_64& rng) {
  gatechain::registry::EntryForm f;
  f.passport_number = passport;
  f.name_surname = pick(rng, {"Ayşe Yılmaz", "John Smith", "Мария Иванова", "李雷", "Ana O'Neil"});
  f.nationality = pick(rng, {"TR", "GB", "DE", "RU", "CN"});
  f.birthdate = "1985-06-15";
  f.passport_validity_date = "2030-01-01";
  f.entry_gate = pick(rng, {"Kapikule", "Sabiha", "Mersin Port"});
  f.entry_datetime = random_datetime(rng, 1);
  f.plate = pick(rng, {"", "34 ABC 123", "B-XY 991"});
  return f;
}

inline gatechain::registry::ExitForm exit_form(const std::string& passport, std::mt19937_64& rng) {
  gatechain::registry::ExitForm f;
  f.passport_number = passport;
  f.exit_gate = pick(rng, {"Kapikule", "Sabiha", "Mersin Port"});
  f.exit_datetime = "2024-03-" + std::to_string(10 + static_cast<int>(rng() % 9)) + " 12:00";
  f.plate = pick(rng, {"", "06 ZZ 42"});
  return f;
}

}  // namespace testing_support
