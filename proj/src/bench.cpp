#include "gatechain/bench.hpp"

#include <openssl/opensslv.h>

#include <chrono>
#include <cstdio>
#include <fstream>
#include <random>
#include <thread>

#include "gatechain/chain.hpp"
#include "gatechain/crypto.hpp"
#include "gatechain/dates.hpp"
#include "gatechain/error.hpp"
#include "gatechain/registry.hpp"

namespace gatechain::bench {
namespace {

using Clock = std::chrono::steady_clock;

double seconds_between(Clock::time_point a, Clock::time_point b) {
  return std::chrono::duration<double>(b - a).count();
}

constexpr const char* kGates[] = {"Istanbul Airport", "Kapikule", "Sabiha Gokcen Airport", "Sarp", "Mersin Port"};
constexpr const char* kNationalities[] = {"TR", "DE", "SY", "IR", "GB", "FR", "AZ", "RU"};
constexpr const char* kNames[] = {"Ali Veli", "Ayse Yilmaz", "Mehmet Kaya", "Hans Muller", "Leila Ahmadi",
                                  "John Smith", "Marie Dubois", "Olga Ivanova"};

std::vector<registry::EntryForm> synthetic_travellers(std::size_t n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  auto pick = [&](auto& arr) { return arr[rng() % std::size(arr)]; };
  std::vector<registry::EntryForm> forms;
  forms.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    registry::EntryForm f;
    char passport[24];
    std::snprintf(passport, sizeof passport, "U%08llu", static_cast<unsigned long long>(i));
    f.passport_number = passport;
    f.name_surname = pick(kNames);
    f.nationality = pick(kNationalities);
    const auto birth = std::chrono::sys_days{std::chrono::year{1950} / 1 / 1} + std::chrono::days{rng() % 20000};
    f.birthdate = dates::format_date(birth);
    f.passport_validity_date = dates::format_date(std::chrono::sys_days{std::chrono::year{2030} / 1 / 1} +
                                                  std::chrono::days{rng() % 3000});
    char when[24];
    std::snprintf(when, sizeof when, "2025-12-%02u %02u:%02u", static_cast<unsigned>(1 + rng() % 28),
                  static_cast<unsigned>(rng() % 24), static_cast<unsigned>(rng() % 60));
    f.entry_datetime = when;
    f.entry_gate = pick(kGates);
    if (rng() % 2 == 0) {
      char plate[16];
      std::snprintf(plate, sizeof plate, "34 AB %03u", static_cast<unsigned>(rng() % 1000));
      f.plate = plate;
    }
    forms.push_back(std::move(f));
  }
  return forms;
}

struct Timed {
  chain::Block block;
  BenchRow row;
};

Timed build_one(const chain::Chain& chain, const registry::EntryForm& f, const crypto::KeyPair& signer,
                const crypto::DataKey& key) {
  Timed out;
  chain::EntryExitTransaction tx;
  const auto e0 = Clock::now();
  tx.passport_number = crypto::encrypt_field(key, f.passport_number);
  tx.name_surname = crypto::encrypt_field(key, f.name_surname);
  tx.nationality = crypto::encrypt_field(key, f.nationality);
  const auto e1 = Clock::now();
  tx.birthdate = f.birthdate;
  tx.passport_validity_date = f.passport_validity_date;
  tx.entry_date = f.entry_datetime;
  tx.entry_gate = f.entry_gate;
  tx.plate = f.plate;

  const auto now = std::max(Timestamp::now(), chain.tip().timestamp);
  out.block = chain::prepare_block(chain.tip(), chain::BlockType::entry, std::move(tx), signer.public_key(), now);
  const auto s0 = Clock::now();
  out.block.signature = signer.sign(out.block.hash);
  const auto s1 = Clock::now();

  out.row.encryption_time_s = seconds_between(e0, e1);
  out.row.sign_time_s = seconds_between(s0, s1);
  return out;
}

}  // namespace

BenchReport run_block_benchmark(std::size_t n_blocks, std::uint64_t seed) {
  if (n_blocks == 0) throw Error(Errc::validation, "benchmark needs at least one block");

  const auto signer = crypto::KeyPair::generate();
  const auto key = crypto::DataKey::generate();
  const std::vector<std::string> keys{signer.public_key()};
  const auto validators = chain::ValidatorSet::of(keys);

  {
    chain::Chain warmup;
    warmup.start(chain::make_genesis(signer, Timestamp::now()), validators);
    for (const auto& f : synthetic_travellers(10, seed ^ 0x5eedULL)) {
      warmup.append(build_one(warmup, f, signer, key).block, validators);
    }
  }

  const auto travellers = synthetic_travellers(n_blocks, seed);
  chain::Chain chain;
  chain.start(chain::make_genesis(signer, Timestamp::now()), validators);

  BenchReport report;
  report.rows.reserve(n_blocks);
  for (const auto& f : travellers) {
    const auto t0 = Clock::now();
    auto timed = build_one(chain, f, signer, key);
    const auto index = timed.block.index;
    chain.append(std::move(timed.block), validators);
    const auto t1 = Clock::now();
    timed.row.block_index = index;
    timed.row.total_time_s = seconds_between(t0, t1);
    timed.row.estimated_tps = 1.0 / timed.row.total_time_s;
    report.rows.push_back(timed.row);
  }

  double verify_sum = 0;
  for (std::size_t i = 1; i < chain.size(); ++i) {
    const auto& b = chain[i];
    const auto v0 = Clock::now();
    const bool ok = crypto::verify_signature(b.authority, b.hash, b.signature);
    verify_sum += seconds_between(v0, Clock::now());
    if (!ok) throw Error(Errc::crypto, "benchmark block " + std::to_string(i) + " failed signature verification");
  }

  double enc_sum = 0;
  double sign_sum = 0;
  for (const auto& r : report.rows) {
    enc_sum += r.encryption_time_s;
    sign_sum += r.sign_time_s;
  }
  const auto n = static_cast<double>(report.rows.size());
  report.avg_encryption_time_s = enc_sum / n;
  report.avg_sign_time_s = sign_sum / n;
  report.avg_verify_time_s = verify_sum / n;
  report.verify_to_sign_ratio = report.avg_verify_time_s / report.avg_sign_time_s;
  report.chain_valid = chain::verify_chain(chain.blocks(), validators).valid;

  char env[256];
  std::snprintf(env, sizeof env, "%s; ECDSA P-256 + AES-256-GCM; %u hardware threads; seed %llu; single-threaded",
                OPENSSL_VERSION_TEXT, std::thread::hardware_concurrency(), static_cast<unsigned long long>(seed));
  report.environment = env;
  return report;
}

std::string format_bench_csv(const BenchReport& report) {
  std::string out = kCsvHeader;
  out += '\n';
  char line[256];
  for (const auto& r : report.rows) {
    std::snprintf(line, sizeof line, "%llu,%.17g,%.17g,%.17g,%.17g\n", static_cast<unsigned long long>(r.block_index),
                  r.encryption_time_s, r.sign_time_s, r.total_time_s, r.estimated_tps);
    out += line;
  }
  std::snprintf(line, sizeof line,
                "# avg_encryption_time_s,%.17g\n# avg_sign_time_s,%.17g\n# avg_verify_time_s,%.17g\n"
                "# verify_to_sign_ratio,%.17g\n# chain_valid,%s\n",
                report.avg_encryption_time_s, report.avg_sign_time_s, report.avg_verify_time_s,
                report.verify_to_sign_ratio, report.chain_valid ? "true" : "false");
  out += line;
  out += "# environment," + report.environment + "\n";
  return out;
}

void emit_bench_csv(const BenchReport& report, const std::filesystem::path& path) {
  if (report.rows.empty()) throw Error(Errc::validation, "empty benchmark report");
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(Errc::io, "cannot write " + path.string());
  out << format_bench_csv(report);
  out.flush();
  if (!out) throw Error(Errc::io, "write failed for " + path.string());
}

}  // namespace gatechain::bench
