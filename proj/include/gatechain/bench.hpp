#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

namespace gatechain::bench {

struct BenchRow {
  std::uint64_t block_index = 0;
  double encryption_time_s = 0;  // the three identity fields
  double sign_time_s = 0;
  double total_time_s = 0;  // encrypt + root + hash + sign + verified append
  double estimated_tps = 0;  // transactions per block / total_time_s
};

struct BenchReport {
  std::vector<BenchRow> rows;
  double avg_encryption_time_s = 0;
  double avg_sign_time_s = 0;
  double avg_verify_time_s = 0;
  double verify_to_sign_ratio = 0;
  bool chain_valid = false;
  std::string environment;
};

/// Builds `n_blocks` entry blocks from seeded synthetic travellers on a fresh
/// in-memory chain, timing each block, then times signature verification of
/// every built block. Ten untimed warm-up blocks go to a separate chain.
/// Throws Error(validation) if n_blocks is zero.
BenchReport run_block_benchmark(std::size_t n_blocks, std::uint64_t seed);

/// Header, one row per block, then '#'-prefixed summary lines. Doubles are
/// written with 17 significant digits so they read back exactly.
std::string format_bench_csv(const BenchReport& report);
void emit_bench_csv(const BenchReport& report, const std::filesystem::path& path);

inline constexpr const char* kCsvHeader = "block_index,encryption_time_s,sign_time_s,total_time_s,estimated_tps";

}  // namespace gatechain::bench
