#pragma once

// Brute-force replay of a chain into trips. Each exit is matched by scanning
// backwards for the latest earlier entry with the same decrypted passport;
// deliberately quadratic and unrelated to the registry's single-pass merge.

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "gatechain/block.hpp"
#include "gatechain/crypto.hpp"
#include "gatechain/registry.hpp"

namespace oracle {

inline std::vector<gatechain::registry::TravelRecordView> pair_trips(const std::vector<gatechain::chain::Block>& blocks,
                                                                     const gatechain::crypto::DataKey& key) {
  using gatechain::chain::BlockType;
  using gatechain::crypto::decrypt_field;
  const auto n = blocks.size();
  std::vector<std::string> passport(n);
  for (std::size_t i = 0; i < n; ++i) {
    if (blocks[i].nonce != BlockType::genesis) passport[i] = decrypt_field(key, blocks[i].transactions[0].passport_number);
  }
  std::vector<std::optional<std::size_t>> exit_of(n);
  for (std::size_t j = 0; j < n; ++j) {
    if (blocks[j].nonce != BlockType::exit) continue;
    for (std::size_t i = j; i-- > 0;) {
      if (blocks[i].nonce == BlockType::entry && passport[i] == passport[j]) {
        exit_of[i] = j;
        break;
      }
    }
  }
  std::vector<gatechain::registry::TravelRecordView> out;
  for (std::size_t i = 0; i < n; ++i) {
    if (blocks[i].nonce != BlockType::entry) continue;
    const auto& tx = blocks[i].transactions[0];
    gatechain::registry::TravelRecordView v;
    v.passport_number = passport[i];
    v.name_surname = decrypt_field(key, tx.name_surname);
    v.nationality = decrypt_field(key, tx.nationality);
    v.birthdate = tx.birthdate;
    v.entry_date = tx.entry_date;
    v.entry_gate = tx.entry_gate;
    v.plate = tx.plate;
    v.entry_block_index = blocks[i].index;
    if (exit_of[i]) {
      const auto& ex = blocks[*exit_of[i]].transactions[0];
      v.exit_date = ex.exit_date;
      v.exit_gate = ex.exit_gate;
      if (v.plate.empty()) v.plate = ex.plate;
      v.exit_block_index = blocks[*exit_of[i]].index;
      v.status = gatechain::registry::TripStatus::closed;
    } else {
      v.status = gatechain::registry::TripStatus::open;
    }
    out.push_back(std::move(v));
  }
  return out;
}

// Counts straight from block payloads: entries by entry-block date, exits by
// the exit block of a trip whose entry date is in range.
inline gatechain::registry::StatsReport tally_ref(const std::vector<gatechain::chain::Block>& blocks,
                                                  const gatechain::crypto::DataKey& key,
                                                  const std::string& from = "", const std::string& to = "") {
  gatechain::registry::StatsReport s;
  auto in_range = [&](const std::string& day) { return (from.empty() || day >= from) && (to.empty() || day <= to); };
  for (const auto& trip : pair_trips(blocks, key)) {
    const auto entry_day = trip.entry_date.substr(0, 10);
    if (!in_range(entry_day)) continue;
    s.total_entries++;
    s.per_gate[trip.entry_gate].entries++;
    s.per_nationality[trip.nationality]++;
    s.per_day[entry_day].entries++;
    if (trip.exit_block_index) {
      s.total_exits++;
      s.per_gate[trip.exit_gate].exits++;
      s.per_day[trip.exit_date.substr(0, 10)].exits++;
    }
  }
  s.currently_inside = s.total_entries - s.total_exits;
  return s;
}

}  // namespace oracle
