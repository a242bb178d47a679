#pragma once

#include <chrono>
#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <shared_mutex>
#include <string>
#include <unordered_map>
#include <vector>

#include "gatechain/authority.hpp"
#include "gatechain/chain.hpp"
#include "gatechain/crypto.hpp"

namespace gatechain::registry {

struct EntryForm {
  std::string passport_number;
  std::string name_surname;
  std::string nationality;
  std::string birthdate;               // YYYY-MM-DD
  std::string passport_validity_date;  // YYYY-MM-DD
  std::string entry_gate;
  std::string entry_datetime;          // YYYY-MM-DD HH:MM
  std::string plate;
};

struct ExitForm {
  std::string passport_number;
  std::string exit_gate;
  std::string exit_datetime;  // YYYY-MM-DD HH:MM
  std::string plate;
};

enum class TripStatus { open, closed };
std::string_view to_string(TripStatus status);
std::optional<TripStatus> parse_trip_status(std::string_view text);

/// One logical trip: an entry block and, once the person has left, the exit
/// block that closed it.
struct TravelRecordView {
  std::string passport_number;
  std::string name_surname;
  std::string nationality;
  std::string birthdate;
  std::string entry_date;
  std::string entry_gate;
  std::string exit_date;
  std::string exit_gate;
  std::string plate;
  std::uint64_t entry_block_index = 0;
  std::optional<std::uint64_t> exit_block_index;
  TripStatus status = TripStatus::open;

  friend bool operator==(const TravelRecordView&, const TravelRecordView&) = default;
};

/// All set fields must match. A date range keeps trips that overlap it:
/// entered on or before `to`, and still open or left on or after `from`.
struct RecordFilter {
  std::optional<std::string> passport_number;
  std::optional<std::string> nationality;
  std::optional<std::chrono::sys_days> from;
  std::optional<std::chrono::sys_days> to;
  std::optional<std::string> gate;  // entry or exit gate
  std::optional<TripStatus> status;
};

struct Counts {
  std::uint64_t entries = 0;
  std::uint64_t exits = 0;
  friend bool operator==(const Counts&, const Counts&) = default;
};

/// Counts over the trips whose entry date lies in the requested range.
struct StatsReport {
  std::uint64_t total_entries = 0;
  std::uint64_t total_exits = 0;
  std::uint64_t currently_inside = 0;
  std::map<std::string, Counts> per_gate;
  std::map<std::string, std::uint64_t> per_nationality;
  std::map<std::string, Counts> per_day;  // YYYY-MM-DD

  friend bool operator==(const StatsReport&, const StatsReport&) = default;
};

struct Options {
  bool reject_expired_passports = true;
};

using Clock = std::function<Timestamp()>;

/// Persistence hooks. on_block runs after a block is verified and before it
/// joins the chain; on_authorities after a registry mutation. A throwing
/// on_block leaves the chain unchanged.
struct Sinks {
  std::function<void(const chain::Block&)> on_block;
  std::function<void(const authority::AuthorityRegistry&)> on_authorities;
};

/// The border-crossing ledger: entry/exit registration, merged listing,
/// statistics, verification and authority management over one chain.
///
/// Writers (register_*, add/revoke) are serialised; readers see a
/// consistent chain prefix and may run concurrently.
class Registry {
 public:
  Registry(chain::Chain chain, authority::AuthorityRegistry authorities, crypto::DataKey data_key,
           Options options = {}, Clock clock = &Timestamp::now);

  /// Fresh ledger: genesis signed by `admin`, who becomes the only authority.
  static std::unique_ptr<Registry> create(const crypto::KeyPair& admin, std::string admin_name, crypto::DataKey data_key,
                         Options options = {}, Clock clock = &Timestamp::now);

  void set_sinks(Sinks sinks);

  chain::Block register_entry(const EntryForm& form, const crypto::KeyPair& operator_key);
  chain::Block register_exit(const ExitForm& form, const crypto::KeyPair& operator_key);

  std::vector<TravelRecordView> list_travel_records(std::string_view caller_key, const RecordFilter& filter = {}) const;
  StatsReport compute_statistics(std::string_view caller_key, std::optional<std::chrono::sys_days> from = {},
                                 std::optional<std::chrono::sys_days> to = {}) const;
  chain::VerificationReport verify_chain(std::string_view caller_key) const;

  authority::AuthorityRecord add_authority(std::string_view actor_key, std::string public_key,
                                           std::string display_name, authority::Role role);
  authority::AuthorityRecord revoke_authority(std::string_view actor_key, std::string_view public_key);

  bool check_permission(std::string_view public_key, authority::Action action) const;
  authority::AuthorityRegistry authorities() const;
  std::vector<chain::Block> blocks() const;
  std::size_t chain_size() const;
  const crypto::DataKey& data_key() const { return data_key_; }

 private:
  void require(std::string_view key, authority::Action action) const;
  Timestamp now() const;
  void rebuild_open_trips();
  chain::Block append(chain::BlockType type, chain::EntryExitTransaction tx, const crypto::KeyPair& signer);
  std::vector<TravelRecordView> merge_locked() const;

  mutable std::shared_mutex mutex_;
  chain::Chain chain_;
  authority::AuthorityRegistry authorities_;
  crypto::DataKey data_key_;
  Options options_;
  Clock clock_;
  Sinks sinks_;
  // Passport number -> index of the entry block of its open trip.
  std::unordered_map<std::string, std::uint64_t> open_trips_;
  std::optional<std::string> index_error_;
};

/// Pure merge of a chain into trips, without permission checks. Throws
/// Error(data_integrity) naming the block that cannot be decrypted or paired.
std::vector<TravelRecordView> merge_travel_records(std::span<const chain::Block> blocks, const crypto::DataKey& key);

bool matches(const TravelRecordView& view, const RecordFilter& filter);

StatsReport tally(const std::vector<TravelRecordView>& records, std::optional<std::chrono::sys_days> from,
                  std::optional<std::chrono::sys_days> to);

}  // namespace gatechain::registry
