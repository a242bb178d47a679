#include "gatechain/registry.hpp"

#include <mutex>

#include "gatechain/dates.hpp"
#include "gatechain/error.hpp"

namespace gatechain::registry {

using authority::Action;
using chain::Block;
using chain::BlockType;
using chain::EntryExitTransaction;

std::string_view to_string(TripStatus status) { return status == TripStatus::open ? "open" : "closed"; }

std::optional<TripStatus> parse_trip_status(std::string_view text) {
  if (text == "open") return TripStatus::open;
  if (text == "closed") return TripStatus::closed;
  return std::nullopt;
}

namespace {

[[noreturn]] void invalid(const std::string& what) { throw Error(Errc::validation, what); }

void validate(const EntryForm& form, bool reject_expired) {
  if (form.passport_number.empty()) invalid("passport_number is required");
  if (form.name_surname.empty()) invalid("name_surname is required");
  if (form.nationality.empty()) invalid("nationality is required");
  if (form.entry_gate.empty()) invalid("entry_gate is required");
  if (!dates::parse_date(form.birthdate)) invalid("birthdate must be YYYY-MM-DD");
  const auto validity = dates::parse_date(form.passport_validity_date);
  if (!validity) invalid("passport_validity_date must be YYYY-MM-DD");
  if (!dates::parse_datetime(form.entry_datetime)) invalid("entry_datetime must be 'YYYY-MM-DD HH:MM'");
  if (reject_expired && *validity < *dates::day_of(form.entry_datetime)) {
    throw Error(Errc::expired_passport, "passport expired on " + form.passport_validity_date);
  }
}

void validate(const ExitForm& form) {
  if (form.passport_number.empty()) invalid("passport_number is required");
  if (form.exit_gate.empty()) invalid("exit_gate is required");
  if (!dates::parse_datetime(form.exit_datetime)) invalid("exit_datetime must be 'YYYY-MM-DD HH:MM'");
}

std::string decrypt_at(const crypto::DataKey& key, const std::string& cipher, std::uint64_t index, const char* field) {
  try {
    return crypto::decrypt_field(key, cipher);
  } catch (const Error&) {
    throw Error(Errc::data_integrity, "cannot decrypt " + std::string(field) + " in block " + std::to_string(index));
  }
}

}  // namespace

std::vector<TravelRecordView> merge_travel_records(std::span<const Block> blocks, const crypto::DataKey& key) {
  std::vector<TravelRecordView> out;
  std::unordered_map<std::string, std::size_t> open;  // passport -> position in out
  for (const auto& b : blocks) {
    if (b.nonce == BlockType::genesis) continue;
    if (b.transactions.size() != 1) {
      throw Error(Errc::data_integrity, "block " + std::to_string(b.index) + " does not hold exactly one transaction");
    }
    const auto& tx = b.transactions.front();
    auto passport = decrypt_at(key, tx.passport_number, b.index, "PassportNumber");
    if (b.nonce == BlockType::entry) {
      if (open.contains(passport)) {
        throw Error(Errc::data_integrity, "block " + std::to_string(b.index) + " opens a second trip for one passport");
      }
      TravelRecordView v;
      v.name_surname = decrypt_at(key, tx.name_surname, b.index, "NameSurname");
      v.nationality = decrypt_at(key, tx.nationality, b.index, "Nationality");
      v.birthdate = tx.birthdate;
      v.entry_date = tx.entry_date;
      v.entry_gate = tx.entry_gate;
      v.plate = tx.plate;
      v.entry_block_index = b.index;
      v.status = TripStatus::open;
      v.passport_number = passport;
      open.emplace(std::move(passport), out.size());
      out.push_back(std::move(v));
    } else {
      const auto it = open.find(passport);
      if (it == open.end()) {
        throw Error(Errc::data_integrity, "exit block " + std::to_string(b.index) + " has no open entry");
      }
      auto& v = out[it->second];
      v.exit_date = tx.exit_date;
      v.exit_gate = tx.exit_gate;
      if (v.plate.empty()) v.plate = tx.plate;
      v.exit_block_index = b.index;
      v.status = TripStatus::closed;
      open.erase(it);
    }
  }
  return out;
}

bool matches(const TravelRecordView& v, const RecordFilter& f) {
  if (f.passport_number && v.passport_number != *f.passport_number) return false;
  if (f.nationality && v.nationality != *f.nationality) return false;
  if (f.gate && v.entry_gate != *f.gate && v.exit_gate != *f.gate) return false;
  if (f.status && v.status != *f.status) return false;
  if (f.to && *dates::day_of(v.entry_date) > *f.to) return false;
  if (f.from && v.status == TripStatus::closed && *dates::day_of(v.exit_date) < *f.from) return false;
  return true;
}

StatsReport tally(const std::vector<TravelRecordView>& records, std::optional<std::chrono::sys_days> from,
                  std::optional<std::chrono::sys_days> to) {
  StatsReport s;
  for (const auto& v : records) {
    const auto entry_day = *dates::day_of(v.entry_date);
    if ((from && entry_day < *from) || (to && entry_day > *to)) continue;
    ++s.total_entries;
    ++s.per_gate[v.entry_gate].entries;
    ++s.per_nationality[v.nationality];
    ++s.per_day[dates::format_date(entry_day)].entries;
    if (v.status == TripStatus::closed) {
      ++s.total_exits;
      ++s.per_gate[v.exit_gate].exits;
      ++s.per_day[dates::format_date(*dates::day_of(v.exit_date))].exits;
    }
  }
  s.currently_inside = s.total_entries - s.total_exits;
  return s;
}

Registry::Registry(chain::Chain chain, authority::AuthorityRegistry authorities, crypto::DataKey data_key,
                   Options options, Clock clock)
    : chain_(std::move(chain)),
      authorities_(std::move(authorities)),
      data_key_(std::move(data_key)),
      options_(options),
      clock_(std::move(clock)) {
  rebuild_open_trips();
}

std::unique_ptr<Registry> Registry::create(const crypto::KeyPair& admin, std::string admin_name, crypto::DataKey data_key,
                          Options options, Clock clock) {
  const auto now = clock();
  auto authorities = authority::AuthorityRegistry::bootstrap(admin.public_key(), std::move(admin_name), now);
  chain::Chain chain;
  chain.start(chain::make_genesis(admin, now), authorities.current_validators());
  return std::make_unique<Registry>(std::move(chain), std::move(authorities), std::move(data_key), options,
                                    std::move(clock));
}

void Registry::set_sinks(Sinks sinks) {
  std::unique_lock lock(mutex_);
  sinks_ = std::move(sinks);
}

void Registry::rebuild_open_trips() {
  open_trips_.clear();
  index_error_.reset();
  try {
    for (const auto& v : merge_travel_records(chain_.blocks(), data_key_)) {
      if (v.status == TripStatus::open) open_trips_.emplace(v.passport_number, v.entry_block_index);
    }
  } catch (const Error& e) {
    open_trips_.clear();
    index_error_ = e.what();
  }
}

Timestamp Registry::now() const {
  // Never behind the tip, so authority changes and blocks stay in time order.
  const auto t = clock_();
  return chain_.empty() ? t : std::max(t, chain_.tip().timestamp);
}

void Registry::require(std::string_view key, Action action) const {
  if (!authorities_.check_permission(key, action)) {
    throw Error(Errc::permission_denied, "permission denied: " + std::string(authority::to_string(action)));
  }
}

Block Registry::append(BlockType type, EntryExitTransaction tx, const crypto::KeyPair& signer) {
  if (chain_.empty()) throw Error(Errc::validation, "chain has no genesis block");
  auto block = chain::build_block(chain_.tip(), type, std::move(tx), signer, now());
  chain_.append(block, authorities_.current_validators(), sinks_.on_block);
  return block;
}

Block Registry::register_entry(const EntryForm& form, const crypto::KeyPair& operator_key) {
  std::unique_lock lock(mutex_);
  require(operator_key.public_key(), Action::register_entry);
  validate(form, options_.reject_expired_passports);
  if (index_error_) throw Error(Errc::data_integrity, *index_error_);
  if (open_trips_.contains(form.passport_number)) {
    throw Error(Errc::duplicate_open_entry, "passport " + form.passport_number + " already has an open entry");
  }
  EntryExitTransaction tx;
  tx.passport_number = crypto::encrypt_field(data_key_, form.passport_number);
  tx.name_surname = crypto::encrypt_field(data_key_, form.name_surname);
  tx.nationality = crypto::encrypt_field(data_key_, form.nationality);
  tx.birthdate = form.birthdate;
  tx.passport_validity_date = form.passport_validity_date;
  tx.entry_date = form.entry_datetime;
  tx.entry_gate = form.entry_gate;
  tx.plate = form.plate;
  auto block = append(BlockType::entry, std::move(tx), operator_key);
  open_trips_.emplace(form.passport_number, block.index);
  return block;
}

Block Registry::register_exit(const ExitForm& form, const crypto::KeyPair& operator_key) {
  std::unique_lock lock(mutex_);
  require(operator_key.public_key(), Action::register_exit);
  validate(form);
  if (index_error_) throw Error(Errc::data_integrity, *index_error_);
  const auto it = open_trips_.find(form.passport_number);
  if (it == open_trips_.end()) {
    throw Error(Errc::exit_without_open_entry, "no open entry for passport " + form.passport_number);
  }
  const auto& entry = chain_[it->second].transactions.front();
  if (*dates::parse_datetime(form.exit_datetime) < *dates::parse_datetime(entry.entry_date)) {
    invalid("exit_datetime precedes the entry at " + entry.entry_date);
  }
  // Identity fields are re-encrypted so ciphertexts do not link the two blocks.
  EntryExitTransaction tx;
  tx.passport_number = crypto::encrypt_field(data_key_, form.passport_number);
  tx.name_surname = crypto::encrypt_field(data_key_, decrypt_at(data_key_, entry.name_surname, it->second, "NameSurname"));
  tx.nationality = crypto::encrypt_field(data_key_, decrypt_at(data_key_, entry.nationality, it->second, "Nationality"));
  tx.birthdate = entry.birthdate;
  tx.passport_validity_date = entry.passport_validity_date;
  tx.exit_date = form.exit_datetime;
  tx.exit_gate = form.exit_gate;
  tx.plate = form.plate;
  auto block = append(BlockType::exit, std::move(tx), operator_key);
  open_trips_.erase(form.passport_number);
  return block;
}

std::vector<TravelRecordView> Registry::merge_locked() const { return merge_travel_records(chain_.blocks(), data_key_); }

std::vector<TravelRecordView> Registry::list_travel_records(std::string_view caller_key,
                                                            const RecordFilter& filter) const {
  std::shared_lock lock(mutex_);
  require(caller_key, Action::list_records);
  auto all = merge_locked();
  std::vector<TravelRecordView> out;
  for (auto& v : all) {
    if (matches(v, filter)) out.push_back(std::move(v));
  }
  return out;
}

StatsReport Registry::compute_statistics(std::string_view caller_key, std::optional<std::chrono::sys_days> from,
                                         std::optional<std::chrono::sys_days> to) const {
  std::shared_lock lock(mutex_);
  require(caller_key, Action::view_stats);
  return tally(merge_locked(), from, to);
}

chain::VerificationReport Registry::verify_chain(std::string_view caller_key) const {
  std::shared_lock lock(mutex_);
  require(caller_key, Action::verify_chain);
  return chain::verify_chain(chain_.blocks(), authorities_.signing_history());
}

authority::AuthorityRecord Registry::add_authority(std::string_view actor_key, std::string public_key,
                                                   std::string display_name, authority::Role role) {
  std::unique_lock lock(mutex_);
  auto before = authorities_;
  auto record = authorities_.add_authority(actor_key, std::move(public_key), std::move(display_name), role, now());
  if (sinks_.on_authorities) {
    try {
      sinks_.on_authorities(authorities_);
    } catch (...) {
      authorities_ = std::move(before);
      throw;
    }
  }
  return record;
}

authority::AuthorityRecord Registry::revoke_authority(std::string_view actor_key, std::string_view public_key) {
  std::unique_lock lock(mutex_);
  auto before = authorities_;
  auto record = authorities_.revoke_authority(actor_key, public_key, now());
  if (sinks_.on_authorities) {
    try {
      sinks_.on_authorities(authorities_);
    } catch (...) {
      authorities_ = std::move(before);
      throw;
    }
  }
  return record;
}

bool Registry::check_permission(std::string_view public_key, Action action) const {
  std::shared_lock lock(mutex_);
  return authorities_.check_permission(public_key, action);
}

authority::AuthorityRegistry Registry::authorities() const {
  std::shared_lock lock(mutex_);
  return authorities_;
}

std::vector<Block> Registry::blocks() const {
  std::shared_lock lock(mutex_);
  return {chain_.blocks().begin(), chain_.blocks().end()};
}

std::size_t Registry::chain_size() const {
  std::shared_lock lock(mutex_);
  return chain_.size();
}

}  // namespace gatechain::registry
