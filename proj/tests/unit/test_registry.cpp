#include <gtest/gtest.h>

#include <random>
#include <set>
#include <thread>

#include "gatechain/dates.hpp"
#include "gatechain/error.hpp"
#include "gatechain/registry.hpp"
#include "oracle/pairing_oracle.hpp"
#include "support.hpp"

using namespace gatechain;
using namespace gatechain::registry;
using authority::Role;
using crypto::KeyPair;
using testing_support::StepClock;

namespace {

struct Fixture {
  KeyPair admin = KeyPair::generate();
  KeyPair officer = KeyPair::generate();
  KeyPair auditor = KeyPair::generate();
  std::unique_ptr<Registry> reg;

  explicit Fixture(Options options = {}) {
    reg = Registry::create(admin, "root", crypto::DataKey::generate(), options, StepClock{});
    reg->add_authority(admin.public_key(), officer.public_key(), "officer", Role::officer);
    reg->add_authority(admin.public_key(), auditor.public_key(), "auditor", Role::auditor);
  }

  EntryForm entry(const std::string& passport, const std::string& when = "2024-03-01 10:00",
                  const std::string& gate = "Kapikule") const {
    return EntryForm{passport, "Ali Veli", "TR", "1990-01-01", "2030-01-01", gate, when, ""};
  }
  ExitForm exit(const std::string& passport, const std::string& when = "2024-03-05 10:00",
                const std::string& gate = "Sabiha") const {
    return ExitForm{passport, gate, when, ""};
  }
};

Errc code_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "no error thrown";
  return Errc::io;
}

std::chrono::sys_days day(const char* s) { return *dates::parse_date(s); }

}  // namespace

TEST(RegisterEntry, ProducesEncryptedEntryBlock) {
  Fixture f;
  const auto b = f.reg->register_entry(f.entry("U123"), f.officer);
  EXPECT_EQ(b.nonce, chain::BlockType::entry);
  EXPECT_EQ(b.authority, f.officer.public_key());
  const auto& tx = b.transactions.at(0);
  EXPECT_EQ(tx.exit_date, "");
  EXPECT_EQ(tx.exit_gate, "");
  EXPECT_NE(tx.passport_number, "U123");
  EXPECT_EQ(crypto::decrypt_field(f.reg->data_key(), tx.passport_number), "U123");
  EXPECT_EQ(crypto::decrypt_field(f.reg->data_key(), tx.name_surname), "Ali Veli");
  EXPECT_EQ(tx.entry_date, "2024-03-01 10:00");
  EXPECT_EQ(f.reg->chain_size(), 2u);
}

TEST(RegisterEntry, Errors) {
  Fixture f;
  f.reg->register_entry(f.entry("U1"), f.officer);
  EXPECT_EQ(code_of([&] { f.reg->register_entry(f.entry("U1"), f.officer); }), Errc::duplicate_open_entry);
  EXPECT_EQ(code_of([&] { f.reg->register_entry(f.entry("U2"), f.auditor); }), Errc::permission_denied);
  EXPECT_EQ(code_of([&] { f.reg->register_entry(f.entry("U2"), KeyPair::generate()); }), Errc::permission_denied);
  auto expired = f.entry("U3");
  expired.passport_validity_date = "2024-02-29";
  EXPECT_EQ(code_of([&] { f.reg->register_entry(expired, f.officer); }), Errc::expired_passport);
  auto same_day = f.entry("U3");
  same_day.passport_validity_date = "2024-03-01";
  EXPECT_NO_THROW(f.reg->register_entry(same_day, f.officer));
  for (auto mutate : std::vector<std::function<void(EntryForm&)>>{
           [](EntryForm& e) { e.passport_number.clear(); }, [](EntryForm& e) { e.entry_gate.clear(); },
           [](EntryForm& e) { e.name_surname.clear(); }, [](EntryForm& e) { e.birthdate = "1990-02-30"; },
           [](EntryForm& e) { e.entry_datetime = "2024-03-01"; }}) {
    auto form = f.entry("U9");
    mutate(form);
    EXPECT_EQ(code_of([&] { f.reg->register_entry(form, f.officer); }), Errc::validation);
  }
  EXPECT_EQ(f.reg->chain_size(), 3u);
}

TEST(RegisterEntry, ExpiryCheckCanBeDisabled) {
  Fixture f(Options{.reject_expired_passports = false});
  auto expired = f.entry("U3");
  expired.passport_validity_date = "2000-01-01";
  EXPECT_NO_THROW(f.reg->register_entry(expired, f.officer));
}

TEST(RegisterExit, AppendsNewBlockAndLeavesEntryUntouched) {
  Fixture f;
  const auto entry = f.reg->register_entry(f.entry("U1"), f.officer);
  const auto before = f.reg->blocks();
  const auto exit = f.reg->register_exit(f.exit("U1"), f.officer);
  const auto after = f.reg->blocks();
  ASSERT_EQ(after.size(), before.size() + 1);
  for (std::size_t i = 0; i < before.size(); ++i) {
    EXPECT_EQ(chain::serialize_block(after[i]), chain::serialize_block(before[i]));
  }
  EXPECT_GT(exit.index, entry.index);
  EXPECT_EQ(exit.nonce, chain::BlockType::exit);
  const auto& tx = exit.transactions.at(0);
  EXPECT_EQ(tx.entry_date, "");
  EXPECT_EQ(tx.entry_gate, "");
  EXPECT_EQ(tx.birthdate, "1990-01-01");
  // Fresh ciphertexts, same plaintexts.
  EXPECT_NE(tx.passport_number, entry.transactions[0].passport_number);
  EXPECT_NE(tx.name_surname, entry.transactions[0].name_surname);
  EXPECT_EQ(crypto::decrypt_field(f.reg->data_key(), tx.name_surname), "Ali Veli");
}

TEST(RegisterExit, Errors) {
  Fixture f;
  EXPECT_EQ(code_of([&] { f.reg->register_exit(f.exit("NEVER"), f.officer); }), Errc::exit_without_open_entry);
  f.reg->register_entry(f.entry("U1"), f.officer);
  EXPECT_EQ(code_of([&] { f.reg->register_exit(f.exit("U1"), f.auditor); }), Errc::permission_denied);
  auto no_gate = f.exit("U1");
  no_gate.exit_gate.clear();
  EXPECT_EQ(code_of([&] { f.reg->register_exit(no_gate, f.officer); }), Errc::validation);
  EXPECT_EQ(code_of([&] { f.reg->register_exit(f.exit("U1", "2024-02-01 00:00"), f.officer); }), Errc::validation);
  f.reg->register_exit(f.exit("U1"), f.officer);
  EXPECT_EQ(code_of([&] { f.reg->register_exit(f.exit("U1"), f.officer); }), Errc::exit_without_open_entry);
  // After leaving, the same person may enter again.
  EXPECT_NO_THROW(f.reg->register_entry(f.entry("U1", "2024-03-06 09:00"), f.officer));
}

TEST(RegisterExit, RevokedOfficerCannotRegister) {
  Fixture f;
  f.reg->register_entry(f.entry("U1"), f.officer);
  f.reg->revoke_authority(f.admin.public_key(), f.officer.public_key());
  EXPECT_EQ(code_of([&] { f.reg->register_exit(f.exit("U1"), f.officer); }), Errc::permission_denied);
  // The officer's earlier block still verifies.
  EXPECT_TRUE(f.reg->verify_chain(f.admin.public_key()).valid);
}

TEST(ListRecords, EmptyChain) {
  Fixture f;
  EXPECT_TRUE(f.reg->list_travel_records(f.auditor.public_key()).empty());
}

TEST(ListRecords, OpenTripHasEmptyExitFields) {
  Fixture f;
  f.reg->register_entry(f.entry("U1"), f.officer);
  const auto rs = f.reg->list_travel_records(f.officer.public_key());
  ASSERT_EQ(rs.size(), 1u);
  EXPECT_EQ(rs[0].status, TripStatus::open);
  EXPECT_EQ(rs[0].exit_date, "");
  EXPECT_EQ(rs[0].exit_gate, "");
  EXPECT_FALSE(rs[0].exit_block_index);
}

TEST(ListRecords, ThreeTripsOfOnePassport) {
  Fixture f;
  for (int i = 0; i < 3; ++i) {
    f.reg->register_entry(f.entry("U1", "2024-03-0" + std::to_string(2 * i + 1) + " 10:00"), f.officer);
    f.reg->register_exit(f.exit("U1", "2024-03-0" + std::to_string(2 * i + 2) + " 10:00"), f.officer);
  }
  const auto rs = f.reg->list_travel_records(f.auditor.public_key());
  ASSERT_EQ(rs.size(), 3u);
  for (const auto& r : rs) EXPECT_EQ(r.status, TripStatus::closed);
  EXPECT_EQ(rs, oracle::pair_trips(f.reg->blocks(), f.reg->data_key()));
}

TEST(ListRecords, PermissionDeniedForStrangers) {
  Fixture f;
  EXPECT_EQ(code_of([&] { f.reg->list_travel_records(KeyPair::generate().public_key()); }), Errc::permission_denied);
  EXPECT_EQ(code_of([&] { f.reg->compute_statistics(f.officer.public_key()); }), Errc::permission_denied);
  EXPECT_EQ(code_of([&] { f.reg->verify_chain(f.officer.public_key()); }), Errc::permission_denied);
}

TEST(ListRecords, Filters) {
  Fixture f;
  f.reg->register_entry(f.entry("A", "2024-03-01 10:00", "G1"), f.officer);
  f.reg->register_exit(f.exit("A", "2024-03-03 10:00", "G2"), f.officer);
  auto b = f.entry("B", "2024-03-04 10:00", "G1");
  b.nationality = "DE";
  f.reg->register_entry(b, f.officer);
  f.reg->register_entry(f.entry("C", "2024-03-10 10:00", "G3"), f.officer);
  const auto who = f.auditor.public_key();
  auto passports = [&](RecordFilter filter) {
    std::vector<std::string> out;
    for (const auto& r : f.reg->list_travel_records(who, filter)) out.push_back(r.passport_number);
    return out;
  };
  using V = std::vector<std::string>;
  EXPECT_EQ(passports({}), (V{"A", "B", "C"}));
  EXPECT_EQ(passports({.passport_number = "B"}), (V{"B"}));
  EXPECT_EQ(passports({.nationality = "DE"}), (V{"B"}));
  EXPECT_EQ(passports({.gate = "G2"}), (V{"A"}));
  EXPECT_EQ(passports({.gate = "G1"}), (V{"A", "B"}));
  EXPECT_EQ(passports({.status = TripStatus::open}), (V{"B", "C"}));
  EXPECT_EQ(passports({.status = TripStatus::closed}), (V{"A"}));
  // Overlap semantics: A was inside 03-01..03-03, B from 03-04 onwards.
  EXPECT_EQ(passports({.from = day("2024-03-02"), .to = day("2024-03-02")}), (V{"A"}));
  EXPECT_EQ(passports({.from = day("2024-03-04")}), (V{"B", "C"}));
  EXPECT_EQ(passports({.to = day("2024-03-01")}), (V{"A"}));
  EXPECT_EQ(passports({.from = day("2024-03-05"), .to = day("2024-03-09")}), (V{"B"}));
  EXPECT_EQ(passports({.nationality = "TR", .status = TripStatus::open}), (V{"C"}));
}

TEST(Statistics, GenesisOnlyIsZero) {
  Fixture f;
  EXPECT_EQ(f.reg->compute_statistics(f.auditor.public_key()), StatsReport{});
}

TEST(Statistics, TwoEntriesOneExit) {
  Fixture f;
  f.reg->register_entry(f.entry("A", "2024-03-01 10:00", "G1"), f.officer);
  f.reg->register_entry(f.entry("B", "2024-03-01 11:00", "G1"), f.officer);
  f.reg->register_exit(f.exit("A", "2024-03-02 10:00", "G2"), f.officer);
  const auto s = f.reg->compute_statistics(f.auditor.public_key());
  EXPECT_EQ(s.total_entries, 2u);
  EXPECT_EQ(s.total_exits, 1u);
  EXPECT_EQ(s.currently_inside, 1u);
  EXPECT_EQ(s.per_gate.at("G1"), (Counts{2, 0}));
  EXPECT_EQ(s.per_gate.at("G2"), (Counts{0, 1}));
  EXPECT_EQ(s.per_nationality.at("TR"), 2u);
  EXPECT_EQ(s.per_day.at("2024-03-01"), (Counts{2, 0}));
  EXPECT_EQ(s.per_day.at("2024-03-02"), (Counts{0, 1}));
}

namespace {

// Random walk over a small passport pool: enter whoever is outside, let out
// whoever is inside.
void random_history(Fixture& f, std::mt19937_64& rng, int max_blocks) {
  std::vector<std::string> pool{"P1", "P2", "P3", "P4"};
  std::set<std::string> inside;
  const int n = static_cast<int>(rng() % (max_blocks + 1));
  for (int i = 0; i < n; ++i) {
    const auto& p = pool[rng() % pool.size()];
    if (inside.contains(p)) {
      f.reg->register_exit(testing_support::exit_form(p, rng), f.officer);
      inside.erase(p);
    } else {
      f.reg->register_entry(testing_support::entry_form(p, rng), rng() % 2 ? f.officer : f.admin);
      inside.insert(p);
    }
  }
}

}  // namespace

TEST(OracleEquivalence, PairingMatchesBruteForce) {
  std::mt19937_64 rng(2024);
  for (int round = 0; round < 40; ++round) {
    Fixture f;
    random_history(f, rng, 19);
    const auto blocks = f.reg->blocks();
    const auto expected = oracle::pair_trips(blocks, f.reg->data_key());
    ASSERT_EQ(f.reg->list_travel_records(f.auditor.public_key()), expected) << "round " << round;
    ASSERT_EQ(merge_travel_records(blocks, f.reg->data_key()), expected);
  }
}

TEST(OracleEquivalence, StatisticsMatchBruteForceTally) {
  std::mt19937_64 rng(77);
  const std::vector<std::pair<const char*, const char*>> ranges = {
      {"", ""}, {"2024-03-01", "2024-03-03"}, {"2024-03-05", ""}, {"", "2024-03-02"}, {"2024-03-09", "2024-03-09"}};
  for (int round = 0; round < 20; ++round) {
    Fixture f;
    random_history(f, rng, 20);
    for (auto [from, to] : ranges) {
      std::optional<std::chrono::sys_days> df, dt;
      if (*from) df = day(from);
      if (*to) dt = day(to);
      const auto got = f.reg->compute_statistics(f.admin.public_key(), df, dt);
      ASSERT_EQ(got, oracle::tally_ref(f.reg->blocks(), f.reg->data_key(), from, to)) << round << " " << from << ".." << to;
      EXPECT_EQ(got.currently_inside, got.total_entries - got.total_exits);
    }
  }
}

TEST(Merge, UndecryptableBlockIsNamed) {
  Fixture f;
  f.reg->register_entry(f.entry("U1"), f.officer);
  try {
    merge_travel_records(f.reg->blocks(), crypto::DataKey::generate());
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::data_integrity);
    EXPECT_NE(std::string(e.what()).find("block 1"), std::string::npos);
  }
}

TEST(Merge, PlateFallsBackToExitPlate) {
  Fixture f;
  f.reg->register_entry(f.entry("U1"), f.officer);
  auto ex = f.exit("U1");
  ex.plate = "06 ZZ 42";
  f.reg->register_exit(ex, f.officer);
  EXPECT_EQ(f.reg->list_travel_records(f.officer.public_key()).at(0).plate, "06 ZZ 42");
}

TEST(Registry, ReopensFromExistingChain) {
  Fixture f;
  f.reg->register_entry(f.entry("U1"), f.officer);
  Registry again(chain::Chain(f.reg->blocks()), f.reg->authorities(), f.reg->data_key(), {}, StepClock{});
  EXPECT_EQ(code_of([&] { again.register_entry(f.entry("U1"), f.officer); }), Errc::duplicate_open_entry);
  EXPECT_NO_THROW(again.register_exit(f.exit("U1"), f.officer));
}

TEST(Registry, TimestampsNeverRegressEvenIfClockDoes) {
  auto admin = KeyPair::generate();
  std::int64_t t = 2'000'000'000'000'000;
  auto reg = Registry::create(admin, "root", crypto::DataKey::generate(), {},
                              [&] { return Timestamp::from_micros(t -= 1'000'000); });
  reg->register_entry(EntryForm{"U1", "N", "TR", "1990-01-01", "2030-01-01", "G", "2024-01-01 10:00", ""}, admin);
  const auto officer = KeyPair::generate();
  reg->add_authority(admin.public_key(), officer.public_key(), "o", Role::officer);
  reg->register_exit(ExitForm{"U1", "G", "2024-01-02 10:00", ""}, officer);
  EXPECT_TRUE(reg->verify_chain(admin.public_key()).valid);
}

TEST(Registry, SinkFailureLeavesStateUnchanged) {
  Fixture f;
  f.reg->set_sinks({.on_block = [](const chain::Block&) { throw Error(Errc::io, "disk full"); },
                    .on_authorities = [](const authority::AuthorityRegistry&) { throw Error(Errc::io, "disk full"); }});
  EXPECT_EQ(code_of([&] { f.reg->register_entry(f.entry("U1"), f.officer); }), Errc::io);
  EXPECT_EQ(f.reg->chain_size(), 1u);
  const auto k = KeyPair::generate();
  EXPECT_EQ(code_of([&] { f.reg->add_authority(f.admin.public_key(), k.public_key(), "x", Role::officer); }), Errc::io);
  EXPECT_EQ(f.reg->authorities().find(k.public_key()), nullptr);
  f.reg->set_sinks({});
  // The failed entry did not leave a phantom open trip.
  EXPECT_NO_THROW(f.reg->register_entry(f.entry("U1"), f.officer));
}

TEST(Registry, ConcurrentReadersAndWriter) {
  Fixture f;
  std::atomic<bool> done{false};
  std::atomic<int> bad{0};
  std::thread reader([&] {
    while (!done) {
      const auto rs = f.reg->list_travel_records(f.auditor.public_key());
      const auto s = f.reg->compute_statistics(f.auditor.public_key());
      if (s.currently_inside != s.total_entries - s.total_exits) ++bad;
      for (std::size_t i = 1; i < rs.size(); ++i) {
        if (rs[i].entry_block_index <= rs[i - 1].entry_block_index) ++bad;
      }
    }
  });
  for (int i = 0; i < 30; ++i) f.reg->register_entry(f.entry("P" + std::to_string(i)), f.officer);
  done = true;
  reader.join();
  EXPECT_EQ(bad, 0);
  EXPECT_TRUE(f.reg->verify_chain(f.auditor.public_key()).valid);
}
