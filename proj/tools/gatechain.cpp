// gatechain: command-line front end for a GateChain node.

#include <csignal>
#include <cstdio>
#include <iostream>
#include <thread>

#include "CLI11.hpp"
#include "gatechain/api_server.hpp"
#include "gatechain/bench.hpp"
#include "gatechain/dates.hpp"
#include "gatechain/error.hpp"
#include "gatechain/node.hpp"
#include "gatechain/views.hpp"

namespace {

using namespace gatechain;
using nlohmann::json;

constexpr int kExitInvalid = 1;
constexpr int kExitError = 2;

enum class Format { table, csv, json_lines };

struct Config {
  std::string chain_path = "gatechain.chain";
  std::string keystore_path = "gatechain.keys.json";
  std::string listen = "127.0.0.1:8080";
  std::string as_key;
  Format format = Format::table;
};

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n\r") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

// Prints rows of equal width in the configured format.
void print_rows(const Config& cfg, const std::vector<std::string>& header,
                const std::vector<std::vector<std::string>>& rows) {
  switch (cfg.format) {
    case Format::csv: {
      for (std::size_t i = 0; i < header.size(); ++i) std::cout << (i ? "," : "") << csv_field(header[i]);
      std::cout << '\n';
      for (const auto& r : rows) {
        for (std::size_t i = 0; i < r.size(); ++i) std::cout << (i ? "," : "") << csv_field(r[i]);
        std::cout << '\n';
      }
      break;
    }
    case Format::json_lines:
      for (const auto& r : rows) {
        json obj = json::object();
        for (std::size_t i = 0; i < r.size(); ++i) obj[header[i]] = r[i];
        std::cout << obj.dump() << '\n';
      }
      break;
    case Format::table: {
      if (rows.empty()) break;
      std::vector<std::size_t> width(header.size());
      for (std::size_t i = 0; i < header.size(); ++i) width[i] = header[i].size();
      for (const auto& r : rows) {
        for (std::size_t i = 0; i < r.size(); ++i) width[i] = std::max(width[i], r[i].size());
      }
      auto line = [&](const std::vector<std::string>& r) {
        for (std::size_t i = 0; i < r.size(); ++i) {
          std::cout << r[i] << std::string(width[i] - r[i].size() + (i + 1 < r.size() ? 2 : 0), ' ');
        }
        std::cout << '\n';
      };
      line(header);
      for (const auto& r : rows) line(r);
      break;
    }
  }
}

std::unique_ptr<Node> open_node(const Config& cfg, registry::Options options = {}) {
  std::vector<std::string> warnings;
  auto node = Node::open({cfg.chain_path, cfg.keystore_path}, warnings, options);
  for (const auto& w : warnings) std::cerr << "warning: " << w << '\n';
  return node;
}

crypto::KeyPair acting_identity(const Config& cfg, const Node& node) {
  return node.identity(cfg.as_key.empty() ? node.admin_key() : cfg.as_key);
}

std::optional<std::chrono::sys_days> date_option(const std::string& text, const char* name) {
  if (text.empty()) return std::nullopt;
  auto d = dates::parse_date(text);
  if (!d) throw Error(Errc::validation, std::string(name) + " must be YYYY-MM-DD");
  return d;
}

std::vector<std::string> record_row(const registry::TravelRecordView& v) {
  return {std::to_string(v.entry_block_index),
          v.exit_block_index ? std::to_string(*v.exit_block_index) : "",
          std::string(registry::to_string(v.status)),
          v.passport_number,
          v.name_surname,
          v.nationality,
          v.birthdate,
          v.entry_date,
          v.entry_gate,
          v.exit_date,
          v.exit_gate,
          v.plate};
}

const std::vector<std::string> kRecordHeader = {"entry_block", "exit_block", "status",    "passport_number",
                                                "name_surname", "nationality", "birthdate", "entry_date",
                                                "entry_gate",  "exit_date",   "exit_gate", "plate"};

int cmd_verify(const Config& cfg) {
  auto node = open_node(cfg);
  const auto me = cfg.as_key.empty() ? node->admin_key() : cfg.as_key;
  const auto report = node->registry().verify_chain(me);
  if (cfg.format == Format::json_lines) {
    std::cout << views::to_json(report).dump() << '\n';
  } else {
    for (const auto& v : report.violations) {
      std::cout << "block " << v.block_index << ": " << chain::to_string(v.kind) << ": " << v.detail << '\n';
    }
    std::cout << (report.valid ? "chain valid" : "chain INVALID") << " (" << node->registry().chain_size()
              << " blocks, " << report.violations.size() << " violations)\n";
  }
  return report.valid ? 0 : kExitInvalid;
}

int serve(const Config& cfg, std::chrono::seconds session_ttl) {
  auto node = open_node(cfg);
  const auto colon = cfg.listen.rfind(':');
  if (colon == std::string::npos) throw Error(Errc::validation, "--listen must be host:port");
  const auto host = cfg.listen.substr(0, colon);
  const int port = std::stoi(cfg.listen.substr(colon + 1));

  // Handle SIGINT/SIGTERM synchronously on this thread.
  sigset_t signals;
  sigemptyset(&signals);
  sigaddset(&signals, SIGINT);
  sigaddset(&signals, SIGTERM);
  pthread_sigmask(SIG_BLOCK, &signals, nullptr);

  api::ServerOptions options;
  options.session_ttl = session_ttl;
  api::ApiServer server(*node, options);
  const int bound = server.bind(host, port);
  if (bound < 0) throw Error(Errc::io, "cannot listen on " + cfg.listen);
  std::cerr << "gatechain: serving on " << host << ":" << bound << " (" << node->registry().chain_size()
            << " blocks)\n";

  bool served = true;
  std::thread worker([&] { served = server.serve(); });
  int sig = 0;
  sigwait(&signals, &sig);
  std::cerr << "gatechain: shutting down\n";
  server.stop();
  worker.join();
  return served ? 0 : kExitError;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"GateChain: permissioned entry/exit ledger"};
  app.require_subcommand(1);
  Config cfg;
  std::string format = "table";
  app.add_option("--chain", cfg.chain_path, "Chain file")->envname("GATECHAIN_CHAIN");
  app.add_option("--keystore", cfg.keystore_path, "Key store file")->envname("GATECHAIN_KEYSTORE");
  app.add_option("--format", format, "Output format")->check(CLI::IsMember({"table", "csv", "json-lines"}));
  app.add_option("--as-key", cfg.as_key, "Hosted identity (public key) to act as; defaults to the bootstrap admin");

  auto* init = app.add_subcommand("init", "Create key store, bootstrap admin and genesis block");
  std::string admin_name = "bootstrap admin";
  init->add_option("--admin-name", admin_name);

  auto* auth = app.add_subcommand("authority", "Manage the validator set");
  auth->require_subcommand(1);
  auto* auth_add = auth->add_subcommand("add", "Register an authority");
  std::string new_key, new_name, new_role = "officer";
  auth_add->add_option("--public-key", new_key, "Register an external key; omit to generate a hosted key");
  auth_add->add_option("--name", new_name)->required();
  auth_add->add_option("--role", new_role)->check(CLI::IsMember({"admin", "officer", "auditor"}));
  auto* auth_revoke = auth->add_subcommand("revoke", "Revoke an authority");
  std::string revoke_key;
  auth_revoke->add_option("--public-key", revoke_key)->required();
  auto* auth_list = auth->add_subcommand("list", "List authorities");

  auto* entry = app.add_subcommand("record-entry", "Register an entry");
  registry::EntryForm entry_form;
  bool allow_expired = false;
  entry->add_option("--passport", entry_form.passport_number)->required();
  entry->add_option("--name", entry_form.name_surname)->required();
  entry->add_option("--nationality", entry_form.nationality)->required();
  entry->add_option("--birthdate", entry_form.birthdate, "YYYY-MM-DD")->required();
  entry->add_option("--validity", entry_form.passport_validity_date, "Passport validity YYYY-MM-DD")->required();
  entry->add_option("--gate", entry_form.entry_gate)->required();
  entry->add_option("--datetime", entry_form.entry_datetime, "YYYY-MM-DD HH:MM")->required();
  entry->add_option("--plate", entry_form.plate);
  entry->add_flag("--allow-expired", allow_expired, "Accept expired passports");

  auto* exit_cmd = app.add_subcommand("record-exit", "Register an exit");
  registry::ExitForm exit_form;
  exit_cmd->add_option("--passport", exit_form.passport_number)->required();
  exit_cmd->add_option("--gate", exit_form.exit_gate)->required();
  exit_cmd->add_option("--datetime", exit_form.exit_datetime, "YYYY-MM-DD HH:MM")->required();
  exit_cmd->add_option("--plate", exit_form.plate);

  auto* list = app.add_subcommand("list", "List merged travel records");
  std::string f_passport, f_nationality, f_from, f_to, f_gate, f_status;
  list->add_option("--passport", f_passport);
  list->add_option("--nationality", f_nationality);
  list->add_option("--from", f_from, "YYYY-MM-DD");
  list->add_option("--to", f_to, "YYYY-MM-DD");
  list->add_option("--gate", f_gate);
  list->add_option("--status", f_status)->check(CLI::IsMember({"open", "closed"}));

  auto* stats = app.add_subcommand("stats", "Entry/exit statistics");
  stats->add_option("--from", f_from, "YYYY-MM-DD");
  stats->add_option("--to", f_to, "YYYY-MM-DD");

  auto* verify = app.add_subcommand("verify", "Verify the whole chain");

  auto* serve_cmd = app.add_subcommand("serve", "Run the HTTP API");
  serve_cmd->add_option("--listen", cfg.listen, "host:port")->envname("GATECHAIN_LISTEN");
  long ttl_seconds = 8 * 3600;
  serve_cmd->add_option("--session-ttl", ttl_seconds, "Session lifetime in seconds")->check(CLI::PositiveNumber);

  auto* bench_cmd = app.add_subcommand("bench", "Block-creation benchmark");
  long n_blocks = 1000;
  std::string bench_out = "bench.csv";
  std::uint64_t seed = 42;
  bench_cmd->add_option("--blocks", n_blocks, "Number of blocks")->required();
  bench_cmd->add_option("--out", bench_out, "CSV output path");
  bench_cmd->add_option("--seed", seed);

  CLI11_PARSE(app, argc, argv);
  cfg.format = format == "csv" ? Format::csv : format == "json-lines" ? Format::json_lines : Format::table;

  try {
    if (*init) {
      auto node = Node::init({cfg.chain_path, cfg.keystore_path}, admin_name);
      std::cout << "initialised " << cfg.chain_path << " and " << cfg.keystore_path << "\nadmin " << node->admin_key()
                << '\n';
      return 0;
    }
    if (*auth_add) {
      auto node = open_node(cfg);
      const auto me = acting_identity(cfg, *node).public_key();
      const auto role = *authority::parse_role(new_role);
      authority::AuthorityRecord record;
      if (new_key.empty()) {
        record = node->add_hosted_authority(me, crypto::KeyPair::generate(), new_name, role);
      } else {
        record = node->registry().add_authority(me, new_key, new_name, role);
      }
      std::cout << record.public_key << '\n';
      return 0;
    }
    if (*auth_revoke) {
      auto node = open_node(cfg);
      const auto record = node->registry().revoke_authority(acting_identity(cfg, *node).public_key(), revoke_key);
      std::cout << "revoked " << record.public_key << '\n';
      return 0;
    }
    if (*auth_list) {
      auto node = open_node(cfg);
      std::vector<std::vector<std::string>> rows;
      const auto authorities = node->registry().authorities();
      for (const auto& r : authorities.records()) {
        rows.push_back({r.public_key, r.display_name, std::string(authority::to_string(r.role)),
                        std::string(authority::to_string(r.status)), r.added_at.to_string(),
                        r.revoked_at ? r.revoked_at->to_string() : "", node->hosts(r.public_key) ? "yes" : "no"});
      }
      print_rows(cfg, {"public_key", "display_name", "role", "status", "added_at", "revoked_at", "hosted"}, rows);
      return 0;
    }
    if (*entry) {
      registry::Options options;
      options.reject_expired_passports = !allow_expired;
      auto node = open_node(cfg, options);
      const auto block = node->registry().register_entry(entry_form, acting_identity(cfg, *node));
      std::cout << "entry recorded in block " << block.index << " (" << block.hash.str() << ")\n";
      return 0;
    }
    if (*exit_cmd) {
      auto node = open_node(cfg);
      const auto block = node->registry().register_exit(exit_form, acting_identity(cfg, *node));
      std::cout << "exit recorded in block " << block.index << " (" << block.hash.str() << ")\n";
      return 0;
    }
    if (*list) {
      auto node = open_node(cfg);
      registry::RecordFilter filter;
      if (!f_passport.empty()) filter.passport_number = f_passport;
      if (!f_nationality.empty()) filter.nationality = f_nationality;
      if (!f_gate.empty()) filter.gate = f_gate;
      if (!f_status.empty()) filter.status = registry::parse_trip_status(f_status);
      filter.from = date_option(f_from, "--from");
      filter.to = date_option(f_to, "--to");
      const auto me = acting_identity(cfg, *node).public_key();
      const auto records = node->registry().list_travel_records(me, filter);
      if (cfg.format == Format::json_lines) {
        for (const auto& r : records) std::cout << views::to_json(r).dump() << '\n';
      } else {
        std::vector<std::vector<std::string>> rows;
        for (const auto& r : records) rows.push_back(record_row(r));
        print_rows(cfg, kRecordHeader, rows);
      }
      return 0;
    }
    if (*stats) {
      auto node = open_node(cfg);
      const auto me = acting_identity(cfg, *node).public_key();
      const auto s = node->registry().compute_statistics(me, date_option(f_from, "--from"), date_option(f_to, "--to"));
      if (cfg.format == Format::json_lines) {
        std::cout << views::to_json(s).dump() << '\n';
        return 0;
      }
      std::vector<std::vector<std::string>> rows = {
          {"total", "entries", std::to_string(s.total_entries)},
          {"total", "exits", std::to_string(s.total_exits)},
          {"total", "currently_inside", std::to_string(s.currently_inside)}};
      for (const auto& [gate, c] : s.per_gate) {
        rows.push_back({"gate:" + gate, "entries", std::to_string(c.entries)});
        rows.push_back({"gate:" + gate, "exits", std::to_string(c.exits)});
      }
      for (const auto& [nat, n] : s.per_nationality) rows.push_back({"nationality:" + nat, "entries", std::to_string(n)});
      for (const auto& [day, c] : s.per_day) {
        rows.push_back({"day:" + day, "entries", std::to_string(c.entries)});
        rows.push_back({"day:" + day, "exits", std::to_string(c.exits)});
      }
      print_rows(cfg, {"scope", "metric", "value"}, rows);
      return 0;
    }
    if (*verify) return cmd_verify(cfg);
    if (*serve_cmd) return serve(cfg, std::chrono::seconds(ttl_seconds));
    if (*bench_cmd) {
      if (n_blocks < 1) throw Error(Errc::validation, "--blocks must be at least 1");
      const auto report = bench::run_block_benchmark(static_cast<std::size_t>(n_blocks), seed);
      bench::emit_bench_csv(report, bench_out);
      std::printf("blocks:              %zu\n", report.rows.size());
      std::printf("avg encryption time: %.6f s\n", report.avg_encryption_time_s);
      std::printf("avg sign time:       %.6f s\n", report.avg_sign_time_s);
      std::printf("avg verify time:     %.6f s\n", report.avg_verify_time_s);
      std::printf("verify/sign ratio:   %.3f\n", report.verify_to_sign_ratio);
      std::printf("chain verification:  %s\n", report.chain_valid ? "valid" : "INVALID");
      std::printf("csv:                 %s\n", bench_out.c_str());
      return report.chain_valid ? 0 : kExitInvalid;
    }
  } catch (const Error& e) {
    std::cerr << "error [" << to_string(e.code()) << "]: " << e.what() << '\n';
    return kExitError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitError;
  }
  return 0;
}
