#pragma once

#include <array>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "gatechain/canonical.hpp"
#include "gatechain/chain.hpp"

namespace gatechain::authority {

enum class Role { admin, officer, auditor };
enum class Action { manage_authorities, register_entry, register_exit, list_records, verify_chain, view_stats };

inline constexpr std::array kAllRoles = {Role::admin, Role::officer, Role::auditor};
inline constexpr std::array kAllActions = {Action::manage_authorities, Action::register_entry,
                                           Action::register_exit,      Action::list_records,
                                           Action::verify_chain,       Action::view_stats};

/// The permission matrix; defined for every (role, action) pair.
constexpr bool role_grants(Role role, Action action) {
  switch (role) {
    case Role::admin:
      return true;
    case Role::officer:
      return action == Action::register_entry || action == Action::register_exit || action == Action::list_records;
    case Role::auditor:
      return action == Action::list_records || action == Action::verify_chain || action == Action::view_stats;
  }
  return false;
}

/// Roles whose keys may sign blocks.
constexpr bool can_sign_blocks(Role role) { return role == Role::admin || role == Role::officer; }

std::string_view to_string(Role role);
std::string_view to_string(Action action);
std::optional<Role> parse_role(std::string_view name);

enum class Status { active, revoked };
std::string_view to_string(Status status);

struct AuthorityRecord {
  std::string public_key;
  std::string display_name;
  Role role = Role::officer;
  Status status = Status::active;
  Timestamp added_at;
  std::optional<Timestamp> revoked_at;
};

struct AuditEntry {
  Timestamp at;
  std::string actor;   // public key, empty for bootstrap
  std::string action;  // "bootstrap" | "add" | "revoke"
  std::string target;
  std::string detail;
};

/// The predetermined set of authorities. Every mutation is checked against
/// the actor's permissions and recorded in the audit log.
class AuthorityRegistry {
 public:
  /// Registry holding a single admin.
  static AuthorityRegistry bootstrap(const std::string& admin_key, std::string display_name, Timestamp at);

  AuthorityRegistry(std::vector<AuthorityRecord> records, std::vector<AuditEntry> audit);

  /// Throws Error(permission_denied), Error(duplicate_key) or
  /// Error(validation) for a key that is not a P-256 point.
  const AuthorityRecord& add_authority(std::string_view actor_key, std::string public_key, std::string display_name,
                                       Role role, Timestamp at);
  /// Throws Error(permission_denied), Error(unknown_key) or Error(already_revoked).
  const AuthorityRecord& revoke_authority(std::string_view actor_key, std::string_view public_key, Timestamp at);

  bool check_permission(std::string_view public_key, Action action) const;

  /// Active keys with a block-signing role.
  std::vector<std::string> validator_set() const;
  /// validator_set() as time-independent membership, for accepting new blocks.
  chain::ValidatorSet current_validators() const;
  /// Signing keys with the intervals during which they were active, for
  /// verifying history.
  chain::ValidatorSet signing_history() const;

  const AuthorityRecord* find(std::string_view public_key) const;
  const std::vector<AuthorityRecord>& records() const { return records_; }
  const std::vector<AuditEntry>& audit_log() const { return audit_; }

 private:
  AuthorityRecord* find_mutable(std::string_view public_key);
  void require_permission(std::string_view actor_key, Action action) const;

  std::vector<AuthorityRecord> records_;
  std::vector<AuditEntry> audit_;
};

}  // namespace gatechain::authority
