#include "gatechain/authority.hpp"

#include "gatechain/crypto.hpp"
#include "gatechain/error.hpp"

namespace gatechain::authority {

std::string_view to_string(Role role) {
  switch (role) {
    case Role::admin: return "admin";
    case Role::officer: return "officer";
    case Role::auditor: return "auditor";
  }
  return "";
}

std::string_view to_string(Action action) {
  switch (action) {
    case Action::manage_authorities: return "manage_authorities";
    case Action::register_entry: return "register_entry";
    case Action::register_exit: return "register_exit";
    case Action::list_records: return "list_records";
    case Action::verify_chain: return "verify_chain";
    case Action::view_stats: return "view_stats";
  }
  return "";
}

std::optional<Role> parse_role(std::string_view name) {
  for (auto r : kAllRoles) {
    if (to_string(r) == name) return r;
  }
  return std::nullopt;
}

std::string_view to_string(Status status) { return status == Status::active ? "active" : "revoked"; }

AuthorityRegistry AuthorityRegistry::bootstrap(const std::string& admin_key, std::string display_name, Timestamp at) {
  if (!crypto::is_valid_public_key(admin_key)) throw Error(Errc::validation, "bootstrap key is not a P-256 public key");
  AuthorityRecord admin{admin_key, std::move(display_name), Role::admin, Status::active, at, std::nullopt};
  AuditEntry entry{at, "", "bootstrap", admin_key, "role=admin"};
  return AuthorityRegistry({std::move(admin)}, {std::move(entry)});
}

AuthorityRegistry::AuthorityRegistry(std::vector<AuthorityRecord> records, std::vector<AuditEntry> audit)
    : records_(std::move(records)), audit_(std::move(audit)) {
  for (std::size_t i = 0; i < records_.size(); ++i) {
    for (std::size_t j = 0; j < i; ++j) {
      if (records_[i].public_key == records_[j].public_key) {
        throw Error(Errc::duplicate_key, "authority registered twice: " + records_[i].public_key);
      }
    }
  }
}

const AuthorityRecord* AuthorityRegistry::find(std::string_view public_key) const {
  for (const auto& r : records_) {
    if (r.public_key == public_key) return &r;
  }
  return nullptr;
}

AuthorityRecord* AuthorityRegistry::find_mutable(std::string_view public_key) {
  return const_cast<AuthorityRecord*>(std::as_const(*this).find(public_key));
}

bool AuthorityRegistry::check_permission(std::string_view public_key, Action action) const {
  const auto* r = find(public_key);
  return r != nullptr && r->status == Status::active && role_grants(r->role, action);
}

void AuthorityRegistry::require_permission(std::string_view actor_key, Action action) const {
  if (!check_permission(actor_key, action)) {
    throw Error(Errc::permission_denied, "actor lacks permission " + std::string(to_string(action)));
  }
}

const AuthorityRecord& AuthorityRegistry::add_authority(std::string_view actor_key, std::string public_key,
                                                        std::string display_name, Role role, Timestamp at) {
  require_permission(actor_key, Action::manage_authorities);
  if (!crypto::is_valid_public_key(public_key)) {
    throw Error(Errc::validation, "not a compressed P-256 public key: " + public_key);
  }
  if (find(public_key) != nullptr) throw Error(Errc::duplicate_key, "authority already registered: " + public_key);
  audit_.push_back({at, std::string(actor_key), "add", public_key, "role=" + std::string(to_string(role))});
  records_.push_back({std::move(public_key), std::move(display_name), role, Status::active, at, std::nullopt});
  return records_.back();
}

const AuthorityRecord& AuthorityRegistry::revoke_authority(std::string_view actor_key, std::string_view public_key,
                                                           Timestamp at) {
  require_permission(actor_key, Action::manage_authorities);
  auto* r = find_mutable(public_key);
  if (r == nullptr) throw Error(Errc::unknown_key, "no such authority: " + std::string(public_key));
  if (r->status == Status::revoked) throw Error(Errc::already_revoked, "authority already revoked");
  r->status = Status::revoked;
  r->revoked_at = at;
  audit_.push_back({at, std::string(actor_key), "revoke", r->public_key, ""});
  return *r;
}

std::vector<std::string> AuthorityRegistry::validator_set() const {
  std::vector<std::string> keys;
  for (const auto& r : records_) {
    if (r.status == Status::active && can_sign_blocks(r.role)) keys.push_back(r.public_key);
  }
  return keys;
}

chain::ValidatorSet AuthorityRegistry::current_validators() const {
  const auto keys = validator_set();
  return chain::ValidatorSet::of(keys);
}

chain::ValidatorSet AuthorityRegistry::signing_history() const {
  chain::ValidatorSet set;
  for (const auto& r : records_) {
    if (!can_sign_blocks(r.role)) continue;
    set.admit(r.public_key, r.added_at, r.revoked_at.value_or(chain::ValidatorSet::kForever));
  }
  return set;
}

}  // namespace gatechain::authority
