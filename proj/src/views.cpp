#include "gatechain/views.hpp"

namespace gatechain::views {

using nlohmann::json;

json to_json(const registry::TravelRecordView& v) {
  return {
      {"passport_number", v.passport_number},
      {"name_surname", v.name_surname},
      {"nationality", v.nationality},
      {"birthdate", v.birthdate},
      {"entry_date", v.entry_date},
      {"entry_gate", v.entry_gate},
      {"exit_date", v.exit_date},
      {"exit_gate", v.exit_gate},
      {"plate", v.plate},
      {"entry_block_index", v.entry_block_index},
      {"exit_block_index", v.exit_block_index ? json(*v.exit_block_index) : json(nullptr)},
      {"status", registry::to_string(v.status)},
  };
}

json to_json(const registry::StatsReport& s) {
  json per_gate = json::object();
  for (const auto& [gate, c] : s.per_gate) per_gate[gate] = {{"entries", c.entries}, {"exits", c.exits}};
  json per_day = json::object();
  for (const auto& [day, c] : s.per_day) per_day[day] = {{"entries", c.entries}, {"exits", c.exits}};
  json per_nationality = json::object();
  for (const auto& [n, c] : s.per_nationality) per_nationality[n] = c;
  return {
      {"total_entries", s.total_entries},   {"total_exits", s.total_exits},
      {"currently_inside", s.currently_inside}, {"per_gate", per_gate},
      {"per_nationality", per_nationality}, {"per_day", per_day},
  };
}

json to_json(const chain::Violation& v) {
  return {{"block_index", v.block_index}, {"kind", chain::to_string(v.kind)}, {"detail", v.detail}};
}

json to_json(const chain::VerificationReport& r) {
  json violations = json::array();
  for (const auto& v : r.violations) violations.push_back(to_json(v));
  return {{"valid", r.valid}, {"violations", violations}};
}

json to_json(const authority::AuthorityRecord& r) {
  return {
      {"public_key", r.public_key},
      {"display_name", r.display_name},
      {"role", authority::to_string(r.role)},
      {"status", authority::to_string(r.status)},
      {"added_at", r.added_at.to_string()},
      {"revoked_at", r.revoked_at ? json(r.revoked_at->to_string()) : json(nullptr)},
  };
}

}  // namespace gatechain::views
