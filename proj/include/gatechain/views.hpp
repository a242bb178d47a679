#pragma once

#include "gatechain/authority.hpp"
#include "gatechain/chain.hpp"
#include "gatechain/registry.hpp"
#include "json.hpp"

// JSON shapes shared by the HTTP API and the CLI's json-lines output.
namespace gatechain::views {

nlohmann::json to_json(const registry::TravelRecordView& view);
nlohmann::json to_json(const registry::StatsReport& stats);
nlohmann::json to_json(const chain::Violation& violation);
nlohmann::json to_json(const chain::VerificationReport& report);
/// Never includes private material.
nlohmann::json to_json(const authority::AuthorityRecord& record);

}  // namespace gatechain::views
