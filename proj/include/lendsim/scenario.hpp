#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "lendsim/lending_pool.hpp"
#include "lendsim/oracle.hpp"
#include "lendsim/venue.hpp"

namespace lendsim {

// Where an asset's market price comes from each tick: a script produces a
// reference directly; a venue-priced asset reads its venue's spot times the
// quote asset's reference.
struct PriceSource {
  PriceScript script;            // for non-venue kinds
  std::string venue;             // for ScriptKind::VenueEvents
};

struct AssetConfig {
  FixedDec initial_price;
  ReserveConfig reserve;
  OraclePolicy oracle;
  PriceSource price;
};

struct InitialPosition {
  std::string account;
  std::map<AssetId, FixedDec> deposits;
  std::map<AssetId, FixedDec> debts;
};

struct AgentSpec {
  std::string kind;
  std::string name;
  std::vector<std::string> wallets;
  int64_t start_tick = 0;
  nlohmann::json params;
};

struct Scenario {
  std::string name;
  uint64_t seed = 0;
  int64_t start_time = 0;
  int64_t tick_seconds = 60;
  int64_t horizon_ticks = 0;
  std::string numeraire = "USD";
  std::string notes;
  std::map<AssetId, AssetConfig> assets;
  std::vector<Venue> venues;
  std::map<std::string, std::map<AssetId, FixedDec>> accounts;
  std::vector<InitialPosition> initial_positions;
  std::vector<std::string> tracked_accounts;
  std::vector<AgentSpec> agents;
  nlohmann::json doc;  // the parsed document, kept for hashing and sweeps

  bool has_asset(const AssetId& id) const { return assets.count(id) != 0; }
  const Venue* find_venue(const std::string& id) const;
};

// Decimal values in scenario documents are JSON strings ("0.55"), never
// JSON numbers, so no binary-float step can perturb them.
Scenario parse_scenario(const nlohmann::json& doc);
Scenario load_scenario_file(const std::string& path);
nlohmann::json read_json_file(const std::string& path);

// path is a JSON pointer ("/assets/CRV/reserve/ltv") or dotted
// ("assets.CRV.reserve.ltv"); the value must already be typed JSON
void apply_override(nlohmann::json& doc, const std::string& path,
                    const nlohmann::json& value);
// "key=value" form used by the CLI; value parses as JSON when it can,
// otherwise it is taken as a string
void apply_override_expr(nlohmann::json& doc, const std::string& expr);

// FNV-1a over the compact dump of the document; stable across runs and
// platforms, used to tag output files
uint64_t scenario_hash(const nlohmann::json& doc);
std::string hash_hex(uint64_t hash);

}  // namespace lendsim
