#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "lendsim/agents.hpp"
#include "lendsim/lending_pool.hpp"
#include "lendsim/oracle.hpp"
#include "lendsim/scenario.hpp"
#include "lendsim/venue.hpp"

namespace lendsim {

struct EventRecord {
  int64_t tick = 0;
  std::string kind;    // venue_event, liquidation, reserve_flags, bad_debt
  std::string detail;

  bool operator==(const EventRecord&) const = default;
};

// Per-tick simulation state, one row per tick, rendered to CSV verbatim so
// two runs can be compared byte for byte.
class MetricsLog {
public:
  void set_columns(std::vector<std::string> columns);
  void add_row(std::vector<std::string> row);

  const std::vector<std::string>& columns() const { return columns_; }
  const std::vector<std::vector<std::string>>& rows() const { return rows_; }
  std::string to_csv() const;

private:
  std::vector<std::string> columns_;
  std::vector<std::vector<std::string>> rows_;
};

// Owns every piece of simulated state and advances it one tick at a time.
// Each tick runs a fixed phase order: reference prices and venue shocks,
// oracle observation and publication, interest accrual, ordinary agents,
// liquidators, a bad-debt scan, then metrics and a token-conservation
// audit. Determinism holds because every container iterates in sorted
// order, agents run in declaration order, and randomness is counter-based.
class World {
public:
  explicit World(const Scenario& scenario);

  void tick();  // advance one step; throws on any failed action
  void run();   // tick() until horizon_ticks

  int64_t current_tick() const { return tick_; }
  int64_t now() const { return now_; }

  const LendingPool& pool() const { return pool_; }
  const PriceOracle& oracle() const { return oracle_; }
  const std::map<std::string, Venue>& venues() const { return venues_; }
  const std::map<std::string, std::map<AssetId, FixedDec>>& wallets() const {
    return wallets_;
  }
  const PriceMap& source_prices() const { return source_prices_; }
  const MetricsLog& metrics() const { return metrics_; }
  const std::vector<EventRecord>& events() const { return events_; }

  nlohmann::json summary() const;

private:
  void seed_world(const Scenario& scenario);
  void snapshot_initial_totals();

  void phase_prices();
  void phase_oracle();
  void phase_accrual();
  void phase_agents(bool liquidators);
  void phase_bad_debt();
  void phase_metrics();
  void check_conservation();

  void apply(const Action& action, const std::string& agent_name);
  void apply_swap(const std::string& account, const std::string& venue_id,
                  SwapDirection direction, const FixedDec& amount_in);
  void debit(const std::string& account, const AssetId& asset,
             const FixedDec& amount, const std::string& who);
  void credit(const std::string& account, const AssetId& asset,
              const FixedDec& amount);
  void log_event(const std::string& kind, const std::string& detail);

  Scenario scenario_;
  LendingPool pool_;
  PriceOracle oracle_;
  std::map<std::string, Venue> venues_;
  std::map<std::string, std::map<AssetId, FixedDec>> wallets_;
  PriceMap source_prices_;
  PriceMap oracle_prices_;
  CounterRng rng_;
  std::vector<std::unique_ptr<Agent>> agents_;

  int64_t tick_ = 0;
  int64_t now_ = 0;

  MetricsLog metrics_;
  std::vector<EventRecord> events_;

  std::map<AssetId, FixedDec> initial_totals_;
  int64_t transfer_count_ = 0;
  FixedDec max_drift_;

  FixedDec peak_bad_debt_;
  int64_t peak_bad_debt_tick_ = -1;
  FixedDec last_bad_debt_;
  std::vector<BadDebtRecord> last_bad_debt_records_;
  int64_t liquidation_count_ = 0;
  FixedDec total_liquidated_value_;
  std::map<std::string, FixedDec> min_health_;
  std::map<AssetId, int64_t> publish_counts_;
};

struct RunResult {
  std::string metrics_csv;
  nlohmann::json summary;
  std::vector<EventRecord> events;
};

RunResult run_scenario(const Scenario& scenario);

struct ReplayReport {
  bool deterministic = false;
  int64_t first_divergent_tick = -1;  // -1 when runs agree
  std::string detail;
};

// Runs the scenario twice from scratch and compares metrics and events.
ReplayReport replay_check(const Scenario& scenario);

struct SweepEntry {
  nlohmann::json value;
  nlohmann::json summary;
};

// Re-runs the scenario once per value, overriding the document at `path`
// (JSON pointer or dotted). Runs are independent; `parallel` fans them out
// across threads without changing the result order.
std::vector<SweepEntry> sweep(const nlohmann::json& base_doc, const std::string& path,
                              const std::vector<nlohmann::json>& values,
                              bool parallel = false);

}  // namespace lendsim
