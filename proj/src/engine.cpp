#include "lendsim/engine.hpp"

#include <future>
#include <sstream>
#include <utility>

namespace lendsim {

namespace {

using nlohmann::json;

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

std::string csv_field(const std::string& value) {
  if (value.find_first_of(",\"\n") == std::string::npos) return value;
  std::string out = "\"";
  for (char c : value) {
    if (c == '"') out += '"';
    out += c;
  }
  out += '"';
  return out;
}

uint64_t price_stream(const AssetId& asset) { return fnv1a64("price:" + asset); }

std::vector<std::string> split_lines(const std::string& text) {
  std::vector<std::string> lines;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) lines.push_back(line);
  return lines;
}

constexpr const char* kArbAccount = "arbitrageur";

}  // namespace

void MetricsLog::set_columns(std::vector<std::string> columns) {
  columns_ = std::move(columns);
}

void MetricsLog::add_row(std::vector<std::string> row) {
  if (row.size() != columns_.size()) {
    throw SimError(ErrorCode::InvalidState, "metrics row width mismatch");
  }
  rows_.push_back(std::move(row));
}

std::string MetricsLog::to_csv() const {
  std::string out;
  for (size_t i = 0; i < columns_.size(); ++i) {
    if (i) out += ',';
    out += csv_field(columns_[i]);
  }
  out += '\n';
  for (const auto& row : rows_) {
    for (size_t i = 0; i < row.size(); ++i) {
      if (i) out += ',';
      out += csv_field(row[i]);
    }
    out += '\n';
  }
  return out;
}

World::World(const Scenario& scenario)
    : scenario_(scenario), rng_(scenario.seed), now_(scenario.start_time) {
  seed_world(scenario_);
}

void World::seed_world(const Scenario& scenario) {
  for (const auto& [asset, cfg] : scenario.assets) {
    pool_.add_reserve(asset, cfg.reserve, now_);
    oracle_.add_feed(asset, cfg.oracle, cfg.initial_price, now_);
    source_prices_[asset] = cfg.initial_price;
    publish_counts_[asset] = 0;
  }
  oracle_prices_ = oracle_.prices();

  for (const Venue& venue : scenario.venues) {
    venue.validate();
    venues_.emplace(venue.id, venue);
  }
  wallets_ = scenario.accounts;

  // all deposits land before any debt so seeded borrows always have
  // liquidity to draw on, whichever order positions are declared in
  for (const InitialPosition& pos : scenario.initial_positions) {
    for (const auto& [asset, amount] : pos.deposits) {
      pool_.seed_position(pos.account, asset, amount, FixedDec::zero());
      ++transfer_count_;
    }
  }
  for (const InitialPosition& pos : scenario.initial_positions) {
    for (const auto& [asset, amount] : pos.debts) {
      pool_.seed_position(pos.account, asset, FixedDec::zero(), amount);
      ++transfer_count_;
    }
  }

  for (const AgentSpec& spec : scenario.agents) {
    agents_.push_back(make_agent(spec, scenario));
  }
  for (const std::string& account : scenario.tracked_accounts) {
    min_health_[account] = FixedDec::infinity();
  }

  std::vector<std::string> columns{"tick", "time"};
  for (const auto& [id, venue] : venues_) columns.push_back("spot:" + id);
  for (const auto& [asset, cfg] : scenario.assets) {
    columns.push_back("src:" + asset);
    columns.push_back("oracle:" + asset);
    columns.push_back("util:" + asset);
    columns.push_back("rate:" + asset);
    columns.push_back("avail:" + asset);
    columns.push_back("debt:" + asset);
  }
  for (const std::string& account : scenario.tracked_accounts) {
    columns.push_back("health:" + account);
  }
  columns.push_back("debt_value_total");
  columns.push_back("bad_debt_total");
  metrics_.set_columns(std::move(columns));

  snapshot_initial_totals();
}

void World::snapshot_initial_totals() {
  for (const auto& [asset, cfg] : scenario_.assets) {
    FixedDec total;
    for (const auto& [account, balances] : wallets_) {
      auto it = balances.find(asset);
      if (it != balances.end()) total = total.add(it->second);
    }
    for (const auto& [id, venue] : venues_) {
      if (venue.base == asset) total = total.add(venue.reserve_base);
      if (venue.quote == asset) total = total.add(venue.reserve_quote);
    }
    total = total.add(pool_.state(asset).available_liquidity());
    initial_totals_[asset] = total;
  }
}

void World::run() {
  while (tick_ < scenario_.horizon_ticks) tick();
}

void World::tick() {
  if (tick_ >= scenario_.horizon_ticks) {
    throw SimError(ErrorCode::InvalidState, "scenario horizon already reached");
  }
  now_ += scenario_.tick_seconds;
  phase_prices();
  phase_oracle();
  phase_accrual();
  phase_agents(false);
  phase_agents(true);
  phase_bad_debt();
  phase_metrics();
  check_conservation();
  ++tick_;
}

void World::phase_prices() {
  for (const auto& [asset, cfg] : scenario_.assets) {
    const PriceScript& script = cfg.price.script;
    if (script.kind == ScriptKind::VenueEvents) continue;
    source_prices_[asset] = script_reference_price(
        script, tick_, source_prices_.at(asset), rng_, price_stream(asset));
  }
  // scheduled venue shocks execute as real swaps against the arbitrage
  // account, so the shock pays and receives tokens like anyone else
  for (const auto& [asset, cfg] : scenario_.assets) {
    if (cfg.price.script.kind != ScriptKind::VenueEvents) continue;
    Venue& venue = venues_.at(cfg.price.venue);
    for (const PriceEvent& event : cfg.price.script.events) {
      if (event.tick != tick_) continue;
      const FixedDec target =
          event.multiply ? venue.spot().mul(event.value) : event.value;
      auto trade = venue.arbitrage_rebalance(target);
      if (!trade) continue;
      debit(kArbAccount, venue.input_asset(trade->direction), trade->amount_in,
            "venue event");
      credit(kArbAccount, venue.output_asset(trade->direction), trade->amount_out);
      log_event("venue_event",
                "venue=" + venue.id + " target=" + target.to_string() +
                    " dir=" + swap_direction_name(trade->direction) +
                    " in=" + trade->amount_in.to_string() +
                    " out=" + trade->amount_out.to_string());
    }
  }
  for (const auto& [asset, cfg] : scenario_.assets) {
    if (cfg.price.script.kind != ScriptKind::VenueEvents) continue;
    const Venue& venue = venues_.at(cfg.price.venue);
    source_prices_[asset] = venue.spot().mul(source_prices_.at(venue.quote));
  }
}

void World::phase_oracle() {
  for (const auto& [asset, cfg] : scenario_.assets) {
    oracle_.observe(asset, source_prices_.at(asset), now_);
    if (oracle_.publish_if_due(asset, now_)) ++publish_counts_[asset];
  }
  oracle_prices_ = oracle_.prices();
}

void World::phase_accrual() { pool_.accrue_all(now_); }

void World::phase_agents(bool liquidators) {
  const WorldView view{pool_,          venues_,        oracle_, wallets_,
                       oracle_prices_, source_prices_, tick_,   now_};
  for (auto& agent : agents_) {
    if (agent->is_liquidator() != liquidators) continue;
    if (tick_ < agent->start_tick()) continue;
    for (const Action& action : agent->step(view)) {
      apply(action, agent->name());
    }
  }
}

void World::phase_bad_debt() {
  auto [records, total] = pool_.bad_debt(oracle_prices_, now_);
  if (!(total == last_bad_debt_)) {
    log_event("bad_debt", "total=" + total.to_string() +
                              " accounts=" + std::to_string(records.size()));
  }
  if (total > peak_bad_debt_) {
    peak_bad_debt_ = total;
    peak_bad_debt_tick_ = tick_;
  }
  last_bad_debt_ = total;
  last_bad_debt_records_ = std::move(records);
}

void World::phase_metrics() {
  std::vector<std::string> row;
  row.push_back(std::to_string(tick_));
  row.push_back(std::to_string(now_));
  for (const auto& [id, venue] : venues_) row.push_back(venue.spot().to_string());
  FixedDec debt_value_total;
  for (const auto& [asset, cfg] : scenario_.assets) {
    const ReserveState& state = pool_.state(asset);
    const FixedDec util = state.utilization();
    row.push_back(source_prices_.at(asset).to_string());
    row.push_back(oracle_prices_.at(asset).to_string());
    row.push_back(util.to_string());
    row.push_back(borrow_rate(util, pool_.config(asset).rates).to_string());
    row.push_back(state.available_liquidity().to_string());
    row.push_back(state.total_debt().to_string());
    debt_value_total =
        debt_value_total.add(state.total_debt().mul(oracle_prices_.at(asset)));
  }
  for (const std::string& account : scenario_.tracked_accounts) {
    const FixedDec health = pool_.health_factor(account, oracle_prices_);
    auto it = min_health_.find(account);
    if (health < it->second) it->second = health;
    row.push_back(health.to_string());
  }
  row.push_back(debt_value_total.to_string());
  row.push_back(last_bad_debt_.to_string());
  metrics_.add_row(std::move(row));
}

// Σ wallets + Σ venue reserves + pool available must equal the initial
// total plus net claims minted by accrual. Pool entries re-quantize a
// booked amount against the current index, so each pool transfer may move
// the audited sum by an index-scaled ulp; 4 ulp per transfer covers any
// index the rate cap can reach over a simulated decade.
void World::check_conservation() {
  for (const auto& [asset, cfg] : scenario_.assets) {
    FixedDec lhs;
    for (const auto& [account, balances] : wallets_) {
      auto it = balances.find(asset);
      if (it != balances.end()) lhs = lhs.add(it->second);
    }
    for (const auto& [id, venue] : venues_) {
      if (venue.base == asset) lhs = lhs.add(venue.reserve_base);
      if (venue.quote == asset) lhs = lhs.add(venue.reserve_quote);
    }
    lhs = lhs.add(pool_.state(asset).available_liquidity());

    const FixedDec rhs = initial_totals_.at(asset)
                             .add(pool_.cumulative_minted_liquidity(asset))
                             .sub(pool_.cumulative_minted_debt(asset));
    const FixedDec drift = lhs.sub(rhs).abs();
    if (drift > max_drift_) max_drift_ = drift;
    const FixedDec tolerance =
        FixedDec::from_raw(int256(4) * (transfer_count_ + 1));
    if (drift > tolerance) {
      throw SimError(ErrorCode::InvalidState,
                     "token conservation broken for " + asset + " at tick " +
                         std::to_string(tick_) + ": drift " + drift.to_string() +
                         " exceeds " + tolerance.to_string());
    }
  }
}

void World::apply(const Action& action, const std::string& agent_name) {
  std::visit(
      overloaded{
          [&](const DepositAction& a) {
            if (a.amount.is_zero()) return;
            debit(a.account, a.asset, a.amount, agent_name);
            pool_.deposit(a.account, a.asset, a.amount, now_);
            ++transfer_count_;
          },
          [&](const WithdrawAction& a) {
            if (a.amount.is_zero()) return;
            pool_.withdraw(a.account, a.asset, a.amount, now_, oracle_prices_);
            credit(a.account, a.asset, a.amount);
            ++transfer_count_;
          },
          [&](const BorrowAction& a) {
            if (a.amount.is_zero()) return;
            pool_.borrow(a.account, a.asset, a.amount, now_, oracle_prices_);
            credit(a.account, a.asset, a.amount);
            ++transfer_count_;
          },
          [&](const RepayAction& a) {
            if (a.amount.is_zero()) return;
            debit(a.account, a.asset, a.amount, agent_name);
            pool_.repay(a.account, a.asset, a.amount, now_);
            ++transfer_count_;
          },
          [&](const TransferAction& a) {
            if (a.amount.is_zero()) return;
            debit(a.from, a.asset, a.amount, agent_name);
            credit(a.to, a.asset, a.amount);
          },
          [&](const SwapAction& a) {
            if (a.amount_in.is_zero()) return;
            apply_swap(a.account, a.venue, a.direction, a.amount_in);
          },
          [&](const LiquidateAction& a) {
            if (a.repay.is_zero()) return;
            debit(a.liquidator, a.debt_asset, a.repay, agent_name);
            const LiquidationResult result = pool_.liquidate(
                a.target, a.debt_asset, a.collateral_asset, a.repay, now_,
                oracle_prices_);
            credit(a.liquidator, a.collateral_asset, result.seized);
            transfer_count_ += 2;
            ++liquidation_count_;
            total_liquidated_value_ = total_liquidated_value_.add(
                result.repaid.mul(oracle_prices_.at(a.debt_asset)));
            log_event("liquidation",
                      "liquidator=" + a.liquidator + " target=" + a.target +
                          " debt_asset=" + a.debt_asset +
                          " collateral_asset=" + a.collateral_asset +
                          " repay=" + result.repaid.to_string() +
                          " seized=" + result.seized.to_string());
            if (a.sell_venue && !result.seized.is_zero()) {
              const Venue& venue = venues_.at(*a.sell_venue);
              if (venue.base != a.collateral_asset &&
                  venue.quote != a.collateral_asset) {
                throw SimError(ErrorCode::ConfigError,
                               "venue " + *a.sell_venue + " does not trade " +
                                   a.collateral_asset);
              }
              const SwapDirection dir = venue.base == a.collateral_asset
                                            ? SwapDirection::SellBase
                                            : SwapDirection::BuyBase;
              apply_swap(a.liquidator, *a.sell_venue, dir, result.seized);
            }
          },
          [&](const SetReserveFlagsAction& a) {
            pool_.set_borrowing_enabled(a.asset, a.borrowing_enabled);
            pool_.set_frozen(a.asset, a.frozen);
            log_event("reserve_flags",
                      "asset=" + a.asset + " borrowing_enabled=" +
                          (a.borrowing_enabled ? "1" : "0") +
                          " frozen=" + (a.frozen ? "1" : "0") +
                          " reason=" + a.reason);
          },
      },
      action);
}

void World::apply_swap(const std::string& account, const std::string& venue_id,
                       SwapDirection direction, const FixedDec& amount_in) {
  auto it = venues_.find(venue_id);
  if (it == venues_.end()) {
    throw SimError(ErrorCode::NotFound, "unknown venue " + venue_id);
  }
  Venue& venue = it->second;
  debit(account, venue.input_asset(direction), amount_in, account);
  const FixedDec out = venue.swap(direction, amount_in);
  credit(account, venue.output_asset(direction), out);
}

void World::debit(const std::string& account, const AssetId& asset,
                  const FixedDec& amount, const std::string& who) {
  if (amount < FixedDec::zero()) {
    throw SimError(ErrorCode::DomainError, who + ": negative amount for " + asset);
  }
  FixedDec& balance = wallets_[account][asset];
  if (balance < amount) {
    throw SimError(ErrorCode::AmountExceedsBalance,
                   who + ": " + account + " holds " + balance.to_string() + " " +
                       asset + ", needs " + amount.to_string());
  }
  balance = balance.sub(amount);
}

void World::credit(const std::string& account, const AssetId& asset,
                   const FixedDec& amount) {
  FixedDec& balance = wallets_[account][asset];
  balance = balance.add(amount);
}

void World::log_event(const std::string& kind, const std::string& detail) {
  events_.push_back(EventRecord{tick_, kind, detail});
}

json World::summary() const {
  json j;
  j["name"] = scenario_.name;
  j["hash"] = hash_hex(scenario_hash(scenario_.doc));
  j["seed"] = scenario_.seed;
  j["tick_seconds"] = scenario_.tick_seconds;
  j["horizon_ticks"] = scenario_.horizon_ticks;
  j["ticks_run"] = tick_;
  j["peak_bad_debt"] = {{"value", peak_bad_debt_.to_string()},
                        {"tick", peak_bad_debt_tick_}};
  j["final_bad_debt"] = last_bad_debt_.to_string();
  json accounts = json::array();
  for (const BadDebtRecord& record : last_bad_debt_records_) {
    accounts.push_back({{"account", record.account},
                        {"shortfall", record.shortfall.to_string()}});
  }
  j["bad_debt_accounts"] = std::move(accounts);
  json healths = json::object();
  for (const auto& [account, health] : min_health_) {
    healths[account] = health.to_string();
  }
  j["min_health"] = std::move(healths);
  j["liquidations"] = {{"count", liquidation_count_},
                       {"total_repaid_value", total_liquidated_value_.to_string()}};
  json publishes = json::object();
  for (const auto& [asset, count] : publish_counts_) publishes[asset] = count;
  j["oracle_publishes"] = std::move(publishes);
  json final_assets = json::object();
  for (const auto& [asset, cfg] : scenario_.assets) {
    const ReserveState& state = pool_.state(asset);
    const FixedDec util = state.utilization();
    final_assets[asset] = {
        {"source_price", source_prices_.at(asset).to_string()},
        {"oracle_price", oracle_prices_.at(asset).to_string()},
        {"utilization", util.to_string()},
        {"borrow_rate", borrow_rate(util, pool_.config(asset).rates).to_string()},
        {"available", state.available_liquidity().to_string()},
        {"total_debt", state.total_debt().to_string()},
    };
  }
  j["final"] = std::move(final_assets);
  json final_venues = json::object();
  for (const auto& [id, venue] : venues_) {
    final_venues[id] = {{"spot", venue.spot().to_string()},
                        {"reserve_base", venue.reserve_base.to_string()},
                        {"reserve_quote", venue.reserve_quote.to_string()}};
  }
  j["final_venues"] = std::move(final_venues);
  j["conservation"] = {{"transfers", transfer_count_},
                       {"max_drift", max_drift_.to_string()}};
  json events = json::array();
  for (const EventRecord& event : events_) {
    events.push_back(
        {{"tick", event.tick}, {"kind", event.kind}, {"detail", event.detail}});
  }
  j["events"] = std::move(events);
  return j;
}

RunResult run_scenario(const Scenario& scenario) {
  World world(scenario);
  world.run();
  return RunResult{world.metrics().to_csv(), world.summary(), world.events()};
}

ReplayReport replay_check(const Scenario& scenario) {
  const RunResult first = run_scenario(scenario);
  const RunResult second = run_scenario(scenario);
  if (first.metrics_csv == second.metrics_csv && first.events == second.events &&
      first.summary == second.summary) {
    return ReplayReport{true, -1, "runs identical"};
  }
  const auto lines_a = split_lines(first.metrics_csv);
  const auto lines_b = split_lines(second.metrics_csv);
  const size_t shared = std::min(lines_a.size(), lines_b.size());
  for (size_t i = 0; i < shared; ++i) {
    if (lines_a[i] != lines_b[i]) {
      return ReplayReport{false, static_cast<int64_t>(i) - 1,
                          "metrics line " + std::to_string(i) + ": \"" +
                              lines_a[i].substr(0, 160) + "\" vs \"" +
                              lines_b[i].substr(0, 160) + "\""};
    }
  }
  if (lines_a.size() != lines_b.size()) {
    return ReplayReport{false, static_cast<int64_t>(shared) - 1,
                        "metrics row counts differ"};
  }
  const size_t events_shared = std::min(first.events.size(), second.events.size());
  for (size_t i = 0; i < events_shared; ++i) {
    if (!(first.events[i] == second.events[i])) {
      return ReplayReport{false, first.events[i].tick,
                          "event " + std::to_string(i) + " differs"};
    }
  }
  return ReplayReport{false, -1, "summaries differ"};
}

std::vector<SweepEntry> sweep(const json& base_doc, const std::string& path,
                              const std::vector<json>& values, bool parallel) {
  if (values.empty()) {
    throw SimError(ErrorCode::ConfigError, "sweep needs at least one value");
  }
  auto run_one = [&base_doc, &path](const json& value) {
    json doc = base_doc;
    apply_override(doc, path, value);
    const Scenario scenario = parse_scenario(doc);
    RunResult result = run_scenario(scenario);
    return SweepEntry{value, std::move(result.summary)};
  };
  std::vector<SweepEntry> entries;
  entries.reserve(values.size());
  if (parallel && values.size() > 1) {
    std::vector<std::future<SweepEntry>> futures;
    futures.reserve(values.size());
    for (const json& value : values) {
      futures.push_back(std::async(std::launch::async, run_one, value));
    }
    for (auto& future : futures) entries.push_back(future.get());
  } else {
    for (const json& value : values) entries.push_back(run_one(value));
  }
  return entries;
}

}  // namespace lendsim
