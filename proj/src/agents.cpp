#include "lendsim/agents.hpp"

namespace lendsim {

namespace {

using nlohmann::json;

const FixedDec& one() {
  static const FixedDec v = FixedDec::one();
  return v;
}

[[noreturn]] void param_fail(const AgentSpec& spec, const std::string& message) {
  throw SimError(ErrorCode::ConfigError,
                 "agent " + spec.name + " (" + spec.kind + "): " + message);
}

FixedDec param_decimal(const AgentSpec& spec, const char* key,
                       const FixedDec& fallback) {
  auto it = spec.params.find(key);
  if (it == spec.params.end()) return fallback;
  if (!it->is_string()) param_fail(spec, std::string(key) + " must be a decimal string");
  try {
    return fd(it->get<std::string>());
  } catch (const SimError& e) {
    param_fail(spec, std::string(key) + ": " + e.what());
  }
}

FixedDec param_decimal_req(const AgentSpec& spec, const char* key) {
  if (spec.params.find(key) == spec.params.end()) {
    param_fail(spec, std::string("missing required param \"") + key + "\"");
  }
  return param_decimal(spec, key, FixedDec::zero());
}

std::string param_str(const AgentSpec& spec, const char* key) {
  auto it = spec.params.find(key);
  if (it == spec.params.end() || !it->is_string()) {
    param_fail(spec, std::string("missing required string param \"") + key + "\"");
  }
  return it->get<std::string>();
}

std::string param_str_or(const AgentSpec& spec, const char* key,
                         const std::string& fallback) {
  auto it = spec.params.find(key);
  if (it == spec.params.end()) return fallback;
  if (!it->is_string()) param_fail(spec, std::string(key) + " must be a string");
  return it->get<std::string>();
}

int64_t param_int_or(const AgentSpec& spec, const char* key, int64_t fallback) {
  auto it = spec.params.find(key);
  if (it == spec.params.end()) return fallback;
  if (!it->is_number_integer()) param_fail(spec, std::string(key) + " must be an integer");
  return it->get<int64_t>();
}

void check_asset(const AgentSpec& spec, const Scenario& sc, const std::string& id) {
  if (!sc.has_asset(id)) param_fail(spec, "unknown asset " + id);
}

void check_known_params(const AgentSpec& spec,
                        std::initializer_list<const char*> known) {
  for (auto it = spec.params.begin(); it != spec.params.end(); ++it) {
    bool found = false;
    for (const char* k : known) found = found || it.key() == k;
    if (!found) param_fail(spec, "unknown param \"" + it.key() + "\"");
  }
}

FixedDec headroom_value(const LendingPool& pool, const std::string& account,
                        const PriceMap& prices) {
  const FixedDec cap = pool.borrow_capacity(account, prices);
  const FixedDec debt = pool.debt_value(account, prices);
  return cap > debt ? cap.sub(debt) : FixedDec::zero();
}

FixedDec oracle_price(const WorldView& view, const AssetId& asset) {
  auto it = view.oracle_prices.find(asset);
  if (it == view.oracle_prices.end()) {
    throw SimError(ErrorCode::OracleMissing, "no price for asset " + asset);
  }
  return it->second;
}

}  // namespace

FixedDec WorldView::balance(const std::string& account, const AssetId& asset) const {
  auto it = wallets.find(account);
  if (it == wallets.end()) return FixedDec::zero();
  auto jt = it->second.find(asset);
  return jt == it->second.end() ? FixedDec::zero() : jt->second;
}

FixedDec max_tokens_within(const FixedDec& budget, const FixedDec& price) {
  if (budget <= FixedDec::zero()) return FixedDec::zero();
  FixedDec tokens = budget.div(price);
  while (tokens > FixedDec::zero() && tokens.mul(price) > budget) {
    tokens = tokens.sub(FixedDec::ulp());
  }
  return tokens;
}

namespace {

// Deposits its stable capital, then drains the target reserve tranche by
// tranche, dumping every borrowed token on the venue. Once the reserve (or
// its own borrow capacity) is exhausted it optionally takes one extra loan
// in a second asset against the same collateral and goes quiet.
class ShortSqueezer : public Agent {
public:
  ShortSqueezer(AgentSpec spec, const Scenario& sc) : Agent(std::move(spec)) {
    check_known_params(spec_, {"stable", "target", "venue", "tranche",
                               "second_debt_asset", "min_borrow"});
    stable_ = param_str(spec_, "stable");
    target_ = param_str(spec_, "target");
    venue_ = param_str(spec_, "venue");
    tranche_ = param_decimal_req(spec_, "tranche");
    second_debt_ = param_str_or(spec_, "second_debt_asset", "");
    min_borrow_ = param_decimal(spec_, "min_borrow", fd("0.000001"));
    check_asset(spec_, sc, stable_);
    check_asset(spec_, sc, target_);
    if (!second_debt_.empty()) check_asset(spec_, sc, second_debt_);
    const Venue* v = sc.find_venue(venue_);
    if (v == nullptr) param_fail(spec_, "unknown venue " + venue_);
    if (v->base != target_) param_fail(spec_, "venue must trade the target as base");
    if (tranche_ <= FixedDec::zero()) param_fail(spec_, "tranche must be positive");
  }

  std::vector<Action> step(const WorldView& view) override {
    std::vector<Action> actions;
    const std::string& w = spec_.wallets.front();
    if (phase_ == Phase::Fund) {
      const FixedDec bal = view.balance(w, stable_);
      if (bal > FixedDec::zero()) {
        actions.push_back(DepositAction{w, stable_, bal});
      }
      phase_ = Phase::Drain;
      return actions;
    }
    if (phase_ == Phase::Drain) {
      const ReserveConfig& cfg = view.pool.config(target_);
      if (cfg.borrowing_enabled && !cfg.frozen) {
        const FixedDec price = oracle_price(view, target_);
        const FixedDec headroom = headroom_value(view.pool, w, view.oracle_prices);
        FixedDec amount = max_tokens_within(headroom, price)
                              .min(tranche_)
                              .min(view.pool.state(target_).available_liquidity());
        if (amount >= min_borrow_) {
          actions.push_back(BorrowAction{w, target_, amount});
          actions.push_back(SwapAction{w, venue_, SwapDirection::SellBase, amount});
          return actions;
        }
      }
      phase_ = Phase::SecondLoan;
    }
    if (phase_ == Phase::SecondLoan) {
      phase_ = Phase::Done;
      if (!second_debt_.empty()) {
        const ReserveConfig& cfg = view.pool.config(second_debt_);
        if (!cfg.borrowing_enabled || cfg.frozen) return actions;
        const FixedDec price = oracle_price(view, second_debt_);
        const FixedDec headroom = headroom_value(view.pool, w, view.oracle_prices);
        const FixedDec amount =
            max_tokens_within(headroom, price)
                .min(view.pool.state(second_debt_).available_liquidity());
        if (amount >= min_borrow_) {
          actions.push_back(BorrowAction{w, second_debt_, amount});
        }
      }
    }
    return actions;
  }

private:
  enum class Phase { Fund, Drain, SecondLoan, Done };
  Phase phase_ = Phase::Fund;
  AssetId stable_, target_;
  std::string venue_;
  std::string second_debt_;
  FixedDec tranche_, min_borrow_;
};

// Two-wallet recursive leverage. The first wallet posts outside stable
// capital and borrows as much target as its ltv allows, handing it to the
// second wallet. The second wallet then loops, two ticks per round: deposit
// the target it holds, then next tick borrow stable worth ltv_target times
// that deposit and buy more target with it on the venue. Each round is
// ltv_target times the one before, so cumulative stable borrowed converges
// to first_round / (1 - ltv_target) of the capital. Splitting the legs
// across ticks lets every borrow run against the pool's own headroom
// figure instead of a prediction of it, so the series cannot die on a
// rounding ulp.
class LoopAttacker : public Agent {
public:
  LoopAttacker(AgentSpec spec, const Scenario& sc) : Agent(std::move(spec)) {
    check_known_params(spec_, {"stable", "target", "venue",
                               "first_stable_fraction", "max_iterations",
                               "min_borrow"});
    stable_ = param_str(spec_, "stable");
    target_ = param_str(spec_, "target");
    venue_ = param_str(spec_, "venue");
    first_fraction_ = param_decimal(spec_, "first_stable_fraction", FixedDec::zero());
    max_iterations_ = param_int_or(spec_, "max_iterations", 50);
    min_borrow_ = param_decimal(spec_, "min_borrow", fd("0.000000001"));
    check_asset(spec_, sc, stable_);
    check_asset(spec_, sc, target_);
    const Venue* v = sc.find_venue(venue_);
    if (v == nullptr) param_fail(spec_, "unknown venue " + venue_);
    const bool trades_pair = (v->base == target_ && v->quote == stable_) ||
                             (v->base == stable_ && v->quote == target_);
    if (!trades_pair) param_fail(spec_, "venue must trade the target against the stable");
    if (spec_.wallets.size() != 2) param_fail(spec_, "needs exactly two wallets");
    if (first_fraction_ < FixedDec::zero() || first_fraction_ > one()) {
      param_fail(spec_, "first_stable_fraction must lie in [0, 1]");
    }
    if (max_iterations_ < 0) param_fail(spec_, "max_iterations must be non-negative");
  }

  std::vector<Action> step(const WorldView& view) override {
    std::vector<Action> actions;
    const std::string& w1 = spec_.wallets[0];
    const std::string& w2 = spec_.wallets[1];
    if (stage_ == Stage::Fund) {
      const FixedDec bal = view.balance(w1, stable_);
      if (bal <= FixedDec::zero()) {
        stage_ = Stage::Done;
        return actions;
      }
      actions.push_back(DepositAction{w1, stable_, bal});
      capital_value_ = bal.mul(oracle_price(view, stable_));
      stage_ = Stage::OpeningBorrow;
      return actions;
    }
    if (stage_ == Stage::OpeningBorrow) {
      // opening tranche: everything the stable collateral's ltv permits;
      // the deposit settled last tick, so the pool's own headroom figure is
      // exactly the bound its borrow check applies
      const ReserveConfig& target_cfg = view.pool.config(target_);
      if (!target_cfg.borrowing_enabled || target_cfg.frozen) {
        stage_ = Stage::Done;
        return actions;
      }
      const FixedDec budget = headroom_value(view.pool, w1, view.oracle_prices);
      const FixedDec amount =
          max_tokens_within(budget, oracle_price(view, target_))
              .min(view.pool.state(target_).available_liquidity());
      if (amount <= FixedDec::zero()) {
        stage_ = Stage::Done;
        return actions;
      }
      actions.push_back(BorrowAction{w1, target_, amount});
      actions.push_back(TransferAction{w1, w2, target_, amount});
      stage_ = Stage::Loop;
      return actions;
    }
    if (stage_ == Stage::Loop) {
      const FixedDec held = view.balance(w2, target_);
      if (held > FixedDec::zero()) {
        // collateral leg: bank this round's target and note how much the
        // next borrow may draw against the increment
        actions.push_back(DepositAction{w2, target_, held});
        FixedDec budget = held.mul(oracle_price(view, target_))
                              .mul(view.pool.config(target_).ltv);
        if (iterations_ == 0 && first_fraction_ > FixedDec::zero()) {
          budget = budget.min(capital_value_.mul(first_fraction_));
        }
        pending_budget_ = budget;
        return actions;
      }
      if (iterations_ >= max_iterations_) {
        stage_ = Stage::Done;
        return actions;
      }
      const ReserveConfig& stable_cfg = view.pool.config(stable_);
      if (!stable_cfg.borrowing_enabled || stable_cfg.frozen) {
        stage_ = Stage::Done;
        return actions;
      }
      // borrow leg: the increment budget keeps the series geometric, the
      // pool-reported headroom keeps the borrow unconditionally valid
      const FixedDec budget =
          pending_budget_.min(headroom_value(view.pool, w2, view.oracle_prices));
      pending_budget_ = FixedDec::zero();
      const FixedDec amount =
          max_tokens_within(budget, oracle_price(view, stable_))
              .min(view.pool.state(stable_).available_liquidity());
      if (amount < min_borrow_) {
        stage_ = Stage::Done;
        return actions;
      }
      actions.push_back(BorrowAction{w2, stable_, amount});
      const SwapDirection dir = view.venues.at(venue_).base == target_
                                    ? SwapDirection::BuyBase
                                    : SwapDirection::SellBase;
      actions.push_back(SwapAction{w2, venue_, dir, amount});
      ++iterations_;
    }
    return actions;
  }

private:
  enum class Stage { Fund, OpeningBorrow, Loop, Done };
  Stage stage_ = Stage::Fund;
  int64_t iterations_ = 0;
  AssetId stable_, target_;
  std::string venue_;
  FixedDec first_fraction_, min_borrow_, capital_value_, pending_budget_;
  int64_t max_iterations_ = 0;
};

// Scans for positions below health 1 and repays up to the close factor,
// bounded by what the collateral can actually pay for, and only when the
// seized collateral is worth the repay at market (source) prices. Under a
// delayed oracle that gate is exactly what stalls liquidations: the
// protocol overprices the collateral it hands out, the market does not.
class Liquidator : public Agent {
public:
  Liquidator(AgentSpec spec, const Scenario& sc) : Agent(std::move(spec)) {
    check_known_params(spec_, {"min_profit_margin", "min_repay_value", "sell_venue"});
    margin_ = param_decimal(spec_, "min_profit_margin", FixedDec::zero());
    min_repay_value_ = param_decimal(spec_, "min_repay_value", fd("0.000001"));
    sell_venue_ = param_str_or(spec_, "sell_venue", "");
    if (!sell_venue_.empty() && sc.find_venue(sell_venue_) == nullptr) {
      param_fail(spec_, "unknown venue " + sell_venue_);
    }
    if (margin_ < FixedDec::zero()) param_fail(spec_, "margin must be non-negative");
  }

  std::vector<Action> step(const WorldView& view) override {
    std::vector<Action> actions;
    const std::string& w = spec_.wallets.front();
    // local budget: wallet balances net of repays already queued this tick
    std::map<AssetId, FixedDec> budget;

    for (const auto& [account, pos] : view.pool.positions()) {
      if (account == w || pos.scaled_debts.empty()) continue;
      const FixedDec debt_value = view.pool.debt_value(account, view.oracle_prices);
      if (debt_value.is_zero()) continue;
      FixedDec weighted;
      for (const auto& [asset, _] : pos.scaled_deposits) {
        const FixedDec tokens = view.pool.current_deposit(account, asset);
        weighted = weighted.add(
            tokens.mul(view.oracle_prices.at(asset))
                .mul(view.pool.config(asset).liquidation_threshold));
      }
      if (weighted >= debt_value) continue;

      // biggest debt against biggest collateral
      AssetId debt_asset, coll_asset;
      FixedDec best_debt, best_coll;
      for (const auto& [asset, _] : pos.scaled_debts) {
        const FixedDec v = view.pool.current_debt(account, asset)
                               .mul(view.oracle_prices.at(asset));
        if (v > best_debt) {
          best_debt = v;
          debt_asset = asset;
        }
      }
      for (const auto& [asset, _] : pos.scaled_deposits) {
        const FixedDec v = view.pool.current_deposit(account, asset)
                               .mul(view.oracle_prices.at(asset));
        if (v > best_coll) {
          best_coll = v;
          coll_asset = asset;
        }
      }
      if (debt_asset.empty() || coll_asset.empty()) continue;

      const FixedDec p_debt = view.oracle_prices.at(debt_asset);
      const FixedDec p_coll = view.oracle_prices.at(coll_asset);
      const FixedDec bonus = view.pool.config(coll_asset).liquidation_bonus;
      const FixedDec owed = view.pool.current_debt(account, debt_asset);
      const FixedDec held = view.pool.current_deposit(account, coll_asset);

      if (budget.find(debt_asset) == budget.end()) {
        budget[debt_asset] = view.balance(w, debt_asset);
      }
      // repay no more than the collateral can cover with its bonus, so the
      // seizure cap never eats part of the repayment
      const FixedDec coverage =
          FixedDec::mul_div(held, p_coll, one().add(bonus).mul(p_debt));
      FixedDec repay = view.pool.config(debt_asset).close_factor.mul(owed)
                           .min(coverage)
                           .min(budget[debt_asset]);
      if (repay <= FixedDec::zero() ||
          repay.mul(p_debt) < min_repay_value_) {
        continue;
      }

      // worth doing only if the market value of the seizure covers the cost
      FixedDec seized = repay.mul(p_debt).div(p_coll).mul(one().add(bonus));
      seized = seized.min(held);
      const FixedDec revenue = seized.mul(view.source_prices.at(coll_asset));
      const FixedDec cost = repay.mul(view.source_prices.at(debt_asset));
      if (revenue < cost.mul(one().add(margin_))) continue;

      budget[debt_asset] = budget[debt_asset].sub(repay);
      LiquidateAction act{w, account, debt_asset, coll_asset, repay, std::nullopt};
      if (!sell_venue_.empty()) {
        const Venue& v = view.venues.at(sell_venue_);
        if (v.base == coll_asset || v.quote == coll_asset) act.sell_venue = sell_venue_;
      }
      actions.push_back(std::move(act));
    }
    return actions;
  }

private:
  FixedDec margin_, min_repay_value_;
  std::string sell_venue_;
};

// Watches one account and tops up collateral from its wallet whenever
// health drops below the trigger, aiming back at the target ratio.
class Defender : public Agent {
public:
  Defender(AgentSpec spec, const Scenario& sc) : Agent(std::move(spec)) {
    check_known_params(spec_, {"collateral", "trigger", "target"});
    collateral_ = param_str(spec_, "collateral");
    trigger_ = param_decimal_req(spec_, "trigger");
    target_ = param_decimal_req(spec_, "target");
    check_asset(spec_, sc, collateral_);
    if (trigger_ <= FixedDec::zero() || target_ < trigger_) {
      param_fail(spec_, "need 0 < trigger <= target");
    }
  }

  std::vector<Action> step(const WorldView& view) override {
    std::vector<Action> actions;
    const std::string& w = spec_.wallets.front();
    const FixedDec health = view.pool.health_factor(w, view.oracle_prices);
    if (health.is_infinite() || health >= trigger_) return actions;
    if (view.pool.config(collateral_).frozen) return actions;

    const FixedDec debt = view.pool.debt_value(w, view.oracle_prices);
    FixedDec weighted;
    if (const Position* pos = view.pool.find_position(w)) {
      for (const auto& [asset, _] : pos->scaled_deposits) {
        weighted = weighted.add(
            view.pool.current_deposit(w, asset)
                .mul(view.oracle_prices.at(asset))
                .mul(view.pool.config(asset).liquidation_threshold));
      }
    }
    const FixedDec needed = target_.mul(debt).sub(weighted);
    if (needed <= FixedDec::zero()) return actions;
    const FixedDec unit = view.oracle_prices.at(collateral_)
                              .mul(view.pool.config(collateral_).liquidation_threshold);
    FixedDec amount = needed.div(unit).add(FixedDec::ulp())
                          .min(view.balance(w, collateral_));
    if (amount > FixedDec::zero()) {
      actions.push_back(DepositAction{w, collateral_, amount});
    }
    return actions;
  }

private:
  AssetId collateral_;
  FixedDec trigger_, target_;
};

// Fires one reserve-flag change after an on-chain style delay, triggered
// either by sustained utilization or by a scheduled tick.
class Governance : public Agent {
public:
  Governance(AgentSpec spec, const Scenario& sc) : Agent(std::move(spec)) {
    check_known_params(spec_, {"watch_asset", "utilization_trigger",
                               "consecutive_ticks", "delay_seconds", "action",
                               "scheduled_tick"});
    watch_ = param_str(spec_, "watch_asset");
    check_asset(spec_, sc, watch_);
    trigger_ = param_decimal(spec_, "utilization_trigger", fd("2"));
    consecutive_ = param_int_or(spec_, "consecutive_ticks", 1);
    delay_seconds_ = param_int_or(spec_, "delay_seconds", 0);
    scheduled_tick_ = param_int_or(spec_, "scheduled_tick", -1);
    action_ = param_str_or(spec_, "action", "disable_borrowing");
    if (action_ != "disable_borrowing" && action_ != "freeze") {
      param_fail(spec_, "action must be \"disable_borrowing\" or \"freeze\"");
    }
    if (delay_seconds_ < 0) param_fail(spec_, "delay_seconds must be non-negative");
    if (consecutive_ < 1) param_fail(spec_, "consecutive_ticks must be at least 1");
  }

  std::vector<Action> step(const WorldView& view) override {
    std::vector<Action> actions;
    if (fired_) return actions;
    if (effective_time_ < 0) {
      bool triggered = scheduled_tick_ >= 0 && view.tick >= scheduled_tick_;
      if (!triggered && scheduled_tick_ < 0) {
        const FixedDec util = view.pool.state(watch_).utilization();
        streak_ = util >= trigger_ ? streak_ + 1 : 0;
        triggered = streak_ >= consecutive_;
      }
      if (triggered) effective_time_ = view.now + delay_seconds_;
    }
    if (effective_time_ >= 0 && view.now >= effective_time_) {
      SetReserveFlagsAction act;
      act.asset = watch_;
      act.borrowing_enabled = false;
      act.frozen = action_ == "freeze";
      act.reason = spec_.name;
      actions.push_back(act);
      fired_ = true;
    }
    return actions;
  }

private:
  AssetId watch_;
  FixedDec trigger_;
  int64_t consecutive_ = 1;
  int64_t delay_seconds_ = 0;
  int64_t scheduled_tick_ = -1;
  std::string action_;
  int64_t streak_ = 0;
  int64_t effective_time_ = -1;
  bool fired_ = false;
};

// Deposits a fixed book once its start tick arrives; inert afterwards.
class PassiveLp : public Agent {
public:
  PassiveLp(AgentSpec spec, const Scenario& sc) : Agent(std::move(spec)) {
    check_known_params(spec_, {"deposits"});
    auto it = spec_.params.find("deposits");
    if (it == spec_.params.end() || !it->is_object()) {
      param_fail(spec_, "missing required object param \"deposits\"");
    }
    for (auto d = it->begin(); d != it->end(); ++d) {
      check_asset(spec_, sc, d.key());
      if (!d.value().is_string()) {
        param_fail(spec_, "deposit amounts must be decimal strings");
      }
      deposits_.emplace(d.key(), fd(d.value().get<std::string>()));
    }
  }

  std::vector<Action> step(const WorldView& view) override {
    std::vector<Action> actions;
    if (done_) return actions;
    done_ = true;
    const std::string& w = spec_.wallets.front();
    for (const auto& [asset, amount] : deposits_) {
      const FixedDec capped = amount.min(view.balance(w, asset));
      if (capped > FixedDec::zero()) {
        actions.push_back(DepositAction{w, asset, capped});
      }
    }
    return actions;
  }

private:
  std::map<AssetId, FixedDec> deposits_;
  bool done_ = false;
};

}  // namespace

std::unique_ptr<Agent> make_agent(const AgentSpec& spec, const Scenario& scenario) {
  if (spec.kind == "short_squeezer") {
    return std::make_unique<ShortSqueezer>(spec, scenario);
  }
  if (spec.kind == "loop_attacker") {
    return std::make_unique<LoopAttacker>(spec, scenario);
  }
  if (spec.kind == "liquidator") {
    return std::make_unique<Liquidator>(spec, scenario);
  }
  if (spec.kind == "defender") {
    return std::make_unique<Defender>(spec, scenario);
  }
  if (spec.kind == "governance") {
    return std::make_unique<Governance>(spec, scenario);
  }
  if (spec.kind == "passive_lp") {
    return std::make_unique<PassiveLp>(spec, scenario);
  }
  throw SimError(ErrorCode::ConfigError,
                 "agent " + spec.name + ": unknown kind \"" + spec.kind + "\"");
}

}  // namespace lendsim
