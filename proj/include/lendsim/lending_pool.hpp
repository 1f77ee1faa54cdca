#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "lendsim/fixed_dec.hpp"
#include "lendsim/rate_model.hpp"

namespace lendsim {

using AssetId = std::string;
// numeraire value of one token, keyed by asset
using PriceMap = std::map<AssetId, FixedDec>;

constexpr int64_t kSecondsPerYear = 31536000;

struct ReserveConfig {
  FixedDec ltv;                    // max borrow value per unit collateral value
  FixedDec liquidation_threshold;  // H uses this, must be >= ltv
  FixedDec liquidation_bonus;      // extra collateral share paid to liquidators
  FixedDec close_factor;           // max share of a debt repayable per liquidation
  RateParams rates;
  bool borrowing_enabled = true;
  bool frozen = false;             // rejects new deposits and borrows

  void validate() const;
};

// Balances are stored scaled by the index at which they were booked, so
// interest accrues to every holder by updating one index per reserve.
struct ReserveState {
  FixedDec scaled_liquidity;
  FixedDec scaled_debt;
  FixedDec liquidity_index = FixedDec::one();
  FixedDec borrow_index = FixedDec::one();
  int64_t last_accrual = 0;

  FixedDec total_liquidity() const { return scaled_liquidity.mul(liquidity_index); }
  FixedDec total_debt() const { return scaled_debt.mul(borrow_index); }
  FixedDec available_liquidity() const { return total_liquidity().sub(total_debt()); }
  FixedDec utilization() const {
    return lendsim::utilization(total_debt(), total_liquidity());
  }
};

struct Position {
  std::map<AssetId, FixedDec> scaled_deposits;
  std::map<AssetId, FixedDec> scaled_debts;

  bool empty() const { return scaled_deposits.empty() && scaled_debts.empty(); }
};

// claims minted by one accrual event (restated totals after minus before)
struct AccrualDelta {
  FixedDec minted_liquidity;
  FixedDec minted_debt;
};

struct LiquidationResult {
  FixedDec repaid;  // debt-asset tokens the liquidator paid in
  FixedDec seized;  // collateral-asset tokens handed to the liquidator
};

struct BadDebtRecord {
  std::string account;
  FixedDec shortfall;  // debt value minus collateral value, in numeraire
  int64_t time = 0;
};

// Claims ledger of the lending protocol. Token custody lives with the
// caller: each mutating call reports how many tokens changed hands and the
// caller moves them. All mutating calls bring every reserve's indices up to
// `now` first, so health checks always see current balances.
//
// The reserve-factor share of borrow interest is minted to no account; it
// shows up as total debt growing faster than total deposit claims.
class LendingPool {
public:
  void add_reserve(const AssetId& asset, const ReserveConfig& config, int64_t now);

  AccrualDelta accrue(const AssetId& asset, int64_t now);
  // accrues every reserve in asset order, returning per-asset deltas
  std::vector<std::pair<AssetId, AccrualDelta>> accrue_all(int64_t now);

  void deposit(const std::string& account, const AssetId& asset,
               const FixedDec& amount, int64_t now);
  void withdraw(const std::string& account, const AssetId& asset,
                const FixedDec& amount, int64_t now, const PriceMap& prices);
  void borrow(const std::string& account, const AssetId& asset,
              const FixedDec& amount, int64_t now, const PriceMap& prices);
  void repay(const std::string& account, const AssetId& asset,
             const FixedDec& amount, int64_t now);
  // seized = repay * p_debt / p_coll * (1 + bonus), capped at the target's
  // collateral balance; the liquidator pays the full repay either way
  LiquidationResult liquidate(const std::string& target, const AssetId& debt_asset,
                              const AssetId& collateral_asset, const FixedDec& repay_amount,
                              int64_t now, const PriceMap& prices);

  void set_borrowing_enabled(const AssetId& asset, bool enabled);
  void set_frozen(const AssetId& asset, bool frozen);

  // weighted collateral over debt; infinity when the account owes nothing
  FixedDec health_factor(const std::string& account, const PriceMap& prices) const;
  FixedDec collateral_value(const std::string& account, const PriceMap& prices) const;
  FixedDec debt_value(const std::string& account, const PriceMap& prices) const;
  // sum of deposit value * ltv, the ceiling new borrows are checked against
  FixedDec borrow_capacity(const std::string& account, const PriceMap& prices) const;

  FixedDec current_deposit(const std::string& account, const AssetId& asset) const;
  FixedDec current_debt(const std::string& account, const AssetId& asset) const;

  // accounts whose debt value exceeds collateral value, scanned in account order
  std::pair<std::vector<BadDebtRecord>, FixedDec> bad_debt(const PriceMap& prices,
                                                           int64_t now) const;

  bool has_reserve(const AssetId& asset) const { return reserves_.count(asset) != 0; }
  const ReserveConfig& config(const AssetId& asset) const;
  const ReserveState& state(const AssetId& asset) const;
  std::vector<AssetId> reserve_assets() const;
  const std::map<std::string, Position>& positions() const { return positions_; }
  const Position* find_position(const std::string& account) const;

  // total claims minted by accrual since construction, per asset
  FixedDec cumulative_minted_liquidity(const AssetId& asset) const;
  FixedDec cumulative_minted_debt(const AssetId& asset) const;

  // seeds a position at index 1 without origination checks (scenario setup;
  // a position may start unhealthy on purpose)
  void seed_position(const std::string& account, const AssetId& asset,
                     const FixedDec& deposit_amount, const FixedDec& debt_amount);

private:
  struct ReserveEntry {
    ReserveConfig config;
    ReserveState state;
  };

  ReserveEntry& entry(const AssetId& asset);
  const ReserveEntry& entry(const AssetId& asset) const;
  Position& position(const std::string& account);
  void prune(const std::string& account);
  static FixedDec price_of(const PriceMap& prices, const AssetId& asset);
  FixedDec weighted_collateral(const Position& pos, const PriceMap& prices) const;

  std::map<AssetId, ReserveEntry> reserves_;
  std::map<std::string, Position> positions_;
  std::map<AssetId, FixedDec> minted_liquidity_;
  std::map<AssetId, FixedDec> minted_debt_;
};

}  // namespace lendsim
