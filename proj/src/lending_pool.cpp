#include "lendsim/lending_pool.hpp"

namespace lendsim {

namespace {

const FixedDec& one() {
  static const FixedDec v = FixedDec::one();
  return v;
}

void require_positive(const FixedDec& amount, const char* what) {
  if (amount <= FixedDec::zero()) {
    throw SimError(ErrorCode::DomainError, std::string(what) + " must be positive");
  }
}

// ledger decrement that lands exactly on zero for a full exit
FixedDec scaled_decrement(const FixedDec& amount, const FixedDec& current,
                          const FixedDec& index, const FixedDec& scaled) {
  if (amount == current) return scaled;
  return amount.div(index).min(scaled);
}

}  // namespace

void ReserveConfig::validate() const {
  const FixedDec zero = FixedDec::zero();
  if (ltv < zero || ltv >= one()) {
    throw SimError(ErrorCode::ConfigError, "ltv must lie in [0, 1)");
  }
  if (liquidation_threshold < ltv || liquidation_threshold >= one()) {
    throw SimError(ErrorCode::ConfigError,
                   "liquidation_threshold must lie in [ltv, 1)");
  }
  if (liquidation_bonus < zero || liquidation_bonus > fd("0.5")) {
    throw SimError(ErrorCode::ConfigError, "liquidation_bonus must lie in [0, 0.5]");
  }
  if (close_factor <= zero || close_factor > one()) {
    throw SimError(ErrorCode::ConfigError, "close_factor must lie in (0, 1]");
  }
  rates.validate();
}

void LendingPool::add_reserve(const AssetId& asset, const ReserveConfig& config,
                              int64_t now) {
  config.validate();
  if (reserves_.count(asset) != 0) {
    throw SimError(ErrorCode::InvalidState, "reserve " + asset + " already exists");
  }
  ReserveEntry e;
  e.config = config;
  e.state.last_accrual = now;
  reserves_.emplace(asset, std::move(e));
  minted_liquidity_.emplace(asset, FixedDec::zero());
  minted_debt_.emplace(asset, FixedDec::zero());
}

LendingPool::ReserveEntry& LendingPool::entry(const AssetId& asset) {
  auto it = reserves_.find(asset);
  if (it == reserves_.end()) {
    throw SimError(ErrorCode::NotFound, "no reserve for asset " + asset);
  }
  return it->second;
}

const LendingPool::ReserveEntry& LendingPool::entry(const AssetId& asset) const {
  auto it = reserves_.find(asset);
  if (it == reserves_.end()) {
    throw SimError(ErrorCode::NotFound, "no reserve for asset " + asset);
  }
  return it->second;
}

Position& LendingPool::position(const std::string& account) {
  return positions_[account];
}

void LendingPool::prune(const std::string& account) {
  auto it = positions_.find(account);
  if (it == positions_.end()) return;
  auto& pos = it->second;
  for (auto d = pos.scaled_deposits.begin(); d != pos.scaled_deposits.end();) {
    d = d->second.is_zero() ? pos.scaled_deposits.erase(d) : std::next(d);
  }
  for (auto d = pos.scaled_debts.begin(); d != pos.scaled_debts.end();) {
    d = d->second.is_zero() ? pos.scaled_debts.erase(d) : std::next(d);
  }
  if (pos.empty()) positions_.erase(it);
}

FixedDec LendingPool::price_of(const PriceMap& prices, const AssetId& asset) {
  auto it = prices.find(asset);
  if (it == prices.end()) {
    throw SimError(ErrorCode::OracleMissing, "no price for asset " + asset);
  }
  return it->second;
}

AccrualDelta LendingPool::accrue(const AssetId& asset, int64_t now) {
  auto& e = entry(asset);
  auto& s = e.state;
  if (now < s.last_accrual) {
    throw SimError(ErrorCode::InvalidTime, "accrual time went backwards for " + asset);
  }
  AccrualDelta delta;
  if (now == s.last_accrual || s.scaled_debt.is_zero()) {
    s.last_accrual = now;
    return delta;
  }
  const FixedDec liquidity_before = s.total_liquidity();
  const FixedDec debt_before = s.total_debt();

  const FixedDec util = s.utilization();
  const FixedDec rb = borrow_rate(util, e.config.rates);
  const FixedDec rs = supply_rate(util, e.config.rates);
  const FixedDec dt = FixedDec::from_integer(now - s.last_accrual);
  const FixedDec year = FixedDec::from_integer(kSecondsPerYear);

  s.borrow_index = s.borrow_index.mul(one().add(FixedDec::mul_div(rb, dt, year)));
  s.liquidity_index = s.liquidity_index.mul(one().add(FixedDec::mul_div(rs, dt, year)));
  s.last_accrual = now;

  delta.minted_liquidity = s.total_liquidity().sub(liquidity_before);
  delta.minted_debt = s.total_debt().sub(debt_before);
  minted_liquidity_[asset] = minted_liquidity_[asset].add(delta.minted_liquidity);
  minted_debt_[asset] = minted_debt_[asset].add(delta.minted_debt);
  return delta;
}

std::vector<std::pair<AssetId, AccrualDelta>> LendingPool::accrue_all(int64_t now) {
  std::vector<std::pair<AssetId, AccrualDelta>> out;
  out.reserve(reserves_.size());
  for (auto& [asset, _] : reserves_) {
    out.emplace_back(asset, accrue(asset, now));
  }
  return out;
}

void LendingPool::deposit(const std::string& account, const AssetId& asset,
                          const FixedDec& amount, int64_t now) {
  require_positive(amount, "deposit amount");
  accrue_all(now);
  auto& e = entry(asset);
  if (e.config.frozen) {
    throw SimError(ErrorCode::ReserveFrozen, "reserve " + asset + " is frozen");
  }
  const FixedDec scaled = amount.div(e.state.liquidity_index);
  auto& pos = position(account);
  pos.scaled_deposits[asset] = pos.scaled_deposits[asset].add(scaled);
  e.state.scaled_liquidity = e.state.scaled_liquidity.add(scaled);
}

void LendingPool::withdraw(const std::string& account, const AssetId& asset,
                           const FixedDec& amount, int64_t now, const PriceMap& prices) {
  require_positive(amount, "withdraw amount");
  accrue_all(now);
  auto& e = entry(asset);
  const FixedDec held = current_deposit(account, asset);
  if (amount > held) {
    throw SimError(ErrorCode::AmountExceedsBalance,
                   account + " holds " + held.to_string() + " " + asset +
                       ", cannot withdraw " + amount.to_string());
  }
  if (amount > e.state.available_liquidity()) {
    throw SimError(ErrorCode::LiquidityExhausted,
                   "reserve " + asset + " has only " +
                       e.state.available_liquidity().to_string() + " available");
  }

  auto& pos = position(account);
  const FixedDec scaled = scaled_decrement(amount, held, e.state.liquidity_index,
                                           pos.scaled_deposits[asset]);
  pos.scaled_deposits[asset] = pos.scaled_deposits[asset].sub(scaled);
  e.state.scaled_liquidity = e.state.scaled_liquidity.sub(scaled);

  // health >= 1 compared as values, so a one-ulp deficit is not lost to
  // rounding the quotient
  const FixedDec debt = debt_value(account, prices);
  if (!debt.is_zero() && weighted_collateral(pos, prices) < debt) {
    // roll back and reject: withdrawals may not make the position liquidatable
    pos.scaled_deposits[asset] = pos.scaled_deposits[asset].add(scaled);
    e.state.scaled_liquidity = e.state.scaled_liquidity.add(scaled);
    throw SimError(ErrorCode::CollateralInsufficient,
                   "withdrawal would push " + account + " below health 1");
  }
  prune(account);
}

void LendingPool::borrow(const std::string& account, const AssetId& asset,
                         const FixedDec& amount, int64_t now, const PriceMap& prices) {
  require_positive(amount, "borrow amount");
  accrue_all(now);
  auto& e = entry(asset);
  if (e.config.frozen) {
    throw SimError(ErrorCode::ReserveFrozen, "reserve " + asset + " is frozen");
  }
  if (!e.config.borrowing_enabled) {
    throw SimError(ErrorCode::ReserveFrozen, "borrowing disabled for " + asset);
  }
  if (amount > e.state.available_liquidity()) {
    throw SimError(ErrorCode::LiquidityExhausted,
                   "reserve " + asset + " has only " +
                       e.state.available_liquidity().to_string() + " available");
  }
  const FixedDec new_debt_value =
      debt_value(account, prices).add(amount.mul(price_of(prices, asset)));
  if (new_debt_value > borrow_capacity(account, prices)) {
    throw SimError(ErrorCode::CollateralInsufficient,
                   "borrow would exceed ltv capacity for " + account);
  }
  const FixedDec scaled = amount.div(e.state.borrow_index);
  auto& pos = position(account);
  pos.scaled_debts[asset] = pos.scaled_debts[asset].add(scaled);
  e.state.scaled_debt = e.state.scaled_debt.add(scaled);
}

void LendingPool::repay(const std::string& account, const AssetId& asset,
                        const FixedDec& amount, int64_t now) {
  require_positive(amount, "repay amount");
  accrue_all(now);
  auto& e = entry(asset);
  const FixedDec owed = current_debt(account, asset);
  if (amount > owed) {
    throw SimError(ErrorCode::AmountExceedsBalance,
                   account + " owes " + owed.to_string() + " " + asset +
                       ", cannot repay " + amount.to_string());
  }
  auto& pos = position(account);
  const FixedDec scaled =
      scaled_decrement(amount, owed, e.state.borrow_index, pos.scaled_debts[asset]);
  pos.scaled_debts[asset] = pos.scaled_debts[asset].sub(scaled);
  e.state.scaled_debt = e.state.scaled_debt.sub(scaled);
  prune(account);
}

LiquidationResult LendingPool::liquidate(const std::string& target,
                                         const AssetId& debt_asset,
                                         const AssetId& collateral_asset,
                                         const FixedDec& repay_amount, int64_t now,
                                         const PriceMap& prices) {
  require_positive(repay_amount, "repay amount");
  accrue_all(now);
  auto& debt_entry = entry(debt_asset);
  auto& coll_entry = entry(collateral_asset);

  // strict H < 1, compared as values so quotient rounding cannot flip it
  const Position* target_pos = find_position(target);
  const FixedDec target_debt = debt_value(target, prices);
  if (target_pos == nullptr || target_debt.is_zero() ||
      weighted_collateral(*target_pos, prices) >= target_debt) {
    throw SimError(ErrorCode::NotLiquidatable,
                   target + " has health " +
                       health_factor(target, prices).to_string());
  }
  const FixedDec owed = current_debt(target, debt_asset);
  const FixedDec max_repay = debt_entry.config.close_factor.mul(owed);
  if (repay_amount > max_repay) {
    throw SimError(ErrorCode::CloseFactorExceeded,
                   "repay " + repay_amount.to_string() + " exceeds close-factor cap " +
                       max_repay.to_string());
  }

  const FixedDec p_debt = price_of(prices, debt_asset);
  const FixedDec p_coll = price_of(prices, collateral_asset);
  FixedDec seized = repay_amount.mul(p_debt).div(p_coll).mul(
      one().add(coll_entry.config.liquidation_bonus));
  const FixedDec held = current_deposit(target, collateral_asset);
  if (held.is_zero()) {
    throw SimError(ErrorCode::CollateralInsufficient,
                   target + " holds no " + collateral_asset + " collateral");
  }
  seized = seized.min(held);

  auto& pos = position(target);
  const FixedDec scaled_debt =
      scaled_decrement(repay_amount, owed, debt_entry.state.borrow_index,
                       pos.scaled_debts[debt_asset]);
  pos.scaled_debts[debt_asset] = pos.scaled_debts[debt_asset].sub(scaled_debt);
  debt_entry.state.scaled_debt = debt_entry.state.scaled_debt.sub(scaled_debt);

  const FixedDec scaled_coll =
      scaled_decrement(seized, held, coll_entry.state.liquidity_index,
                       pos.scaled_deposits[collateral_asset]);
  pos.scaled_deposits[collateral_asset] =
      pos.scaled_deposits[collateral_asset].sub(scaled_coll);
  coll_entry.state.scaled_liquidity = coll_entry.state.scaled_liquidity.sub(scaled_coll);

  prune(target);
  return LiquidationResult{repay_amount, seized};
}

void LendingPool::set_borrowing_enabled(const AssetId& asset, bool enabled) {
  entry(asset).config.borrowing_enabled = enabled;
}

void LendingPool::set_frozen(const AssetId& asset, bool frozen) {
  entry(asset).config.frozen = frozen;
}

const ReserveConfig& LendingPool::config(const AssetId& asset) const {
  return entry(asset).config;
}

const ReserveState& LendingPool::state(const AssetId& asset) const {
  return entry(asset).state;
}

std::vector<AssetId> LendingPool::reserve_assets() const {
  std::vector<AssetId> out;
  out.reserve(reserves_.size());
  for (const auto& [asset, _] : reserves_) out.push_back(asset);
  return out;
}

const Position* LendingPool::find_position(const std::string& account) const {
  auto it = positions_.find(account);
  return it == positions_.end() ? nullptr : &it->second;
}

FixedDec LendingPool::current_deposit(const std::string& account,
                                      const AssetId& asset) const {
  const Position* pos = find_position(account);
  if (pos == nullptr) return FixedDec::zero();
  auto it = pos->scaled_deposits.find(asset);
  if (it == pos->scaled_deposits.end()) return FixedDec::zero();
  return it->second.mul(entry(asset).state.liquidity_index);
}

FixedDec LendingPool::current_debt(const std::string& account,
                                   const AssetId& asset) const {
  const Position* pos = find_position(account);
  if (pos == nullptr) return FixedDec::zero();
  auto it = pos->scaled_debts.find(asset);
  if (it == pos->scaled_debts.end()) return FixedDec::zero();
  return it->second.mul(entry(asset).state.borrow_index);
}

FixedDec LendingPool::weighted_collateral(const Position& pos,
                                          const PriceMap& prices) const {
  FixedDec sum;
  for (const auto& [asset, scaled] : pos.scaled_deposits) {
    const auto& e = entry(asset);
    const FixedDec tokens = scaled.mul(e.state.liquidity_index);
    sum = sum.add(tokens.mul(price_of(prices, asset))
                      .mul(e.config.liquidation_threshold));
  }
  return sum;
}

FixedDec LendingPool::collateral_value(const std::string& account,
                                       const PriceMap& prices) const {
  const Position* pos = find_position(account);
  if (pos == nullptr) return FixedDec::zero();
  FixedDec sum;
  for (const auto& [asset, scaled] : pos->scaled_deposits) {
    const FixedDec tokens = scaled.mul(entry(asset).state.liquidity_index);
    sum = sum.add(tokens.mul(price_of(prices, asset)));
  }
  return sum;
}

FixedDec LendingPool::debt_value(const std::string& account,
                                 const PriceMap& prices) const {
  const Position* pos = find_position(account);
  if (pos == nullptr) return FixedDec::zero();
  FixedDec sum;
  for (const auto& [asset, scaled] : pos->scaled_debts) {
    const FixedDec tokens = scaled.mul(entry(asset).state.borrow_index);
    sum = sum.add(tokens.mul(price_of(prices, asset)));
  }
  return sum;
}

FixedDec LendingPool::borrow_capacity(const std::string& account,
                                      const PriceMap& prices) const {
  const Position* pos = find_position(account);
  if (pos == nullptr) return FixedDec::zero();
  FixedDec sum;
  for (const auto& [asset, scaled] : pos->scaled_deposits) {
    const auto& e = entry(asset);
    const FixedDec tokens = scaled.mul(e.state.liquidity_index);
    sum = sum.add(tokens.mul(price_of(prices, asset)).mul(e.config.ltv));
  }
  return sum;
}

FixedDec LendingPool::health_factor(const std::string& account,
                                    const PriceMap& prices) const {
  const Position* pos = find_position(account);
  if (pos == nullptr) return FixedDec::infinity();
  const FixedDec debt = debt_value(account, prices);
  if (debt.is_zero()) return FixedDec::infinity();
  return weighted_collateral(*pos, prices).div(debt);
}

std::pair<std::vector<BadDebtRecord>, FixedDec> LendingPool::bad_debt(
    const PriceMap& prices, int64_t now) const {
  std::vector<BadDebtRecord> records;
  FixedDec total;
  for (const auto& [account, pos] : positions_) {
    if (pos.scaled_debts.empty()) continue;
    const FixedDec debt = debt_value(account, prices);
    const FixedDec coll = collateral_value(account, prices);
    if (debt > coll) {
      const FixedDec shortfall = debt.sub(coll);
      records.push_back(BadDebtRecord{account, shortfall, now});
      total = total.add(shortfall);
    }
  }
  return {std::move(records), total};
}

FixedDec LendingPool::cumulative_minted_liquidity(const AssetId& asset) const {
  auto it = minted_liquidity_.find(asset);
  return it == minted_liquidity_.end() ? FixedDec::zero() : it->second;
}

FixedDec LendingPool::cumulative_minted_debt(const AssetId& asset) const {
  auto it = minted_debt_.find(asset);
  return it == minted_debt_.end() ? FixedDec::zero() : it->second;
}

void LendingPool::seed_position(const std::string& account, const AssetId& asset,
                                const FixedDec& deposit_amount,
                                const FixedDec& debt_amount) {
  auto& e = entry(asset);
  if (e.state.liquidity_index != one() || e.state.borrow_index != one()) {
    throw SimError(ErrorCode::InvalidState,
                   "positions can only be seeded before any accrual");
  }
  auto& pos = position(account);
  if (deposit_amount > FixedDec::zero()) {
    pos.scaled_deposits[asset] = pos.scaled_deposits[asset].add(deposit_amount);
    e.state.scaled_liquidity = e.state.scaled_liquidity.add(deposit_amount);
  }
  if (debt_amount > FixedDec::zero()) {
    pos.scaled_debts[asset] = pos.scaled_debts[asset].add(debt_amount);
    e.state.scaled_debt = e.state.scaled_debt.add(debt_amount);
  }
  if (e.state.scaled_debt > e.state.scaled_liquidity) {
    throw SimError(ErrorCode::ConfigError,
                   "seeded debt exceeds seeded liquidity for " + asset);
  }
  prune(account);
}

}  // namespace lendsim
