#pragma once

#include <memory>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "lendsim/scenario.hpp"

namespace lendsim {

struct DepositAction {
  std::string account;
  AssetId asset;
  FixedDec amount;
};
struct WithdrawAction {
  std::string account;
  AssetId asset;
  FixedDec amount;
};
struct BorrowAction {
  std::string account;
  AssetId asset;
  FixedDec amount;
};
struct RepayAction {
  std::string account;
  AssetId asset;
  FixedDec amount;
};
struct TransferAction {
  std::string from;
  std::string to;
  AssetId asset;
  FixedDec amount;
};
struct SwapAction {
  std::string account;
  std::string venue;
  SwapDirection direction;
  FixedDec amount_in;
};
struct LiquidateAction {
  std::string liquidator;
  std::string target;
  AssetId debt_asset;
  AssetId collateral_asset;
  FixedDec repay;
  // when set, the engine sells the actually-seized collateral here at once
  std::optional<std::string> sell_venue;
};
struct SetReserveFlagsAction {
  AssetId asset;
  bool borrowing_enabled = true;
  bool frozen = false;
  std::string reason;
};

using Action = std::variant<DepositAction, WithdrawAction, BorrowAction, RepayAction,
                            TransferAction, SwapAction, LiquidateAction,
                            SetReserveFlagsAction>;

// Read-only snapshot handed to agents each tick. Live references: the pool
// and wallets reflect every action applied earlier in the same tick.
struct WorldView {
  const LendingPool& pool;
  const std::map<std::string, Venue>& venues;
  const PriceOracle& oracle;
  const std::map<std::string, std::map<AssetId, FixedDec>>& wallets;
  const PriceMap& oracle_prices;  // what the protocol sees
  const PriceMap& source_prices;  // what the market trades at
  int64_t tick = 0;
  int64_t now = 0;

  FixedDec balance(const std::string& account, const AssetId& asset) const;
};

class Agent {
public:
  explicit Agent(AgentSpec spec) : spec_(std::move(spec)) {}
  virtual ~Agent() = default;

  const std::string& name() const { return spec_.name; }
  const std::string& kind() const { return spec_.kind; }
  int64_t start_tick() const { return spec_.start_tick; }
  bool is_liquidator() const { return spec_.kind == "liquidator"; }

  virtual std::vector<Action> step(const WorldView& view) = 0;

protected:
  const AgentSpec spec_;
};

// Validates spec.params against the scenario and builds the agent.
// Kinds: short_squeezer, loop_attacker, liquidator, defender, governance,
// passive_lp.
std::unique_ptr<Agent> make_agent(const AgentSpec& spec, const Scenario& scenario);

// largest token amount whose value at `price` stays within `budget`
FixedDec max_tokens_within(const FixedDec& budget, const FixedDec& price);

}  // namespace lendsim
