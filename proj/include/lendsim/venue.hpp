#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "lendsim/fixed_dec.hpp"
#include "lendsim/lending_pool.hpp"
#include "lendsim/rng.hpp"

namespace lendsim {

enum class SwapDirection { SellBase, BuyBase };

const char* swap_direction_name(SwapDirection dir);

struct RebalanceTrade {
  SwapDirection direction;
  FixedDec amount_in;
  FixedDec amount_out;
};

// Constant-product market for base against quote. Spot is quote per base.
// Swaps charge the fee on the way in, so reserve_base * reserve_quote never
// shrinks by more than output rounding (and grows with any nonzero fee).
struct Venue {
  std::string id;
  AssetId base;
  AssetId quote;
  FixedDec reserve_base;
  FixedDec reserve_quote;
  FixedDec fee;  // in [0, 1)

  void validate() const;
  FixedDec spot() const { return reserve_quote.div(reserve_base); }

  const AssetId& input_asset(SwapDirection dir) const {
    return dir == SwapDirection::SellBase ? base : quote;
  }
  const AssetId& output_asset(SwapDirection dir) const {
    return dir == SwapDirection::SellBase ? quote : base;
  }

  // executes against current reserves; returns tokens out
  FixedDec swap(SwapDirection dir, const FixedDec& amount_in);

  // size of the input that moves spot to `amount`, before executing it
  FixedDec rebalance_input(SwapDirection dir, const FixedDec& target_price) const;

  // executes the unique swap that lands spot on target_price; nullopt when
  // spot is already there or the required input rounds to zero
  std::optional<RebalanceTrade> arbitrage_rebalance(const FixedDec& target_price);
};

// Exogenous reference-price path for one asset.
enum class ScriptKind { Pinned, Keypoints, VenueEvents, RandomWalk };
enum class Interpolation { Step, Linear };

struct PricePoint {
  int64_t tick = 0;
  FixedDec price;
};

// one scheduled venue shock: set spot to `value`, or scale spot by it
struct PriceEvent {
  int64_t tick = 0;
  bool multiply = false;
  FixedDec value;
};

struct PriceScript {
  ScriptKind kind = ScriptKind::Pinned;
  FixedDec pinned_price;
  Interpolation interpolation = Interpolation::Step;
  std::vector<PricePoint> points;
  std::vector<PriceEvent> events;
  FixedDec walk_drift;       // per-tick relative drift
  FixedDec walk_volatility;  // per-tick relative scale of the uniform step

  void validate() const;
};

// Reference price at a tick for pinned / keypoints / random-walk scripts.
// VenueEvents scripts have no reference of their own (the venue is the
// price source); evaluating one throws invalid-state.
FixedDec script_reference_price(const PriceScript& script, int64_t tick,
                                const FixedDec& previous, const CounterRng& rng,
                                uint64_t stream);

}  // namespace lendsim
