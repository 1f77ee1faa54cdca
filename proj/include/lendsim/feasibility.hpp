#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "lendsim/fixed_dec.hpp"
#include "lendsim/lending_pool.hpp"

namespace lendsim {

// One row of a market snapshot: on-protocol deposits and still-borrowable
// liquidity for an asset, against its circulating market cap.
struct AssetSnapshot {
  AssetId asset;
  FixedDec deposited_value;
  FixedDec available_value;
  FixedDec market_cap;
  std::string status;  // free-form, carried through to output
};

struct FeasibilityThresholds {
  FixedDec available_ratio = fd("0.15");
  FixedDec deposit_ratio = fd("0.30");
};

struct FeasibilityRow {
  AssetSnapshot snapshot;
  FixedDec deposit_ratio;    // deposited_value / market_cap
  FixedDec available_ratio;  // available_value / market_cap
  bool squeezable = false;   // available_ratio above threshold
  bool depth_risk = false;   // deposit_ratio above threshold
};

FeasibilityRow assess(const AssetSnapshot& snapshot,
                      const FeasibilityThresholds& thresholds);

// all rows assessed and ranked: available_ratio desc, deposit_ratio desc,
// asset id asc
std::vector<FeasibilityRow> rank(const std::vector<AssetSnapshot>& snapshots,
                                 const FeasibilityThresholds& thresholds);

// header: asset,deposited_value,available_value,market_cap,status
std::vector<AssetSnapshot> read_snapshot_csv(std::istream& in);
std::vector<AssetSnapshot> read_snapshot_file(const std::string& path);

std::string render_feasibility_table(const std::vector<FeasibilityRow>& rows);

}  // namespace lendsim
