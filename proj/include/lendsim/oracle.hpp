#pragma once

#include <cstdint>
#include <deque>
#include <optional>

#include "lendsim/fixed_dec.hpp"
#include "lendsim/lending_pool.hpp"

namespace lendsim {

// Publication policy of one feed: an observation becomes publishable only
// delay_seconds after it was taken, and is then published when it deviates
// from the last published price by strictly more than deviation_threshold
// (relative) or when heartbeat_seconds have passed since the last publish.
struct OraclePolicy {
  int64_t heartbeat_seconds = 3600;
  FixedDec deviation_threshold = fd("0.005");
  int64_t delay_seconds = 0;

  void validate() const;
};

struct Observation {
  int64_t time = 0;
  FixedDec price;
};

struct OracleFeed {
  OraclePolicy policy;
  FixedDec last_published;
  int64_t last_publish_time = 0;
  std::deque<Observation> pending;
};

// The protocol prices everything off last_published, never off the market
// directly; the delay and publication rules are what make stale-price
// windows possible.
class PriceOracle {
public:
  void add_feed(const AssetId& asset, const OraclePolicy& policy,
                const FixedDec& initial_price, int64_t now);

  // record a market observation taken at `now`
  void observe(const AssetId& asset, const FixedDec& price, int64_t now);

  // publish the newest observation that has aged past the delay, if the
  // policy says it is due; returns the newly published price
  std::optional<FixedDec> publish_if_due(const AssetId& asset, int64_t now);

  FixedDec price(const AssetId& asset) const;
  PriceMap prices() const;
  const OracleFeed& feed(const AssetId& asset) const;
  bool has_feed(const AssetId& asset) const { return feeds_.count(asset) != 0; }

private:
  OracleFeed& feed_mut(const AssetId& asset);

  std::map<AssetId, OracleFeed> feeds_;
};

}  // namespace lendsim
