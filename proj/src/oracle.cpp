#include "lendsim/oracle.hpp"

namespace lendsim {

void OraclePolicy::validate() const {
  if (heartbeat_seconds <= 0) {
    throw SimError(ErrorCode::ConfigError, "heartbeat_seconds must be positive");
  }
  if (deviation_threshold < FixedDec::zero()) {
    throw SimError(ErrorCode::ConfigError, "deviation_threshold must be non-negative");
  }
  if (delay_seconds < 0) {
    throw SimError(ErrorCode::ConfigError, "delay_seconds must be non-negative");
  }
}

void PriceOracle::add_feed(const AssetId& asset, const OraclePolicy& policy,
                           const FixedDec& initial_price, int64_t now) {
  policy.validate();
  if (initial_price <= FixedDec::zero()) {
    throw SimError(ErrorCode::DomainError, "initial price must be positive");
  }
  if (feeds_.count(asset) != 0) {
    throw SimError(ErrorCode::InvalidState, "feed for " + asset + " already exists");
  }
  OracleFeed feed;
  feed.policy = policy;
  feed.last_published = initial_price;
  feed.last_publish_time = now;
  feeds_.emplace(asset, std::move(feed));
}

OracleFeed& PriceOracle::feed_mut(const AssetId& asset) {
  auto it = feeds_.find(asset);
  if (it == feeds_.end()) {
    throw SimError(ErrorCode::OracleMissing, "no feed for asset " + asset);
  }
  return it->second;
}

const OracleFeed& PriceOracle::feed(const AssetId& asset) const {
  auto it = feeds_.find(asset);
  if (it == feeds_.end()) {
    throw SimError(ErrorCode::OracleMissing, "no feed for asset " + asset);
  }
  return it->second;
}

void PriceOracle::observe(const AssetId& asset, const FixedDec& price, int64_t now) {
  if (price <= FixedDec::zero()) {
    throw SimError(ErrorCode::DomainError, "observed price must be positive");
  }
  auto& f = feed_mut(asset);
  if (!f.pending.empty() && now < f.pending.back().time) {
    throw SimError(ErrorCode::InvalidTime, "observation time went backwards for " + asset);
  }
  f.pending.push_back(Observation{now, price});
}

std::optional<FixedDec> PriceOracle::publish_if_due(const AssetId& asset, int64_t now) {
  auto& f = feed_mut(asset);

  // newest observation that has aged past the delay
  const Observation* eligible = nullptr;
  for (const auto& obs : f.pending) {
    if (obs.time + f.policy.delay_seconds <= now) {
      eligible = &obs;
    } else {
      break;
    }
  }
  if (eligible == nullptr) return std::nullopt;

  const bool heartbeat_due =
      now - f.last_publish_time >= f.policy.heartbeat_seconds;
  const FixedDec deviation =
      eligible->price.sub(f.last_published).abs().div(f.last_published);
  const bool deviation_due = deviation > f.policy.deviation_threshold;
  if (!heartbeat_due && !deviation_due) return std::nullopt;

  const int64_t taken_at = eligible->time;
  f.last_published = eligible->price;
  f.last_publish_time = now;
  while (!f.pending.empty() && f.pending.front().time <= taken_at) {
    f.pending.pop_front();
  }
  return f.last_published;
}

FixedDec PriceOracle::price(const AssetId& asset) const {
  return feed(asset).last_published;
}

PriceMap PriceOracle::prices() const {
  PriceMap out;
  for (const auto& [asset, f] : feeds_) out.emplace(asset, f.last_published);
  return out;
}

}  // namespace lendsim
