#include "lendsim/venue.hpp"

#include <algorithm>

namespace lendsim {

namespace {
const FixedDec& one() {
  static const FixedDec v = FixedDec::one();
  return v;
}
const FixedDec& two() {
  static const FixedDec v = FixedDec::from_integer(2);
  return v;
}
const FixedDec& four() {
  static const FixedDec v = FixedDec::from_integer(4);
  return v;
}
// clamp for random walks so a long losing streak cannot cross zero
const FixedDec& price_floor() {
  static const FixedDec v = fd("0.000000000001");
  return v;
}
}  // namespace

const char* swap_direction_name(SwapDirection dir) {
  return dir == SwapDirection::SellBase ? "sell_base" : "buy_base";
}

void Venue::validate() const {
  if (id.empty()) throw SimError(ErrorCode::ConfigError, "venue id must not be empty");
  if (base == quote) {
    throw SimError(ErrorCode::ConfigError, "venue " + id + " trades an asset against itself");
  }
  if (reserve_base <= FixedDec::zero() || reserve_quote <= FixedDec::zero()) {
    throw SimError(ErrorCode::ConfigError, "venue " + id + " reserves must be positive");
  }
  if (fee < FixedDec::zero() || fee >= one()) {
    throw SimError(ErrorCode::ConfigError, "venue " + id + " fee must lie in [0, 1)");
  }
}

FixedDec Venue::swap(SwapDirection dir, const FixedDec& amount_in) {
  if (amount_in <= FixedDec::zero()) {
    throw SimError(ErrorCode::DomainError, "swap input must be positive");
  }
  FixedDec& r_in = dir == SwapDirection::SellBase ? reserve_base : reserve_quote;
  FixedDec& r_out = dir == SwapDirection::SellBase ? reserve_quote : reserve_base;

  const FixedDec effective = amount_in.mul(one().sub(fee));
  const FixedDec out = FixedDec::mul_div(r_out, effective, r_in.add(effective));
  if (out >= r_out) {
    throw SimError(ErrorCode::InsufficientDepth,
                   "swap would drain venue " + id + " of " + output_asset(dir));
  }
  r_in = r_in.add(amount_in);
  r_out = r_out.sub(out);
  return out;
}

FixedDec Venue::rebalance_input(SwapDirection dir, const FixedDec& target_price) const {
  // Let R be the input-side reserve and ae = a*(1-fee). Landing spot on T
  // requires (R + ae)(R + a) = K with K = Q*B/T when selling base and
  // K = Q*B*T when buying, i.e. (1-f)a^2 + (2-f)R a + R^2 - K = 0.
  const FixedDec r = dir == SwapDirection::SellBase ? reserve_base : reserve_quote;
  const FixedDec k = dir == SwapDirection::SellBase
                         ? FixedDec::mul_div(reserve_quote, reserve_base, target_price)
                         : reserve_quote.mul(reserve_base).mul(target_price);
  const FixedDec one_minus_f = one().sub(fee);
  const FixedDec two_minus_f = two().sub(fee);
  const FixedDec r_sq = r.mul(r);
  const FixedDec disc =
      r_sq.mul(two_minus_f.mul(two_minus_f))
          .sub(four().mul(one_minus_f).mul(r_sq.sub(k)));
  const FixedDec root = disc.sqrt();
  return root.sub(r.mul(two_minus_f)).div(two().mul(one_minus_f));
}

std::optional<RebalanceTrade> Venue::arbitrage_rebalance(const FixedDec& target_price) {
  if (target_price <= FixedDec::zero()) {
    throw SimError(ErrorCode::DomainError, "target price must be positive");
  }
  const FixedDec current = spot();
  if (current == target_price) return std::nullopt;
  const SwapDirection dir =
      target_price < current ? SwapDirection::SellBase : SwapDirection::BuyBase;
  const FixedDec amount_in = rebalance_input(dir, target_price);
  if (amount_in <= FixedDec::zero()) return std::nullopt;
  const FixedDec amount_out = swap(dir, amount_in);
  return RebalanceTrade{dir, amount_in, amount_out};
}

void PriceScript::validate() const {
  switch (kind) {
    case ScriptKind::Pinned:
      if (pinned_price <= FixedDec::zero()) {
        throw SimError(ErrorCode::ConfigError, "pinned price must be positive");
      }
      break;
    case ScriptKind::Keypoints: {
      if (points.empty()) {
        throw SimError(ErrorCode::ConfigError, "keypoints script needs at least one point");
      }
      int64_t prev_tick = -1;
      for (const auto& p : points) {
        if (p.tick <= prev_tick && prev_tick >= 0) {
          throw SimError(ErrorCode::ConfigError, "keypoint ticks must strictly increase");
        }
        if (p.price <= FixedDec::zero()) {
          throw SimError(ErrorCode::ConfigError, "keypoint prices must be positive");
        }
        prev_tick = p.tick;
      }
      break;
    }
    case ScriptKind::VenueEvents: {
      int64_t prev_tick = -1;
      for (const auto& e : events) {
        if (e.tick < prev_tick) {
          throw SimError(ErrorCode::ConfigError, "venue event ticks must not decrease");
        }
        if (e.value <= FixedDec::zero()) {
          throw SimError(ErrorCode::ConfigError, "venue event values must be positive");
        }
        prev_tick = e.tick;
      }
      break;
    }
    case ScriptKind::RandomWalk:
      if (walk_volatility < FixedDec::zero()) {
        throw SimError(ErrorCode::ConfigError, "walk volatility must be non-negative");
      }
      break;
  }
}

FixedDec script_reference_price(const PriceScript& script, int64_t tick,
                                const FixedDec& previous, const CounterRng& rng,
                                uint64_t stream) {
  switch (script.kind) {
    case ScriptKind::Pinned:
      return script.pinned_price;
    case ScriptKind::Keypoints: {
      const auto& pts = script.points;
      if (tick <= pts.front().tick) return pts.front().price;
      if (tick >= pts.back().tick) return pts.back().price;
      size_t i = 0;
      while (i + 1 < pts.size() && pts[i + 1].tick <= tick) ++i;
      if (pts[i].tick == tick || script.interpolation == Interpolation::Step) {
        return pts[i].price;
      }
      const FixedDec span = FixedDec::from_integer(pts[i + 1].tick - pts[i].tick);
      const FixedDec elapsed = FixedDec::from_integer(tick - pts[i].tick);
      const FixedDec diff = pts[i + 1].price.sub(pts[i].price);
      return pts[i].price.add(FixedDec::mul_div(diff, elapsed, span));
    }
    case ScriptKind::RandomWalk: {
      const FixedDec z = rng.symmetric_unit(stream, static_cast<uint64_t>(tick));
      const FixedDec factor =
          one().add(script.walk_drift).add(script.walk_volatility.mul(z));
      return previous.mul(factor).max(price_floor());
    }
    case ScriptKind::VenueEvents:
      throw SimError(ErrorCode::InvalidState,
                     "venue-event scripts have no reference price of their own");
  }
  throw SimError(ErrorCode::InvalidState, "unreachable script kind");
}

}  // namespace lendsim
