#include "lendsim/scenario.hpp"

#include <fstream>
#include <set>
#include <sstream>

namespace lendsim {

namespace {

using nlohmann::json;

[[noreturn]] void fail(const std::string& path, const std::string& message) {
  throw SimError(ErrorCode::ConfigError, path + ": " + message);
}

std::string join(const std::string& path, const std::string& key) {
  return path.empty() ? key : path + "." + key;
}

// object wrapper that records which keys were read and rejects leftovers,
// so typos in scenario files fail loudly instead of being ignored
class Fields {
public:
  Fields(const json& obj, std::string path) : obj_(obj), path_(std::move(path)) {
    if (!obj.is_object()) fail(path_, "expected an object");
  }

  const json* find(const char* key) {
    seen_.insert(key);
    auto it = obj_.find(key);
    return it == obj_.end() ? nullptr : &*it;
  }

  const json& require(const char* key) {
    const json* v = find(key);
    if (v == nullptr) fail(path_, std::string("missing required key \"") + key + "\"");
    return *v;
  }

  std::string str(const char* key) {
    const json& v = require(key);
    if (!v.is_string()) fail(join(path_, key), "expected a string");
    return v.get<std::string>();
  }

  std::string str_or(const char* key, const std::string& fallback) {
    const json* v = find(key);
    if (v == nullptr) return fallback;
    if (!v->is_string()) fail(join(path_, key), "expected a string");
    return v->get<std::string>();
  }

  int64_t integer(const char* key) {
    const json& v = require(key);
    if (!v.is_number_integer()) fail(join(path_, key), "expected an integer");
    return v.get<int64_t>();
  }

  int64_t integer_or(const char* key, int64_t fallback) {
    const json* v = find(key);
    if (v == nullptr) return fallback;
    if (!v->is_number_integer()) fail(join(path_, key), "expected an integer");
    return v->get<int64_t>();
  }

  bool boolean_or(const char* key, bool fallback) {
    const json* v = find(key);
    if (v == nullptr) return fallback;
    if (!v->is_boolean()) fail(join(path_, key), "expected a boolean");
    return v->get<bool>();
  }

  FixedDec decimal(const char* key) {
    return parse_decimal(require(key), join(path_, key));
  }

  FixedDec decimal_or(const char* key, const FixedDec& fallback) {
    const json* v = find(key);
    if (v == nullptr) return fallback;
    return parse_decimal(*v, join(path_, key));
  }

  void done() const {
    for (auto it = obj_.begin(); it != obj_.end(); ++it) {
      if (seen_.count(it.key()) == 0) {
        fail(join(path_, it.key()), "unknown key");
      }
    }
  }

  const std::string& path() const { return path_; }

  static FixedDec parse_decimal(const json& v, const std::string& path) {
    if (!v.is_string()) {
      fail(path, "decimal values must be JSON strings, e.g. \"0.55\"");
    }
    try {
      return fd(v.get<std::string>());
    } catch (const SimError& e) {
      fail(path, e.what());
    }
  }

private:
  const json& obj_;
  std::string path_;
  std::set<std::string> seen_;
};

std::map<AssetId, FixedDec> parse_amount_map(const json& obj, const std::string& path) {
  if (!obj.is_object()) fail(path, "expected an object of asset: amount");
  std::map<AssetId, FixedDec> out;
  for (auto it = obj.begin(); it != obj.end(); ++it) {
    const FixedDec amount = Fields::parse_decimal(it.value(), join(path, it.key()));
    if (amount < FixedDec::zero()) {
      fail(join(path, it.key()), "amounts must be non-negative");
    }
    out.emplace(it.key(), amount);
  }
  return out;
}

RateParams parse_rates(const json& obj, const std::string& path) {
  Fields f(obj, path);
  RateParams p;
  p.base_rate = f.decimal("base_rate");
  p.optimal_util = f.decimal("optimal_util");
  p.slope1 = f.decimal("slope1");
  p.slope2 = f.decimal("slope2");
  p.reserve_factor = f.decimal_or("reserve_factor", FixedDec::zero());
  f.done();
  try {
    p.validate();
  } catch (const SimError& e) {
    fail(path, e.what());
  }
  return p;
}

ReserveConfig parse_reserve(const json& obj, const std::string& path) {
  Fields f(obj, path);
  ReserveConfig c;
  c.ltv = f.decimal("ltv");
  c.liquidation_threshold = f.decimal("liquidation_threshold");
  c.liquidation_bonus = f.decimal("liquidation_bonus");
  c.close_factor = f.decimal("close_factor");
  c.borrowing_enabled = f.boolean_or("borrowing_enabled", true);
  c.frozen = f.boolean_or("frozen", false);
  c.rates = parse_rates(f.require("rates"), join(path, "rates"));
  f.done();
  try {
    c.validate();
  } catch (const SimError& e) {
    fail(path, e.what());
  }
  return c;
}

OraclePolicy parse_oracle(const json* obj, const std::string& path) {
  OraclePolicy p;
  if (obj == nullptr) return p;
  Fields f(*obj, path);
  p.heartbeat_seconds = f.integer_or("heartbeat_seconds", p.heartbeat_seconds);
  p.deviation_threshold = f.decimal_or("deviation_threshold", p.deviation_threshold);
  p.delay_seconds = f.integer_or("delay_seconds", p.delay_seconds);
  f.done();
  try {
    p.validate();
  } catch (const SimError& e) {
    fail(path, e.what());
  }
  return p;
}

PriceSource parse_price(const json* obj, const std::string& path,
                        const FixedDec& initial_price) {
  PriceSource src;
  if (obj == nullptr) {
    src.script.kind = ScriptKind::Pinned;
    src.script.pinned_price = initial_price;
    return src;
  }
  Fields f(*obj, path);
  const std::string kind = f.str("kind");
  if (kind == "pinned") {
    src.script.kind = ScriptKind::Pinned;
    src.script.pinned_price = f.decimal_or("price", initial_price);
  } else if (kind == "keypoints") {
    src.script.kind = ScriptKind::Keypoints;
    const std::string interp = f.str_or("interpolation", "step");
    if (interp == "step") {
      src.script.interpolation = Interpolation::Step;
    } else if (interp == "linear") {
      src.script.interpolation = Interpolation::Linear;
    } else {
      fail(join(path, "interpolation"), "expected \"step\" or \"linear\"");
    }
    const json& points = f.require("points");
    if (!points.is_array() || points.empty()) {
      fail(join(path, "points"), "expected a non-empty array of [tick, price]");
    }
    for (size_t i = 0; i < points.size(); ++i) {
      const json& p = points[i];
      const std::string ppath = join(path, "points[" + std::to_string(i) + "]");
      if (!p.is_array() || p.size() != 2 || !p[0].is_number_integer()) {
        fail(ppath, "expected [tick, \"price\"]");
      }
      src.script.points.push_back(
          PricePoint{p[0].get<int64_t>(), Fields::parse_decimal(p[1], ppath)});
    }
  } else if (kind == "random_walk") {
    src.script.kind = ScriptKind::RandomWalk;
    src.script.walk_drift = f.decimal_or("drift", FixedDec::zero());
    src.script.walk_volatility = f.decimal("volatility");
  } else if (kind == "venue") {
    src.script.kind = ScriptKind::VenueEvents;
    src.venue = f.str("venue");
    if (const json* events = f.find("events")) {
      if (!events->is_array()) fail(join(path, "events"), "expected an array");
      for (size_t i = 0; i < events->size(); ++i) {
        const std::string epath = join(path, "events[" + std::to_string(i) + "]");
        Fields ef((*events)[i], epath);
        PriceEvent ev;
        ev.tick = ef.integer("tick");
        const std::string op = ef.str("op");
        if (op == "set") {
          ev.multiply = false;
        } else if (op == "mul") {
          ev.multiply = true;
        } else {
          fail(join(epath, "op"), "expected \"set\" or \"mul\"");
        }
        ev.value = ef.decimal("value");
        ef.done();
        src.script.events.push_back(ev);
      }
    }
  } else {
    fail(join(path, "kind"),
         "expected \"pinned\", \"keypoints\", \"random_walk\" or \"venue\"");
  }
  f.done();
  try {
    src.script.validate();
  } catch (const SimError& e) {
    fail(path, e.what());
  }
  return src;
}

}  // namespace

const Venue* Scenario::find_venue(const std::string& id) const {
  for (const auto& v : venues) {
    if (v.id == id) return &v;
  }
  return nullptr;
}

Scenario parse_scenario(const nlohmann::json& doc) {
  Scenario sc;
  Fields top(doc, "");
  sc.name = top.str("name");
  if (sc.name.empty()) fail("name", "must not be empty");
  const int64_t seed = top.integer_or("seed", 0);
  if (seed < 0) fail("seed", "must be non-negative");
  sc.seed = static_cast<uint64_t>(seed);
  sc.start_time = top.integer("start_time");
  if (sc.start_time < 0) fail("start_time", "must be non-negative");
  sc.tick_seconds = top.integer("tick_seconds");
  if (sc.tick_seconds <= 0) fail("tick_seconds", "must be positive");
  sc.horizon_ticks = top.integer("horizon_ticks");
  if (sc.horizon_ticks <= 0) fail("horizon_ticks", "must be positive");
  if (sc.horizon_ticks > 10000000) fail("horizon_ticks", "exceeds 1e7");
  sc.numeraire = top.str_or("numeraire", "USD");
  sc.notes = top.str_or("notes", "");

  const json& assets = top.require("assets");
  if (!assets.is_object() || assets.empty()) {
    fail("assets", "expected a non-empty object");
  }
  for (auto it = assets.begin(); it != assets.end(); ++it) {
    const std::string path = join("assets", it.key());
    if (it.key().empty()) fail("assets", "asset ids must not be empty");
    Fields f(it.value(), path);
    AssetConfig cfg;
    cfg.initial_price = f.decimal("initial_price");
    if (cfg.initial_price <= FixedDec::zero()) {
      fail(join(path, "initial_price"), "must be positive");
    }
    cfg.reserve = parse_reserve(f.require("reserve"), join(path, "reserve"));
    cfg.oracle = parse_oracle(f.find("oracle"), join(path, "oracle"));
    cfg.price = parse_price(f.find("price"), join(path, "price"), cfg.initial_price);
    f.done();
    sc.assets.emplace(it.key(), std::move(cfg));
  }

  if (const json* venues = top.find("venues")) {
    if (!venues->is_array()) fail("venues", "expected an array");
    std::set<std::string> ids;
    for (size_t i = 0; i < venues->size(); ++i) {
      const std::string path = "venues[" + std::to_string(i) + "]";
      Fields f((*venues)[i], path);
      Venue v;
      v.id = f.str("id");
      v.base = f.str("base");
      v.quote = f.str("quote");
      v.reserve_base = f.decimal("reserve_base");
      v.reserve_quote = f.decimal("reserve_quote");
      v.fee = f.decimal_or("fee", FixedDec::zero());
      f.done();
      try {
        v.validate();
      } catch (const SimError& e) {
        fail(path, e.what());
      }
      if (!ids.insert(v.id).second) fail(path, "duplicate venue id " + v.id);
      if (!sc.has_asset(v.base)) fail(join(path, "base"), "unknown asset " + v.base);
      if (!sc.has_asset(v.quote)) fail(join(path, "quote"), "unknown asset " + v.quote);
      sc.venues.push_back(std::move(v));
    }
  }

  if (const json* accounts = top.find("accounts")) {
    if (!accounts->is_object()) fail("accounts", "expected an object");
    for (auto it = accounts->begin(); it != accounts->end(); ++it) {
      if (it.key().empty()) fail("accounts", "account names must not be empty");
      const std::string path = join("accounts", it.key());
      auto balances = parse_amount_map(it.value(), path);
      for (const auto& [asset, _] : balances) {
        if (!sc.has_asset(asset)) fail(join(path, asset), "unknown asset");
      }
      sc.accounts.emplace(it.key(), std::move(balances));
    }
  }

  if (const json* positions = top.find("initial_positions")) {
    if (!positions->is_array()) fail("initial_positions", "expected an array");
    for (size_t i = 0; i < positions->size(); ++i) {
      const std::string path = "initial_positions[" + std::to_string(i) + "]";
      Fields f((*positions)[i], path);
      InitialPosition pos;
      pos.account = f.str("account");
      if (sc.accounts.count(pos.account) == 0) {
        fail(join(path, "account"),
             "account " + pos.account + " not declared in accounts");
      }
      if (const json* d = f.find("deposits")) {
        pos.deposits = parse_amount_map(*d, join(path, "deposits"));
      }
      if (const json* d = f.find("debts")) {
        pos.debts = parse_amount_map(*d, join(path, "debts"));
      }
      f.done();
      for (const auto& [asset, _] : pos.deposits) {
        if (!sc.has_asset(asset)) fail(join(path, "deposits"), "unknown asset " + asset);
      }
      for (const auto& [asset, _] : pos.debts) {
        if (!sc.has_asset(asset)) fail(join(path, "debts"), "unknown asset " + asset);
      }
      sc.initial_positions.push_back(std::move(pos));
    }
  }

  if (const json* tracked = top.find("tracked_accounts")) {
    if (!tracked->is_array()) fail("tracked_accounts", "expected an array");
    for (const auto& t : *tracked) {
      if (!t.is_string()) fail("tracked_accounts", "expected strings");
      sc.tracked_accounts.push_back(t.get<std::string>());
    }
  }

  if (const json* agents = top.find("agents")) {
    if (!agents->is_array()) fail("agents", "expected an array");
    std::set<std::string> names;
    for (size_t i = 0; i < agents->size(); ++i) {
      const std::string path = "agents[" + std::to_string(i) + "]";
      Fields f((*agents)[i], path);
      AgentSpec spec;
      spec.kind = f.str("kind");
      spec.name = f.str("name");
      if (spec.name.empty()) fail(join(path, "name"), "must not be empty");
      if (!names.insert(spec.name).second) {
        fail(join(path, "name"), "duplicate agent name " + spec.name);
      }
      const json& wallets = f.require("wallets");
      if (!wallets.is_array() || wallets.empty()) {
        fail(join(path, "wallets"), "expected a non-empty array of account names");
      }
      for (const auto& w : wallets) {
        if (!w.is_string()) fail(join(path, "wallets"), "expected strings");
        const std::string name = w.get<std::string>();
        if (sc.accounts.count(name) == 0) {
          fail(join(path, "wallets"), "account " + name + " not declared in accounts");
        }
        spec.wallets.push_back(name);
      }
      spec.start_tick = f.integer_or("start_tick", 0);
      if (spec.start_tick < 0) fail(join(path, "start_tick"), "must be non-negative");
      if (const json* params = f.find("params")) {
        if (!params->is_object()) fail(join(path, "params"), "expected an object");
        spec.params = *params;
      } else {
        spec.params = json::object();
      }
      f.done();
      sc.agents.push_back(std::move(spec));
    }
  }
  top.done();

  // cross checks that need the whole document
  for (const auto& [asset, cfg] : sc.assets) {
    if (cfg.price.script.kind == ScriptKind::VenueEvents) {
      const Venue* v = sc.find_venue(cfg.price.venue);
      if (v == nullptr) {
        fail("assets." + asset + ".price.venue", "unknown venue " + cfg.price.venue);
      }
      if (v->base != asset) {
        fail("assets." + asset + ".price.venue",
             "venue " + v->id + " does not trade " + asset + " as base");
      }
      const auto& quote_cfg = sc.assets.at(v->quote);
      if (quote_cfg.price.script.kind == ScriptKind::VenueEvents) {
        fail("assets." + asset + ".price.venue",
             "quote asset " + v->quote + " must have a script price source");
      }
      if (!cfg.price.script.events.empty() && sc.accounts.count("arbitrageur") == 0) {
        fail("accounts",
             "venue price events need an \"arbitrageur\" account to trade against");
      }
    }
  }
  for (const auto& t : sc.tracked_accounts) {
    bool known = sc.accounts.count(t) != 0;
    for (const auto& p : sc.initial_positions) known = known || p.account == t;
    if (!known) fail("tracked_accounts", "unknown account " + t);
  }
  // seeded books must balance per asset
  std::map<AssetId, FixedDec> seeded_deposits, seeded_debts;
  for (const auto& p : sc.initial_positions) {
    for (const auto& [asset, amount] : p.deposits) {
      seeded_deposits[asset] = seeded_deposits[asset].add(amount);
    }
    for (const auto& [asset, amount] : p.debts) {
      seeded_debts[asset] = seeded_debts[asset].add(amount);
    }
  }
  for (const auto& [asset, debt] : seeded_debts) {
    if (debt > seeded_deposits[asset]) {
      fail("initial_positions",
           "seeded debt in " + asset + " exceeds seeded deposits");
    }
  }

  sc.doc = doc;
  return sc;
}

nlohmann::json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw SimError(ErrorCode::NotFound, "cannot open " + path);
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::parse_error& e) {
    throw SimError(ErrorCode::ConfigError, path + ": " + e.what());
  }
  return doc;
}

Scenario load_scenario_file(const std::string& path) {
  return parse_scenario(read_json_file(path));
}

void apply_override(nlohmann::json& doc, const std::string& path,
                    const nlohmann::json& value) {
  std::string pointer = path;
  if (pointer.empty()) {
    throw SimError(ErrorCode::ConfigError, "override path must not be empty");
  }
  if (pointer[0] != '/') {
    // dotted form: assets.CRV.reserve.ltv
    pointer = "/" + pointer;
    for (auto& c : pointer) {
      if (c == '.') c = '/';
    }
  }
  try {
    doc[nlohmann::json::json_pointer(pointer)] = value;
  } catch (const json::exception& e) {
    throw SimError(ErrorCode::ConfigError,
                   "cannot apply override at " + path + ": " + e.what());
  }
}

void apply_override_expr(nlohmann::json& doc, const std::string& expr) {
  const size_t eq = expr.find('=');
  if (eq == std::string::npos || eq == 0) {
    throw SimError(ErrorCode::ConfigError,
                   "override must look like path=value, got \"" + expr + "\"");
  }
  const std::string path = expr.substr(0, eq);
  const std::string text = expr.substr(eq + 1);
  json value = json::parse(text, nullptr, false);
  if (value.is_discarded()) value = text;  // bare strings need no quotes
  apply_override(doc, path, value);
}

uint64_t scenario_hash(const nlohmann::json& doc) {
  return fnv1a64(doc.dump());
}

std::string hash_hex(uint64_t hash) {
  static const char* digits = "0123456789abcdef";
  std::string out(16, '0');
  for (int i = 15; i >= 0; --i) {
    out[i] = digits[hash & 0xF];
    hash >>= 4;
  }
  return out;
}

}  // namespace lendsim
