// Copyright 2026 The Shopbot Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "shopbot/scenario.h"

#include <cmath>
#include <fstream>
#include <initializer_list>
#include <limits>
#include <sstream>

#include "json.hpp"
#include "shopbot/exclusion_protocol.h"

namespace shopbot {
namespace {

using nlohmann::json;

// Typed, path-aware access to one JSON object with a closed key set.
class Fields {
 public:
  Fields(const json& obj, std::string prefix, std::initializer_list<std::string_view> allowed)
      : obj_(obj), prefix_(std::move(prefix)) {
    if (!obj.is_object()) fail_at(prefix_.empty() ? "(root)" : prefix_.substr(0, prefix_.size() - 1), "expected an object");
    for (const auto& [key, value] : obj.items()) {
      bool known = false;
      for (std::string_view a : allowed) known = known || a == key;
      if (!known) fail_at(prefix_ + key, "unknown key");
    }
  }

  bool has(const std::string& key) const {
    return obj_.contains(key) && !obj_.at(key).is_null();
  }
  std::string path(const std::string& key) const { return prefix_ + key; }
  const json& raw(const std::string& key) const { return obj_.at(key); }

  double number(const std::string& key, double fallback) const {
    if (!has(key)) return fallback;
    const json& v = obj_.at(key);
    if (!v.is_number()) fail_at(path(key), "expected a number");
    const double d = v.get<double>();
    if (!std::isfinite(d)) fail_at(path(key), "expected a finite number");
    return d;
  }

  std::int64_t integer(const std::string& key, std::int64_t fallback) const {
    if (!has(key)) return fallback;
    const json& v = obj_.at(key);
    if (v.is_number_integer()) return v.get<std::int64_t>();
    if (v.is_number_float()) {
      const double d = v.get<double>();
      if (std::isfinite(d) && d == std::floor(d) && std::fabs(d) < 9.0e15) {
        return static_cast<std::int64_t>(d);
      }
    }
    fail_at(path(key), "expected an integer");
  }

  bool boolean(const std::string& key, bool fallback) const {
    if (!has(key)) return fallback;
    const json& v = obj_.at(key);
    if (!v.is_boolean()) fail_at(path(key), "expected true or false");
    return v.get<bool>();
  }

  std::string text(const std::string& key, const std::string& fallback) const {
    if (!has(key)) return fallback;
    const json& v = obj_.at(key);
    if (!v.is_string()) fail_at(path(key), "expected a string");
    return v.get<std::string>();
  }

  [[noreturn]] static void fail_at(const std::string& field, const std::string& what) {
    throw ConfigError(field + ": " + what);
  }

 private:
  const json& obj_;
  std::string prefix_;
};

Ticks money_to_ticks(const PriceGrid& grid, double money, const std::string& field) {
  if (!grid.on_grid(money)) Fields::fail_at(field, "must be a multiple of price_tick");
  return grid.to_ticks(money);
}

ValuationModel parse_valuation(const json& v) {
  const Fields f(v, "valuation.", {"kind", "value", "lo", "hi"});
  const std::string kind = f.text("kind", "constant");
  if (kind == "constant") {
    if (f.has("lo") || f.has("hi")) Fields::fail_at("valuation", "constant valuation takes only 'value'");
    return ConstantValuation{f.number("value", 1.0)};
  }
  if (kind == "uniform") {
    if (f.has("value")) Fields::fail_at("valuation.value", "uniform valuation takes 'lo' and 'hi'");
    return UniformValuation{f.number("lo", 0.0), f.number("hi", 1.0)};
  }
  Fields::fail_at("valuation.kind", "expected \"constant\" or \"uniform\"");
}

SellerSpec parse_seller(const json& v, std::size_t index, const MarketConfig& market) {
  const std::string prefix = "sellers[" + std::to_string(index) + "].";
  const Fields f(v, prefix,
                 {"cost", "strategy", "price", "step", "direction", "sampled_profit",
                  "initial_price", "update_weight"});
  const PriceGrid grid = market.grid();
  SellerSpec s;
  s.marginal_cost = money_to_ticks(grid, f.number("cost", 0.0), f.path("cost"));
  const std::string kind = f.text("strategy", "myopic");
  auto reject = [&](std::initializer_list<const char*> keys) {
    for (const char* k : keys) {
      if (f.has(k)) Fields::fail_at(f.path(k), "not used by strategy \"" + kind + "\"");
    }
  };
  if (kind == "myopic") {
    reject({"price", "step", "direction", "sampled_profit"});
    s.strategy = MyopicOptimal{};
  } else if (kind == "fixed") {
    reject({"step", "direction", "sampled_profit"});
    if (!f.has("price")) Fields::fail_at(f.path("price"), "required for a fixed strategy");
    s.strategy = FixedStrategy{money_to_ticks(grid, f.number("price", 0.0), f.path("price"))};
  } else if (kind == "derivative") {
    reject({"price"});
    DerivativeFollower df;
    df.step = money_to_ticks(grid, f.number("step", market.price_tick), f.path("step"));
    df.direction = static_cast<int>(f.integer("direction", -1));
    df.sampled_profit = f.boolean("sampled_profit", false);
    if (df.step <= 0) Fields::fail_at(f.path("step"), "must be positive");
    if (df.direction != 1 && df.direction != -1) Fields::fail_at(f.path("direction"), "must be 1 or -1");
    s.strategy = df;
  } else {
    Fields::fail_at(f.path("strategy"), "expected \"myopic\", \"fixed\" or \"derivative\"");
  }
  if (f.has("initial_price")) {
    s.initial_price = money_to_ticks(grid, f.number("initial_price", 0.0), f.path("initial_price"));
  }
  s.update_weight = f.number("update_weight", 1.0);
  return s;
}

DetectorSettings parse_detectors(const json& v) {
  const Fields f(v, "detectors.", {"min_drop_run", "min_reset", "window", "margin", "cv_max"});
  DetectorSettings d;
  d.min_drop_run = static_cast<int>(f.integer("min_drop_run", d.min_drop_run));
  if (f.has("min_reset")) d.min_reset = f.number("min_reset", 0.0);
  d.window = f.integer("window", d.window);
  if (f.has("margin")) d.margin = f.number("margin", 0.0);
  d.cv_max = f.number("cv_max", d.cv_max);
  return d;
}

CrawlerAgent parse_agent(const json& v, std::size_t index) {
  const Fields f(v, "traffic.agents[" + std::to_string(index) + "].",
                 {"id", "agent", "origin", "proxy", "rate", "compliant", "purpose", "paths",
                  "catalog_fraction"});
  CrawlerAgent a;
  a.id = f.text("id", "");
  a.agent_token = f.text("agent", a.id);
  a.origin_address = f.text("origin", "");
  if (f.has("proxy")) a.proxy_address = f.text("proxy", "");
  a.rate = f.number("rate", 1.0);
  a.compliant = f.boolean("compliant", false);
  a.declared_purpose = f.text("purpose", a.declared_purpose);
  a.catalog_fraction = f.number("catalog_fraction", 0.0);
  if (f.has("paths")) {
    const json& paths = f.raw("paths");
    if (!paths.is_array()) Fields::fail_at(f.path("paths"), "expected an array of strings");
    a.paths.clear();
    for (const json& p : paths) {
      if (!p.is_string()) Fields::fail_at(f.path("paths"), "expected an array of strings");
      a.paths.push_back(p.get<std::string>());
    }
  }
  return a;
}

MetasiteConfig parse_metasite(const json& v) {
  const Fields f(v, "traffic.metasite.",
                 {"num_sellers", "refresh_period", "vendor_robot", "ticks", "seed"});
  MetasiteConfig m;
  m.num_sellers = static_cast<int>(f.integer("num_sellers", m.num_sellers));
  m.refresh_period =
      f.has("refresh_period") ? std::optional<std::int64_t>(f.integer("refresh_period", 1))
                              : std::nullopt;
  m.vendor_robot = f.boolean("vendor_robot", false);
  m.ticks = f.integer("ticks", m.ticks);
  m.seed = static_cast<std::uint64_t>(f.integer("seed", 0));
  return m;
}

TrafficScenario parse_traffic(const json& v) {
  const Fields f(v, "traffic.",
                 {"ticks", "threshold", "window", "capacity_threshold", "human_rate",
                  "human_addresses", "load_window", "aggregate_robot_counts", "agents",
                  "metasite"});
  TrafficScenario t;
  t.ticks = f.integer("ticks", t.ticks);
  t.threshold = f.integer("threshold", t.threshold);
  t.window = f.integer("window", t.window);
  t.capacity_threshold = f.number("capacity_threshold", t.capacity_threshold);
  t.human_rate = f.number("human_rate", t.human_rate);
  t.human_addresses = f.integer("human_addresses", t.human_addresses);
  t.load_window = f.integer("load_window", t.load_window);
  if (f.has("aggregate_robot_counts")) {
    const json& counts = f.raw("aggregate_robot_counts");
    if (!counts.is_array()) Fields::fail_at(f.path("aggregate_robot_counts"), "expected an array");
    t.aggregate_robot_counts.clear();
    for (const json& c : counts) {
      if (!c.is_number_integer()) {
        Fields::fail_at(f.path("aggregate_robot_counts"), "expected integers");
      }
      t.aggregate_robot_counts.push_back(c.get<std::int64_t>());
    }
  }
  if (f.has("agents")) {
    const json& agents = f.raw("agents");
    if (!agents.is_array()) Fields::fail_at(f.path("agents"), "expected an array");
    for (std::size_t i = 0; i < agents.size(); ++i) t.agents.push_back(parse_agent(agents[i], i));
  }
  if (f.has("metasite")) t.metasite = parse_metasite(f.raw("metasite"));
  return t;
}

// Re-labels validation errors from the domain types as config errors.
template <typename Fn>
void validated(Fn&& fn) {
  try {
    fn();
  } catch (const ConfigError&) {
    throw;
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
}

}  // namespace

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  if (in.bad()) throw IoError("error reading " + path.string());
  return buf.str();
}

ScenarioConfig parse_scenario(std::string_view json_text, const std::filesystem::path& base_dir) {
  json doc;
  try {
    doc = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("(root): invalid JSON: ") + e.what());
  }
  const Fields f(doc, "",
                 {"num_sellers", "buyers_per_tick", "type1_fraction", "type1_fraction_end",
                  "valuation", "price_tick", "price_max", "sellers", "ticks", "seed",
                  "detectors", "traffic", "policy_file"});

  ScenarioConfig config;
  MarketConfig& market = config.simulation.market;
  market.buyers_per_tick = f.integer("buyers_per_tick", market.buyers_per_tick);
  market.type1_fraction = f.number("type1_fraction", market.type1_fraction);
  if (f.has("valuation")) market.valuation = parse_valuation(f.raw("valuation"));
  market.price_tick = f.number("price_tick", market.price_tick);
  market.price_max = f.number("price_max", market.price_max);
  if (f.has("type1_fraction_end")) {
    config.simulation.type1_fraction_end = f.number("type1_fraction_end", 0.0);
  }

  if (f.has("sellers")) {
    const json& sellers = f.raw("sellers");
    if (!sellers.is_array() || sellers.empty()) {
      Fields::fail_at("sellers", "expected a non-empty array");
    }
    market.num_sellers = static_cast<int>(sellers.size());
    // Grid checks below need a valid tick first.
    validated([&] { market.validate(); });
    for (std::size_t i = 0; i < sellers.size(); ++i) {
      config.simulation.sellers.push_back(parse_seller(sellers[i], i, market));
    }
    config.has_sellers = true;
  }
  if (f.has("num_sellers")) {
    const std::int64_t n = f.integer("num_sellers", 0);
    if (config.has_sellers && n != market.num_sellers) {
      Fields::fail_at("num_sellers", "does not match the number of sellers listed");
    }
    market.num_sellers = static_cast<int>(n);
  }
  if (f.has("detectors")) config.simulation.detectors = parse_detectors(f.raw("detectors"));
  config.ticks = f.integer("ticks", config.ticks);
  if (config.ticks < 1) Fields::fail_at("ticks", "must be at least 1");
  const std::int64_t seed = f.integer("seed", 0);
  if (seed < 0) Fields::fail_at("seed", "must be non-negative");
  config.seed = static_cast<std::uint64_t>(seed);

  validated([&] {
    market.validate();
    if (config.has_sellers) config.simulation.validate();
  });

  if (f.has("traffic")) {
    config.traffic = parse_traffic(f.raw("traffic"));
    if (config.traffic->metasite && config.traffic->metasite->vendor_robot && config.has_sellers &&
        config.traffic->metasite->num_sellers == market.num_sellers) {
      config.traffic->metasite->market = config.simulation;
    }
    validated([&] { config.traffic->validate(); });
  }
  if (f.has("policy_file")) {
    std::filesystem::path p = f.text("policy_file", "");
    if (p.is_relative()) p = base_dir / p;
    config.policy_file = p;
    const std::string text = read_file(p);
    ExclusionPolicy policy;
    try {
      policy = parse_policy(text);
    } catch (const PolicyParseError& e) {
      throw ConfigError("policy_file: " + p.string() + ": " + e.what());
    }
    if (!config.traffic) config.traffic.emplace();
    config.traffic->policy = std::move(policy);
  }
  return config;
}

ScenarioConfig load_scenario(const std::filesystem::path& path) {
  return parse_scenario(read_file(path), path.parent_path());
}

}  // namespace shopbot
