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

#include "shopbot/exclusion_protocol.h"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <limits>

namespace shopbot {
namespace {

constexpr std::string_view kPolicyPath = "/robots.txt";

std::string lower(std::string_view s) {
  std::string out(s);
  for (char& c : out) {
    if (c >= 'A' && c <= 'Z') c = static_cast<char>(c - 'A' + 'a');
  }
  return out;
}

std::string_view trim(std::string_view s) {
  const auto is_space = [](char c) { return c == ' ' || c == '\t' || c == '\r' || c == '\v' || c == '\f'; };
  while (!s.empty() && is_space(s.front())) s.remove_prefix(1);
  while (!s.empty() && is_space(s.back())) s.remove_suffix(1);
  return s;
}

// Returns the 0-based offset of the first invalid UTF-8 sequence, or npos.
std::size_t first_invalid_utf8(std::string_view s) {
  std::size_t i = 0;
  while (i < s.size()) {
    const auto b = static_cast<unsigned char>(s[i]);
    std::size_t len;
    std::uint32_t cp;
    if (b < 0x80) {
      ++i;
      continue;
    } else if ((b & 0xE0) == 0xC0) {
      len = 2;
      cp = b & 0x1F;
    } else if ((b & 0xF0) == 0xE0) {
      len = 3;
      cp = b & 0x0F;
    } else if ((b & 0xF8) == 0xF0) {
      len = 4;
      cp = b & 0x07;
    } else {
      return i;
    }
    if (i + len > s.size()) return i;
    for (std::size_t k = 1; k < len; ++k) {
      const auto c = static_cast<unsigned char>(s[i + k]);
      if ((c & 0xC0) != 0x80) return i;
      cp = (cp << 6) | (c & 0x3F);
    }
    const bool overlong = (len == 2 && cp < 0x80) || (len == 3 && cp < 0x800) ||
                          (len == 4 && cp < 0x10000);
    if (overlong || cp > 0x10FFFF || (cp >= 0xD800 && cp <= 0xDFFF)) return i;
    i += len;
  }
  return std::string_view::npos;
}

bool parse_decimal_int(std::string_view s, std::int64_t& out) {
  if (s.empty() || !std::all_of(s.begin(), s.end(), [](char c) { return c >= '0' && c <= '9'; })) {
    return false;
  }
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
  return ec == std::errc() && ptr == s.data() + s.size();
}

CrawlLimit parse_crawl_limit(std::string_view value, int line) {
  const auto slash = value.find('/');
  if (slash == std::string_view::npos) {
    throw PolicyParseError(line, "Crawl-limit must be <queries>/<seconds>");
  }
  CrawlLimit limit;
  if (!parse_decimal_int(trim(value.substr(0, slash)), limit.max_queries) ||
      !parse_decimal_int(trim(value.substr(slash + 1)), limit.window_seconds)) {
    throw PolicyParseError(line, "Crawl-limit must be <queries>/<seconds>");
  }
  if (limit.max_queries < 1 || limit.window_seconds < 1) {
    throw PolicyParseError(line, "Crawl-limit values must be at least 1");
  }
  return limit;
}

std::vector<std::string> parse_purposes(std::string_view value, int line) {
  std::vector<std::string> tokens;
  std::size_t start = 0;
  while (start <= value.size()) {
    const auto comma = value.find(',', start);
    const auto end = comma == std::string_view::npos ? value.size() : comma;
    const std::string token = lower(trim(value.substr(start, end - start)));
    const bool valid = !token.empty() && std::all_of(token.begin(), token.end(), [](char c) {
      return (c >= 'a' && c <= 'z') || (c >= '0' && c <= '9') || c == '_' || c == '-';
    });
    if (!valid) throw PolicyParseError(line, "Purpose-allow needs comma-separated [a-z0-9_-] tokens");
    if (std::find(tokens.begin(), tokens.end(), token) == tokens.end()) tokens.push_back(token);
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return tokens;
}

double parse_amount(std::string_view value, int line) {
  const bool charset = !value.empty() && std::all_of(value.begin(), value.end(), [](char c) {
    return (c >= '0' && c <= '9') || c == '.';
  });
  double amount = 0.0;
  if (charset) {
    const auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), amount);
    if (ec != std::errc() || ptr != value.data() + value.size()) amount = 0.0;
  }
  if (!charset || !(amount > 0.0 && amount <= 1.0)) {
    throw PolicyParseError(line, "Amount-limit must be a decimal in (0, 1]");
  }
  return amount;
}

std::string format_double(double v) {
  char buf[400];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v, std::chars_format::fixed);
  return std::string(buf, ptr);
}

bool path_disallowed(const PolicyRecord& record, std::string_view path) {
  return std::any_of(record.disallow.begin(), record.disallow.end(),
                     [path](const std::string& prefix) { return path.starts_with(prefix); });
}

}  // namespace

PolicyParseError::PolicyParseError(int line, const std::string& message)
    : std::runtime_error("line " + std::to_string(line) + ": " + message), line_(line) {}

bool PolicyRecord::is_wildcard() const {
  return std::find(agents.begin(), agents.end(), "*") != agents.end();
}

ExclusionPolicy parse_policy(std::string_view bytes) {
  if (const auto bad = first_invalid_utf8(bytes); bad != std::string_view::npos) {
    const int line = 1 + static_cast<int>(std::count(bytes.begin(), bytes.begin() + bad, '\n'));
    throw PolicyParseError(line, "invalid UTF-8");
  }

  ExclusionPolicy policy;
  PolicyRecord current;
  bool has_rules = false;  // current record has seen a non-agent directive
  auto flush = [&] {
    if (!current.agents.empty()) policy.records.push_back(std::move(current));
    current = PolicyRecord{};
    has_rules = false;
  };

  int line_no = 0;
  std::size_t pos = 0;
  while (pos <= bytes.size()) {
    const auto nl = bytes.find('\n', pos);
    const auto end = nl == std::string_view::npos ? bytes.size() : nl;
    std::string_view line = bytes.substr(pos, end - pos);
    pos = end + 1;
    ++line_no;
    if (nl == std::string_view::npos && line.empty()) break;

    if (trim(line).empty()) {
      flush();
      continue;
    }
    if (const auto hash = line.find('#'); hash != std::string_view::npos) {
      line = line.substr(0, hash);
    }
    line = trim(line);
    if (line.empty()) continue;

    const auto colon = line.find(':');
    if (colon == std::string_view::npos) {
      throw PolicyParseError(line_no, "expected '<field>: <value>'");
    }
    const std::string field = lower(trim(line.substr(0, colon)));
    const std::string_view value = trim(line.substr(colon + 1));
    if (field.empty()) throw PolicyParseError(line_no, "missing field name");

    if (field == "user-agent") {
      if (has_rules) flush();
      if (value.empty()) {
        policy.warnings.push_back("line " + std::to_string(line_no) + ": empty User-agent ignored");
        continue;
      }
      current.agents.emplace_back(value);
      continue;
    }

    const bool known = field == "disallow" || field == "crawl-limit" ||
                       field == "purpose-allow" || field == "amount-limit" || field == "terms";
    if (!known) {
      policy.warnings.push_back("line " + std::to_string(line_no) + ": unknown field '" +
                                field + "' ignored");
      continue;
    }
    if (current.agents.empty()) {
      policy.warnings.push_back("line " + std::to_string(line_no) + ": '" + field +
                                "' outside of a record ignored");
      continue;
    }
    has_rules = true;
    if (field == "disallow") {
      if (!value.empty()) current.disallow.emplace_back(value);
    } else if (field == "crawl-limit") {
      const CrawlLimit limit = parse_crawl_limit(value, line_no);
      if (current.crawl_limit) {
        policy.warnings.push_back("line " + std::to_string(line_no) + ": duplicate Crawl-limit");
      }
      current.crawl_limit = limit;
    } else if (field == "purpose-allow") {
      std::vector<std::string> tokens = parse_purposes(value, line_no);
      if (!current.purpose_allow) current.purpose_allow.emplace();
      for (auto& t : tokens) {
        if (std::find(current.purpose_allow->begin(), current.purpose_allow->end(), t) ==
            current.purpose_allow->end()) {
          current.purpose_allow->push_back(std::move(t));
        }
      }
    } else if (field == "amount-limit") {
      const double amount = parse_amount(value, line_no);
      if (current.amount_limit) {
        policy.warnings.push_back("line " + std::to_string(line_no) + ": duplicate Amount-limit");
      }
      current.amount_limit = amount;
    } else {
      if (current.terms) {
        policy.warnings.push_back("line " + std::to_string(line_no) + ": duplicate Terms");
      }
      current.terms = std::string(value);
    }
  }
  flush();

  const auto wildcards = std::count_if(policy.records.begin(), policy.records.end(),
                                       [](const PolicyRecord& r) { return r.is_wildcard(); });
  if (wildcards > 1) {
    policy.warnings.push_back("multiple wildcard records; only the first applies");
  }
  return policy;
}

std::string serialize_policy(const ExclusionPolicy& policy) {
  std::string out;
  for (std::size_t i = 0; i < policy.records.size(); ++i) {
    const PolicyRecord& r = policy.records[i];
    if (i > 0) out += '\n';
    for (const std::string& agent : r.agents) out += "User-agent: " + agent + "\n";
    if (r.disallow.empty()) out += "Disallow:\n";
    for (const std::string& path : r.disallow) out += "Disallow: " + path + "\n";
    if (r.crawl_limit) {
      out += "Crawl-limit: " + std::to_string(r.crawl_limit->max_queries) + "/" +
             std::to_string(r.crawl_limit->window_seconds) + "\n";
    }
    if (r.purpose_allow) {
      out += "Purpose-allow: ";
      for (std::size_t k = 0; k < r.purpose_allow->size(); ++k) {
        if (k > 0) out += ',';
        out += (*r.purpose_allow)[k];
      }
      out += '\n';
    }
    if (r.amount_limit) out += "Amount-limit: " + format_double(*r.amount_limit) + "\n";
    if (r.terms) out += "Terms: " + *r.terms + "\n";
  }
  return out;
}

const PolicyRecord* match_record(const ExclusionPolicy& policy, std::string_view agent) {
  const std::string wanted = lower(agent);
  const PolicyRecord* fallback = nullptr;
  for (const PolicyRecord& r : policy.records) {
    for (const std::string& a : r.agents) {
      if (a == "*") {
        if (fallback == nullptr) fallback = &r;
      } else if (lower(a) == wanted) {
        return &r;
      }
    }
  }
  return fallback;
}

std::string_view verdict_name(Verdict v) {
  switch (v) {
    case Verdict::kAllow:
      return "ALLOW";
    case Verdict::kDeny:
      return "DENY";
    case Verdict::kThrottle:
      return "THROTTLE";
  }
  return "ALLOW";
}

std::string_view deny_reason_name(DenyReason r) {
  switch (r) {
    case DenyReason::kPath:
      return "path";
    case DenyReason::kPurpose:
      return "purpose";
    case DenyReason::kAmount:
      return "amount";
    case DenyReason::kUnassented:
      return "unassented";
  }
  return "path";
}

std::string_view event_class_name(EventClass c) {
  switch (c) {
    case EventClass::kCompliant:
      return "compliant";
    case EventClass::kBreach:
      return "breach";
    case EventClass::kUnassented:
      return "unassented";
  }
  return "compliant";
}

bool AssentLedger::assented(std::string_view agent) const {
  const auto it = agents.find(lower(agent));
  return it != agents.end() && it->second.assented;
}

AccessDecision evaluate_access(const ExclusionPolicy& policy, const AccessRequest& request,
                               AssentLedger& ledger) {
  if (!request.path.starts_with('/')) {
    throw std::invalid_argument("request path must begin with '/'");
  }
  if (!(request.catalog_fraction_fetched >= 0.0 && request.catalog_fraction_fetched <= 1.0)) {
    throw std::invalid_argument("catalog_fraction_fetched must lie in [0, 1]");
  }
  if (request.time < ledger.last_time) {
    throw std::invalid_argument("request time precedes the ledger's last event");
  }
  ledger.last_time = request.time;
  const std::string agent = lower(request.agent_token);

  if (request.path == kPolicyPath) {
    AssentLedger::AgentState& state = ledger.agents[agent];
    if (!state.assented) {
      state.assented = true;
      state.assent_time = request.time;
    }
    return AccessDecision::allow();
  }

  auto log = [&](EventClass cls, const AccessDecision& d) {
    ledger.events.push_back({request.time, agent, request.path, cls, d.verdict});
    return d;
  };

  if (!ledger.assented(agent)) {
    return log(EventClass::kUnassented, AccessDecision::deny(DenyReason::kUnassented));
  }

  const PolicyRecord* record = match_record(policy, agent);
  const int record_index =
      record == nullptr ? -1 : static_cast<int>(record - policy.records.data());
  if (record != nullptr) {
    if (path_disallowed(*record, request.path)) {
      return log(EventClass::kBreach, AccessDecision::deny(DenyReason::kPath));
    }
    if (record->purpose_allow &&
        std::find(record->purpose_allow->begin(), record->purpose_allow->end(),
                  lower(request.declared_purpose)) == record->purpose_allow->end()) {
      return log(EventClass::kBreach, AccessDecision::deny(DenyReason::kPurpose));
    }
    if (record->amount_limit && request.catalog_fraction_fetched > *record->amount_limit) {
      return log(EventClass::kBreach, AccessDecision::deny(DenyReason::kAmount));
    }
  }

  auto& history = ledger.query_log[{agent, record_index}];
  if (record != nullptr && record->crawl_limit) {
    const CrawlLimit& limit = *record->crawl_limit;
    // Trailing window is (now - window, now].
    while (!history.empty() && history.front() <= request.time - limit.window_seconds) {
      history.pop_front();
    }
    if (static_cast<std::int64_t>(history.size()) >= limit.max_queries) {
      const std::int64_t retry = history.front() + limit.window_seconds - request.time;
      return log(EventClass::kBreach, AccessDecision::throttle(retry));
    }
  }
  history.push_back(request.time);
  return log(EventClass::kCompliant, AccessDecision::allow());
}

LedgerReport ledger_report(const AssentLedger& ledger) {
  LedgerReport report;
  for (const LedgerEvent& e : ledger.events) {
    LedgerReport::Counts& agent = report.per_agent[e.agent];
    for (LedgerReport::Counts* c : {&report.totals, &agent}) {
      switch (e.event_class) {
        case EventClass::kCompliant:
          ++c->compliant;
          break;
        case EventClass::kBreach:
          ++c->breach;
          break;
        case EventClass::kUnassented:
          ++c->unassented;
          break;
      }
      if (e.verdict == Verdict::kThrottle) ++c->throttled;
    }
  }
  return report;
}

AccessDecision AccessGate::evaluate(const AccessRequest& request) {
  std::lock_guard<std::mutex> lock(mu_);
  return evaluate_access(policy_, request, ledger_);
}

LedgerReport AccessGate::report() const {
  std::lock_guard<std::mutex> lock(mu_);
  return ledger_report(ledger_);
}

AssentLedger AccessGate::snapshot() const {
  std::lock_guard<std::mutex> lock(mu_);
  return ledger_;
}

}  // namespace shopbot
