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

// Robot exclusion policies ("/robots.txt") with fair-use extension
// directives, and the access evaluator that enforces them against a ledger of
// agent assent and query history.
//
// Policy grammar (line oriented, LF or CRLF):
//
//   line        = field ":" [SP] value
//   field       = User-agent | Disallow | Crawl-limit | Purpose-allow
//               | Amount-limit | Terms            ; ASCII case-insensitive
//   Crawl-limit = <decimal N> "/" <decimal seconds>   ; N >= 1, seconds >= 1
//   Purpose-allow = token *("," token)             ; [a-z0-9_-]+, lowercased
//   Amount-limit  = decimal in (0, 1]
//
// "#" starts a comment that runs to end of line. One or more blank lines end
// a record; comment-only lines do not. Unknown fields produce warnings.

#ifndef SHOPBOT_EXCLUSION_PROTOCOL_H_
#define SHOPBOT_EXCLUSION_PROTOCOL_H_

#include <cstdint>
#include <deque>
#include <map>
#include <mutex>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace shopbot {

struct CrawlLimit {
  std::int64_t max_queries = 1;
  std::int64_t window_seconds = 1;

  bool operator==(const CrawlLimit&) const = default;
};

struct PolicyRecord {
  std::vector<std::string> agents;  // "*" is the wildcard
  std::vector<std::string> disallow;
  std::optional<CrawlLimit> crawl_limit;
  std::optional<std::vector<std::string>> purpose_allow;
  std::optional<double> amount_limit;
  std::optional<std::string> terms;

  bool is_wildcard() const;
  bool operator==(const PolicyRecord&) const = default;
};

struct ExclusionPolicy {
  std::vector<PolicyRecord> records;
  std::vector<std::string> warnings;
};

class PolicyParseError : public std::runtime_error {
 public:
  PolicyParseError(int line, const std::string& message);
  int line() const { return line_; }

 private:
  int line_;
};

// Throws PolicyParseError (with a 1-based line number) on invalid UTF-8, a
// line without ':' or a malformed extension value.
ExclusionPolicy parse_policy(std::string_view bytes);

// Canonical form: User-agent, Disallow, Crawl-limit, Purpose-allow,
// Amount-limit, Terms; LF endings; one blank line between records.
std::string serialize_policy(const ExclusionPolicy& policy);

// First record naming `agent` (case-insensitive), else the first wildcard
// record, else nullptr (everything allowed).
const PolicyRecord* match_record(const ExclusionPolicy& policy, std::string_view agent);

struct AccessRequest {
  std::string agent_token;
  std::string origin_address;
  std::optional<std::string> proxy_address;
  std::string path = "/";
  std::string declared_purpose;
  std::int64_t time = 0;  // seconds
  double catalog_fraction_fetched = 0.0;
};

enum class Verdict { kAllow, kDeny, kThrottle };
enum class DenyReason { kPath, kPurpose, kAmount, kUnassented };
enum class EventClass { kCompliant, kBreach, kUnassented };

std::string_view verdict_name(Verdict v);
std::string_view deny_reason_name(DenyReason r);
std::string_view event_class_name(EventClass c);

struct AccessDecision {
  Verdict verdict = Verdict::kAllow;
  std::optional<DenyReason> reason;  // set iff kDeny
  std::int64_t retry_after = 0;      // > 0 iff kThrottle

  static AccessDecision allow() { return {}; }
  static AccessDecision deny(DenyReason r) { return {Verdict::kDeny, r, 0}; }
  static AccessDecision throttle(std::int64_t s) { return {Verdict::kThrottle, std::nullopt, s}; }
  bool operator==(const AccessDecision&) const = default;
};

struct LedgerEvent {
  std::int64_t time = 0;
  std::string agent;
  std::string path;
  EventClass event_class = EventClass::kCompliant;
  Verdict verdict = Verdict::kAllow;
};

// Which agents accepted the policy terms (by fetching /robots.txt), their
// per-record query history, and a log of every evaluated request.
struct AssentLedger {
  struct AgentState {
    bool assented = false;
    std::int64_t assent_time = 0;
  };

  std::map<std::string, AgentState> agents;  // keyed by lowercased token
  // (agent, record index or -1 for "no record") -> query times
  std::map<std::pair<std::string, int>, std::deque<std::int64_t>> query_log;
  std::vector<LedgerEvent> events;
  std::int64_t last_time = INT64_MIN;

  bool assented(std::string_view agent) const;
};

// Checks, in order: assent, path, purpose, amount, frequency. A request for
// exactly "/robots.txt" is always allowed and records assent. Throws
// std::invalid_argument for a malformed request or one older than the last
// evaluated request.
AccessDecision evaluate_access(const ExclusionPolicy& policy, const AccessRequest& request,
                               AssentLedger& ledger);

struct LedgerReport {
  struct Counts {
    std::int64_t compliant = 0;
    std::int64_t breach = 0;
    std::int64_t unassented = 0;
    std::int64_t throttled = 0;
  };
  Counts totals;
  std::map<std::string, Counts> per_agent;
};

LedgerReport ledger_report(const AssentLedger& ledger);

// Serializes evaluate_access calls against one ledger so concurrent callers
// see a single total order of ledger mutations.
class AccessGate {
 public:
  explicit AccessGate(ExclusionPolicy policy) : policy_(std::move(policy)) {}

  AccessDecision evaluate(const AccessRequest& request);
  LedgerReport report() const;
  AssentLedger snapshot() const;

 private:
  const ExclusionPolicy policy_;
  mutable std::mutex mu_;
  AssentLedger ledger_;
};

}  // namespace shopbot

#endif  // SHOPBOT_EXCLUSION_PROTOCOL_H_
