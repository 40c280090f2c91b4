#!/usr/bin/env python3
# Copyright 2026 The Shopbot Authors
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#     http://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.

"""Writes the policy round-trip corpus into tests/data/robots_corpus.

Hand-written edge cases plus seeded random policies. Rerunning produces the
same files.
"""

import os
import random
import sys

HAND = {
    "empty": "",
    "base": "User-agent: *\nDisallow: /prices\n",
    "fairbot_ext": "User-agent: fairbot\nDisallow:\nCrawl-limit: 60/3600\n"
                   "Purpose-allow: research,nonprofit\n",
    "crlf": "User-agent: *\r\nDisallow: /prices\r\nCrawl-limit: 10/60\r\n",
    "mixed_case": "USER-AGENT: FairBot\nDISALLOW: /Private\ncrawl-LIMIT: 5/10\n"
                  "purpose-allow: Research, NONPROFIT\n",
    "comments": "# site policy\nUser-agent: *   # everyone\n# middle comment\n"
                "Disallow: /cart # no carts\n",
    "comment_only": "# nothing here\n# at all\n",
    "blank_lines": "\n\n\nUser-agent: a\nDisallow: /x\n\n\n\nUser-agent: b\nDisallow: /y\n\n",
    "multi_agent": "User-agent: alpha\nUser-agent: beta\nDisallow: /a\nDisallow: /b\n",
    "two_records": "User-agent: fairbot\nDisallow: /prices\n\nUser-agent: *\nDisallow: /\n",
    "no_blank_between": "User-agent: a\nDisallow: /x\nUser-agent: b\nDisallow: /y\n",
    "unknown_fields": "User-agent: *\nSitemap: http://example.com/map.xml\nCrawl-delay: 10\n"
                      "Disallow: /tmp\nX-Custom: yes\n",
    "amount": "User-agent: *\nAmount-limit: 0.25\n",
    "amount_one": "User-agent: *\nAmount-limit: 1\n",
    "amount_tiny": "User-agent: *\nAmount-limit: 0.00001\n",
    "terms": "User-agent: *\nTerms: https://example.com/terms?v=2&x=y\n",
    "all_fields": "User-agent: fairbot\nDisallow: /prices\nDisallow: /stock\n"
                  "Crawl-limit: 100/86400\nPurpose-allow: research\nAmount-limit: 0.1\n"
                  "Terms: see terms page\n",
    "duplicate_crawl": "User-agent: *\nCrawl-limit: 1/1\nCrawl-limit: 2/2\n",
    "purpose_dupes": "User-agent: *\nPurpose-allow: a,b\nPurpose-allow: b,c,a\n",
    "whitespace": "  User-agent  :   spacey  \n\tDisallow:\t/tabbed\t\n",
    "no_space": "User-agent:*\nDisallow:/nospace\n",
    "utf8_path": "User-agent: *\nDisallow: /café\nTerms: über terms\n",
    "rules_before_agent": "Disallow: /orphan\nUser-agent: *\nDisallow: /kept\n",
    "two_wildcards": "User-agent: *\nDisallow: /one\n\nUser-agent: *\nDisallow: /two\n",
    "empty_agent": "User-agent:\nUser-agent: real\nDisallow: /r\n",
    "trailing_no_newline": "User-agent: *\nDisallow: /end",
    "crlf_blank": "User-agent: a\r\nDisallow: /a\r\n\r\nUser-agent: b\r\nDisallow: /b\r\n",
    "root_disallow": "User-agent: *\nDisallow: /\n",
    "agent_only": "User-agent: lonely\n",
    "colon_in_value": "User-agent: *\nDisallow: /a:b\nTerms: urn:x:y\n",
    "big_limit": "User-agent: *\nCrawl-limit: 1000000/31536000\n",
    "padded_limit": "User-agent: *\nCrawl-limit: 60 / 3600\n",
    "purpose_spaces": "User-agent: *\nPurpose-allow:  research , non-profit ,x_1\n",
}

AGENTS = ["*", "fairbot", "PriceBot", "shopbot-2", "Metasite", "crawler_x"]
PATHS = ["/", "/prices", "/prices/books", "/cart", "/search", "/api/v1", "/private"]
PURPOSES = ["research", "nonprofit", "commercial", "archive", "price-check"]
FIELDS = ["Disallow", "Crawl-limit", "Purpose-allow", "Amount-limit", "Terms", "Sitemap"]


def random_case(rng, s):
    return "".join(c.upper() if rng.random() < 0.3 else c.lower() for c in s)


def random_policy(rng):
    lines = []
    for _ in range(rng.randint(1, 4)):
        if rng.random() < 0.3:
            lines.append("# " + rng.choice(["note", "policy", "generated"]))
        for _ in range(rng.randint(1, 2)):
            lines.append(random_case(rng, "User-agent") + ": " + rng.choice(AGENTS))
        for _ in range(rng.randint(0, 5)):
            field = rng.choice(FIELDS)
            if field == "Disallow":
                value = rng.choice(PATHS + [""])
            elif field == "Crawl-limit":
                value = "%d/%d" % (rng.randint(1, 500), rng.randint(1, 86400))
            elif field == "Purpose-allow":
                value = ",".join(rng.sample(PURPOSES, rng.randint(1, 3)))
            elif field == "Amount-limit":
                value = "%.3f" % rng.uniform(0.001, 1.0)
            elif field == "Terms":
                value = "https://example.com/t/%d" % rng.randint(1, 99)
            else:
                value = "http://example.com/sitemap.xml"
            line = random_case(rng, field) + ":" + (" " if rng.random() < 0.8 else "") + value
            if rng.random() < 0.15:
                line += "  # trailing"
            lines.append(line)
        lines.append("")
    eol = "\r\n" if rng.random() < 0.25 else "\n"
    return eol.join(lines)


def main():
    root = os.path.join(os.path.dirname(os.path.abspath(__file__)), "..", "tests", "data",
                        "robots_corpus")
    os.makedirs(root, exist_ok=True)
    for name, text in sorted(HAND.items()):
        with open(os.path.join(root, name + ".txt"), "wb") as f:
            f.write(text.encode("utf-8"))
    rng = random.Random(20260101)
    for i in range(40):
        with open(os.path.join(root, "random_%02d.txt" % i), "wb") as f:
            f.write(random_policy(rng).encode("utf-8"))
    return 0


if __name__ == "__main__":
    sys.exit(main())
