#pragma once

// Compares detector output with a generator ledger.

#include <map>
#include <set>
#include <string>
#include <vector>

#include "lbp/chains.hpp"
#include "lbp/detection.hpp"
#include "lbp/testkit/generator.hpp"

namespace lbp::testkit {

struct LedgerScore {
  std::size_t true_positives = 0;
  std::size_t false_positives = 0;
  std::size_t false_negatives = 0;
  std::size_t count_mismatches = 0;  // lines or bypass counts differ on a planted pass
  std::size_t missing_records = 0;
  std::size_t chains_expected = 0;
  std::size_t chains_matched = 0;
  std::size_t chains_unexpected = 0;
  std::vector<std::string> notes;

  double precision() const {
    const auto d = true_positives + false_positives;
    return d == 0 ? 1.0 : static_cast<double>(true_positives) / static_cast<double>(d);
  }
  double recall() const {
    const auto d = true_positives + false_negatives;
    return d == 0 ? 1.0 : static_cast<double>(true_positives) / static_cast<double>(d);
  }
  bool exact() const {
    return false_positives == 0 && false_negatives == 0 && count_mismatches == 0 && missing_records == 0 &&
           chains_matched == chains_expected && chains_unexpected == 0;
  }
};

namespace detail {

inline std::string chain_key(ChainKind kind, const std::vector<std::string>& ids, const std::string& shot,
                             ChainOutcome outcome) {
  std::string k{to_string(kind)};
  for (const auto& id : ids) k += "|" + id;
  return k + "|" + shot + "|" + std::string(to_string(outcome));
}

}  // namespace detail

inline LedgerScore score_against_ledger(const GroundTruthLedger& ledger, const std::vector<LbpRecord>& records,
                                        const std::vector<ChainRecord>& chains) {
  LedgerScore s;
  std::map<std::string, const LbpRecord*> by_id;
  for (const auto& r : records) by_id[r.pass_event_id] = &r;

  for (const auto& p : ledger.passes) {
    auto it = by_id.find(p.event_id);
    if (it == by_id.end()) {
      ++s.missing_records;
      s.notes.push_back(p.event_id + ": no record");
      continue;
    }
    const LbpRecord& r = *it->second;
    const bool got = r.valid && r.is_lbp;
    if (got && p.is_lbp) ++s.true_positives;
    if (got && !p.is_lbp) {
      ++s.false_positives;
      s.notes.push_back(p.event_id + " (" + p.role + "): unexpected LBP");
    }
    if (!got && p.is_lbp) {
      ++s.false_negatives;
      s.notes.push_back(p.event_id + " (" + p.role + "): LBP missed");
    }
    if ((p.lines_crossed && *p.lines_crossed != r.lines_crossed) ||
        (p.bypassed_count && *p.bypassed_count != r.bypassed_count)) {
      ++s.count_mismatches;
      s.notes.push_back(p.event_id + " (" + p.role + "): lines/bypassed " + std::to_string(r.lines_crossed) + "/" +
                        std::to_string(r.bypassed_count));
    }
  }

  std::multiset<std::string> expected;
  for (const auto& c : ledger.chains)
    expected.insert(detail::chain_key(c.kind, c.lbp_event_ids, c.shot_event_id, c.outcome));
  s.chains_expected = expected.size();
  for (const auto& c : chains) {
    auto it = expected.find(detail::chain_key(c.kind, c.lbp_event_ids, c.shot_event_id, c.outcome));
    if (it == expected.end()) {
      ++s.chains_unexpected;
      s.notes.push_back("unexpected " + std::string(to_string(c.kind)) + " ending at " + c.shot_event_id);
    } else {
      expected.erase(it);
      ++s.chains_matched;
    }
  }
  for (const auto& k : expected) s.notes.push_back("chain missed: " + k);
  return s;
}

}  // namespace lbp::testkit
