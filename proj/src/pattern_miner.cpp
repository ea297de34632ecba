#include "rca/pattern_miner.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include <omp.h>

namespace rca {

bool canonical_less(const Pattern& a, const Pattern& b) {
  if (a.size() != b.size()) return a.size() < b.size();
  return a < b;
}

bool is_subsequence(std::span<const TokenId> pattern, std::span<const TokenId> events) {
  std::size_t k = 0;
  for (std::size_t i = 0; i < events.size() && k < pattern.size(); ++i)
    if (events[i] == pattern[k]) ++k;
  return k == pattern.size();
}

std::vector<std::string> pattern_labels(const Pattern& pattern, const Vocabulary& vocab) {
  std::vector<std::string> labels;
  labels.reserve(pattern.size());
  for (TokenId t : pattern) labels.push_back(vocab.label(t));
  return labels;
}

MinSupport MinSupport::absolute(std::size_t count) {
  if (count == 0) throw std::invalid_argument("min_support count must be positive");
  return {false, static_cast<double>(count)};
}

MinSupport MinSupport::fraction(double f) {
  if (!(f > 0.0 && f <= 1.0)) throw std::invalid_argument("min_support fraction must be in (0, 1]");
  return {true, f};
}

MinSupport MinSupport::parse(double value) {
  if (!std::isfinite(value) || value <= 0.0)
    throw std::invalid_argument("min_support must be positive");
  if (value < 1.0) return fraction(value);
  if (value != std::floor(value))
    throw std::invalid_argument("absolute min_support must be an integer");
  return absolute(static_cast<std::size_t>(value));
}

std::size_t MinSupport::resolve(std::size_t group_size) const {
  if (!is_fraction_) return static_cast<std::size_t>(value_);
  const double raw = std::ceil(value_ * static_cast<double>(group_size) - 1e-9);
  return std::max<std::size_t>(1, static_cast<std::size_t>(raw));
}

SupportResult support_of(const Pattern& pattern, const TraceGroup& group) {
  if (pattern.empty()) throw std::invalid_argument("support_of: empty pattern");
  SupportResult r;
  for (std::size_t i = 0; i < group.traces.size(); ++i)
    if (is_subsequence(pattern, group.traces[i].events)) r.traces.push_back(static_cast<TraceIndex>(i));
  r.count = r.traces.size();
  return r;
}

std::span<const TokenId> ProjectedDatabase::suffix(const ProjectedEntry& e,
                                                   const TraceGroup& group) const {
  return std::span<const TokenId>(group.traces.at(e.trace).events).subspan(e.start);
}

std::optional<std::uint32_t> maximal_suffix_start(std::span<const TokenId> pattern,
                                                  std::span<const TokenId> events) {
  // The shortest prefix containing the pattern ends at its leftmost embedding.
  std::size_t k = 0;
  for (std::size_t i = 0; i < events.size(); ++i) {
    if (k == pattern.size()) break;
    if (events[i] == pattern[k] && ++k == pattern.size())
      return static_cast<std::uint32_t>(i + 1);
  }
  if (pattern.empty()) return 0;
  return std::nullopt;
}

ProjectedDatabase project_direct(const TraceGroup& group, const Pattern& pattern) {
  ProjectedDatabase db;
  db.prefix = pattern;
  for (std::size_t i = 0; i < group.traces.size(); ++i)
    if (auto start = maximal_suffix_start(pattern, group.traces[i].events))
      db.entries.push_back({static_cast<TraceIndex>(i), *start});
  return db;
}

ProjectedDatabase root_database(const TraceGroup& group) {
  ProjectedDatabase db;
  db.entries.reserve(group.traces.size());
  for (std::size_t i = 0; i < group.traces.size(); ++i)
    db.entries.push_back({static_cast<TraceIndex>(i), 0});
  return db;
}

ProjectedDatabase project_database(const ProjectedDatabase& db, TokenId next_event,
                                   const TraceGroup& group) {
  ProjectedDatabase out;
  out.prefix = db.prefix;
  out.prefix.push_back(next_event);
  for (const auto& e : db.entries) {
    const auto suffix = db.suffix(e, group);
    auto it = std::find(suffix.begin(), suffix.end(), next_event);
    if (it == suffix.end()) continue;
    const auto offset = static_cast<std::uint32_t>(it - suffix.begin());
    out.entries.push_back({e.trace, e.start + offset + 1});
  }
  return out;
}

ProjectedDatabase project_database(const TraceGroup& group, TokenId next_event) {
  return project_database(root_database(group), next_event, group);
}

namespace {

void sort_canonical(std::vector<MinedPattern>& patterns) {
  std::sort(patterns.begin(), patterns.end(),
            [](const MinedPattern& a, const MinedPattern& b) { return canonical_less(a.pattern, b.pattern); });
}

// Group events flattened into one array; entries address absolute positions.
struct FlatDatabase {
  std::vector<TokenId> tokens;
  std::vector<std::uint32_t> ends;  // one past the last token of each trace

  explicit FlatDatabase(const TraceGroup& group) {
    std::size_t total = 0;
    for (const auto& t : group.traces) total += t.events.size();
    tokens.reserve(total);
    ends.reserve(group.traces.size());
    for (const auto& t : group.traces) {
      tokens.insert(tokens.end(), t.events.begin(), t.events.end());
      ends.push_back(static_cast<std::uint32_t>(tokens.size()));
    }
  }
};

struct PseudoEntry {
  TraceIndex trace;
  std::uint32_t pos;
};

using Bucket = std::vector<PseudoEntry>;

// Per-thread counters sized to the vocabulary.
class MinerScratch {
 public:
  explicit MinerScratch(std::size_t vocab)
      : count_(vocab, 0), mark_(vocab, 0), slot_(vocab, -1) {}

  // Frequent extensions of a projected database, with their child databases in
  // ascending event order.
  void expand(const FlatDatabase& db, const Bucket& entries, std::size_t threshold,
              std::vector<TokenId>& events, std::vector<Bucket>& children) {
    touched_.clear();
    for (const auto& e : entries) {
      const std::uint64_t m = ++stamp_;
      for (std::uint32_t p = e.pos, end = db.ends[e.trace]; p < end; ++p) {
        const TokenId t = db.tokens[p];
        if (mark_[t] == m) continue;
        mark_[t] = m;
        if (count_[t]++ == 0) touched_.push_back(t);
      }
    }
    events.clear();
    for (TokenId t : touched_) {
      if (count_[t] >= threshold) events.push_back(t);
      count_[t] = 0;
    }
    children.clear();
    if (events.empty()) return;
    std::sort(events.begin(), events.end());
    children.resize(events.size());
    for (std::size_t i = 0; i < events.size(); ++i) slot_[events[i]] = static_cast<int>(i);

    for (const auto& e : entries) {
      const std::uint64_t m = ++stamp_;
      for (std::uint32_t p = e.pos, end = db.ends[e.trace]; p < end; ++p) {
        const TokenId t = db.tokens[p];
        if (mark_[t] == m) continue;
        mark_[t] = m;
        if (const int s = slot_[t]; s >= 0) children[s].push_back({e.trace, p + 1});
      }
    }
    for (TokenId t : events) slot_[t] = -1;
  }

 private:
  std::vector<std::size_t> count_;
  std::vector<std::uint64_t> mark_;
  std::vector<int> slot_;
  std::vector<TokenId> touched_;
  std::uint64_t stamp_ = 0;
};

MinedPattern make_mined(const Pattern& pattern, const Bucket& entries) {
  MinedPattern mp;
  mp.pattern = pattern;
  mp.supporting.reserve(entries.size());
  for (const auto& e : entries) mp.supporting.push_back(e.trace);
  return mp;
}

void mine_subtree(const FlatDatabase& db, const Bucket& entries, Pattern& prefix,
                  std::size_t threshold, std::size_t max_len, MinerScratch& scratch,
                  std::vector<MinedPattern>& out) {
  if (prefix.size() >= max_len) return;
  std::vector<TokenId> events;
  std::vector<Bucket> children;
  scratch.expand(db, entries, threshold, events, children);
  for (std::size_t i = 0; i < events.size(); ++i) {
    prefix.push_back(events[i]);
    out.push_back(make_mined(prefix, children[i]));
    Bucket child = std::move(children[i]);
    mine_subtree(db, child, prefix, threshold, max_len, scratch, out);
    prefix.pop_back();
  }
}

int resolve_workers(int workers) { return workers > 0 ? workers : omp_get_max_threads(); }

}  // namespace

std::vector<MinedPattern> extract_patterns(const TraceGroup& group, const MiningParams& params) {
  if (params.max_len == 0) throw std::invalid_argument("max_len must be positive");
  const std::size_t threshold = params.min_support.resolve(group.size());
  if (group.empty() || threshold > group.size() || !group.vocab) return {};

  const FlatDatabase db(group);
  const std::size_t vocab = group.vocab->size();

  Bucket root(group.traces.size());
  for (std::size_t i = 0; i < group.traces.size(); ++i)
    root[i] = {static_cast<TraceIndex>(i), i == 0 ? 0 : db.ends[i - 1]};

  std::vector<TokenId> first_events;
  std::vector<Bucket> first_children;
  {
    MinerScratch scratch(vocab);
    scratch.expand(db, root, threshold, first_events, first_children);
  }
  root = Bucket{};

  const auto n_first = static_cast<std::ptrdiff_t>(first_events.size());
  std::vector<std::vector<MinedPattern>> per_subtree(first_events.size());

#pragma omp parallel num_threads(resolve_workers(params.workers))
  {
    MinerScratch scratch(vocab);
#pragma omp for schedule(dynamic, 1)
    for (std::ptrdiff_t i = 0; i < n_first; ++i) {
      auto& out = per_subtree[i];
      Pattern prefix{first_events[i]};
      out.push_back(make_mined(prefix, first_children[i]));
      mine_subtree(db, first_children[i], prefix, threshold, params.max_len, scratch, out);
      first_children[i] = Bucket{};
    }
  }

  std::size_t total = 0;
  for (const auto& v : per_subtree) total += v.size();
  std::vector<MinedPattern> result;
  result.reserve(total);
  for (auto& v : per_subtree)
    std::move(v.begin(), v.end(), std::back_inserter(result));
  sort_canonical(result);
  return result;
}

namespace {

void extract_reference(const TraceGroup& group, const ProjectedDatabase& db, std::size_t threshold,
                       std::size_t max_len, std::vector<MinedPattern>& out) {
  if (db.prefix.size() >= max_len) return;
  const auto vocab = static_cast<TokenId>(group.vocab->size());
  for (TokenId e = 0; e < vocab; ++e) {
    ProjectedDatabase child = project_database(db, e, group);
    // support over S|alpha of alpha.e is the number of suffixes containing e
    if (child.size() < threshold || child.size() == 0) continue;
    MinedPattern mp;
    mp.pattern = child.prefix;
    for (const auto& entry : child.entries) mp.supporting.push_back(entry.trace);
    out.push_back(std::move(mp));
    extract_reference(group, child, threshold, max_len, out);
  }
}

}  // namespace

std::vector<MinedPattern> extract_patterns_reference(const TraceGroup& group,
                                                     const MiningParams& params) {
  if (params.max_len == 0) throw std::invalid_argument("max_len must be positive");
  const std::size_t threshold = params.min_support.resolve(group.size());
  if (group.empty() || threshold > group.size() || !group.vocab) return {};
  std::vector<MinedPattern> out;
  extract_reference(group, root_database(group), threshold, params.max_len, out);
  sort_canonical(out);
  return out;
}

std::vector<MinedPattern> brute_force_patterns(const TraceGroup& group, const MiningParams& params) {
  const std::size_t vocab = group.vocab ? group.vocab->size() : 0;
  if (std::pow(static_cast<double>(vocab), static_cast<double>(params.max_len)) > kBruteForceLimit)
    throw std::length_error("brute_force_patterns: |E|^max_len exceeds enumeration guard");
  const std::size_t threshold = params.min_support.resolve(group.size());
  std::vector<MinedPattern> out;
  if (group.empty() || vocab == 0) return out;

  // Odometer over all sequences of each length.
  for (std::size_t len = 1; len <= params.max_len; ++len) {
    Pattern p(len, 0);
    while (true) {
      SupportResult s = support_of(p, group);
      if (s.count >= threshold && s.count > 0) out.push_back({p, std::move(s.traces)});
      std::size_t k = len;
      while (k > 0 && ++p[k - 1] == vocab) p[--k] = 0;
      if (k == 0) break;
    }
  }
  sort_canonical(out);
  return out;
}

namespace {

struct TrieNode {
  TokenId event = 0;
  std::vector<std::uint32_t> children;
  std::vector<std::size_t> pattern_ids;  // patterns ending here
};

class PatternTrie {
 public:
  explicit PatternTrie(std::span<const Pattern> patterns) : nodes_(1) {
    for (std::size_t i = 0; i < patterns.size(); ++i) {
      std::uint32_t node = 0;
      for (TokenId t : patterns[i]) node = child(node, t);
      nodes_[node].pattern_ids.push_back(i);
    }
  }
  const TrieNode& node(std::uint32_t i) const { return nodes_[i]; }

 private:
  std::uint32_t child(std::uint32_t parent, TokenId t) {
    for (std::uint32_t c : nodes_[parent].children)
      if (nodes_[c].event == t) return c;
    const auto id = static_cast<std::uint32_t>(nodes_.size());
    nodes_.push_back({t, {}, {}});
    nodes_[parent].children.push_back(id);
    return id;
  }
  std::vector<TrieNode> nodes_;
};

Bucket project_bucket(const FlatDatabase& db, const Bucket& entries, TokenId event) {
  Bucket out;
  for (const auto& e : entries) {
    for (std::uint32_t p = e.pos, end = db.ends[e.trace]; p < end; ++p) {
      if (db.tokens[p] == event) {
        out.push_back({e.trace, p + 1});
        break;
      }
    }
  }
  return out;
}

void count_trie(const FlatDatabase& db, const PatternTrie& trie, std::uint32_t node,
                const Bucket& entries, std::vector<std::vector<TraceIndex>>& out) {
  const TrieNode& n = trie.node(node);
  for (std::size_t id : n.pattern_ids) {
    auto& ids = out[id];
    ids.reserve(entries.size());
    for (const auto& e : entries) ids.push_back(e.trace);
  }
  for (std::uint32_t c : n.children) {
    Bucket child = project_bucket(db, entries, trie.node(c).event);
    if (!child.empty()) count_trie(db, trie, c, child, out);
  }
}

}  // namespace

std::vector<std::vector<TraceIndex>> count_supports(std::span<const Pattern> patterns,
                                                    const TraceGroup& group, int workers) {
  for (const auto& p : patterns)
    if (p.empty()) throw std::invalid_argument("count_supports: empty pattern");
  std::vector<std::vector<TraceIndex>> out(patterns.size());
  if (group.empty() || patterns.empty()) return out;

  const FlatDatabase db(group);
  const PatternTrie trie(patterns);
  Bucket root(group.traces.size());
  for (std::size_t i = 0; i < group.traces.size(); ++i)
    root[i] = {static_cast<TraceIndex>(i), i == 0 ? 0 : db.ends[i - 1]};

  // Distinct first-level subtrees write disjoint pattern slots.
  const auto& first = trie.node(0).children;
  const auto n_first = static_cast<std::ptrdiff_t>(first.size());
#pragma omp parallel for schedule(dynamic, 1) num_threads(resolve_workers(workers))
  for (std::ptrdiff_t i = 0; i < n_first; ++i) {
    const std::uint32_t c = first[i];
    Bucket child = project_bucket(db, root, trie.node(c).event);
    if (!child.empty()) count_trie(db, trie, c, child, out);
  }
  return out;
}

std::vector<std::vector<TraceIndex>> count_supports_reference(std::span<const Pattern> patterns,
                                                              const TraceGroup& group) {
  std::vector<std::vector<TraceIndex>> out;
  out.reserve(patterns.size());
  for (const auto& p : patterns) out.push_back(support_of(p, group).traces);
  return out;
}

}  // namespace rca
