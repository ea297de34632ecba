#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "rca/trace_store.hpp"

namespace rca {

/// Sequence of event tokens; matches a trace when its events occur in order, gaps allowed.
using Pattern = std::vector<TokenId>;

/// Index of a trace within its group.
using TraceIndex = std::uint32_t;

/// Canonical pattern order: shorter first, then lexicographic by token id.
bool canonical_less(const Pattern& a, const Pattern& b);

/// True if `pattern` is a (possibly non-contiguous) subsequence of `events`.
bool is_subsequence(std::span<const TokenId> pattern, std::span<const TokenId> events);

std::vector<std::string> pattern_labels(const Pattern& pattern, const Vocabulary& vocab);

/// Minimum support as an absolute trace count or a fraction of the group size.
class MinSupport {
 public:
  static MinSupport absolute(std::size_t count);
  /// Fraction in (0, 1].
  static MinSupport fraction(double f);
  /// Command-line convention: values below 1 are fractions, values >= 1 absolute counts.
  static MinSupport parse(double value);

  bool is_fraction() const { return is_fraction_; }
  double value() const { return value_; }
  /// max(1, ceil(f * group_size)) for fractions; the count itself otherwise.
  std::size_t resolve(std::size_t group_size) const;

 private:
  MinSupport(bool is_fraction, double value) : is_fraction_(is_fraction), value_(value) {}
  bool is_fraction_ = false;
  double value_ = 1.0;
};

inline constexpr std::size_t kDefaultMaxLen = 5;

struct MiningParams {
  MinSupport min_support = MinSupport::absolute(1);
  std::size_t max_len = kDefaultMaxLen;
  /// OpenMP threads for the parallel kernel; 0 uses the runtime default.
  int workers = 0;
};

struct MinedPattern {
  Pattern pattern;
  /// Ascending indices of supporting traces within the mined group.
  std::vector<TraceIndex> supporting;

  std::size_t support() const { return supporting.size(); }
  friend bool operator==(const MinedPattern&, const MinedPattern&) = default;
};

struct SupportResult {
  std::size_t count = 0;
  std::vector<TraceIndex> traces;
};

/// Number of traces containing `pattern`, each trace counted once.
SupportResult support_of(const Pattern& pattern, const TraceGroup& group);

/// Maximal suffix of one trace: events from `start` to the end.
struct ProjectedEntry {
  TraceIndex trace = 0;
  std::uint32_t start = 0;

  friend bool operator==(const ProjectedEntry&, const ProjectedEntry&) = default;
};

/// S|prefix: the maximal suffixes of the traces that contain the prefix.
struct ProjectedDatabase {
  Pattern prefix;
  std::vector<ProjectedEntry> entries;

  std::size_t size() const { return entries.size(); }
  std::span<const TokenId> suffix(const ProjectedEntry& e, const TraceGroup& group) const;
};

/// Start of the maximal suffix of `events` with respect to `pattern` (one past the
/// end of its leftmost embedding), or nullopt when the pattern does not occur.
std::optional<std::uint32_t> maximal_suffix_start(std::span<const TokenId> pattern,
                                                  std::span<const TokenId> events);

/// S|pattern built trace by trace from maximal_suffix_start, without recursion.
ProjectedDatabase project_direct(const TraceGroup& group, const Pattern& pattern);

/// The epsilon-projected database: every trace from its first event.
ProjectedDatabase root_database(const TraceGroup& group);

/// Projects on `next_event`, cutting each suffix after its first occurrence.
ProjectedDatabase project_database(const ProjectedDatabase& db, TokenId next_event,
                                   const TraceGroup& group);

ProjectedDatabase project_database(const TraceGroup& group, TokenId next_event);

/// Prefix-projected mining with first-level subtrees distributed over OpenMP threads.
/// Output is canonically ordered and independent of the worker count.
std::vector<MinedPattern> extract_patterns(const TraceGroup& group, const MiningParams& params);

/// Serial reference: literal recursive projection over materialized databases.
std::vector<MinedPattern> extract_patterns_reference(const TraceGroup& group,
                                                     const MiningParams& params);

inline constexpr double kBruteForceLimit = 1e6;

/// Test oracle: enumerates every sequence over the vocabulary up to max_len.
/// Throws if |E|^max_len exceeds kBruteForceLimit.
std::vector<MinedPattern> brute_force_patterns(const TraceGroup& group, const MiningParams& params);

/// Support counts of many patterns in one group (used for control-group recounts).
std::vector<std::vector<TraceIndex>> count_supports(std::span<const Pattern> patterns,
                                                    const TraceGroup& group, int workers = 0);

/// Serial reference for count_supports: one subsequence scan per pattern per trace.
std::vector<std::vector<TraceIndex>> count_supports_reference(std::span<const Pattern> patterns,
                                                              const TraceGroup& group);

}  // namespace rca
