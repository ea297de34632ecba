#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <map>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <unordered_map>
#include <variant>
#include <vector>

namespace rca {

struct BinningSpec;

using TokenId = std::uint32_t;

struct EventToken {
  TokenId id = 0;
  std::string label;

  friend bool operator==(const EventToken&, const EventToken&) = default;
};

/// Interned event labels. Ids are dense and never reassigned.
class Vocabulary {
 public:
  /// Returns the token for `label`, appending it if unseen. Throws on an empty label.
  EventToken intern(std::string_view label);

  std::optional<TokenId> find(std::string_view label) const;
  const std::string& label(TokenId id) const { return entries_.at(id); }
  std::size_t size() const { return entries_.size(); }
  const std::vector<std::string>& entries() const { return entries_; }

 private:
  std::vector<std::string> entries_;
  std::unordered_map<std::string, TokenId> lookup_;
};

/// Free-function form of Vocabulary::intern.
EventToken intern(std::string_view label, Vocabulary& vocab);

enum class GroupRole { test, control };

std::string_view to_string(GroupRole role);
GroupRole parse_group_role(std::string_view text);

struct Trace {
  std::string trace_id;
  std::vector<TokenId> events;
};

struct TraceGroup {
  GroupRole role = GroupRole::test;
  std::vector<Trace> traces;
  std::shared_ptr<Vocabulary> vocab;
  /// Records dropped because they held no events.
  std::size_t rejected_records = 0;

  std::size_t size() const { return traces.size(); }
  bool empty() const { return traces.empty(); }
};

/// Raw numeric event before discretization.
struct NumericEvent {
  std::string name;
  double value = 0.0;

  friend bool operator==(const NumericEvent&, const NumericEvent&) = default;
};

using RawEvent = std::variant<std::string, NumericEvent>;

/// One parsed JSON Lines record, prior to interning.
struct TraceRecord {
  std::size_t line = 0;
  std::string id;
  std::vector<RawEvent> events;
  /// Metadata pairs in record order.
  std::vector<std::pair<std::string, std::string>> meta;
};

class IngestError : public std::runtime_error {
 public:
  IngestError(std::size_t line, const std::string& what);
  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

using BinningSpecs = std::map<std::string, BinningSpec>;

/// Parses JSON Lines trace records. Blank lines are skipped.
std::vector<TraceRecord> parse_records(std::istream& source);

/// All numeric values per feature name, in encounter order.
std::map<std::string, std::vector<double>> collect_numeric_values(
    const std::vector<TraceRecord>& records);

/// Interns parsed records into a group. Metadata becomes `key=value` events
/// prepended to the trace; numeric events are replaced by their bin label.
TraceGroup ingest_records(const std::vector<TraceRecord>& records, GroupRole role,
                          std::shared_ptr<Vocabulary> vocab,
                          const BinningSpecs* numeric_specs = nullptr);

TraceGroup ingest_traces(std::istream& source, GroupRole role, std::shared_ptr<Vocabulary> vocab,
                         const BinningSpecs* numeric_specs = nullptr);

/// Writes the group back as JSON Lines with plain string labels.
void write_traces(std::ostream& out, const TraceGroup& group);

/// Builds a group from in-memory label sequences; used by tests and the generator.
TraceGroup make_group(GroupRole role, std::shared_ptr<Vocabulary> vocab,
                      const std::vector<std::pair<std::string, std::vector<std::string>>>& traces);

}  // namespace rca
