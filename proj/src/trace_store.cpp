#include "rca/trace_store.hpp"

#include <cmath>
#include <istream>
#include <ostream>
#include <unordered_set>

#include <json.hpp>

#include "rca/discretize.hpp"

namespace rca {

using ordered_json = nlohmann::ordered_json;

EventToken Vocabulary::intern(std::string_view label) {
  if (label.empty()) throw std::invalid_argument("intern: empty event label");
  std::string key(label);
  if (auto it = lookup_.find(key); it != lookup_.end()) return {it->second, key};
  const auto id = static_cast<TokenId>(entries_.size());
  entries_.push_back(key);
  lookup_.emplace(key, id);
  return {id, std::move(key)};
}

std::optional<TokenId> Vocabulary::find(std::string_view label) const {
  if (auto it = lookup_.find(std::string(label)); it != lookup_.end()) return it->second;
  return std::nullopt;
}

EventToken intern(std::string_view label, Vocabulary& vocab) { return vocab.intern(label); }

std::string_view to_string(GroupRole role) {
  return role == GroupRole::test ? "test" : "control";
}

GroupRole parse_group_role(std::string_view text) {
  if (text == "test") return GroupRole::test;
  if (text == "control") return GroupRole::control;
  throw std::invalid_argument("unknown group role: " + std::string(text));
}

IngestError::IngestError(std::size_t line, const std::string& what)
    : std::runtime_error("line " + std::to_string(line) + ": " + what), line_(line) {}

namespace {

std::string meta_value_text(const ordered_json& v) {
  if (v.is_string()) return v.get<std::string>();
  return v.dump();
}

TraceRecord parse_record(const std::string& text, std::size_t line) {
  ordered_json j;
  try {
    j = ordered_json::parse(text);
  } catch (const ordered_json::parse_error& e) {
    throw IngestError(line, std::string("malformed JSON: ") + e.what());
  }
  if (!j.is_object()) throw IngestError(line, "record is not a JSON object");

  TraceRecord rec;
  rec.line = line;
  auto id = j.find("id");
  if (id == j.end() || !id->is_string() || id->get<std::string>().empty())
    throw IngestError(line, "missing or empty string field \"id\"");
  rec.id = id->get<std::string>();

  auto events = j.find("events");
  if (events == j.end() || !events->is_array())
    throw IngestError(line, "missing array field \"events\"");
  for (const auto& ev : *events) {
    if (ev.is_string()) {
      auto label = ev.get<std::string>();
      if (label.empty()) throw IngestError(line, "empty event label");
      rec.events.emplace_back(std::move(label));
    } else if (ev.is_object()) {
      auto name = ev.find("name");
      auto value = ev.find("value");
      if (name == ev.end() || !name->is_string() || name->get<std::string>().empty())
        throw IngestError(line, "numeric event without string \"name\"");
      if (value == ev.end() || !value->is_number())
        throw IngestError(line, "numeric event without numeric \"value\"");
      double v = value->get<double>();
      if (!std::isfinite(v)) throw IngestError(line, "non-finite numeric value");
      rec.events.emplace_back(NumericEvent{name->get<std::string>(), v});
    } else {
      throw IngestError(line, "event must be a string or {name, value} object");
    }
  }

  if (auto meta = j.find("meta"); meta != j.end() && !meta->is_null()) {
    if (!meta->is_object()) throw IngestError(line, "\"meta\" must be an object");
    for (const auto& [key, value] : meta->items())
      rec.meta.emplace_back(key, meta_value_text(value));
  }
  return rec;
}

}  // namespace

std::vector<TraceRecord> parse_records(std::istream& source) {
  std::vector<TraceRecord> records;
  std::string text;
  std::size_t line = 0;
  while (std::getline(source, text)) {
    ++line;
    if (text.find_first_not_of(" \t\r") == std::string::npos) continue;
    records.push_back(parse_record(text, line));
  }
  return records;
}

std::map<std::string, std::vector<double>> collect_numeric_values(
    const std::vector<TraceRecord>& records) {
  std::map<std::string, std::vector<double>> values;
  for (const auto& rec : records)
    for (const auto& ev : rec.events)
      if (const auto* num = std::get_if<NumericEvent>(&ev)) values[num->name].push_back(num->value);
  return values;
}

TraceGroup ingest_records(const std::vector<TraceRecord>& records, GroupRole role,
                          std::shared_ptr<Vocabulary> vocab, const BinningSpecs* numeric_specs) {
  if (!vocab) throw std::invalid_argument("ingest: null vocabulary");
  TraceGroup group;
  group.role = role;
  group.vocab = vocab;
  std::unordered_set<std::string> seen;

  for (const auto& rec : records) {
    if (!seen.insert(rec.id).second)
      throw IngestError(rec.line, "duplicate trace id \"" + rec.id + "\" in " +
                                      std::string(to_string(role)) + " group");
    Trace trace;
    trace.trace_id = rec.id;
    trace.events.reserve(rec.meta.size() + rec.events.size());
    for (const auto& [key, value] : rec.meta)
      trace.events.push_back(vocab->intern(key + "=" + value).id);
    for (const auto& ev : rec.events) {
      if (const auto* label = std::get_if<std::string>(&ev)) {
        trace.events.push_back(vocab->intern(*label).id);
        continue;
      }
      const auto& num = std::get<NumericEvent>(ev);
      const BinningSpec* spec = nullptr;
      if (numeric_specs) {
        if (auto it = numeric_specs->find(num.name); it != numeric_specs->end()) spec = &it->second;
      }
      if (!spec) throw IngestError(rec.line, "no binning spec for numeric feature \"" + num.name + "\"");
      trace.events.push_back(vocab->intern(apply_binning(num.value, *spec)).id);
    }
    if (trace.events.empty()) {
      ++group.rejected_records;
      continue;
    }
    group.traces.push_back(std::move(trace));
  }
  return group;
}

TraceGroup ingest_traces(std::istream& source, GroupRole role, std::shared_ptr<Vocabulary> vocab,
                         const BinningSpecs* numeric_specs) {
  return ingest_records(parse_records(source), role, std::move(vocab), numeric_specs);
}

void write_traces(std::ostream& out, const TraceGroup& group) {
  for (const auto& trace : group.traces) {
    ordered_json j;
    j["id"] = trace.trace_id;
    auto& events = j["events"] = ordered_json::array();
    for (TokenId t : trace.events) events.push_back(group.vocab->label(t));
    out << j.dump() << '\n';
  }
}

TraceGroup make_group(GroupRole role, std::shared_ptr<Vocabulary> vocab,
                      const std::vector<std::pair<std::string, std::vector<std::string>>>& traces) {
  std::vector<TraceRecord> records;
  std::size_t line = 0;
  for (const auto& [id, labels] : traces) {
    TraceRecord rec;
    rec.line = ++line;
    rec.id = id;
    for (const auto& l : labels) rec.events.emplace_back(l);
    records.push_back(std::move(rec));
  }
  return ingest_records(records, role, std::move(vocab));
}

}  // namespace rca
