#pragma once

#include <memory>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "rca/pattern_miner.hpp"
#include "rca/trace_store.hpp"

namespace rca_test {

using Labeled = std::vector<std::pair<std::string, std::vector<std::string>>>;

inline const Labeled kExampleTest = {
    {"t1", {"e1", "e2", "e3", "e4"}},
    {"t2", {"e1", "e2", "e3"}},
    {"t3", {"e2", "e3"}},
    {"t4", {"e5", "e6", "e7", "e8"}},
    {"t5", {"e5", "e7"}},
};

inline const Labeled kExampleControl = {
    {"t6", {"e1", "e2", "e4"}},
    {"t7", {"e1", "e3", "e4"}},
    {"t8", {"e1", "e3"}},
    {"t9", {"e6", "e7"}},
    {"t10", {"e5", "e6", "e8"}},
};

struct ExampleGroups {
  std::shared_ptr<rca::Vocabulary> vocab = std::make_shared<rca::Vocabulary>();
  rca::TraceGroup test;
  rca::TraceGroup control;

  ExampleGroups() {
    test = rca::make_group(rca::GroupRole::test, vocab, kExampleTest);
    control = rca::make_group(rca::GroupRole::control, vocab, kExampleControl);
  }

  rca::Pattern pattern(const std::vector<std::string>& labels) const {
    rca::Pattern p;
    for (const auto& l : labels) p.push_back(*vocab->find(l));
    return p;
  }
};

/// Random group over a vocabulary of `vocab_size` events named a, b, c, ...
inline rca::TraceGroup random_group(std::mt19937_64& rng, std::shared_ptr<rca::Vocabulary> vocab,
                                    std::size_t vocab_size, std::size_t max_traces, std::size_t max_length,
                                    rca::GroupRole role = rca::GroupRole::test) {
  std::uniform_int_distribution<std::size_t> n_traces(0, max_traces);
  std::uniform_int_distribution<std::size_t> length(1, max_length);
  std::uniform_int_distribution<std::size_t> event(0, vocab_size - 1);
  for (std::size_t e = 0; e < vocab_size; ++e) vocab->intern(std::string(1, static_cast<char>('a' + e)));
  Labeled traces;
  const std::size_t n = n_traces(rng);
  for (std::size_t i = 0; i < n; ++i) {
    std::vector<std::string> events;
    const std::size_t len = length(rng);
    for (std::size_t k = 0; k < len; ++k) events.emplace_back(1, static_cast<char>('a' + event(rng)));
    traces.emplace_back((role == rca::GroupRole::test ? "t" : "c") + std::to_string(i), std::move(events));
  }
  return rca::make_group(role, vocab, traces);
}

}  // namespace rca_test
