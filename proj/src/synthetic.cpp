#include "rca/synthetic.hpp"

#include <algorithm>
#include <cstdio>
#include <random>
#include <stdexcept>

namespace rca {

namespace {

std::vector<std::string> make_trace(std::mt19937_64& rng, const CorpusSpec& spec,
                                    const std::vector<std::string>* signal) {
  const std::size_t lo = std::max<std::size_t>(1, spec.median_length / 2);
  const std::size_t hi = std::max(lo, spec.median_length + spec.median_length / 2);
  std::uniform_int_distribution<std::size_t> length(lo, hi);
  std::uniform_int_distribution<std::size_t> event(0, spec.vocab_size - 1);

  std::vector<std::string> events;
  const std::size_t n = length(rng);
  events.reserve(n + (signal ? signal->size() : 0));
  for (std::size_t i = 0; i < n; ++i) events.push_back(spec.noise_prefix + std::to_string(event(rng)));

  if (signal) {
    // Insert signal events at sorted random positions so their order is preserved.
    std::uniform_int_distribution<std::size_t> pos(0, n);
    std::vector<std::size_t> at(signal->size());
    for (auto& p : at) p = pos(rng);
    std::sort(at.begin(), at.end());
    for (std::size_t k = signal->size(); k-- > 0;)
      events.insert(events.begin() + static_cast<std::ptrdiff_t>(at[k]), (*signal)[k]);
  }
  return events;
}

std::vector<TraceRecord> make_group(std::mt19937_64& rng, const CorpusSpec& spec, const std::string& id_prefix,
                                    double plant_fraction, const std::vector<std::vector<std::string>>& signals) {
  std::bernoulli_distribution plant(plant_fraction);
  std::uniform_int_distribution<std::size_t> which(0, signals.empty() ? 0 : signals.size() - 1);
  std::vector<TraceRecord> records;
  records.reserve(spec.traces_per_group);
  for (std::size_t i = 0; i < spec.traces_per_group; ++i) {
    const std::vector<std::string>* signal = nullptr;
    if (!signals.empty() && plant(rng)) signal = &signals[which(rng)];
    TraceRecord rec;
    rec.line = i + 1;
    rec.id = id_prefix + std::to_string(i);
    for (auto& e : make_trace(rng, spec, signal)) rec.events.emplace_back(std::move(e));
    records.push_back(std::move(rec));
  }
  return records;
}

}  // namespace

SyntheticCorpus generate_corpus(const CorpusSpec& spec) {
  if (spec.vocab_size == 0 || spec.median_length == 0)
    throw std::invalid_argument("generate_corpus: vocabulary and length must be positive");
  std::mt19937_64 rng(spec.seed);
  SyntheticCorpus corpus;
  for (std::size_t s = 0; s < spec.signal_patterns; ++s) {
    std::vector<std::string> signal;
    for (std::size_t k = 0; k < spec.signal_length; ++k)
      signal.push_back(spec.signal_prefix + std::to_string(s) + "_" + std::to_string(k));
    corpus.signals.push_back(std::move(signal));
  }
  corpus.test = make_group(rng, spec, "T", spec.test_plant_fraction, corpus.signals);
  corpus.control = make_group(rng, spec, "C", spec.control_plant_fraction, corpus.signals);
  return corpus;
}

BenchPreset bench_preset(std::string_view name) {
  if (name == "easy") return {"easy", 3000, 20, 0.05};
  if (name == "medium") return {"medium", 10000, 40, 0.0275};
  throw std::invalid_argument("unknown bench preset: " + std::string(name));
}

std::vector<SyntheticRegression> generate_regression_suite(const RegressionSuiteSpec& spec) {
  std::vector<SyntheticRegression> out;
  std::size_t n = 0;
  for (std::size_t g = 0; g < spec.groups; ++g) {
    for (std::size_t k = 0; k < spec.per_group; ++k, ++n) {
      CorpusSpec cs;
      cs.traces_per_group = spec.traces_per_group;
      cs.median_length = spec.median_length;
      cs.vocab_size = spec.noise_vocab;
      cs.signal_patterns = 1;
      cs.signal_length = 3;
      cs.test_plant_fraction = spec.planted_support;
      cs.control_plant_fraction = 0.0;
      cs.signal_prefix = "root" + std::to_string(g) + "_";
      cs.seed = spec.seed * 1000003u + n;
      SyntheticRegression r;
      char id[32];
      std::snprintf(id, sizeof id, "reg%03zu", n);
      r.id = id;
      r.planted_group = g;
      r.corpus = generate_corpus(cs);
      out.push_back(std::move(r));
    }
  }
  return out;
}

}  // namespace rca
