#include <benchmark/benchmark.h>

#include "iotmonitor/attack_sim.hpp"
#include "iotmonitor/harness.hpp"
#include "iotmonitor/hmm.hpp"
#include "iotmonitor/trace.hpp"

using namespace iotmonitor;

namespace {

// A chain of `states` events, each with its own evidence, repeated 20 times.
EncodedSequence chain_sequence(std::size_t states) {
  ChainSpec spec;
  for (std::size_t i = 0; i < states; ++i) {
    const std::string label = "device-" + std::to_string(i);
    spec.device_events.push_back(label);
    spec.evidence_map[label] = {{"evidence-" + std::to_string(i), 20, 1.0}};
  }
  spec.repetitions = 20;
  const SimulatedTrace sim = generate(spec);
  return build_alphabet(extract_verified(sim.records.events, sim.records.evidence, {105}));
}

HmmModel seeded_model(const EncodedSequence& seq) {
  return init_model(seq.states, seq.alphabet, 42);
}

void BM_ForwardBackward(benchmark::State& state) {
  const EncodedSequence seq = chain_sequence(static_cast<std::size_t>(state.range(0)));
  const HmmModel model = seeded_model(seq);
  for (auto _ : state) benchmark::DoNotOptimize(forward_backward(model, seq.observations));
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(seq.observations.size()));
}

void BM_Train(benchmark::State& state) {
  const EncodedSequence seq = chain_sequence(static_cast<std::size_t>(state.range(0)));
  const HmmModel model = seeded_model(seq);
  for (auto _ : state) benchmark::DoNotOptimize(train(model, seq.observations));
}

void BM_Viterbi(benchmark::State& state) {
  const EncodedSequence seq = chain_sequence(static_cast<std::size_t>(state.range(0)));
  const HmmModel model = train(seeded_model(seq), seq.observations).model;
  for (auto _ : state) benchmark::DoNotOptimize(viterbi(model, seq.observations));
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(seq.observations.size()));
}

void BM_Pipeline(benchmark::State& state) {
  const SimulatedTrace sim = generate(default_chain_spec());
  const VerifiedSequence v = extract_verified(sim.records.events, sim.records.evidence, {105});
  for (auto _ : state) benchmark::DoNotOptimize(run_pipeline(v, {}));
}

}  // namespace

BENCHMARK(BM_ForwardBackward)->Arg(5)->Arg(10)->Arg(20);
BENCHMARK(BM_Train)->Arg(5)->Arg(10)->Arg(20)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_Viterbi)->Arg(5)->Arg(10)->Arg(20);
BENCHMARK(BM_Pipeline)->Unit(benchmark::kMillisecond);
BENCHMARK_MAIN();
