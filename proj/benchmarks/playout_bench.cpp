#include <benchmark/benchmark.h>

#include "avatar/petri.hpp"
#include "avatar/systems.hpp"

namespace {

avatar::PetriNet system_at_depth(int depth) {
  avatar::SystemSpec spec;
  spec.seed = 6;
  spec.depth = depth;
  spec.weight_and = 0.0;
  return avatar::build_system(spec);
}

void BM_PlayoutEnumerate(benchmark::State& state) {
  const auto net = system_at_depth(static_cast<int>(state.range(0)));
  const avatar::PlayoutOptions options{12, 3, 50'000'000};
  std::size_t variants = 0;
  for (auto _ : state) {
    auto result = avatar::playout_enumerate(net, options);
    variants = result.variants.size();
    benchmark::DoNotOptimize(result);
  }
  state.counters["variants"] = static_cast<double>(variants);
}
BENCHMARK(BM_PlayoutEnumerate)->DenseRange(2, 4)->Unit(benchmark::kMillisecond);

void BM_FlowerLanguageCount(benchmark::State& state) {
  std::set<avatar::Label> alphabet;
  for (int i = 0; i < state.range(0); ++i) alphabet.insert("a" + std::to_string(i));
  const auto flower = avatar::flower_model(alphabet);
  for (auto _ : state) {
    avatar::PlayoutLanguage language(flower, 3);
    benchmark::DoNotOptimize(language.count(10));
  }
}
BENCHMARK(BM_FlowerLanguageCount)->Arg(4)->Arg(12);

}  // namespace
