#include <benchmark/benchmark.h>

#include "sbck/compliance.hpp"
#include "sbck/testkit.hpp"

using namespace sbck;

namespace {

constexpr const char* kGardenClient = "^(sea.house.garden + house.garden)";
constexpr const char* kGardenServer = "^(!sea.^(!house.!garden) (+) !house.!garden)";
constexpr const char* kNested = "rec x. ^(a.x + b.rec y. ^(c.y + d.x))";

// Client behaviours from the generator paired with their duals.
std::vector<testkit::Pair> generated(unsigned depth) {
  testkit::GenParams p;
  p.seed = 99;
  p.max_depth = depth;
  testkit::Rng rng(p.seed);
  std::vector<testkit::Pair> out;
  for (int i = 0; i < 64; ++i) {
    WellFormedBehaviour c = testkit::gen_behaviour(p, rng);
    out.push_back({c, dual(c)});
  }
  return out;
}

void BM_Parse(benchmark::State& state) {
  std::string text = render(dual(parse(kNested)).term());
  for (auto _ : state) benchmark::DoNotOptimize(parse(text));
}
BENCHMARK(BM_Parse);

void BM_StateClosure(benchmark::State& state) {
  auto pairs = generated(static_cast<unsigned>(state.range(0)));
  for (auto _ : state) {
    for (const auto& p : pairs) benchmark::DoNotOptimize(state_closure(p.client).size());
  }
}
BENCHMARK(BM_StateClosure)->Arg(3)->Arg(6);

void BM_AxiomaticGarden(benchmark::State& state) {
  auto c = parse(kGardenClient);
  auto s = parse(kGardenServer);
  for (auto _ : state) benchmark::DoNotOptimize(check_axiomatic(c, s).compliant);
}
BENCHMARK(BM_AxiomaticGarden);

void BM_OracleGarden(benchmark::State& state) {
  auto c = parse(kGardenClient);
  auto s = parse(kGardenServer);
  for (auto _ : state) benchmark::DoNotOptimize(check_gfp_oracle(c, s).compliant);
}
BENCHMARK(BM_OracleGarden);

void BM_AxiomaticDuals(benchmark::State& state) {
  auto pairs = generated(static_cast<unsigned>(state.range(0)));
  for (auto _ : state) {
    for (const auto& p : pairs) benchmark::DoNotOptimize(check_axiomatic(p.client, p.server).compliant);
  }
}
BENCHMARK(BM_AxiomaticDuals)->Arg(3)->Arg(5);

void BM_OracleDuals(benchmark::State& state) {
  auto pairs = generated(static_cast<unsigned>(state.range(0)));
  for (auto _ : state) {
    for (const auto& p : pairs) benchmark::DoNotOptimize(check_gfp_oracle(p.client, p.server).compliant);
  }
}
BENCHMARK(BM_OracleDuals)->Arg(3)->Arg(5);

void BM_VerifyDerivation(benchmark::State& state) {
  auto c = parse(kNested);
  Verdict v = check_axiomatic(c, dual(c));
  for (auto _ : state) benchmark::DoNotOptimize(verify_derivation(**v.derivation()).ok);
}
BENCHMARK(BM_VerifyDerivation);

}  // namespace
BENCHMARK_MAIN();
