#include <benchmark/benchmark.h>

#include <random>

#include "pol/bts.hpp"
#include "pol/dpdl.hpp"
#include "pol/filtration.hpp"
#include "pol/io.hpp"
#include "pol/lowerbound.hpp"
#include "pol/model.hpp"

using namespace pol;

namespace {

std::string data(const char* name) { return std::string(POL_DATA_DIR) + "/" + name; }

void BM_Residuate(benchmark::State& st) {
  const auto r = parse_regex("b*;a;a;(a+b)*");
  Word w;
  for (int k = 0; k < st.range(0); ++k) w.push_back(k % 3 ? "a" : "b");
  for (auto _ : st) benchmark::DoNotOptimize(residuate(r, w));
}
BENCHMARK(BM_Residuate)->RangeMultiplier(4)->Range(1, 256);

void BM_LanguageEquivalence(benchmark::State& st) {
  const auto a = parse_regex("(a+b)*;a;(a+b);(a+b)"), b = parse_regex("(a+b)*;a;(a+b)*;(a+b);(a+b)");
  for (auto _ : st) benchmark::DoNotOptimize(language_equivalent(a, b));
}
BENCHMARK(BM_LanguageEquivalence);

void BM_CheckDrone(benchmark::State& st) {
  const auto m = model_from_json(read_file(data("drone.json")));
  const auto f = parse_formula("[s*;p*]~(K_d T1 | K_d ~T1) & <s*;p*;c> K_d T1");
  for (auto _ : st) benchmark::DoNotOptimize(check(m, "u", f));
}
BENCHMARK(BM_CheckDrone);

RandomModelShape shape(std::size_t states) {
  RandomModelShape sh;
  sh.min_states = sh.max_states = states;
  sh.agents = {"i", "j"};
  sh.props = {"p", "q"};
  sh.alphabet = Alphabet({"a", "b"});
  sh.pool = default_regex_pool(sh.alphabet, 8);
  return sh;
}

void BM_Filtrate(benchmark::State& st) {
  std::mt19937_64 rng(9);
  const auto m = random_model(rng, shape(std::size_t(st.range(0))));
  const auto f = parse_formula("K_i <a*>p & hK_j [b]q");
  for (auto _ : st) benchmark::DoNotOptimize(filtrate(m, f));
}
BENCHMARK(BM_Filtrate)->DenseRange(2, 10, 4);

void BM_ExtractTwoBubbles(benchmark::State& st) {
  const auto t = bts_from_json(read_file(data("two_bubbles.json")));
  for (auto _ : st) benchmark::DoNotOptimize(extract_model(t));
}
BENCHMARK(BM_ExtractTwoBubbles);

void BM_DpdlSat(benchmark::State& st) {
  const auto f = parse_formula("[a*]<a*>p & [a*]<a*>~p & [a*]<a>true & <b>[a*]q");
  for (auto _ : st) benchmark::DoNotOptimize(dpdl_sat(f));
}
BENCHMARK(BM_DpdlSat)->Unit(benchmark::kMillisecond);

void BM_PolSatLabels(benchmark::State& st) {
  const auto f = parse_formula("hK_i p & ~p & [a]~true");
  for (auto _ : st) benchmark::DoNotOptimize(pol_sat(f, LabelBudget::of(std::uint64_t(st.range(0)))));
}
BENCHMARK(BM_PolSatLabels)->DenseRange(1, 3)->Unit(benchmark::kMillisecond);

void BM_PolSatFullUnsat(benchmark::State& st) {
  const auto f = parse_formula("~p & <a>p");
  for (auto _ : st) benchmark::DoNotOptimize(pol_sat(f, LabelBudget::full_for(f)));
}
BENCHMARK(BM_PolSatFullUnsat)->Unit(benchmark::kMillisecond);

void BM_Translate(benchmark::State& st) {
  const auto f = parse_formula("hK_i <a>p & K_j [b*]q");
  for (auto _ : st) benchmark::DoNotOptimize(translate(f, LabelBudget::of(std::uint64_t(st.range(0)))));
}
BENCHMARK(BM_Translate)->RangeMultiplier(2)->Range(1, 16)->Unit(benchmark::kMillisecond);

void BM_GenerateHardness(benchmark::State& st) {
  const auto m = atm_from_json(read_file(data("toy_atm.json")));
  std::string x;
  for (int k = 0; k < st.range(0); ++k) x += k % 2 ? "1" : "0";
  for (auto _ : st) benchmark::DoNotOptimize(generate(m, x));
  st.counters["nodes"] = double(generate(m, x).size());
}
BENCHMARK(BM_GenerateHardness)->DenseRange(1, 6)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
