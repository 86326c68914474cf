// Serial against OpenMP-parallel kernels: the branch fan-out of one
// compression step and the brute-force oracle.

#include <benchmark/benchmark.h>

#include "optdisc/geometry.hpp"
#include "optdisc/oracle.hpp"
#include "optdisc/pipeline.hpp"

using namespace optdisc;

namespace {

struct CompressCase {
    Instance inst;
    Separation start;
    int k = 0;
};

// Planted 3x2 grid; the start is an optimum plus one redundant line, so
// compression has to rediscover a solution of the optimal size.
const CompressCase& compress_case() {
    static const CompressCase c = [] {
        CompressCase c;
        c.inst = normalize(generate_planted(5, 2, 2, 3)).inst;
        c.start = min_separation_bruteforce(c.inst);
        c.k = c.start.size();
        c.start.xs.push_back(c.start.xs.empty() ? 2 : c.start.xs.back() + 3);
        c.start.normalize_order();
        return c;
    }();
    return c;
}

void BM_CompressFanOut(benchmark::State& state) {
    const auto& c = compress_case();
    SolveOptions o;
    o.jobs = static_cast<int>(state.range(0));
    for (auto _ : state) benchmark::DoNotOptimize(compress(c.inst, c.start, c.k, o));
    state.SetLabel(o.jobs == 1 ? "serial" : "parallel");
}
BENCHMARK(BM_CompressFanOut)->Arg(1)->Arg(2)->Arg(4)->Unit(benchmark::kMillisecond)->UseRealTime();

const Instance& brute_case() {
    static const Instance inst = normalize(generate_random(11, 18, 18)).inst;
    return inst;
}

void BM_BruteForceSerial(benchmark::State& state) {
    for (auto _ : state) benchmark::DoNotOptimize(min_separation_bruteforce(brute_case()));
}
BENCHMARK(BM_BruteForceSerial)->Unit(benchmark::kMillisecond)->UseRealTime();

void BM_BruteForceParallel(benchmark::State& state) {
    for (auto _ : state) benchmark::DoNotOptimize(min_separation_bruteforce_parallel(brute_case()));
}
BENCHMARK(BM_BruteForceParallel)->Unit(benchmark::kMillisecond)->UseRealTime();

}  // namespace

BENCHMARK_MAIN();
