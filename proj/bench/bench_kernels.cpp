// Serial vs OpenMP term-key kernels on the running example.
#include "dynpred/enumeration.hpp"

#include <benchmark/benchmark.h>

using namespace dynpred;

namespace {

const TermEvaluator& evaluator() {
    static const TermEvaluator ev(Recurrence::make({6, -13, 10}, {2, 4, 7}));
    return ev;
}

// args: block start, block length
void BM_block_serial(benchmark::State& st) {
    const auto& ev = evaluator();
    std::uint64_t lo = static_cast<std::uint64_t>(st.range(0)), len = static_cast<std::uint64_t>(st.range(1));
    std::vector<TermKey> out;
    for (auto _ : st) {
        ev.block_serial(lo, lo + len, out);
        benchmark::DoNotOptimize(out.data());
    }
    st.SetItemsProcessed(static_cast<std::int64_t>(st.iterations() * len));
}

void BM_block_parallel(benchmark::State& st) {
    const auto& ev = evaluator();
    std::uint64_t lo = static_cast<std::uint64_t>(st.range(0)), len = static_cast<std::uint64_t>(st.range(1));
    std::vector<TermKey> out;
    for (auto _ : st) {
        ev.block_parallel(lo, lo + len, out);
        benchmark::DoNotOptimize(out.data());
    }
    st.SetItemsProcessed(static_cast<std::int64_t>(st.iterations() * len));
}

}  // namespace

BENCHMARK(BM_block_serial)->Args({1000, 1 << 16})->Args({10000000, 1 << 16})->Unit(benchmark::kMillisecond);
BENCHMARK(BM_block_parallel)->Args({1000, 1 << 16})->Args({10000000, 1 << 16})->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
