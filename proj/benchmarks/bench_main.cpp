#include <benchmark/benchmark.h>

#include "dbb/arrival.hpp"
#include "dbb/dynamics.hpp"
#include "dbb/packet.hpp"
#include "dbb/special.hpp"

using namespace dbb;

namespace {

const GaussianPacket& packet() {
    static const GaussianPacket pk(PacketSpec{AngularMomentum(5), 1e-4, 1e-7});
    return pk;
}

void BM_BesselPair(benchmark::State& st) {
    const double x = static_cast<double>(st.range(0));
    for (auto _ : st) {
        benchmark::DoNotOptimize(special::bessel_j_pair(2, x));
    }
}
BENCHMARK(BM_BesselPair)->Arg(1)->Arg(30)->Arg(300)->Arg(30000);

void BM_FieldSample(benchmark::State& st) {
    const auto& pk = packet();
    double t = 0.0;
    for (auto _ : st) {
        benchmark::DoNotOptimize(pk.field_sample(22.7, t));
        t += 1e-7;
    }
}
BENCHMARK(BM_FieldSample);

void BM_SliceSample(benchmark::State& st) {
    const auto slice = packet().slice(30.0);
    double t = 0.0;
    for (auto _ : st) {
        benchmark::DoNotOptimize(slice.field_sample(t));
        t += 1e-7;
    }
}
BENCHMARK(BM_SliceSample);

void BM_Integrate(benchmark::State& st) {
    for (auto _ : st) {
        benchmark::DoNotOptimize(integrate(packet(), 22.7, 1e-3, {.n_samples = 100}));
    }
}
BENCHMARK(BM_Integrate)->Unit(benchmark::kMillisecond);

void BM_TimeOfFlight(benchmark::State& st) {
    for (auto _ : st) {
        benchmark::DoNotOptimize(time_of_flight(packet(), 22.7, {30.0}, 0.1));
    }
}
BENCHMARK(BM_TimeOfFlight)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
