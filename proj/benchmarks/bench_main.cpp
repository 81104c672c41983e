#include <benchmark/benchmark.h>

#include <string>

#include "orbitsphere/dynamics.hpp"
#include "orbitsphere/sphere_quotient.hpp"

using namespace orbitsphere;

namespace {

FlowSpec spec(const char* name) { return load_flowspec(std::string(ORBITSPHERE_SPEC_DIR) + "/" + name); }

CircleApprox circle(FlowModel& M, int depth) {
    M.cover().build_ball(depth + 2);
    CircleBuilder b(M.leaves());
    b.add_ball_seeds(M.cover().base(), depth);
    return b.build();
}

void BM_ParseValidate(benchmark::State& state) {
    std::string text = serialize(spec("pa_sing.flowspec"));
    for (auto _ : state) benchmark::DoNotOptimize(validate(parse_flowspec(text)));
}
BENCHMARK(BM_ParseValidate);

void BM_CoverBall(benchmark::State& state) {
    FlowSpec s = spec("pa_sing.flowspec");
    Surface S = Surface::from_spec(s);
    for (auto _ : state) {
        Cover C(S);
        C.build_ball(static_cast<int>(state.range(0)));
        benchmark::DoNotOptimize(C.size());
    }
}
BENCHMARK(BM_CoverBall)->DenseRange(3, 6)->Unit(benchmark::kMillisecond);

void BM_CircleBuild(benchmark::State& state) {
    FlowModel M(spec("pa_sing.flowspec"));
    int depth = static_cast<int>(state.range(0));
    M.cover().build_ball(depth + 2);
    for (auto _ : state) benchmark::DoNotOptimize(circle(M, depth).size());
}
BENCHMARK(BM_CircleBuild)->DenseRange(2, 4)->Unit(benchmark::kMillisecond);

void BM_Quotient(benchmark::State& state) {
    FlowModel M(spec("pa_sing.flowspec"));
    CircleApprox c = circle(M, static_cast<int>(state.range(0)));
    for (auto _ : state) benchmark::DoNotOptimize(build_quotient(gluing_pairs(c)).euler);
    state.counters["circle"] = static_cast<double>(c.size());
}
BENCHMARK(BM_Quotient)->DenseRange(2, 4)->Unit(benchmark::kMillisecond);

void BM_FixedPoints(benchmark::State& state) {
    FlowModel M(spec("pa_sing.flowspec"));
    GroupElem t = parse_element(M, "t");
    for (auto _ : state) benchmark::DoNotOptimize(fixed_points_on_circle(M, t, 3).ends.size());
}
BENCHMARK(BM_FixedPoints)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
