#include <benchmark/benchmark.h>

#include "jgecert/kernels.hpp"

using namespace jgecert;

namespace {

struct Inputs {
  Tensor3 t;
  FactorTriple f;
  Matrix m;
};

Inputs make_inputs(Index n) {
  SeededRng rng(42);
  Inputs in{random_normal_tensor(rng, {n, n, n}), {}, rng.normal_matrix(n, n)};
  in.f = {rng.normal_matrix(n, 8), rng.normal_matrix(n, 8), rng.normal_matrix(n, 8)};
  return in;
}

template <bool Parallel>
void BM_ModalProduct(benchmark::State& state) {
  const Inputs in = make_inputs(state.range(0));
  for (auto _ : state) {
    for (int mode = 1; mode <= 3; ++mode) {
      Tensor3 out = Parallel ? kernels::modal_product(in.t, in.m, mode)
                             : kernels::reference::modal_product(in.t, in.m, mode);
      benchmark::DoNotOptimize(out.data());
    }
  }
}

template <bool Parallel>
void BM_Synthesize(benchmark::State& state) {
  const Inputs in = make_inputs(state.range(0));
  for (auto _ : state) {
    Tensor3 out = Parallel ? kernels::synthesize(in.f) : kernels::reference::synthesize(in.f);
    benchmark::DoNotOptimize(out.data());
  }
}

template <bool Parallel>
void BM_Gram(benchmark::State& state) {
  const Inputs in = make_inputs(state.range(0));
  for (auto _ : state) {
    for (int mode = 1; mode <= 3; ++mode) {
      Matrix g = Parallel ? kernels::gram(in.t, mode) : kernels::reference::gram(in.t, mode);
      benchmark::DoNotOptimize(g.data());
    }
  }
}

template <bool Parallel>
void BM_Mttkrp(benchmark::State& state) {
  const Inputs in = make_inputs(state.range(0));
  for (auto _ : state) {
    for (int mode = 1; mode <= 3; ++mode) {
      Matrix g = Parallel ? kernels::mttkrp(in.t, in.f, mode) : kernels::reference::mttkrp(in.t, in.f, mode);
      benchmark::DoNotOptimize(g.data());
    }
  }
}

}  // namespace

BENCHMARK(BM_ModalProduct<false>)->Arg(20)->Arg(50)->Arg(100);
BENCHMARK(BM_ModalProduct<true>)->Arg(20)->Arg(50)->Arg(100);
BENCHMARK(BM_Synthesize<false>)->Arg(20)->Arg(50)->Arg(100);
BENCHMARK(BM_Synthesize<true>)->Arg(20)->Arg(50)->Arg(100);
BENCHMARK(BM_Gram<false>)->Arg(20)->Arg(50)->Arg(100);
BENCHMARK(BM_Gram<true>)->Arg(20)->Arg(50)->Arg(100);
BENCHMARK(BM_Mttkrp<false>)->Arg(20)->Arg(50)->Arg(100);
BENCHMARK(BM_Mttkrp<true>)->Arg(20)->Arg(50)->Arg(100);

BENCHMARK_MAIN();
