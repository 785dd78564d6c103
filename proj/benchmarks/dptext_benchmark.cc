//
// Copyright 2026 The DPText Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
//

#include <vector>

#include "benchmark/benchmark.h"
#include "dptext/corpus.h"
#include "dptext/discriminators.h"
#include "dptext/encoder.h"
#include "dptext/noise.h"
#include "dptext/numerics.h"
#include "dptext/trainer.h"

namespace dptext {
namespace {

void BM_GruStep(benchmark::State& state) {
  const int dim = static_cast<int>(state.range(0));
  RngStream rng(1, 0);
  GruParams params = GruParams::Zeros(dim, dim);
  ForEachParam(params, [&](std::string_view, auto& t) { FillUniform(t, 0.1, rng); });
  Vector x(dim), h(dim);
  FillUniform(x, 1.0, rng);
  FillUniform(h, 1.0, rng);
  for (auto _ : state) {
    h = GruStep(x, h, params);
    benchmark::DoNotOptimize(h.data());
  }
}
BENCHMARK(BM_GruStep)->Arg(16)->Arg(64);

void BM_Encode(benchmark::State& state) {
  const EncoderParams encoder = InitAutoencoder(120, 16, 16, 1).encoder;
  std::vector<int> tokens(static_cast<size_t>(state.range(0)));
  for (size_t i = 0; i < tokens.size(); ++i) tokens[i] = 2 + static_cast<int>(i % 100);
  for (auto _ : state) {
    benchmark::DoNotOptimize(Encode(tokens, encoder).values.data());
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_Encode)->Arg(8)->Arg(32);

void BM_ReconstructionLossWithGrad(benchmark::State& state) {
  const AutoencoderParams params = InitAutoencoder(120, 16, 16, 1);
  std::vector<int> tokens(24);
  for (size_t i = 0; i < tokens.size(); ++i) tokens[i] = 2 + static_cast<int>(i * 7 % 100);
  AutoencoderParams grad = ZerosLike(params);
  for (auto _ : state) {
    benchmark::DoNotOptimize(ReconstructionLoss(tokens, params, &grad));
  }
}
BENCHMARK(BM_ReconstructionLossWithGrad);

void BM_SampleNoise(benchmark::State& state) {
  const int dim = static_cast<int>(state.range(0));
  const NoiseSpec spec = NoiseSpec::ForDimension(dim, 0.1, 0.1);
  RngStream rng(2, 0);
  for (auto _ : state) {
    benchmark::DoNotOptimize(SampleNoiseVector(spec, rng).data());
  }
  state.SetItemsProcessed(state.iterations() * dim);
}
BENCHMARK(BM_SampleNoise)->Arg(16)->Arg(64);

void BM_AdversarialStep(benchmark::State& state) {
  SyntheticSpec spec;
  spec.num_docs = 200;
  const Corpus corpus = GenerateSyntheticCorpus(spec);
  const EncoderParams encoder = InitAutoencoder(corpus.vocab.size(), 16, 16, 1).encoder;
  std::vector<Vector> latents;
  for (auto& z : EncodeAll(corpus, encoder)) latents.push_back(z.values);
  TrainConfig config;
  TrainState train = InitTrainState(corpus, 16, config);
  std::vector<int> idx(config.batch_size);
  for (size_t i = 0; i < idx.size(); ++i) idx[i] = static_cast<int>(i);
  const TrainBatch batch = MakeBatch(corpus, idx, latents, train);
  const UniformDraws draws =
      UniformDraws::ForDocuments(idx, config.samples, 16, config.seed, 0);
  for (auto _ : state) {
    AdversarialStep(batch, train, config, draws);
  }
}
BENCHMARK(BM_AdversarialStep);

void BM_Audit(benchmark::State& state) {
  AuditConfig config;
  config.trials = state.range(0);
  for (auto _ : state) {
    const AuditReport report =
        AuditDp(0.1, 4.0, 2, Vector::Ones(2), -Vector::Ones(2), config);
    benchmark::DoNotOptimize(report.pass);
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_Audit)->Arg(100'000)->Arg(1'000'000)->Unit(benchmark::kMillisecond);

}  // namespace
}  // namespace dptext

BENCHMARK_MAIN();
