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

#ifndef DPTEXT_NOISE_H_
#define DPTEXT_NOISE_H_

#include <cstdint>
#include <filesystem>
#include <functional>
#include <limits>
#include <string>
#include <string_view>
#include <vector>

#include "dptext/encoder.h"
#include "dptext/numerics.h"

namespace dptext {

// L1 sensitivity of a tanh-bounded latent of dimension `dim`: every entry
// can move by at most 2, so the bound is 2 * dim.
double Sensitivity(int dim);

// Uniform draws are kept this far inside (-1/2, 1/2) so ln(1 - 2|r|) stays
// finite.
inline constexpr double kUniformMargin = 1e-12;

// Centered uniform on (-1/2, 1/2), clamped to |r| <= 1/2 - kUniformMargin.
double DrawCenteredUniform(RngStream& rng);

// Inverse-CDF Laplace sample: -(delta / epsilon) * sgn(r) * ln(1 - 2|r|).
// Maps U(-1/2, 1/2) onto Lap(delta / epsilon). Throws kDomain if
// |r| >= 1/2 or epsilon <= 0.
double ReparamNoise(double r, double epsilon, double delta);

// d ReparamNoise / d epsilon, which equals -ReparamNoise(r, eps, delta) / eps.
double NoiseGradEps(double r, double epsilon, double delta);

struct NoiseSpec {
  double epsilon = 0.1;
  double cap = 0.1;
  double delta = 2.0;
  int dim = 1;
  int samples = 1;  // K
  double eps_floor = 1e-3;

  // Spec with delta = Sensitivity(dim).
  static NoiseSpec ForDimension(int dim, double epsilon, double cap,
                                int samples = 1, double eps_floor = 1e-3);

  // Throws kInvalidArgument unless 0 < eps_floor <= epsilon <= cap,
  // delta == 2 * dim, and samples >= 1.
  void Validate() const;
  double scale() const { return delta / epsilon; }
};

// d i.i.d. Laplace(delta / epsilon) draws via ReparamNoise.
Vector SampleNoiseVector(const NoiseSpec& spec, RngStream& rng);

// A released vector z~ = z + s together with the budget it was produced
// under. The raw latent is not kept.
struct NoisyRepresentation {
  Vector values;
  double epsilon_used = 0.0;
  double delta_used = 0.0;
  uint64_t seed = 0;
  uint64_t stream = 0;
  uint64_t counter = 0;  // stream position before the draw
};

// Throws kBoundViolation if z leaves [-1,1]^d (the sensitivity bound would
// no longer hold) and kShape if spec.dim != z.dim().
NoisyRepresentation Release(const LatentRepresentation& z, const NoiseSpec& spec,
                            RngStream& rng);

// log( prod_i p_b(y_i - z_i) / prod_i p_b(y_i - z'_i) ) for the Laplace
// density with scale b.
double LaplaceLogDensityRatio(const Vector& y, const Vector& z,
                              const Vector& z_prime, double scale);

// Any randomized map from a latent to a released vector.
using Mechanism = std::function<Vector(const Vector& z, RngStream& rng)>;

// z + Lap(scale)^d, without bound checks. Used to audit both the correct
// mechanism and deliberately mis-scaled ones.
Mechanism LaplaceMechanism(double scale);

struct AuditConfig {
  int64_t trials = 1'000'000;
  int bins = 100;
  // Bins with a mean count below this are ignored.
  double min_expected_count = 500.0;
  double slack_sigmas = 3.0;
  // Samples per input used to place the bin edges.
  int pilot_samples = 20'000;
  int chunks = 16;
  uint64_t seed = 1;
};

struct AuditReport {
  bool pass = false;
  double epsilon = 0.0;
  double delta = 0.0;
  int dim = 0;
  int64_t trials = 0;
  int qualifying_bins = 0;
  // Largest |ln(n1/n2)| over qualifying bins, and the slack at that bin.
  double max_abs_log_ratio = 0.0;
  double slack_at_max = 0.0;
  // max over qualifying bins of |ln(n1/n2)| - (epsilon + slack(bin)).
  double max_excess = 0.0;
  // Supremum over outputs of the exact Laplace log-density ratio for the
  // pair, epsilon * ||z - z'||_1 / delta, and whether it is <= epsilon.
  double analytic_max_log_ratio = 0.0;
  bool analytic_bound_holds = false;
  std::string caveat;
};

// Flat key=value text over the AuditConfig fields; unknown keys are
// rejected with kInvalidArgument.
AuditConfig ParseAuditConfig(std::string_view text);
std::string FormatAuditConfig(const AuditConfig& config);

// key=value rendering of a report, one field per line.
std::string FormatAuditReport(const AuditReport& report);

// The empirical audit releases z and z' `trials` times each, histograms every
// output coordinate into `bins` equal-width bins, and passes iff every bin
// with adequate mass satisfies |ln(n1/n2)| <= epsilon + slack, where
// slack = slack_sigmas * sqrt(1/n1 + 1/n2). Throws kInvalidArgument if
// ||z - z'||_1 > delta and kInsufficientSamples if no bin qualifies.
//
// `mechanism` defaults to the Laplace mechanism at scale delta / epsilon.
AuditReport AuditDp(double epsilon, double delta, int dim, const Vector& z,
                    const Vector& z_prime, const AuditConfig& config,
                    const Mechanism& mechanism = nullptr);

// The note attached to every audit report: the budget was chosen using the
// private data, and the audit covers the mechanism at that fixed value only.
std::string_view LearnedBudgetCaveat();

// Released-representation file (CSV):
//   #dptext-release,version=1,d=<d>,epsilon_used=<e|inf>,delta_used=<D>,seed=<s>,method=<tag>
//   <doc id>,<v_1>,...,<v_d>
// one row per document. Raw latents never appear in this format.
struct ReleaseHeader {
  int dim = 0;
  double epsilon_used = std::numeric_limits<double>::infinity();
  double delta_used = 0.0;
  uint64_t seed = 0;
  std::string method;

  bool operator==(const ReleaseHeader&) const = default;
};

struct ReleasedSet {
  ReleaseHeader header;
  std::vector<std::string> ids;
  std::vector<Vector> rows;

  int size() const { return static_cast<int>(rows.size()); }
  bool operator==(const ReleasedSet& other) const;
};

std::string SerializeRelease(const ReleasedSet& release);
ReleasedSet ParseRelease(std::string_view text);
void WriteRelease(const ReleasedSet& release, const std::filesystem::path& path);
ReleasedSet ReadRelease(const std::filesystem::path& path);

}  // namespace dptext

#endif  // DPTEXT_NOISE_H_
