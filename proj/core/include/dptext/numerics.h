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

#ifndef DPTEXT_NUMERICS_H_
#define DPTEXT_NUMERICS_H_

#include <cmath>
#include <cstdint>
#include <functional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "dptext/error.h"

namespace dptext {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

// Floor applied inside every log-probability term.
inline constexpr double kProbabilityFloor = 1e-12;

// Throws kNonFinite naming `what` if any entry is NaN or infinite.
[[noreturn]] void ThrowNonFinite(std::string_view what);

template <typename Derived>
void CheckFinite(const Eigen::DenseBase<Derived>& m, std::string_view what) {
  if (!m.allFinite()) ThrowNonFinite(what);
}

// Throws kShape unless `v` has exactly `expected` entries.
void CheckLength(const Eigen::Ref<const Vector>& v, Eigen::Index expected,
                 std::string_view what);

double Sigmoid(double x);

// Numerically stable softmax (max-subtracted).
Vector Softmax(const Vector& logits);

// -log(max(probs[true_class], kProbabilityFloor)).
double CrossEntropy(const Vector& probs, int true_class);

// Gradient of CrossEntropy(Softmax(logits), y) with respect to the logits,
// given the already-computed softmax output. Zero when the floor is active,
// since the clamped loss is locally constant there.
Vector SoftmaxCrossEntropyGrad(const Vector& probs, int true_class);

// Index of the largest entry; ties resolve to the lowest index.
int ArgMax(const Vector& v);

// Central-difference gradient (f(x + h e_i) - f(x - h e_i)) / 2h.
Vector FiniteDiffGrad(const std::function<double(const Vector&)>& f,
                      const Vector& x, double h);

// Counter-based random stream. Every draw is a pure function of
// (seed, stream, counter), so streams can be split and replayed without
// coordination: distinct stream ids give independent sequences.
class RngStream {
 public:
  RngStream(uint64_t seed, uint64_t stream) : seed_(seed), stream_(stream) {}

  uint64_t NextU64();
  // Uniform on [0, 1) with 53 bits of precision.
  double NextUniform();
  // Uniform on {0, ..., n - 1}; n must be positive.
  int NextInt(int n);
  // Uniform on [lo, hi).
  double NextUniform(double lo, double hi);

  uint64_t seed() const { return seed_; }
  uint64_t stream() const { return stream_; }
  uint64_t counter() const { return counter_; }
  void Seek(uint64_t counter) { counter_ = counter; }

  // A stream id derived from a parent id and a child index, so that nested
  // splits (e.g. step -> document) stay collision-resistant.
  static uint64_t SubStream(uint64_t parent, uint64_t child);

 private:
  uint64_t seed_;
  uint64_t stream_;
  uint64_t counter_ = 0;
};

// Fills `m` with values uniform in [-scale, scale].
void FillUniform(Matrix& m, double scale, RngStream& rng);
void FillUniform(Vector& v, double scale, RngStream& rng);

// Fisher-Yates shuffle driven by `rng`.
void Shuffle(std::vector<int>& v, RngStream& rng);

// ---------------------------------------------------------------------------
// Parameter-set helpers.
//
// Every parameter struct in the library provides a free function
//   template <typename Self, typename Fn> void ForEachParam(Self& p, Fn&& fn)
// that calls fn(name, tensor) for every Eigen tensor it owns, in a fixed
// order. The helpers below treat such structs as flat vectors.

template <typename Fn>
auto Prefixed(std::string_view prefix, Fn& fn) {
  return [prefix, &fn](std::string_view name, auto& tensor) {
    std::string full(prefix);
    full += '.';
    full += name;
    fn(std::string_view(full), tensor);
  };
}

template <typename P>
Eigen::Index ParamCount(const P& params) {
  Eigen::Index n = 0;
  ForEachParam(params, [&](std::string_view, const auto& t) { n += t.size(); });
  return n;
}

template <typename P>
Vector Flatten(const P& params) {
  Vector out(ParamCount(params));
  Eigen::Index offset = 0;
  ForEachParam(params, [&](std::string_view, const auto& t) {
    for (Eigen::Index i = 0; i < t.size(); ++i) out[offset + i] = t.data()[i];
    offset += t.size();
  });
  return out;
}

template <typename P>
void Unflatten(const Vector& flat, P& params) {
  if (flat.size() != ParamCount(params)) {
    throw Error(ErrorCode::kShape, "flat parameter vector has wrong length");
  }
  Eigen::Index offset = 0;
  ForEachParam(params, [&](std::string_view, auto& t) {
    for (Eigen::Index i = 0; i < t.size(); ++i) t.data()[i] = flat[offset + i];
    offset += t.size();
  });
}

// Same shapes as `params`, all zeros.
template <typename P>
P ZerosLike(const P& params) {
  P out = params;
  ForEachParam(out, [](std::string_view, auto& t) { t.setZero(); });
  return out;
}

// dst += scale * src, tensor by tensor.
template <typename P>
void AddScaled(P& dst, const P& src, double scale) {
  Vector a = Flatten(dst);
  a += scale * Flatten(src);
  Unflatten(a, dst);
}

template <typename P>
double SquaredNorm(const P& params) {
  double s = 0.0;
  ForEachParam(params,
               [&](std::string_view, const auto& t) { s += t.squaredNorm(); });
  return s;
}

// Rescales `grad` in place so its global L2 norm is at most `max_norm`.
// Returns the norm before clipping.
template <typename P>
double ClipGlobalNorm(P& grad, double max_norm) {
  const double norm = std::sqrt(SquaredNorm(grad));
  if (norm > max_norm && norm > 0.0) {
    const double scale = max_norm / norm;
    ForEachParam(grad, [&](std::string_view, auto& t) { t *= scale; });
  }
  return norm;
}

template <typename P>
void CheckFiniteParams(const P& params, std::string_view what) {
  ForEachParam(params, [&](std::string_view name, const auto& t) {
    if (!t.allFinite()) {
      throw Error(ErrorCode::kNonFinite,
                  std::string(what) + "." + std::string(name));
    }
  });
}

// Adam over any parameter struct. State is kept as flat vectors.
class AdamOptimizer {
 public:
  explicit AdamOptimizer(double learning_rate, double beta1 = 0.9,
                         double beta2 = 0.999, double epsilon = 1e-8)
      : lr_(learning_rate), beta1_(beta1), beta2_(beta2), eps_(epsilon) {}

  template <typename P>
  void Step(P& params, const P& grad) {
    Vector p = Flatten(params);
    StepFlat(p, Flatten(grad));
    Unflatten(p, params);
  }

  void StepFlat(Vector& params, const Vector& grad);

 private:
  double lr_;
  double beta1_;
  double beta2_;
  double eps_;
  int64_t t_ = 0;
  Vector m_;
  Vector v_;
};

}  // namespace dptext

#endif  // DPTEXT_NUMERICS_H_
