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

#include "dptext/numerics.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace dptext {

std::string_view ErrorCodeName(ErrorCode code) {
  switch (code) {
    case ErrorCode::kInvalidArgument: return "InvalidArgument";
    case ErrorCode::kInvalidSpec: return "InvalidSpec";
    case ErrorCode::kInvalidDimension: return "InvalidDimension";
    case ErrorCode::kEmptyDocument: return "EmptyDocument";
    case ErrorCode::kShape: return "ShapeError";
    case ErrorCode::kIndex: return "IndexError";
    case ErrorCode::kDomain: return "DomainError";
    case ErrorCode::kNonFinite: return "NonFinite";
    case ErrorCode::kParse: return "ParseError";
    case ErrorCode::kSchema: return "SchemaError";
    case ErrorCode::kBoundViolation: return "BoundViolation";
    case ErrorCode::kInsufficientSamples: return "InsufficientSamples";
    case ErrorCode::kDivergence: return "DivergenceError";
    case ErrorCode::kLengthMismatch: return "LengthMismatch";
    case ErrorCode::kMissingTags: return "MissingTags";
    case ErrorCode::kIo: return "IoError";
    case ErrorCode::kIntegrity: return "IntegrityError";
  }
  return "Unknown";
}

void ThrowNonFinite(std::string_view what) {
  throw Error(ErrorCode::kNonFinite, std::string(what) + " has NaN/Inf");
}

void CheckLength(const Eigen::Ref<const Vector>& v, Eigen::Index expected,
                 std::string_view what) {
  if (v.size() != expected) {
    throw Error(ErrorCode::kShape,
                std::string(what) + ": expected length " +
                    std::to_string(expected) + ", got " +
                    std::to_string(v.size()));
  }
}

double Sigmoid(double x) {
  if (x >= 0.0) return 1.0 / (1.0 + std::exp(-x));
  const double e = std::exp(x);
  return e / (1.0 + e);
}

Vector Softmax(const Vector& logits) {
  if (logits.size() == 0) {
    throw Error(ErrorCode::kShape, "softmax of empty vector");
  }
  CheckFinite(logits, "softmax input");
  const double m = logits.maxCoeff();
  Vector out = (logits.array() - m).exp().matrix();
  out /= out.sum();
  return out;
}

double CrossEntropy(const Vector& probs, int true_class) {
  if (true_class < 0 || true_class >= probs.size()) {
    throw Error(ErrorCode::kIndex, "class " + std::to_string(true_class) +
                                       " out of range for " +
                                       std::to_string(probs.size()) +
                                       " classes");
  }
  return -std::log(std::max(probs[true_class], kProbabilityFloor));
}

Vector SoftmaxCrossEntropyGrad(const Vector& probs, int true_class) {
  if (true_class < 0 || true_class >= probs.size()) {
    throw Error(ErrorCode::kIndex, "class out of range");
  }
  if (probs[true_class] < kProbabilityFloor) return Vector::Zero(probs.size());
  Vector g = probs;
  g[true_class] -= 1.0;
  return g;
}

int ArgMax(const Vector& v) {
  int best = 0;
  for (int i = 1; i < v.size(); ++i) {
    if (v[i] > v[best]) best = i;
  }
  return best;
}

Vector FiniteDiffGrad(const std::function<double(const Vector&)>& f,
                      const Vector& x, double h) {
  if (!(h > 0.0)) throw Error(ErrorCode::kInvalidArgument, "h must be > 0");
  Vector grad(x.size());
  Vector probe = x;
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    probe[i] = x[i] + h;
    const double up = f(probe);
    probe[i] = x[i] - h;
    const double down = f(probe);
    probe[i] = x[i];
    grad[i] = (up - down) / (2.0 * h);
  }
  return grad;
}

namespace {

// SplitMix64 finalizer.
uint64_t Mix64(uint64_t z) {
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

constexpr uint64_t kGolden = 0x9e3779b97f4a7c15ULL;

}  // namespace

uint64_t RngStream::NextU64() {
  const uint64_t key = Mix64(seed_ + kGolden) ^ Mix64(stream_ * kGolden + 1);
  return Mix64(Mix64(key) + (counter_++) * kGolden);
}

double RngStream::NextUniform() {
  return static_cast<double>(NextU64() >> 11) * 0x1.0p-53;
}

double RngStream::NextUniform(double lo, double hi) {
  return lo + (hi - lo) * NextUniform();
}

int RngStream::NextInt(int n) {
  if (n <= 0) throw Error(ErrorCode::kInvalidArgument, "NextInt(n <= 0)");
  // Rejection sampling keeps the draw exactly uniform.
  const uint64_t bound = static_cast<uint64_t>(n);
  const uint64_t limit = std::numeric_limits<uint64_t>::max() -
                         std::numeric_limits<uint64_t>::max() % bound;
  uint64_t x = NextU64();
  while (x >= limit) x = NextU64();
  return static_cast<int>(x % bound);
}

uint64_t RngStream::SubStream(uint64_t parent, uint64_t child) {
  return Mix64(Mix64(parent + kGolden) ^ (child * 0xd6e8feb86659fd93ULL + 7));
}

void FillUniform(Matrix& m, double scale, RngStream& rng) {
  for (Eigen::Index i = 0; i < m.size(); ++i) {
    m.data()[i] = rng.NextUniform(-scale, scale);
  }
}

void FillUniform(Vector& v, double scale, RngStream& rng) {
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    v[i] = rng.NextUniform(-scale, scale);
  }
}

void Shuffle(std::vector<int>& v, RngStream& rng) {
  for (int i = static_cast<int>(v.size()) - 1; i > 0; --i) {
    std::swap(v[i], v[rng.NextInt(i + 1)]);
  }
}

void AdamOptimizer::StepFlat(Vector& params, const Vector& grad) {
  if (m_.size() != params.size()) {
    m_ = Vector::Zero(params.size());
    v_ = Vector::Zero(params.size());
    t_ = 0;
  }
  ++t_;
  m_ = beta1_ * m_ + (1.0 - beta1_) * grad;
  v_ = beta2_ * v_ + (1.0 - beta2_) * grad.cwiseProduct(grad);
  const double c1 = 1.0 - std::pow(beta1_, static_cast<double>(t_));
  const double c2 = 1.0 - std::pow(beta2_, static_cast<double>(t_));
  for (Eigen::Index i = 0; i < params.size(); ++i) {
    const double mh = m_[i] / c1;
    const double vh = v_[i] / c2;
    params[i] -= lr_ * mh / (std::sqrt(vh) + eps_);
  }
}

}  // namespace dptext
