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

#include "dptext/noise.h"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <future>
#include <sstream>
#include <thread>

#include "key_value.h"

namespace dptext {

double Sensitivity(int dim) {
  if (dim < 1) {
    throw Error(ErrorCode::kInvalidDimension,
                "sensitivity needs dim >= 1, got " + std::to_string(dim));
  }
  return 2.0 * static_cast<double>(dim);
}

double DrawCenteredUniform(RngStream& rng) {
  constexpr double kLimit = 0.5 - kUniformMargin;
  const double r = rng.NextUniform() - 0.5;
  return std::clamp(r, -kLimit, kLimit);
}

namespace {

void CheckNoiseDomain(double r, double epsilon) {
  if (!(std::abs(r) < 0.5)) {
    throw Error(ErrorCode::kDomain, "|r| must be < 1/2");
  }
  if (!(epsilon > 0.0)) {
    throw Error(ErrorCode::kDomain, "epsilon must be > 0");
  }
}

double Sign(double x) { return (x > 0.0) - (x < 0.0); }

}  // namespace

double ReparamNoise(double r, double epsilon, double delta) {
  CheckNoiseDomain(r, epsilon);
  return -(delta / epsilon) * Sign(r) * std::log1p(-2.0 * std::abs(r));
}

double NoiseGradEps(double r, double epsilon, double delta) {
  CheckNoiseDomain(r, epsilon);
  return (delta / (epsilon * epsilon)) * Sign(r) *
         std::log1p(-2.0 * std::abs(r));
}

NoiseSpec NoiseSpec::ForDimension(int dim, double epsilon, double cap,
                                  int samples, double eps_floor) {
  NoiseSpec spec;
  spec.epsilon = epsilon;
  spec.cap = cap;
  spec.delta = Sensitivity(dim);
  spec.dim = dim;
  spec.samples = samples;
  spec.eps_floor = eps_floor;
  spec.Validate();
  return spec;
}

void NoiseSpec::Validate() const {
  auto fail = [](const std::string& msg) {
    throw Error(ErrorCode::kInvalidArgument, "noise spec: " + msg);
  };
  if (dim < 1) fail("dim must be >= 1");
  if (!(eps_floor > 0.0)) fail("eps_floor must be > 0");
  if (!(epsilon >= eps_floor && epsilon <= cap)) {
    fail("need eps_floor <= epsilon <= cap");
  }
  if (delta != Sensitivity(dim)) fail("delta must equal 2 * dim");
  if (samples < 1) fail("samples (K) must be >= 1");
}

Vector SampleNoiseVector(const NoiseSpec& spec, RngStream& rng) {
  spec.Validate();
  Vector s(spec.dim);
  for (int i = 0; i < spec.dim; ++i) {
    s[i] = ReparamNoise(DrawCenteredUniform(rng), spec.epsilon, spec.delta);
  }
  return s;
}

NoisyRepresentation Release(const LatentRepresentation& z, const NoiseSpec& spec,
                            RngStream& rng) {
  spec.Validate();
  CheckLength(z.values, spec.dim, "release latent");
  if (!z.WithinBound()) {
    throw Error(ErrorCode::kBoundViolation,
                "latent leaves [-1,1]; sensitivity 2d does not apply");
  }
  NoisyRepresentation out;
  out.seed = rng.seed();
  out.stream = rng.stream();
  out.counter = rng.counter();
  out.values = z.values + SampleNoiseVector(spec, rng);
  out.epsilon_used = spec.epsilon;
  out.delta_used = spec.delta;
  return out;
}

double LaplaceLogDensityRatio(const Vector& y, const Vector& z,
                              const Vector& z_prime, double scale) {
  return ((y - z_prime).cwiseAbs().sum() - (y - z).cwiseAbs().sum()) / scale;
}

Mechanism LaplaceMechanism(double scale) {
  return [scale](const Vector& z, RngStream& rng) {
    Vector out = z;
    for (Eigen::Index i = 0; i < out.size(); ++i) {
      out[i] += ReparamNoise(DrawCenteredUniform(rng), 1.0, scale);
    }
    return out;
  };
}

AuditConfig ParseAuditConfig(std::string_view text) {
  using namespace internal;
  constexpr ErrorCode kCode = ErrorCode::kInvalidArgument;
  AuditConfig c;
  for (const auto& [key, value] : ParseKeyValues(text, kCode)) {
    if (key == "trials") c.trials = ParseInt(key, value, kCode);
    else if (key == "bins") c.bins = static_cast<int>(ParseInt(key, value, kCode));
    else if (key == "min_expected_count") c.min_expected_count = ParseDouble(key, value, kCode);
    else if (key == "slack_sigmas") c.slack_sigmas = ParseDouble(key, value, kCode);
    else if (key == "pilot_samples") c.pilot_samples = static_cast<int>(ParseInt(key, value, kCode));
    else if (key == "chunks") c.chunks = static_cast<int>(ParseInt(key, value, kCode));
    else if (key == "seed") c.seed = ParseUint(key, value, kCode);
    else throw Error(kCode, "unknown audit config key '" + key + "'");
  }
  if (c.trials < 1000 || c.bins < 1 || c.pilot_samples < 100 || c.chunks < 1 ||
      !(c.min_expected_count > 0.0) || !(c.slack_sigmas >= 0.0)) {
    throw Error(kCode, "audit config out of range");
  }
  return c;
}

std::string FormatAuditConfig(const AuditConfig& c) {
  using internal::FormatDouble;
  std::ostringstream out;
  out << "trials=" << c.trials << "\n"
      << "bins=" << c.bins << "\n"
      << "min_expected_count=" << FormatDouble(c.min_expected_count) << "\n"
      << "slack_sigmas=" << FormatDouble(c.slack_sigmas) << "\n"
      << "pilot_samples=" << c.pilot_samples << "\n"
      << "chunks=" << c.chunks << "\n"
      << "seed=" << c.seed << "\n";
  return out.str();
}

std::string FormatAuditReport(const AuditReport& r) {
  using internal::FormatDouble;
  std::ostringstream out;
  out << "result=" << (r.pass ? "pass" : "fail") << "\n"
      << "epsilon=" << FormatDouble(r.epsilon) << "\n"
      << "delta=" << FormatDouble(r.delta) << "\n"
      << "dim=" << r.dim << "\n"
      << "trials=" << r.trials << "\n"
      << "qualifying_bins=" << r.qualifying_bins << "\n"
      << "max_abs_log_ratio=" << FormatDouble(r.max_abs_log_ratio) << "\n"
      << "slack_at_max=" << FormatDouble(r.slack_at_max) << "\n"
      << "max_excess=" << FormatDouble(r.max_excess) << "\n"
      << "analytic_max_log_ratio=" << FormatDouble(r.analytic_max_log_ratio) << "\n"
      << "analytic_bound_holds=" << (r.analytic_bound_holds ? "true" : "false") << "\n"
      << "caveat=" << r.caveat << "\n";
  return out.str();
}

std::string_view LearnedBudgetCaveat() {
  return "epsilon was selected by training on the same private data it "
         "protects; this audit checks the Laplace mechanism at the recorded "
         "epsilon only and makes no claim about the data-dependent choice of "
         "epsilon";
}

namespace {

constexpr uint64_t kAuditPilotA = 0xa0d1;
constexpr uint64_t kAuditPilotB = 0xa0d2;
constexpr uint64_t kAuditMainA = 0xa0d3;
constexpr uint64_t kAuditMainB = 0xa0d4;

struct BinLayout {
  std::vector<double> lo;
  std::vector<double> width;
  int bins;

  int Index(int coord, double y) const {
    const double pos = (y - lo[coord]) / width[coord];
    if (!(pos >= 0.0) || pos >= bins) return -1;
    return std::min(static_cast<int>(pos), bins - 1);
  }
};

// counts[coord * bins + b]
using Histogram = std::vector<int64_t>;

Histogram RunChunk(const Mechanism& mech, const Vector& z, uint64_t seed,
                   uint64_t stream, int64_t n, const BinLayout& layout) {
  Histogram h(static_cast<size_t>(z.size()) * layout.bins, 0);
  RngStream rng(seed, stream);
  for (int64_t t = 0; t < n; ++t) {
    const Vector y = mech(z, rng);
    for (int i = 0; i < y.size(); ++i) {
      const int b = layout.Index(i, y[i]);
      if (b >= 0) ++h[static_cast<size_t>(i) * layout.bins + b];
    }
  }
  return h;
}

Histogram Histogrammed(const Mechanism& mech, const Vector& z, uint64_t seed,
                       uint64_t base_stream, const AuditConfig& config,
                       const BinLayout& layout) {
  const int chunks = std::max(1, config.chunks);
  std::vector<int64_t> sizes(chunks, config.trials / chunks);
  for (int c = 0; c < config.trials % chunks; ++c) ++sizes[c];

  std::vector<Histogram> parts(chunks);
  const unsigned workers = std::max(1u, std::thread::hardware_concurrency());
  if (workers > 1) {
    std::vector<std::future<Histogram>> futures;
    for (int c = 0; c < chunks; ++c) {
      futures.push_back(std::async(std::launch::async, RunChunk, std::cref(mech),
                                   std::cref(z), seed,
                                   RngStream::SubStream(base_stream, c),
                                   sizes[c], std::cref(layout)));
    }
    for (int c = 0; c < chunks; ++c) parts[c] = futures[c].get();
  } else {
    for (int c = 0; c < chunks; ++c) {
      parts[c] = RunChunk(mech, z, seed, RngStream::SubStream(base_stream, c),
                          sizes[c], layout);
    }
  }
  Histogram total(parts[0].size(), 0);
  for (const auto& p : parts) {
    for (size_t k = 0; k < p.size(); ++k) total[k] += p[k];
  }
  return total;
}

double Quantile(std::vector<double>& v, double q) {
  const size_t k = static_cast<size_t>(q * static_cast<double>(v.size() - 1));
  std::nth_element(v.begin(), v.begin() + k, v.end());
  return v[k];
}

}  // namespace

AuditReport AuditDp(double epsilon, double delta, int dim, const Vector& z,
                    const Vector& z_prime, const AuditConfig& config,
                    const Mechanism& mechanism) {
  if (!(epsilon > 0.0) || !(delta > 0.0)) {
    throw Error(ErrorCode::kInvalidArgument, "audit needs epsilon, delta > 0");
  }
  if (dim < 1) throw Error(ErrorCode::kInvalidDimension, "audit dim must be >= 1");
  CheckLength(z, dim, "audit z");
  CheckLength(z_prime, dim, "audit z'");
  CheckFinite(z, "audit z");
  CheckFinite(z_prime, "audit z'");
  const double l1 = (z - z_prime).cwiseAbs().sum();
  if (l1 > delta * (1.0 + 1e-12)) {
    throw Error(ErrorCode::kInvalidArgument,
                "audit pair violates ||z - z'||_1 <= delta");
  }
  if (config.trials < 1000 || config.bins < 1 || config.pilot_samples < 100) {
    throw Error(ErrorCode::kInvalidArgument, "audit config too small");
  }
  const Mechanism mech = mechanism ? mechanism : LaplaceMechanism(delta / epsilon);

  // Bin edges from a pooled pilot sample: equal-width over the central 99.8%.
  BinLayout layout;
  layout.bins = config.bins;
  {
    RngStream rng_a(config.seed, kAuditPilotA);
    RngStream rng_b(config.seed, kAuditPilotB);
    std::vector<std::vector<double>> pooled(dim);
    for (int t = 0; t < config.pilot_samples; ++t) {
      const Vector a = mech(z, rng_a);
      const Vector b = mech(z_prime, rng_b);
      for (int i = 0; i < dim; ++i) {
        pooled[i].push_back(a[i]);
        pooled[i].push_back(b[i]);
      }
    }
    for (int i = 0; i < dim; ++i) {
      const double lo = Quantile(pooled[i], 0.001);
      const double hi = Quantile(pooled[i], 0.999);
      const double width = hi > lo ? (hi - lo) / config.bins : 1.0;
      layout.lo.push_back(lo);
      layout.width.push_back(width);
    }
  }

  const Histogram ha =
      Histogrammed(mech, z, config.seed, kAuditMainA, config, layout);
  const Histogram hb =
      Histogrammed(mech, z_prime, config.seed, kAuditMainB, config, layout);

  AuditReport report;
  report.epsilon = epsilon;
  report.delta = delta;
  report.dim = dim;
  report.trials = config.trials;
  report.max_excess = -std::numeric_limits<double>::infinity();
  for (size_t k = 0; k < ha.size(); ++k) {
    const double n1 = static_cast<double>(ha[k]);
    const double n2 = static_cast<double>(hb[k]);
    if (0.5 * (n1 + n2) < config.min_expected_count) continue;
    ++report.qualifying_bins;
    double log_ratio;
    double slack;
    if (n1 == 0.0 || n2 == 0.0) {
      log_ratio = std::numeric_limits<double>::infinity();
      slack = 0.0;
    } else {
      log_ratio = std::abs(std::log(n1 / n2));
      slack = config.slack_sigmas * std::sqrt(1.0 / n1 + 1.0 / n2);
    }
    const double excess = log_ratio - (epsilon + slack);
    if (excess > report.max_excess) {
      report.max_excess = excess;
    }
    if (log_ratio > report.max_abs_log_ratio || report.qualifying_bins == 1) {
      report.max_abs_log_ratio = log_ratio;
      report.slack_at_max = slack;
    }
  }
  if (report.qualifying_bins == 0) {
    throw Error(ErrorCode::kInsufficientSamples,
                "no histogram bin reached the minimum expected count");
  }
  report.pass = report.max_excess <= 0.0;
  report.analytic_max_log_ratio = epsilon * l1 / delta;
  report.analytic_bound_holds = report.analytic_max_log_ratio <= epsilon + 1e-12;
  report.caveat = std::string(LearnedBudgetCaveat());
  return report;
}

// ---------------------------------------------------------------------------
// Released-representation file.

bool ReleasedSet::operator==(const ReleasedSet& other) const {
  if (!(header == other.header) || ids != other.ids ||
      rows.size() != other.rows.size()) {
    return false;
  }
  for (size_t i = 0; i < rows.size(); ++i) {
    if (rows[i].size() != other.rows[i].size() || rows[i] != other.rows[i]) {
      return false;
    }
  }
  return true;
}

namespace {

std::string FormatEpsilon(double eps) {
  return std::isinf(eps) ? "inf" : internal::FormatDouble(eps);
}

}  // namespace

std::string SerializeRelease(const ReleasedSet& release) {
  const auto& h = release.header;
  if (release.ids.size() != release.rows.size()) {
    throw Error(ErrorCode::kShape, "release ids and rows differ in length");
  }
  if (h.method.find_first_of(",\n=") != std::string::npos) {
    throw Error(ErrorCode::kInvalidArgument, "method tag has reserved characters");
  }
  std::string out = "#dptext-release,version=1,d=" + std::to_string(h.dim) +
                    ",epsilon_used=" + FormatEpsilon(h.epsilon_used) +
                    ",delta_used=" + internal::FormatDouble(h.delta_used) +
                    ",seed=" + std::to_string(h.seed) + ",method=" + h.method +
                    "\n";
  for (size_t r = 0; r < release.rows.size(); ++r) {
    const Vector& row = release.rows[r];
    CheckLength(row, h.dim, "release row");
    if (release.ids[r].empty() ||
        release.ids[r].find_first_of(",\n") != std::string::npos) {
      throw Error(ErrorCode::kInvalidArgument,
                  "release id '" + release.ids[r] + "' is empty or has a comma");
    }
    out += release.ids[r];
    for (Eigen::Index i = 0; i < row.size(); ++i) {
      out.push_back(',');
      out += internal::FormatDouble(row[i]);
    }
    out.push_back('\n');
  }
  return out;
}

ReleasedSet ParseRelease(std::string_view text) {
  auto fail = [](int line, const std::string& msg) {
    throw Error(ErrorCode::kParse,
                "release line " + std::to_string(line) + ": " + msg);
  };
  ReleasedSet out;
  size_t start = 0;
  int line_no = 0;
  bool have_header = false;
  while (start < text.size()) {
    size_t end = text.find('\n', start);
    if (end == std::string_view::npos) end = text.size();
    ++line_no;
    const std::string_view line = internal::Trim(text.substr(start, end - start));
    start = end + 1;
    if (line.empty()) continue;
    const auto fields = internal::SplitOn(line, ',');
    if (!have_header) {
      if (fields.empty() || fields[0] != "#dptext-release") {
        fail(line_no, "missing #dptext-release header");
      }
      bool have_d = false, have_eps = false, have_delta = false, have_method = false;
      for (size_t k = 1; k < fields.size(); ++k) {
        const size_t eq = fields[k].find('=');
        if (eq == std::string::npos) fail(line_no, "bad header field");
        const std::string key = fields[k].substr(0, eq);
        const std::string value = fields[k].substr(eq + 1);
        if (key == "version") {
          if (value != "1") fail(line_no, "unsupported version " + value);
        } else if (key == "d") {
          out.header.dim = static_cast<int>(
              internal::ParseInt(key, value, ErrorCode::kParse));
          have_d = true;
        } else if (key == "epsilon_used") {
          out.header.epsilon_used =
              value == "inf" ? std::numeric_limits<double>::infinity()
                             : internal::ParseDouble(key, value, ErrorCode::kParse);
          have_eps = true;
        } else if (key == "delta_used") {
          out.header.delta_used =
              internal::ParseDouble(key, value, ErrorCode::kParse);
          have_delta = true;
        } else if (key == "seed") {
          out.header.seed = internal::ParseUint(key, value, ErrorCode::kParse);
        } else if (key == "method") {
          out.header.method = value;
          have_method = true;
        } else {
          fail(line_no, "unknown header key " + key);
        }
      }
      if (!have_d || !have_eps || !have_delta || !have_method) {
        fail(line_no, "header needs d, epsilon_used, delta_used and method");
      }
      if (out.header.dim < 1) fail(line_no, "d must be >= 1");
      have_header = true;
      continue;
    }
    if (static_cast<int>(fields.size()) != out.header.dim + 1) {
      fail(line_no, "expected id plus " + std::to_string(out.header.dim) +
                        " values");
    }
    Vector row(out.header.dim);
    for (int i = 0; i < out.header.dim; ++i) {
      const std::string& f = fields[i + 1];
      double v = 0.0;
      const auto [ptr, ec] = std::from_chars(f.data(), f.data() + f.size(), v);
      if (ec != std::errc() || ptr != f.data() + f.size() || !std::isfinite(v)) {
        fail(line_no, "bad value '" + f + "'");
      }
      row[i] = v;
    }
    out.ids.push_back(fields[0]);
    out.rows.push_back(std::move(row));
  }
  if (!have_header) fail(1, "empty release file");
  return out;
}

void WriteRelease(const ReleasedSet& release, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::kIo, "cannot write " + path.string());
  out << SerializeRelease(release);
  if (!out) throw Error(ErrorCode::kIo, "write failed: " + path.string());
}

ReleasedSet ReadRelease(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kIo, "cannot read " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return ParseRelease(buf.str());
}

}  // namespace dptext
