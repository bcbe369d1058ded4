// Copyright 2026 The fedrec Authors.
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
#include "fedrec/random.h"

#include <cmath>
#include <numbers>

namespace fedrec {
namespace {

uint64_t SplitMix64(uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

}  // namespace

uint64_t DeriveSeed(uint64_t base, std::initializer_list<uint64_t> tags) {
  uint64_t h = SplitMix64(base);
  for (uint64_t tag : tags) {
    h = SplitMix64(h ^ SplitMix64(tag + 0x632BE59BD9B4E019ULL));
  }
  return h;
}

double Rng::Uniform01() {
  // (k + 0.5) / 2^53 for k in [0, 2^53) never hits 0 or 1.
  const uint64_t k = NextU64() >> 11;
  return (static_cast<double>(k) + 0.5) * 0x1.0p-53;
}

uint64_t Rng::UniformInt(uint64_t n) {
  // Rejection on the top of the range removes modulo bias.
  const uint64_t limit = UINT64_MAX - UINT64_MAX % n;
  uint64_t x;
  do {
    x = NextU64();
  } while (x >= limit);
  return x % n;
}

double Rng::Normal(double mean, double stddev) {
  if (spare_normal_.has_value()) {
    const double z = *spare_normal_;
    spare_normal_.reset();
    return mean + stddev * z;
  }
  const double u1 = Uniform01();
  const double u2 = Uniform01();
  const double radius = std::sqrt(-2.0 * std::log(u1));
  const double angle = 2.0 * std::numbers::pi * u2;
  spare_normal_ = radius * std::sin(angle);
  return mean + stddev * radius * std::cos(angle);
}

double Rng::Laplace(double scale) {
  const double u = Uniform01() - 0.5;
  const double magnitude = -scale * std::log(1.0 - 2.0 * std::abs(u));
  return u < 0 ? -magnitude : magnitude;
}

}  // namespace fedrec
