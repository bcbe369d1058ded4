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
#ifndef FEDREC_RANDOM_H_
#define FEDREC_RANDOM_H_

#include <cstdint>
#include <initializer_list>
#include <optional>
#include <random>

namespace fedrec {

// Mixes a base seed with a sequence of tags (round, client id, purpose, ...)
// into a new 64-bit seed. Pure function of its inputs, so per-client streams
// do not depend on scheduling.
uint64_t DeriveSeed(uint64_t base, std::initializer_list<uint64_t> tags);

// Seeded random stream. Only the raw 64-bit engine output comes from the
// standard library; every conversion to real or integer values is done here
// because the std:: distributions are implementation-defined.
class Rng {
 public:
  explicit Rng(uint64_t seed) : engine_(seed) {}

  uint64_t NextU64() { return engine_(); }

  // Uniform on the open interval (0, 1), 53 bits of resolution.
  double Uniform01();

  // Uniform integer in [0, n). Requires n > 0.
  uint64_t UniformInt(uint64_t n);

  double Normal(double mean, double stddev);

  // Zero-mean Laplace draw with the given scale, by inverse CDF.
  double Laplace(double scale);

 private:
  std::mt19937_64 engine_;
  std::optional<double> spare_normal_;
};

}  // namespace fedrec

#endif  // FEDREC_RANDOM_H_
