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
#include <set>
#include <vector>

#include "gtest/gtest.h"

namespace fedrec {
namespace {

TEST(DeriveSeedTest, PureAndTagSensitive) {
  EXPECT_EQ(DeriveSeed(1, {2, 3}), DeriveSeed(1, {2, 3}));
  std::set<uint64_t> seen;
  for (uint64_t base : {0u, 1u, 42u}) {
    for (uint64_t a = 0; a < 10; ++a) {
      for (uint64_t b = 0; b < 10; ++b) seen.insert(DeriveSeed(base, {a, b}));
    }
  }
  EXPECT_EQ(seen.size(), 300u);
  EXPECT_NE(DeriveSeed(1, {2, 3}), DeriveSeed(1, {3, 2}));
  EXPECT_NE(DeriveSeed(1, {2}), DeriveSeed(1, {2, 0}));
}

TEST(RngTest, SameSeedSameStream) {
  Rng a(5), b(5);
  for (int i = 0; i < 100; ++i) {
    ASSERT_EQ(a.Uniform01(), b.Uniform01());
    ASSERT_EQ(a.Normal(0, 1), b.Normal(0, 1));
    ASSERT_EQ(a.UniformInt(17), b.UniformInt(17));
  }
}

TEST(RngTest, Uniform01IsOpenInterval) {
  Rng rng(6);
  double sum = 0.0;
  for (int i = 0; i < 100000; ++i) {
    const double u = rng.Uniform01();
    ASSERT_GT(u, 0.0);
    ASSERT_LT(u, 1.0);
    sum += u;
  }
  EXPECT_NEAR(sum / 100000, 0.5, 0.005);
}

TEST(RngTest, UniformIntCoversRangeEvenly) {
  Rng rng(7);
  std::vector<int> counts(7, 0);
  for (int i = 0; i < 70000; ++i) ++counts[rng.UniformInt(7)];
  for (int c : counts) EXPECT_NEAR(c, 10000, 500);
  EXPECT_EQ(rng.UniformInt(1), 0u);
}

TEST(RngTest, NormalMoments) {
  Rng rng(8);
  double sum = 0.0, squares = 0.0;
  const int n = 200000;
  for (int i = 0; i < n; ++i) {
    const double x = rng.Normal(2.0, 3.0);
    sum += x;
    squares += x * x;
  }
  const double mean = sum / n;
  EXPECT_NEAR(mean, 2.0, 0.03);
  EXPECT_NEAR(std::sqrt(squares / n - mean * mean), 3.0, 0.03);
}

TEST(RngTest, LaplaceMoments) {
  Rng rng(9);
  double sum = 0.0, squares = 0.0, abs_sum = 0.0;
  const int n = 1000000;
  for (int i = 0; i < n; ++i) {
    const double x = rng.Laplace(0.3);
    sum += x;
    squares += x * x;
    abs_sum += std::abs(x);
  }
  const double mean = sum / n;
  const double sd = std::sqrt(squares / n - mean * mean);
  EXPECT_LT(std::abs(mean), 4 * 0.3 * std::sqrt(2.0) / 1e3);
  EXPECT_NEAR(sd, 0.424264, 0.02 * 0.424264);
  EXPECT_NEAR(abs_sum / n, 0.3, 0.003);  // E|X| equals the scale
}

}  // namespace
}  // namespace fedrec
