// SPDX-License-Identifier: Apache-2.0

#include "wsr/rng.hpp"

#include <gtest/gtest.h>

#include <cmath>

namespace {

// Frozen from an independent implementation of the declared pipeline
// (SplitMix64 -> (0,1] uniforms -> Box-Muller -> CN(0,1)).
TEST(SplitMix64, MatchesReferenceSequence) {
  wsr::SplitMix64 g(42);
  EXPECT_EQ(g.next(), 13679457532755275413ull);
  EXPECT_EQ(g.next(), 2949826092126892291ull);
  EXPECT_EQ(g.next(), 5139283748462763858ull);
  EXPECT_EQ(g.next(), 6349198060258255764ull);
}

TEST(SplitMix64, UniformsMatchReference) {
  wsr::SplitMix64 g(42);
  EXPECT_DOUBLE_EQ(g.uniform(), 0.74156487877182342);
  EXPECT_DOUBLE_EQ(g.uniform(), 0.15991039287692022);
  EXPECT_DOUBLE_EQ(g.uniform(), 0.27860113025513877);
  EXPECT_DOUBLE_EQ(g.uniform(), 0.34419071652363764);
}

TEST(SplitMix64, ComplexGaussiansMatchReference) {
  wsr::SplitMix64 g(42);
  const auto z0 = g.complex_gaussian();
  const auto z1 = g.complex_gaussian();
  const auto z2 = g.complex_gaussian();
  EXPECT_NEAR(z0.real(), 0.29325114782212747, 1e-15);
  EXPECT_NEAR(z0.imag(), 0.46151531813676233, 1e-15);
  EXPECT_NEAR(z1.real(), -0.63065878970298095, 1e-15);
  EXPECT_NEAR(z1.imag(), 0.93821300977176081, 1e-15);
  EXPECT_NEAR(z2.real(), 1.2230070011739183, 1e-15);
  EXPECT_NEAR(z2.imag(), -1.3317767832337721, 1e-15);
}

TEST(SplitMix64, UniformStaysInHalfOpenInterval) {
  wsr::SplitMix64 g(7);
  for (int i = 0; i < 100000; ++i) {
    const double u = g.uniform();
    ASSERT_GT(u, 0.0);
    ASSERT_LE(u, 1.0);
  }
}

TEST(SplitMix64, GaussianMomentsAreSane) {
  wsr::SplitMix64 g(123);
  const int n = 200000;
  double sum = 0.0, sum2 = 0.0;
  for (int i = 0; i < n; ++i) {
    const auto z = g.complex_gaussian();
    sum += z.real() + z.imag();
    sum2 += std::norm(z);
  }
  EXPECT_NEAR(sum / (2 * n), 0.0, 0.01);
  EXPECT_NEAR(sum2 / n, 1.0, 0.01);  // E|z|^2 = 1
}

TEST(SubstreamSeed, DistinctTagsGiveDistinctStreams) {
  const auto s0 = wsr::substream_seed(9, 0);
  const auto s1 = wsr::substream_seed(9, 1);
  const auto s2 = wsr::substream_seed(9, 2);
  EXPECT_NE(s0, s1);
  EXPECT_NE(s1, s2);
  EXPECT_EQ(s0, wsr::substream_seed(9, 0));
}

}  // namespace
