// Copyright 2026  The moddyn Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//  http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>
#include <random>
#include <vector>

#include <gtest/gtest.h>

#include "moddyn/error.hpp"
#include "moddyn/mtb.hpp"
#include "oracles.hpp"

namespace moddyn {
namespace {

using testing::RandomStack;

constexpr double kPi = std::numbers::pi;

MtbConfig Frames(std::size_t w, std::size_t hop,
                 WindowFunction fn = WindowFunction::kHann) {
  MtbConfig cfg;
  cfg.window_frames = w;
  cfg.hop_frames = hop;
  cfg.window = fn;
  return cfg;
}

std::vector<double> RandomWeights(std::mt19937_64& rng, std::size_t n) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::vector<double> w(n);
  for (double& v : w) v = u(rng);
  return w;
}

std::vector<double> RandomSignal(std::mt19937_64& rng, std::size_t n) {
  std::normal_distribution<double> z(0.0, 1.0);
  std::vector<double> x(n);
  for (double& v : x) v = z(rng);
  return x;
}

double RelErr(double a, double b) {
  return std::abs(a - b) / std::max({std::abs(a), std::abs(b), 1e-300});
}

TEST(LayerCollapse, SingleLayerIsIdentity) {
  std::mt19937_64 rng(1);
  const auto s = RandomStack(rng, 1, 3, 5);
  const auto out = LayerCollapse(s, LayerWeights{{1.0}});
  for (std::size_t f = 0; f < 3; ++f)
    for (std::size_t t = 0; t < 5; ++t)
      EXPECT_EQ(out(f, t), static_cast<double>(s.at(0, f, t)));
}

TEST(LayerCollapse, TwoLayerMean) {
  std::mt19937_64 rng(2);
  const auto s = RandomStack(rng, 2, 3, 5);
  const auto out = LayerCollapse(s, LayerWeights::Uniform(2));
  for (std::size_t f = 0; f < 3; ++f)
    for (std::size_t t = 0; t < 5; ++t)
      EXPECT_DOUBLE_EQ(out(f, t), (static_cast<double>(s.at(0, f, t)) +
                                   static_cast<double>(s.at(1, f, t))) / 2.0);
}

TEST(LayerCollapse, MatchesTripleLoopOracle) {
  std::mt19937_64 rng(3);
  for (int trial = 0; trial < 20; ++trial) {
    const auto s = RandomStack(rng, 3, 5, 17);
    const auto w = RandomWeights(rng, 3);
    const auto out = LayerCollapse(s, LayerWeights{w});
    const auto ref = testing::CollapseOracle(s, w);
    for (std::size_t f = 0; f < 5; ++f)
      for (std::size_t t = 0; t < 17; ++t)
        EXPECT_LE(std::abs(out(f, t) - ref[f][t]),
                  1e-6 * std::max(1.0, std::abs(ref[f][t])));
  }
}

TEST(LayerCollapse, WeightCountMismatch) {
  RepresentationStack s(3, 2, 4, 50.0f);
  try {
    LayerCollapse(s, LayerWeights::Uniform(2));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kDimension);
  }
}

TEST(LayerCollapseProperty, LinearInWeights) {
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> u(-2.0, 2.0);
  for (int trial = 0; trial < 30; ++trial) {
    const auto s = RandomStack(rng, 4, 3, 11);
    const auto w1 = RandomWeights(rng, 4);
    const auto w2 = RandomWeights(rng, 4);
    const double a = u(rng), b = u(rng);
    std::vector<double> mix(4);
    for (std::size_t l = 0; l < 4; ++l) mix[l] = a * w1[l] + b * w2[l];
    const auto lhs = LayerCollapse(s, LayerWeights{mix});
    const auto r1 = LayerCollapse(s, LayerWeights{w1});
    const auto r2 = LayerCollapse(s, LayerWeights{w2});
    for (std::size_t f = 0; f < 3; ++f)
      for (std::size_t t = 0; t < 11; ++t) {
        const double rhs = a * r1(f, t) + b * r2(f, t);
        EXPECT_LE(std::abs(lhs(f, t) - rhs),
                  1e-6 * std::max(1.0, std::abs(rhs)));
      }
  }
}

TEST(MtbConfig, MillisecondsRoundToFrames) {
  const auto g = MtbConfig{}.Resolve(50.0);
  EXPECT_EQ(g.window, 6u);
  EXPECT_EQ(g.hop, 2u);
  EXPECT_EQ(g.bins(), 4u);
  MtbConfig cfg;
  cfg.window_ms = 250.0;
  cfg.hop_ms = 50.0;
  EXPECT_EQ(cfg.Resolve(100.0).window, 25u);
  EXPECT_EQ(cfg.Resolve(100.0).hop, 5u);
  EXPECT_EQ(Frames(24, 4).Resolve(50.0).window, 24u);
  EXPECT_EQ(Frames(24, 4).Resolve(50.0).hop, 4u);
}

TEST(MtbConfig, RejectsDegenerateGeometry) {
  auto code = [](const MtbConfig& c) {
    try {
      c.Resolve(50.0);
    } catch (const Error& e) {
      return e.code();
    }
    return ErrorCode::kIo;
  };
  EXPECT_EQ(code(Frames(1, 1)), ErrorCode::kValidation);
  EXPECT_EQ(code(Frames(4, 0)), ErrorCode::kValidation);
  EXPECT_EQ(code(Frames(4, 5)), ErrorCode::kValidation);
  MtbConfig eps = Frames(4, 2);
  eps.epsilon = 0.0;
  EXPECT_EQ(code(eps), ErrorCode::kValidation);
}

TEST(Window, HannMatchesSineSquaredForm) {
  for (std::size_t w : {2u, 5u, 6u, 24u}) {
    const auto win = WindowCoefficients(WindowFunction::kHann, w);
    const auto ref = testing::HannOracle(w);
    ASSERT_EQ(win.size(), w);
    EXPECT_EQ(win[0], 0.0);
    for (std::size_t n = 0; n < w; ++n) EXPECT_NEAR(win[n], ref[n], 1e-15);
  }
  for (double v : WindowCoefficients(WindowFunction::kRectangular, 7))
    EXPECT_EQ(v, 1.0);
}

TEST(Stft, FrameCountAndPadding) {
  const FrameGeometry g{6, 2};
  EXPECT_EQ(StftFrameCount(250, g), 123u);
  EXPECT_EQ(StftFrameCount(6, g), 1u);
  EXPECT_EQ(StftFrameCount(7, g), 1u);
  EXPECT_EQ(StftFrameCount(8, g), 2u);
  EXPECT_EQ(StftFrameCount(1, g), 1u);
  const std::vector<double> x = {1.0, 2.0};
  const auto out = StftFrames(x, g, WindowFunction::kRectangular);
  ASSERT_EQ(out.rows(), 4u);
  ASSERT_EQ(out.cols(), 1u);
  EXPECT_NEAR(out(0, 0).real(), 3.0, 1e-12);
}

TEST(Stft, ConstantSignalOnlyHasDc) {
  const double c = 1.7;
  const std::vector<double> x(8, c);
  const auto out = StftFrames(x, FrameGeometry{4, 2}, WindowFunction::kRectangular);
  ASSERT_EQ(out.rows(), 3u);
  ASSERT_EQ(out.cols(), 3u);
  for (std::size_t m = 0; m < 3; ++m) {
    EXPECT_NEAR(out(0, m).real(), 4 * c, 1e-12);
    EXPECT_NEAR(out(0, m).imag(), 0.0, 1e-12);
    EXPECT_NEAR(std::abs(out(1, m)), 0.0, 1e-12);
    EXPECT_NEAR(std::abs(out(2, m)), 0.0, 1e-12);
  }
}

TEST(Stft, BinAlignedCosine) {
  for (std::size_t w : {4u, 6u, 9u, 16u}) {
    std::vector<double> x(w);
    for (std::size_t n = 0; n < w; ++n) x[n] = std::cos(2 * kPi * n / w);
    const auto out = StftFrames(x, FrameGeometry{w, 1}, WindowFunction::kRectangular);
    ASSERT_EQ(out.cols(), 1u);
    for (std::size_t k = 0; k < out.rows(); ++k) {
      EXPECT_NEAR(std::abs(out(k, 0)), k == 1 ? w / 2.0 : 0.0, 1e-6) << w << " " << k;
    }
  }
}

TEST(Stft, MatchesNaiveDftOracle) {
  std::mt19937_64 rng(5);
  for (auto fn : {WindowFunction::kHann, WindowFunction::kRectangular}) {
    for (int trial = 0; trial < 10; ++trial) {
      const auto x = RandomSignal(rng, 50);
      const auto out = StftFrames(x, Frames(6, 2, fn), 50.0);
      const auto win = fn == WindowFunction::kHann ? testing::HannOracle(6)
                                                   : std::vector<double>(6, 1.0);
      const auto ref = testing::NaiveStft(x, 6, 2, win);
      ASSERT_EQ(out.rows(), ref.size());
      ASSERT_EQ(out.cols(), ref[0].size());
      for (std::size_t k = 0; k < out.rows(); ++k)
        for (std::size_t m = 0; m < out.cols(); ++m) {
          const double scale = std::max(1.0, std::abs(ref[k][m]));
          EXPECT_LE(std::abs(out(k, m) - ref[k][m]), 1e-6 * scale);
        }
    }
  }
}

TEST(StftProperty, ParsevalWithRectangularHopW) {
  std::mt19937_64 rng(6);
  for (std::size_t w : {4u, 5u, 6u, 8u, 13u}) {
    const auto x = RandomSignal(rng, 7 * w);
    const auto out = StftFrames(x, FrameGeometry{w, w}, WindowFunction::kRectangular);
    double lhs = 0.0;
    for (std::size_t k = 0; k < out.rows(); ++k) {
      const bool unique = k == 0 || (w % 2 == 0 && k == w / 2);
      for (std::size_t m = 0; m < out.cols(); ++m)
        lhs += (unique ? 1.0 : 2.0) * std::norm(out(k, m));
    }
    double rhs = 0.0;
    for (double v : x) rhs += v * v;
    rhs *= static_cast<double>(w);
    EXPECT_LE(RelErr(lhs, rhs), 1e-6) << w;
  }
}

TEST(Mtb, ZeroStackGivesLogEpsilon) {
  RepresentationStack s(2, 3, 40, 50.0f);
  MtbConfig cfg;
  const auto m = MtbTransform(s, LayerWeights::Uniform(2), cfg);
  ASSERT_EQ(m.features(), 3u);
  ASSERT_EQ(m.bins(), 4u);
  for (double v : m.values.data()) EXPECT_DOUBLE_EQ(v, std::log(1e-10));
}

TEST(Mtb, BinOneCosinePeaksAtBinOne) {
  RepresentationStack s(1, 2, 60, 50.0f);
  for (std::size_t t = 0; t < 60; ++t) {
    s.at(0, 0, t) = static_cast<float>(std::cos(2 * kPi * t / 6.0));
    s.at(0, 1, t) = static_cast<float>(0.5 * std::cos(2 * kPi * t / 6.0 + 1.0));
  }
  const auto m = MtbTransform(s, LayerWeights{{1.0}},
                              Frames(6, 2, WindowFunction::kRectangular));
  for (std::size_t f = 0; f < 2; ++f) {
    const auto row = m.values.row(f);
    EXPECT_EQ(std::max_element(row.begin(), row.end()) - row.begin(), 1) << f;
  }
}

TEST(Mtb, MatchesComposedOracles) {
  std::mt19937_64 rng(8);
  for (auto fn : {WindowFunction::kHann, WindowFunction::kRectangular}) {
    const auto win = fn == WindowFunction::kHann ? testing::HannOracle(6)
                                                 : std::vector<double>(6, 1.0);
    for (int trial = 0; trial < 10; ++trial) {
      const auto s = RandomStack(rng, 2, 4, 50);
      const auto w = RandomWeights(rng, 2);
      const auto m = MtbTransform(s, LayerWeights{w}, Frames(6, 2, fn));
      const auto ref = testing::MtbOracle(s, w, 6, 2, win, 1e-10);
      for (std::size_t f = 0; f < 4; ++f)
        for (std::size_t k = 0; k < 4; ++k)
          EXPECT_NEAR(m.values(f, k), ref[f][k], 1e-6);
    }
  }
}

TEST(Mtb, BinFrequencies) {
  RepresentationStack s(1, 1, 30, 50.0f);
  const auto m = MtbTransform(s, LayerWeights{{1.0}}, MtbConfig{});
  ASSERT_EQ(m.bin_freqs.size(), 4u);
  for (std::size_t k = 0; k < 4; ++k)
    EXPECT_DOUBLE_EQ(m.bin_freqs[k], k * 50.0 / 6.0);
}

TEST(MtbProperty, ShapeIndependentOfLength) {
  std::mt19937_64 rng(9);
  for (std::size_t t = 1; t <= 40; ++t) {
    const auto s = RandomStack(rng, 2, 3, t);
    const auto m = MtbTransform(s, LayerWeights::Uniform(2), MtbConfig{});
    EXPECT_EQ(m.features(), 3u);
    EXPECT_EQ(m.bins(), 4u);
    for (double v : m.values.data()) EXPECT_TRUE(std::isfinite(v));
  }
  const auto s = RandomStack(rng, 1, 2, 100);
  EXPECT_EQ(MtbTransform(s, LayerWeights{{1.0}}, Frames(24, 4)).bins(), 13u);
}

TEST(MtbProperty, EpsilonMonotone) {
  std::mt19937_64 rng(10);
  for (int trial = 0; trial < 20; ++trial) {
    const auto s = RandomStack(rng, 2, 3, 30, 50.0f, trial % 2 ? 1e-4 : 1.0);
    MtbConfig lo = Frames(6, 2);
    MtbConfig hi = lo;
    lo.epsilon = 1e-10;
    hi.epsilon = 1e-3;
    const auto a = MtbTransform(s, LayerWeights::Uniform(2), lo);
    const auto b = MtbTransform(s, LayerWeights::Uniform(2), hi);
    for (std::size_t i = 0; i < a.values.data().size(); ++i)
      EXPECT_GE(b.values.data()[i], a.values.data()[i]);
  }
}

TEST(MtbProperty, HopShiftChangesOnlyBoundaryFrames) {
  std::mt19937_64 rng(11);
  const FrameGeometry g{6, 2};
  for (auto fn : {WindowFunction::kHann, WindowFunction::kRectangular}) {
    const std::size_t t = 400;
    const auto x = RandomSignal(rng, t + g.hop);
    Matrix a(1, t), b(1, t);
    for (std::size_t i = 0; i < t; ++i) {
      a(0, i) = x[i];
      b(0, i) = x[i + g.hop];
    }
    const auto ea = ModulationEnergy(a, g, fn);
    const auto eb = ModulationEnergy(b, g, fn);
    const auto frames_a = StftFrames(a.row(0), g, fn);
    const auto frames_b = StftFrames(b.row(0), g, fn);
    const std::size_t m = frames_a.cols();
    for (std::size_t k = 0; k < g.bins(); ++k) {
      // One frame leaves at the start, one enters at the end.
      const double expected = ea(0, k) + (std::norm(frames_b(k, m - 1)) -
                                          std::norm(frames_a(k, 0))) / m;
      EXPECT_NEAR(eb(0, k), expected, 1e-9 * std::max(1.0, ea(0, k)));
    }
    RepresentationStack sa(1, 1, t, 50.0f), sb(1, 1, t, 50.0f);
    for (std::size_t i = 0; i < t; ++i) {
      sa.at(0, 0, i) = static_cast<float>(a(0, i));
      sb.at(0, 0, i) = static_cast<float>(b(0, i));
    }
    MtbConfig cfg = Frames(6, 2, fn);
    const auto pa = PoolModulation(MtbTransform(sa, LayerWeights{{1.0}}, cfg));
    const auto pb = PoolModulation(MtbTransform(sb, LayerWeights{{1.0}}, cfg));
    EXPECT_LT(std::abs(pa[0] - pb[0]), 0.1);
  }
}

TEST(MtbBackward, EnergyGradientMatchesFiniteDifference) {
  std::mt19937_64 rng(12);
  for (auto fn : {WindowFunction::kHann, WindowFunction::kRectangular}) {
    for (std::size_t t : {3u, 6u, 11u, 20u}) {
      const FrameGeometry g{6, 2};
      Matrix x(2, t);
      for (double& v : x.data()) v = std::normal_distribution<double>()(rng);
      Matrix ge(2, g.bins());
      for (double& v : ge.data()) v = std::normal_distribution<double>()(rng);
      const auto grad = ModulationEnergyBackward(x, g, fn, ge);
      auto objective = [&](const Matrix& in) {
        const auto e = ModulationEnergy(in, g, fn);
        double acc = 0;
        for (std::size_t i = 0; i < e.data().size(); ++i)
          acc += e.data()[i] * ge.data()[i];
        return acc;
      };
      const double h = 1e-5;
      for (std::size_t i = 0; i < x.data().size(); ++i) {
        Matrix p = x, m = x;
        p.data()[i] += h;
        m.data()[i] -= h;
        const double fd = (objective(p) - objective(m)) / (2 * h);
        EXPECT_NEAR(grad.data()[i], fd, 1e-6 * std::max(1.0, std::abs(fd)))
            << "t=" << t << " i=" << i;
      }
    }
  }
}

TEST(MtbBackward, CollapseGradientIsInnerProduct) {
  std::mt19937_64 rng(13);
  const auto s = RandomStack(rng, 3, 4, 9);
  Matrix g(4, 9);
  for (double& v : g.data()) v = std::normal_distribution<double>()(rng);
  const auto grad = LayerCollapseBackward(s, g);
  ASSERT_EQ(grad.size(), 3u);
  for (std::size_t l = 0; l < 3; ++l) {
    double ref = 0;
    for (std::size_t f = 0; f < 4; ++f)
      for (std::size_t t = 0; t < 9; ++t) ref += g(f, t) * s.at(l, f, t);
    EXPECT_NEAR(grad[l], ref, 1e-9 * std::max(1.0, std::abs(ref)));
  }
}

TEST(Pooling, RawMeans) {
  Matrix one(3, 1);
  one(0, 0) = 1;
  one(1, 0) = -2;
  one(2, 0) = 5;
  EXPECT_EQ(PoolRaw(one), (std::vector<double>{1, -2, 5}));
  Matrix constant(2, 6, 0.0);
  for (std::size_t t = 0; t < 6; ++t) {
    constant(0, t) = 4.5;
    constant(1, t) = -1.25;
  }
  EXPECT_EQ(PoolRaw(constant), (std::vector<double>{4.5, -1.25}));
  std::mt19937_64 rng(14);
  Matrix r(3, 7);
  for (double& v : r.data()) v = std::normal_distribution<double>()(rng);
  const auto p = PoolRaw(r);
  for (std::size_t f = 0; f < 3; ++f) {
    double acc = 0;
    for (std::size_t t = 0; t < 7; ++t) acc += r(f, t);
    EXPECT_NEAR(p[f], acc / 7, 1e-12);
  }
}

ModulationRepresentation MakeRep(std::size_t f, std::size_t k) {
  ModulationRepresentation m;
  m.values = Matrix(f, k);
  for (std::size_t i = 0; i < k; ++i) m.bin_freqs.push_back(static_cast<double>(i));
  return m;
}

TEST(Pooling, ModulationMeans) {
  auto single = MakeRep(3, 1);
  single.values(1, 0) = 7.0;
  EXPECT_EQ(PoolModulation(single), (std::vector<double>{0, 7, 0}));
  auto rows = MakeRep(4, 5);
  for (std::size_t f = 0; f < 4; ++f)
    for (std::size_t k = 0; k < 5; ++k) rows.values(f, k) = static_cast<double>(f);
  EXPECT_EQ(PoolModulation(rows), (std::vector<double>{0, 1, 2, 3}));
  std::mt19937_64 rng(15);
  auto r = MakeRep(5, 4);
  for (double& v : r.values.data()) v = std::normal_distribution<double>()(rng);
  const auto p = PoolModulation(r);
  for (std::size_t f = 0; f < 5; ++f) {
    double acc = 0;
    for (std::size_t k = 0; k < 4; ++k) acc += r.values(f, k);
    EXPECT_NEAR(p[f], acc / 4, 1e-12);
  }
}

TEST(Pooling, FeatureMeanPattern) {
  auto m = MakeRep(2, 2);
  m.values(0, 0) = 1;
  m.values(0, 1) = 3;
  m.values(1, 0) = 3;
  m.values(1, 1) = 1;
  EXPECT_EQ(FeatureMeanPattern(m), (std::vector<double>{2, 2}));
  EXPECT_EQ(FeatureMeanPattern(m, m), (std::vector<double>{0, 0}));

  std::mt19937_64 rng(16);
  auto a = MakeRep(6, 4), b = MakeRep(6, 4);
  for (double& v : a.values.data()) v = std::normal_distribution<double>()(rng);
  for (double& v : b.values.data()) v = std::normal_distribution<double>()(rng);
  const auto p = FeatureMeanPattern(a, b);
  for (std::size_t k = 0; k < 4; ++k) {
    double sa = 0, sb = 0;
    for (std::size_t f = 0; f < 6; ++f) {
      sa += a.values(f, k);
      sb += b.values(f, k);
    }
    EXPECT_NEAR(p[k], sa / 6 - sb / 6, 1e-12);
  }
  try {
    FeatureMeanPattern(a, MakeRep(6, 3));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kDimension);
  }
}

TEST(MtbText, HeaderListsBinFrequencies) {
  RepresentationStack s(1, 2, 12, 50.0f);
  const auto m = MtbTransform(s, LayerWeights{{1.0}}, Frames(4, 2));
  const auto text = FormatModulationText(m);
  EXPECT_EQ(text.substr(0, text.find('\n')), "feature,0,12.5,25");
  EXPECT_EQ(std::count(text.begin(), text.end(), '\n'), 3);
}

}  // namespace
}  // namespace moddyn
