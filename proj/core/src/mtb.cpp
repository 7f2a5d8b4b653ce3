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

#include "moddyn/mtb.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "file_util.hpp"
#include "moddyn/error.hpp"

namespace moddyn {

namespace {

// cos/sin of 2*pi*j/W for j < W, indexed by (k*n) mod W, plus the window.
struct DftKernel {
  std::vector<double> cos_table;
  std::vector<double> sin_table;
  std::vector<double> window;

  DftKernel(std::size_t w, WindowFunction fn)
      : cos_table(w), sin_table(w), window(WindowCoefficients(fn, w)) {
    for (std::size_t j = 0; j < w; ++j) {
      const double angle = 2.0 * std::numbers::pi * static_cast<double>(j) /
                           static_cast<double>(w);
      cos_table[j] = std::cos(angle);
      sin_table[j] = std::sin(angle);
    }
  }
};

// Copies a trajectory, zero-padding it to at least one window.
std::vector<double> Padded(std::span<const double> x, std::size_t window) {
  std::vector<double> out(std::max(x.size(), window), 0.0);
  std::copy(x.begin(), x.end(), out.begin());
  return out;
}

void ForEachFrameDft(
    const std::vector<double>& x, const FrameGeometry& g, const DftKernel& kernel,
    const auto& visit /* (m, k, re, im) */) {
  const std::size_t w = g.window;
  const std::size_t frames = StftFrameCount(x.size(), g);
  std::vector<double> seg(w);
  for (std::size_t m = 0; m < frames; ++m) {
    const double* src = x.data() + m * g.hop;
    for (std::size_t n = 0; n < w; ++n) seg[n] = kernel.window[n] * src[n];
    for (std::size_t k = 0; k < g.bins(); ++k) {
      double re = 0.0;
      double im = 0.0;
      std::size_t idx = 0;
      for (std::size_t n = 0; n < w; ++n) {
        re += seg[n] * kernel.cos_table[idx];
        im -= seg[n] * kernel.sin_table[idx];
        idx += k;
        if (idx >= w) idx -= w;
      }
      visit(m, k, re, im);
    }
  }
}

}  // namespace

LayerWeights LayerWeights::Uniform(std::size_t layers) {
  return {std::vector<double>(layers, 1.0 / static_cast<double>(layers))};
}

FrameGeometry MtbConfig::Resolve(double frame_rate) const {
  if (!(frame_rate > 0.0) || !std::isfinite(frame_rate)) {
    throw Error(ErrorCode::kValidation, "frame rate must be positive");
  }
  auto to_frames = [frame_rate](double ms) -> long long {
    return std::llround(ms * frame_rate / 1000.0);
  };
  long long window = window_frames ? static_cast<long long>(*window_frames)
                                   : to_frames(window_ms);
  long long hop =
      hop_frames ? static_cast<long long>(*hop_frames) : to_frames(hop_ms);
  if (!window_frames && !(window_ms > 0.0)) {
    throw Error(ErrorCode::kValidation, "window_ms must be positive");
  }
  if (!hop_frames && !(hop_ms > 0.0)) {
    throw Error(ErrorCode::kValidation, "hop_ms must be positive");
  }
  if (window < 2) {
    throw Error(ErrorCode::kValidation,
                "STFT window must span >= 2 frames, got " + std::to_string(window));
  }
  if (hop < 1 || hop > window) {
    throw Error(ErrorCode::kValidation,
                "STFT hop must be in [1, window], got " + std::to_string(hop));
  }
  if (!(epsilon > 0.0) || !std::isfinite(epsilon)) {
    throw Error(ErrorCode::kValidation, "epsilon must be positive");
  }
  return {static_cast<std::size_t>(window), static_cast<std::size_t>(hop)};
}

Matrix LayerCollapse(const RepresentationStack& stack, const LayerWeights& w) {
  if (w.size() != stack.layers()) {
    throw Error(ErrorCode::kDimension,
                "layer weights have " + std::to_string(w.size()) +
                    " entries, stack has " + std::to_string(stack.layers()) +
                    " layers");
  }
  Matrix out(stack.features(), stack.frames());
  for (std::size_t l = 0; l < stack.layers(); ++l) {
    const double wl = w.values[l];
    for (std::size_t f = 0; f < stack.features(); ++f) {
      auto src = stack.channel(l, f);
      auto dst = out.row(f);
      for (std::size_t t = 0; t < src.size(); ++t) dst[t] += wl * src[t];
    }
  }
  return out;
}

std::vector<double> WindowCoefficients(WindowFunction fn, std::size_t length) {
  std::vector<double> win(length, 1.0);
  if (fn == WindowFunction::kHann) {
    for (std::size_t n = 0; n < length; ++n) {
      win[n] = 0.5 - 0.5 * std::cos(2.0 * std::numbers::pi *
                                    static_cast<double>(n) /
                                    static_cast<double>(length));
    }
  }
  return win;
}

std::size_t StftFrameCount(std::size_t frames, const FrameGeometry& geometry) {
  const std::size_t padded = std::max(frames, geometry.window);
  return (padded - geometry.window) / geometry.hop + 1;
}

BasicMatrix<std::complex<double>> StftFrames(std::span<const double> x,
                                             const FrameGeometry& geometry,
                                             WindowFunction fn) {
  const DftKernel kernel(geometry.window, fn);
  const auto padded = Padded(x, geometry.window);
  BasicMatrix<std::complex<double>> out(geometry.bins(),
                                        StftFrameCount(x.size(), geometry));
  ForEachFrameDft(padded, geometry, kernel,
                  [&out](std::size_t m, std::size_t k, double re, double im) {
                    out(k, m) = {re, im};
                  });
  return out;
}

BasicMatrix<std::complex<double>> StftFrames(std::span<const double> x,
                                             const MtbConfig& cfg,
                                             double frame_rate) {
  return StftFrames(x, cfg.Resolve(frame_rate), cfg.window);
}

Matrix ModulationEnergy(const Matrix& collapsed, const FrameGeometry& geometry,
                        WindowFunction fn) {
  const DftKernel kernel(geometry.window, fn);
  const std::size_t frames = StftFrameCount(collapsed.cols(), geometry);
  const double scale = 1.0 / static_cast<double>(frames);
  Matrix energy(collapsed.rows(), geometry.bins());
  for (std::size_t f = 0; f < collapsed.rows(); ++f) {
    const auto padded = Padded(collapsed.row(f), geometry.window);
    auto row = energy.row(f);
    ForEachFrameDft(padded, geometry, kernel,
                    [&row](std::size_t, std::size_t k, double re, double im) {
                      row[k] += re * re + im * im;
                    });
    for (double& e : row) e *= scale;
  }
  return energy;
}

Matrix ModulationEnergyBackward(const Matrix& collapsed,
                                const FrameGeometry& geometry,
                                WindowFunction fn, const Matrix& grad_energy) {
  if (grad_energy.rows() != collapsed.rows() ||
      grad_energy.cols() != geometry.bins()) {
    throw Error(ErrorCode::kDimension, "energy gradient has wrong shape");
  }
  const DftKernel kernel(geometry.window, fn);
  const std::size_t w = geometry.window;
  const std::size_t frames = StftFrameCount(collapsed.cols(), geometry);
  const double scale = 2.0 / static_cast<double>(frames);
  Matrix grad(collapsed.rows(), collapsed.cols());
  for (std::size_t f = 0; f < collapsed.rows(); ++f) {
    const auto padded = Padded(collapsed.row(f), w);
    std::vector<double> grad_padded(padded.size(), 0.0);
    auto g_e = grad_energy.row(f);
    // d|X_km|^2 / dx[m*hop+n] = 2 win[n] (Re X cos(2pi kn/W) - Im X sin(2pi kn/W))
    ForEachFrameDft(padded, geometry, kernel,
                    [&](std::size_t m, std::size_t k, double re, double im) {
                      const double g = scale * g_e[k];
                      if (g == 0.0) return;
                      double* dst = grad_padded.data() + m * geometry.hop;
                      std::size_t idx = 0;
                      for (std::size_t n = 0; n < w; ++n) {
                        dst[n] += g * kernel.window[n] *
                                  (re * kernel.cos_table[idx] -
                                   im * kernel.sin_table[idx]);
                        idx += k;
                        if (idx >= w) idx -= w;
                      }
                    });
    auto out = grad.row(f);
    std::copy_n(grad_padded.begin(), out.size(), out.begin());
  }
  return grad;
}

std::vector<double> LayerCollapseBackward(const RepresentationStack& stack,
                                          const Matrix& grad_collapsed) {
  if (grad_collapsed.rows() != stack.features() ||
      grad_collapsed.cols() != stack.frames()) {
    throw Error(ErrorCode::kDimension, "collapse gradient has wrong shape");
  }
  std::vector<double> grad(stack.layers(), 0.0);
  for (std::size_t l = 0; l < stack.layers(); ++l) {
    double acc = 0.0;
    for (std::size_t f = 0; f < stack.features(); ++f) {
      auto src = stack.channel(l, f);
      auto g = grad_collapsed.row(f);
      for (std::size_t t = 0; t < src.size(); ++t) acc += g[t] * src[t];
    }
    grad[l] = acc;
  }
  return grad;
}

ModulationRepresentation ModulationFromCollapsed(const Matrix& collapsed,
                                                 double frame_rate,
                                                 const MtbConfig& cfg) {
  const FrameGeometry geometry = cfg.Resolve(frame_rate);
  ModulationRepresentation out;
  out.values = ModulationEnergy(collapsed, geometry, cfg.window);
  for (double& v : out.values.data()) v = std::log(v + cfg.epsilon);
  out.bin_freqs.resize(geometry.bins());
  for (std::size_t k = 0; k < geometry.bins(); ++k) {
    out.bin_freqs[k] = static_cast<double>(k) * frame_rate /
                       static_cast<double>(geometry.window);
  }
  return out;
}

ModulationRepresentation MtbTransform(const RepresentationStack& stack,
                                      const LayerWeights& w,
                                      const MtbConfig& cfg) {
  return ModulationFromCollapsed(LayerCollapse(stack, w), stack.frame_rate(),
                                 cfg);
}

std::vector<double> PoolRaw(const Matrix& collapsed) {
  std::vector<double> out(collapsed.rows(), 0.0);
  for (std::size_t f = 0; f < collapsed.rows(); ++f) {
    double acc = 0.0;
    for (double v : collapsed.row(f)) acc += v;
    out[f] = acc / static_cast<double>(collapsed.cols());
  }
  return out;
}

std::vector<double> PoolModulation(const ModulationRepresentation& m) {
  return PoolRaw(m.values);
}

std::vector<double> FeatureMeanPattern(const ModulationRepresentation& m) {
  std::vector<double> out(m.bins(), 0.0);
  for (std::size_t f = 0; f < m.features(); ++f) {
    auto row = m.values.row(f);
    for (std::size_t k = 0; k < out.size(); ++k) out[k] += row[k];
  }
  for (double& v : out) v /= static_cast<double>(m.features());
  return out;
}

std::vector<double> FeatureMeanPattern(const ModulationRepresentation& m,
                                       const ModulationRepresentation& reference) {
  if (m.features() != reference.features() || m.bins() != reference.bins()) {
    throw Error(ErrorCode::kDimension,
                "reference modulation representation has a different shape");
  }
  auto out = FeatureMeanPattern(m);
  const auto ref = FeatureMeanPattern(reference);
  for (std::size_t k = 0; k < out.size(); ++k) out[k] -= ref[k];
  return out;
}

std::string FormatModulationText(const ModulationRepresentation& m) {
  std::string out = "feature";
  for (double hz : m.bin_freqs) out += "," + internal::FormatDouble(hz);
  out += "\n";
  for (std::size_t f = 0; f < m.features(); ++f) {
    out += std::to_string(f);
    for (double v : m.values.row(f)) out += "," + internal::FormatDouble(v);
    out += "\n";
  }
  return out;
}

void WriteModulationText(const ModulationRepresentation& m,
                         const std::filesystem::path& path) {
  internal::AtomicWriteFile(path, std::string_view(FormatModulationText(m)));
}

}  // namespace moddyn
