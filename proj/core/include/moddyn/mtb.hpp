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

#ifndef MODDYN_MTB_HPP_
#define MODDYN_MTB_HPP_

#include <complex>
#include <cstddef>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "moddyn/matrix.hpp"
#include "moddyn/repstack.hpp"

namespace moddyn {

/// One learnable scalar per encoder layer.
struct LayerWeights {
  std::vector<double> values;

  std::size_t size() const { return values.size(); }
  /// All layers weighted 1/L.
  static LayerWeights Uniform(std::size_t layers);
};

enum class WindowFunction { kHann, kRectangular };

/// Window and hop in representation frames, after millisecond conversion.
struct FrameGeometry {
  std::size_t window = 0;
  std::size_t hop = 0;

  std::size_t bins() const { return window / 2 + 1; }
};

struct MtbConfig {
  double window_ms = 128.0;
  double hop_ms = 32.0;
  // Explicit frame counts take precedence over the millisecond values.
  std::optional<std::size_t> window_frames;
  std::optional<std::size_t> hop_frames;
  WindowFunction window = WindowFunction::kHann;
  double epsilon = 1e-10;

  /// frames = round(ms * frame_rate / 1000) unless overridden. Throws
  /// Error(kValidation) unless window >= 2, 1 <= hop <= window and
  /// epsilon > 0.
  FrameGeometry Resolve(double frame_rate) const;
};

/// features x modulation-bin log energies.
struct ModulationRepresentation {
  Matrix values;                  // F x K
  std::vector<double> bin_freqs;  // k * frame_rate / W, Hz

  std::size_t features() const { return values.rows(); }
  std::size_t bins() const { return values.cols(); }
};

/// out[f,t] = sum_l w[l] * stack[l,f,t]. Throws Error(kDimension) when the
/// weight count differs from the stack's layer count.
Matrix LayerCollapse(const RepresentationStack& stack, const LayerWeights& w);

/// Periodic Hann (0.5 - 0.5 cos(2 pi n / W)) or all-ones.
std::vector<double> WindowCoefficients(WindowFunction fn, std::size_t length);

/// Nframes = floor((max(T, W) - W) / hop) + 1.
std::size_t StftFrameCount(std::size_t frames, const FrameGeometry& geometry);

/// One-sided STFT across time of a single trajectory: K x Nframes, where
/// column m holds the DFT of win[n] * x[m*hop + n], n < W. Inputs shorter than
/// one window are zero-padded.
BasicMatrix<std::complex<double>> StftFrames(std::span<const double> x,
                                             const FrameGeometry& geometry,
                                             WindowFunction fn);
BasicMatrix<std::complex<double>> StftFrames(std::span<const double> x,
                                             const MtbConfig& cfg,
                                             double frame_rate);

/// Temporal mean of |STFT|^2 per (feature, bin), F x K, before the log.
Matrix ModulationEnergy(const Matrix& collapsed, const FrameGeometry& geometry,
                        WindowFunction fn);

/// Given dL/dE for every (feature, bin) of ModulationEnergy, returns dL/dx for
/// every (feature, frame) of `collapsed`. Exact: E is a quadratic form in x.
Matrix ModulationEnergyBackward(const Matrix& collapsed,
                                const FrameGeometry& geometry,
                                WindowFunction fn, const Matrix& grad_energy);

/// dL/dw[l] = sum_{f,t} grad[f,t] * stack[l,f,t].
std::vector<double> LayerCollapseBackward(const RepresentationStack& stack,
                                          const Matrix& grad_collapsed);

/// log(ModulationEnergy + epsilon) with bin frequencies attached.
ModulationRepresentation ModulationFromCollapsed(const Matrix& collapsed,
                                                 double frame_rate,
                                                 const MtbConfig& cfg);

/// The full block: layer collapse, per-channel STFT, mean energy, log.
ModulationRepresentation MtbTransform(const RepresentationStack& stack,
                                      const LayerWeights& w,
                                      const MtbConfig& cfg);

/// Mean over time of each collapsed channel.
std::vector<double> PoolRaw(const Matrix& collapsed);

/// Mean over modulation bins of each feature row.
std::vector<double> PoolModulation(const ModulationRepresentation& m);

/// Mean over features of each bin; optionally minus the same pattern of a
/// reference. Throws Error(kDimension) on shape mismatch.
std::vector<double> FeatureMeanPattern(const ModulationRepresentation& m);
std::vector<double> FeatureMeanPattern(const ModulationRepresentation& m,
                                       const ModulationRepresentation& reference);

/// Comma-separated text: header row of bin frequencies, then one row per
/// feature.
std::string FormatModulationText(const ModulationRepresentation& m);
void WriteModulationText(const ModulationRepresentation& m,
                         const std::filesystem::path& path);

}  // namespace moddyn

#endif  // MODDYN_MTB_HPP_
