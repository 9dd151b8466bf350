/* Copyright 2026 The LDO Authors. All Rights Reserved.

Licensed under the Apache License, Version 2.0 (the "License");
you may not use this file except in compliance with the License.
You may obtain a copy of the License at

    http://www.apache.org/licenses/LICENSE-2.0

Unless required by applicable law or agreed to in writing, software
distributed under the License is distributed on an "AS IS" BASIS,
WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
See the License for the specific language governing permissions and
limitations under the License.
==============================================================================*/
#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "ldo/tensor.hpp"
#include "ldo/voxelizer.hpp"

namespace ldo {

// Conv, then avg- and max-pooling, then a shared two-layer MLP.
struct ContextParams {
  FeatureGrid pre_conv_weight;  // [C, C, 3, 3]
  FeatureGrid pre_conv_bias;    // [C]
  FeatureGrid mlp_weight1;      // [C, Ch]
  FeatureGrid mlp_bias1;        // [Ch]
  FeatureGrid mlp_weight2;      // [Ch, C]
  FeatureGrid mlp_bias2;        // [C]

  static ContextParams Zeros(std::size_t channels, std::size_t hidden);
  std::size_t channels() const { return pre_conv_bias.size(); }
  void Validate() const;
};

struct FusionParams {
  ContextParams ctx_local;
  ContextParams ctx_global;
  FeatureGrid conv_g_weight;  // [C, C, 3, 3]
  FeatureGrid conv_g_bias;    // [C]
  FeatureGrid conv_l_weight;  // [C, C, 3, 3]
  FeatureGrid conv_l_bias;    // [C]

  static FusionParams Zeros(std::size_t channels, std::size_t hidden);
  // Tensor names: "ctx_local.pre_conv.weight", "ctx_local.mlp.0.weight",
  // "ctx_local.mlp.1.bias", ..., "conv_g.weight", "conv_l.bias".
  static FusionParams FromBundle(const TensorBundle& bundle);
  TensorBundle ToBundle() const;
  void Validate() const;
};

// Channel descriptor of a [C, H, W] map: MLP(avg(conv(f))) + MLP(max(conv(f))).
// The hidden layer uses a rectifier.
std::vector<double> ContextDistill(const FeatureGrid& features, const ContextParams& params);

// Elementwise sigmoid(local + global). Results are clamped to the open
// interval (0, 1) so saturation never reaches either end.
std::vector<double> GateAlpha(std::span<const double> local, std::span<const double> global);

// alpha * conv_g(global) + (1 - alpha) * conv_l(local), alpha per channel.
FeatureGrid CffFuse(const FeatureGrid& global, const FeatureGrid& local, const FusionParams& params);

// [C' , H, W] -> [C'', Z, H, W] with out[c, k, h, w] = in[c * Z + k, h, w].
// Throws IndivisibleChannels unless C' == C'' * Z.
FeatureGrid ChannelToHeight(const FeatureGrid& bev, std::size_t z, std::size_t channels_out);
// Inverse of ChannelToHeight.
FeatureGrid HeightToChannel(const FeatureGrid& voxels);

inline constexpr double kDefaultBeta = 0.9;
inline constexpr double kLogClamp = 1e-12;

// Density-weighted cross-entropy over a [M, H, W, Z] probability volume,
// normalized by the total weight and scaled by beta. Occupied voxels weigh
// their density weight, EMPTY voxels weigh 1.
double WeightedOccLoss(const ProbabilityGrid& pred, const LdoGrid& gt, double beta = kDefaultBeta);
double WeightedOccLoss(const FeatureGrid& pred, const LdoGrid& gt, double beta = kDefaultBeta);

}  // namespace ldo
