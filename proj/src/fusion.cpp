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
#include "ldo/fusion.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <fmt/format.h>

namespace ldo {
namespace {

std::vector<double> Mlp(std::span<const double> v, const ContextParams& p) {
  const std::size_t c = p.channels();
  const std::size_t hidden = p.mlp_bias1.size();
  std::vector<double> mid(hidden);
  for (std::size_t j = 0; j < hidden; ++j) {
    double acc = p.mlp_bias1[j];
    for (std::size_t i = 0; i < c; ++i) acc += p.mlp_weight1(i, j) * v[i];
    mid[j] = std::max(acc, 0.0);
  }
  std::vector<double> out(c);
  for (std::size_t o = 0; o < c; ++o) {
    double acc = p.mlp_bias2[o];
    for (std::size_t j = 0; j < hidden; ++j) acc += p.mlp_weight2(j, o) * mid[j];
    out[o] = acc;
  }
  return out;
}

double Sigmoid(double x) {
  if (x >= 0.0) return 1.0 / (1.0 + std::exp(-x));
  const double e = std::exp(x);
  return e / (1.0 + e);
}

ContextParams ContextFromBundle(const TensorBundle& b, const std::string& prefix) {
  return {FindTensor(b, prefix + ".pre_conv.weight"), FindTensor(b, prefix + ".pre_conv.bias"),
          FindTensor(b, prefix + ".mlp.0.weight"),    FindTensor(b, prefix + ".mlp.0.bias"),
          FindTensor(b, prefix + ".mlp.1.weight"),    FindTensor(b, prefix + ".mlp.1.bias")};
}

void AppendContext(TensorBundle& b, const ContextParams& p, const std::string& prefix) {
  b.push_back({prefix + ".pre_conv.weight", p.pre_conv_weight});
  b.push_back({prefix + ".pre_conv.bias", p.pre_conv_bias});
  b.push_back({prefix + ".mlp.0.weight", p.mlp_weight1});
  b.push_back({prefix + ".mlp.0.bias", p.mlp_bias1});
  b.push_back({prefix + ".mlp.1.weight", p.mlp_weight2});
  b.push_back({prefix + ".mlp.1.bias", p.mlp_bias2});
}

}  // namespace

ContextParams ContextParams::Zeros(std::size_t channels, std::size_t hidden) {
  return {FeatureGrid({channels, channels, 3, 3}), FeatureGrid({channels}),
          FeatureGrid({channels, hidden}),         FeatureGrid({hidden}),
          FeatureGrid({hidden, channels}),         FeatureGrid({channels})};
}

void ContextParams::Validate() const {
  const std::size_t c = channels();
  if (pre_conv_bias.rank() != 1 || c == 0 || mlp_bias1.rank() != 1) {
    throw Error(ErrorCode::kShapeMismatch, "context parameters need [C] and [Ch] biases");
  }
  const std::size_t hidden = mlp_bias1.size();
  RequireShape(pre_conv_weight, {c, c, 3, 3}, "context pre_conv weight");
  RequireShape(mlp_weight1, {c, hidden}, "context mlp first weight");
  RequireShape(mlp_weight2, {hidden, c}, "context mlp second weight");
  RequireShape(mlp_bias2, {c}, "context mlp second bias");
}

FusionParams FusionParams::Zeros(std::size_t channels, std::size_t hidden) {
  return {ContextParams::Zeros(channels, hidden), ContextParams::Zeros(channels, hidden),
          FeatureGrid({channels, channels, 3, 3}), FeatureGrid({channels}),
          FeatureGrid({channels, channels, 3, 3}), FeatureGrid({channels})};
}

FusionParams FusionParams::FromBundle(const TensorBundle& bundle) {
  FusionParams p{ContextFromBundle(bundle, "ctx_local"), ContextFromBundle(bundle, "ctx_global"),
                 FindTensor(bundle, "conv_g.weight"),     FindTensor(bundle, "conv_g.bias"),
                 FindTensor(bundle, "conv_l.weight"),     FindTensor(bundle, "conv_l.bias")};
  p.Validate();
  return p;
}

TensorBundle FusionParams::ToBundle() const {
  TensorBundle b;
  AppendContext(b, ctx_local, "ctx_local");
  AppendContext(b, ctx_global, "ctx_global");
  b.push_back({"conv_g.weight", conv_g_weight});
  b.push_back({"conv_g.bias", conv_g_bias});
  b.push_back({"conv_l.weight", conv_l_weight});
  b.push_back({"conv_l.bias", conv_l_bias});
  return b;
}

void FusionParams::Validate() const {
  ctx_local.Validate();
  ctx_global.Validate();
  const std::size_t c = ctx_local.channels();
  if (ctx_global.channels() != c) {
    throw Error(ErrorCode::kShapeMismatch, "local and global contexts disagree on channels");
  }
  RequireShape(conv_g_weight, {c, c, 3, 3}, "conv_g weight");
  RequireShape(conv_g_bias, {c}, "conv_g bias");
  RequireShape(conv_l_weight, {c, c, 3, 3}, "conv_l weight");
  RequireShape(conv_l_bias, {c}, "conv_l bias");
}

std::vector<double> ContextDistill(const FeatureGrid& features, const ContextParams& params) {
  params.Validate();
  if (features.rank() != 3 || features.dim(0) != params.channels() || features.dim(1) == 0 ||
      features.dim(2) == 0) {
    throw Error(ErrorCode::kShapeMismatch,
                fmt::format("context input [{}] does not match {} channels",
                            fmt::join(features.dims(), ", "), params.channels()));
  }
  const FeatureGrid refined = Conv3x3(features, params.pre_conv_weight, params.pre_conv_bias);
  const std::size_t c = refined.dim(0);
  const std::size_t plane = refined.dim(1) * refined.dim(2);

  std::vector<double> avg(c, 0.0);
  std::vector<double> max(c, -std::numeric_limits<double>::infinity());
  for (std::size_t ch = 0; ch < c; ++ch) {
    for (std::size_t i = 0; i < plane; ++i) {
      const double v = refined[ch * plane + i];
      avg[ch] += v;
      max[ch] = std::max(max[ch], v);
    }
    avg[ch] /= static_cast<double>(plane);
  }

  std::vector<double> out = Mlp(avg, params);
  const std::vector<double> from_max = Mlp(max, params);
  for (std::size_t ch = 0; ch < c; ++ch) out[ch] += from_max[ch];
  return out;
}

std::vector<double> GateAlpha(std::span<const double> local, std::span<const double> global) {
  if (local.size() != global.size()) {
    throw Error(ErrorCode::kShapeMismatch,
                fmt::format("gate inputs have {} and {} channels", local.size(), global.size()));
  }
  constexpr double kLow = std::numeric_limits<double>::denorm_min();
  const double high = std::nextafter(1.0, 0.0);
  std::vector<double> alpha(local.size());
  for (std::size_t i = 0; i < alpha.size(); ++i) {
    alpha[i] = std::clamp(Sigmoid(local[i] + global[i]), kLow, high);
  }
  return alpha;
}

FeatureGrid CffFuse(const FeatureGrid& global, const FeatureGrid& local, const FusionParams& params) {
  params.Validate();
  if (global.dims() != local.dims()) {
    throw Error(ErrorCode::kShapeMismatch,
                fmt::format("global [{}] and local [{}] features differ in shape",
                            fmt::join(global.dims(), ", "), fmt::join(local.dims(), ", ")));
  }
  const std::vector<double> alpha = GateAlpha(ContextDistill(local, params.ctx_local),
                                              ContextDistill(global, params.ctx_global));
  const FeatureGrid g = Conv3x3(global, params.conv_g_weight, params.conv_g_bias);
  const FeatureGrid l = Conv3x3(local, params.conv_l_weight, params.conv_l_bias);

  FeatureGrid out(g.dims());
  const std::size_t plane = g.dim(1) * g.dim(2);
  for (std::size_t ch = 0; ch < g.dim(0); ++ch) {
    for (std::size_t i = ch * plane; i < (ch + 1) * plane; ++i) {
      out[i] = static_cast<float>(alpha[ch] * g[i] + (1.0 - alpha[ch]) * l[i]);
    }
  }
  return out;
}

FeatureGrid ChannelToHeight(const FeatureGrid& bev, std::size_t z, std::size_t channels_out) {
  if (bev.rank() != 3) throw Error(ErrorCode::kShapeMismatch, "C2H input must be [C, H, W]");
  if (z == 0 || channels_out * z != bev.dim(0)) {
    throw Error(ErrorCode::kIndivisibleChannels,
                fmt::format("{} channels cannot split into {} x {}", bev.dim(0), channels_out, z));
  }
  // Channel c * Z + k of a row-major [C', H, W] array already sits where
  // [c, k] of a row-major [C'', Z, H, W] array lives, so this is a reshape.
  return bev.Reshaped({channels_out, z, bev.dim(1), bev.dim(2)});
}

FeatureGrid HeightToChannel(const FeatureGrid& voxels) {
  if (voxels.rank() != 4) throw Error(ErrorCode::kShapeMismatch, "H2C input must be [C, Z, H, W]");
  return voxels.Reshaped({voxels.dim(0) * voxels.dim(1), voxels.dim(2), voxels.dim(3)});
}

double WeightedOccLoss(const ProbabilityGrid& pred, const LdoGrid& gt, double beta) {
  const VoxelCoord& dims = gt.spec.dims();
  if (pred.rank() != 4 || pred.dim(1) != dims[0] || pred.dim(2) != dims[1] ||
      pred.dim(3) != dims[2]) {
    throw Error(ErrorCode::kShapeMismatch,
                fmt::format("prediction [{}] does not cover grid [{}, {}, {}]",
                            fmt::join(pred.dims(), ", "), dims[0], dims[1], dims[2]));
  }
  const std::size_t classes = pred.dim(0);
  const std::size_t voxels = gt.spec.voxel_count();

  double weighted = 0.0;
  double total_weight = 0.0;
  for (std::size_t v = 0; v < voxels; ++v) {
    double sum = 0.0;
    for (std::size_t m = 0; m < classes; ++m) sum += pred[m * voxels + v];
    if (std::abs(sum - 1.0) > 1e-5) {
      throw Error(ErrorCode::kNotNormalized,
                  fmt::format("probabilities at voxel {} sum to {}", v, sum));
    }
    const std::uint16_t label = gt.labels[v];
    if (label >= classes) {
      throw Error(ErrorCode::kLabelOutOfRange,
                  fmt::format("voxel {} label {} >= {} predicted classes", v, label, classes));
    }
    const double w = label == kEmpty ? 1.0 : static_cast<double>(gt.weights[v]);
    const double p = std::max(pred[label * voxels + v], kLogClamp);
    weighted += w * -std::log(p);
    total_weight += w;
  }
  return total_weight == 0.0 ? 0.0 : beta * weighted / total_weight;
}

double WeightedOccLoss(const FeatureGrid& pred, const LdoGrid& gt, double beta) {
  std::vector<double> widened(pred.data().begin(), pred.data().end());
  return WeightedOccLoss(ProbabilityGrid(pred.dims(), std::move(widened)), gt, beta);
}

}  // namespace ldo
