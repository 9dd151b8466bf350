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
#include "ldo/tensor.hpp"

#include "binary_io.hpp"

namespace ldo {
namespace {

constexpr char kTensorMagic[4] = {'L', 'D', 'O', 'T'};
constexpr std::uint32_t kTensorVersion = 1;

}  // namespace

FeatureGrid Conv3x3(const FeatureGrid& input, const FeatureGrid& kernel, const FeatureGrid& bias) {
  if (input.rank() != 3) {
    throw Error(ErrorCode::kShapeMismatch, "convolution input must be [C, H, W]");
  }
  const std::size_t ci = input.dim(0), h = input.dim(1), w = input.dim(2);
  if (kernel.rank() != 4) throw Error(ErrorCode::kShapeMismatch, "convolution kernel must be rank 4");
  const std::size_t co = kernel.dim(0);
  RequireShape(kernel, {co, ci, 3, 3}, "convolution kernel");
  RequireShape(bias, {co}, "convolution bias");

  FeatureGrid out({co, h, w});
  for (std::size_t o = 0; o < co; ++o) {
    for (std::size_t y = 0; y < h; ++y) {
      for (std::size_t x = 0; x < w; ++x) {
        double acc = bias[o];
        for (std::size_t i = 0; i < ci; ++i) {
          for (std::size_t ky = 0; ky < 3; ++ky) {
            if (y + ky < 1 || y + ky - 1 >= h) continue;
            for (std::size_t kx = 0; kx < 3; ++kx) {
              if (x + kx < 1 || x + kx - 1 >= w) continue;
              acc += static_cast<double>(kernel(o, i, ky, kx)) * input(i, y + ky - 1, x + kx - 1);
            }
          }
        }
        out(o, y, x) = static_cast<float>(acc);
      }
    }
  }
  return out;
}

FeatureGrid Project(const FeatureGrid& input, const FeatureGrid& weight, const FeatureGrid& bias) {
  if (input.rank() != 3) throw Error(ErrorCode::kShapeMismatch, "projection input must be [C, H, W]");
  const std::size_t ci = input.dim(0), h = input.dim(1), w = input.dim(2);
  if (weight.rank() != 2) throw Error(ErrorCode::kShapeMismatch, "projection weight must be rank 2");
  const std::size_t co = weight.dim(1);
  RequireShape(weight, {ci, co}, "projection weight");
  RequireShape(bias, {co}, "projection bias");

  FeatureGrid out({co, h, w});
  for (std::size_t o = 0; o < co; ++o) {
    for (std::size_t site = 0; site < h * w; ++site) {
      double acc = bias[o];
      for (std::size_t i = 0; i < ci; ++i) {
        acc += static_cast<double>(weight(i, o)) * input[i * h * w + site];
      }
      out[o * h * w + site] = static_cast<float>(acc);
    }
  }
  return out;
}

std::vector<char> EncodeTensorBundle(const TensorBundle& bundle) {
  io::ByteWriter out;
  out.PutBytes(std::string_view(kTensorMagic, 4));
  out.Put<std::uint32_t>(kTensorVersion);
  out.Put<std::uint32_t>(static_cast<std::uint32_t>(bundle.size()));
  for (const NamedTensor& t : bundle) {
    if (t.tensor.rank() > 255) throw Error(ErrorCode::kShapeMismatch, t.name + ": rank exceeds 255");
    out.Put<std::uint32_t>(static_cast<std::uint32_t>(t.name.size()));
    out.PutBytes(t.name);
    out.Put<std::uint8_t>(static_cast<std::uint8_t>(t.tensor.rank()));
    for (std::size_t d : t.tensor.dims()) out.Put<std::uint32_t>(static_cast<std::uint32_t>(d));
    for (float v : t.tensor.data()) out.Put(v);
  }
  return out.bytes();
}

TensorBundle DecodeTensorBundle(std::span<const char> bytes, const std::string& source) {
  io::ByteReader in(bytes, source);
  if (in.GetBytes(4, "magic") != std::string_view(kTensorMagic, 4)) {
    throw Error(ErrorCode::kBadMagic, source + ": expected magic 'LDOT'");
  }
  const auto version = in.Get<std::uint32_t>("version");
  if (version != kTensorVersion) {
    throw Error(ErrorCode::kBadVersion,
                fmt::format("{}: version {} (supported: {})", source, version, kTensorVersion));
  }
  const auto count = in.Get<std::uint32_t>("tensor_count");
  TensorBundle bundle;
  for (std::uint32_t t = 0; t < count; ++t) {
    const auto name_length = in.Get<std::uint32_t>("name_length");
    std::string name = in.GetBytes(name_length, "name");
    const auto rank = in.Get<std::uint8_t>("rank");
    std::vector<std::size_t> dims(rank);
    std::size_t total = 1;
    for (auto& d : dims) {
      d = in.Get<std::uint32_t>("dims");
      if (d != 0 && total > in.remaining() / d) {
        throw Error(ErrorCode::kTruncatedFile,
                    fmt::format("{}: tensor '{}' is larger than the file", source, name));
      }
      total *= d;
    }
    if (total > in.remaining() / sizeof(float)) {
      throw Error(ErrorCode::kTruncatedFile,
                  fmt::format("{}: tensor '{}' is larger than the file", source, name));
    }
    std::vector<float> data(total);
    for (float& v : data) v = in.Get<float>("payload");
    try {
      bundle.push_back({std::move(name), FeatureGrid(std::move(dims), std::move(data))});
    } catch (const Error& e) {
      throw Error(e.code(), source + ": " + e.what());
    }
  }
  if (in.remaining() != 0) {
    throw Error(ErrorCode::kTruncatedFile,
                fmt::format("{}: {} trailing bytes after {} tensors", source, in.remaining(), count));
  }
  return bundle;
}

void WriteTensorBundle(const std::filesystem::path& path, const TensorBundle& bundle) {
  io::WriteFile(path, EncodeTensorBundle(bundle));
}

TensorBundle ReadTensorBundle(const std::filesystem::path& path) {
  const std::vector<char> bytes = io::ReadFile(path);
  return DecodeTensorBundle(bytes, path.string());
}

const FeatureGrid& FindTensor(const TensorBundle& bundle, std::string_view name) {
  for (const NamedTensor& t : bundle) {
    if (t.name == name) return t.tensor;
  }
  throw Error(ErrorCode::kShapeMismatch, fmt::format("tensor '{}' missing from bundle", name));
}

}  // namespace ldo
