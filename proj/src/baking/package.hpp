// Copyright 2026 The Rerend Authors
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

#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "baking/atlas.hpp"
#include "baking/bake.hpp"
#include "baking/layout.hpp"
#include "geometry/mesh.hpp"

namespace rerend {

inline constexpr int kPackageVersion = 1;
inline constexpr const char* kVariantFactorized = "factorized";
inline constexpr const char* kVariantRgbNormal = "rgb_normal";

/// Deployable scene: the collision mesh (face index = atlas slot) plus
/// quantized atlases. The factorized variant stores M_u, M_v, M_w, M_beta
/// in that order; the rgb_normal variant stores one 4-channel RGB0 atlas.
struct AssetPackage {
  std::string variant = kVariantFactorized;
  int dim = 0;  // channels per position atlas
  TexelLayout layout;
  DirectionGrid grid;
  Rgb background = Rgb::Ones();
  TriMesh mesh;
  std::vector<QuantizedAtlas> atlases;

  bool factorized() const { return variant == kVariantFactorized; }
  const QuantizedAtlas& atlas(AtlasRole role) const;

  /// Checks every cross-component invariant; raises kDimension on mismatch.
  void validate() const;
};

/// Bakes and quantizes a field over a mesh into a factorized package.
AssetPackage bake_package(const FactorizedField& field, const TriMesh& mesh, int p, const DirectionGrid& grid,
                          const Rgb& background);

/// RGB-textured-mesh baseline: one view-independent color per texel.
AssetPackage bake_rgb_baseline(const FactorizedField& field, const TriMesh& mesh, int p, const Rgb& background);

/// Manifest JSON text of a package.
std::string package_manifest(const AssetPackage& pkg);

/// Writes mesh.obj, the PNGs and manifest.json; returns the manifest text.
std::string write_asset_package(const std::filesystem::path& dir, const AssetPackage& pkg);

AssetPackage read_asset_package(const std::filesystem::path& dir);

/// Total bytes of the package's files on disk.
std::uintmax_t package_disk_bytes(const std::filesystem::path& dir);

}  // namespace rerend
