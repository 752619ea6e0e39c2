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

#include "baking/package.hpp"

#include <json.hpp>

#include "common/binary_io.hpp"
#include "common/error.hpp"

namespace rerend {

using nlohmann::json;

namespace {

constexpr const char* kManifestFile = "manifest.json";
constexpr const char* kMeshFile = "mesh.obj";

std::vector<AtlasRole> roles_of(const std::string& variant) {
  if (variant == kVariantFactorized) return {AtlasRole::kU, AtlasRole::kV, AtlasRole::kW, AtlasRole::kBeta};
  if (variant == kVariantRgbNormal) return {AtlasRole::kRgb};
  fail(ErrorKind::kDecode, "unknown package variant '" + variant + "'");
}

std::string png_name(AtlasRole role) { return std::string(atlas_role_key(role)) + ".png"; }

}  // namespace

const QuantizedAtlas& AssetPackage::atlas(AtlasRole role) const {
  for (const QuantizedAtlas& a : atlases) {
    if (a.atlas.role == role) return a;
  }
  fail(ErrorKind::kDimension, std::string("package has no ") + atlas_role_key(role) + " atlas");
}

void AssetPackage::validate() const {
  auto mismatch = [](const std::string& what) { fail(ErrorKind::kDimension, "package: " + what); };
  const auto roles = roles_of(variant);
  if (atlases.size() != roles.size()) mismatch("wrong number of atlases for variant " + variant);
  if (mesh.faces.size() != layout.n_faces) mismatch("mesh face count differs from the layout's n_faces");
  if (layout.texels_per_face != texel_count(layout.p)) mismatch("texels_per_face differs from ceil(p^2/2)");
  const TexelLayout expected = layout_atlas(layout.n_faces, layout.p);
  if (expected.width != layout.width || expected.height != layout.height ||
      expected.quads_per_row != layout.quads_per_row || expected.quad_width != layout.quad_width) {
    mismatch("atlas dimensions do not match the packing of n_faces and p");
  }
  if (dim < 4 || dim % 4 != 0) mismatch("D must be a positive multiple of 4");
  if (factorized()) grid.validate();
  for (std::size_t k = 0; k < roles.size(); ++k) {
    const QuantizedAtlas& a = atlases[k];
    const bool beta = roles[k] == AtlasRole::kBeta;
    const int w = beta ? grid.n_azim : layout.width;
    const int h = beta ? grid.n_elev : layout.height;
    const int c = roles[k] == AtlasRole::kRgb ? 4 : dim;
    if (a.atlas.role != roles[k]) mismatch("atlas order does not follow the variant");
    if (a.atlas.width != w || a.atlas.height != h || a.atlas.channels != c) {
      mismatch(std::string(atlas_role_key(roles[k])) + " dimensions differ from the manifest");
    }
    if (a.atlas.data.size() != a.atlas.plane_size() * static_cast<std::size_t>(c)) {
      mismatch(std::string(atlas_role_key(roles[k])) + " pixel buffer has the wrong size");
    }
    if (a.quant.range.size() != static_cast<std::size_t>(c)) {
      mismatch(std::string(atlas_role_key(roles[k])) + " quantization table has the wrong length");
    }
    for (const auto& [lo, hi] : a.quant.range) {
      if (!(lo <= hi) || !std::isfinite(lo) || !std::isfinite(hi)) {
        mismatch(std::string(atlas_role_key(roles[k])) + " has an invalid quantization range");
      }
    }
  }
}

AssetPackage bake_package(const FactorizedField& field, const TriMesh& mesh, int p, const DirectionGrid& grid,
                          const Rgb& background) {
  require(field.dim % 4 == 0, "baking needs D divisible by 4 (channel-tiled PNGs)");
  grid.validate();
  AssetPackage pkg;
  pkg.variant = kVariantFactorized;
  pkg.dim = field.dim;
  pkg.layout = layout_atlas(mesh.faces.size(), p);
  pkg.grid = grid;
  pkg.background = background;
  pkg.mesh = mesh;
  assign_corner_uv(pkg.mesh, pkg.layout);
  const auto mask = used_texel_mask(pkg.layout);
  for (const FloatAtlas& a : bake_position_atlases(field, mesh, pkg.layout)) pkg.atlases.push_back(quantize_atlas(a, mask));
  pkg.atlases.push_back(quantize_atlas(bake_direction_map(field, grid)));
  return pkg;
}

AssetPackage bake_rgb_baseline(const FactorizedField& field, const TriMesh& mesh, int p, const Rgb& background) {
  AssetPackage pkg;
  pkg.variant = kVariantRgbNormal;
  pkg.dim = 4;
  pkg.layout = layout_atlas(mesh.faces.size(), p);
  pkg.grid = DirectionGrid{0, 0};
  pkg.background = background;
  pkg.mesh = mesh;
  assign_corner_uv(pkg.mesh, pkg.layout);
  pkg.atlases.push_back(quantize_atlas(bake_rgb_atlas(field, mesh, pkg.layout), used_texel_mask(pkg.layout)));
  return pkg;
}

std::string package_manifest(const AssetPackage& pkg) {
  json m;
  m["version"] = kPackageVersion;
  m["variant"] = pkg.variant;
  m["D"] = pkg.dim;
  m["p"] = pkg.layout.p;
  m["texels_per_face"] = pkg.layout.texels_per_face;
  m["n_faces"] = pkg.layout.n_faces;
  m["atlas_width"] = pkg.layout.width;
  m["atlas_height"] = pkg.layout.height;
  m["quads_per_row"] = pkg.layout.quads_per_row;
  m["quad_width"] = pkg.layout.quad_width;
  m["dir_elev"] = pkg.grid.n_elev;
  m["dir_azim"] = pkg.grid.n_azim;
  m["elevation_convention"] = "from+y";
  m["azimuth_convention"] = "from+x_towards+z";
  m["uv_origin"] = "top-left";
  m["face_order"] = "face index = atlas slot";
  m["background"] = {pkg.background.x(), pkg.background.y(), pkg.background.z()};
  json quant = json::object();
  json pngs = json::object();
  for (const QuantizedAtlas& a : pkg.atlases) {
    json ranges = json::array();
    for (const auto& [lo, hi] : a.quant.range) ranges.push_back({static_cast<double>(lo), static_cast<double>(hi)});
    quant[atlas_role_key(a.atlas.role)] = ranges;
    pngs[atlas_role_key(a.atlas.role)] = png_name(a.atlas.role);
  }
  m["quant"] = quant;
  m["mesh_file"] = kMeshFile;
  m["png_files"] = pngs;
  return m.dump(2) + "\n";
}

std::string write_asset_package(const std::filesystem::path& dir, const AssetPackage& pkg) {
  pkg.validate();
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) fail(ErrorKind::kIo, "cannot create package directory " + dir.string() + ": " + ec.message());
  TriMesh mesh = pkg.mesh;
  if (mesh.corner_uv.size() != mesh.faces.size()) assign_corner_uv(mesh, pkg.layout);
  write_obj(dir / kMeshFile, mesh);
  for (const QuantizedAtlas& a : pkg.atlases) {
    write_file_bytes(dir / png_name(a.atlas.role), encode_channel_tiled_png(a.atlas));
  }
  const std::string manifest = package_manifest(pkg);
  write_text_file(dir / kManifestFile, manifest);
  return manifest;
}

namespace {

template <typename T>
T field(const json& m, const char* key) {
  if (!m.contains(key)) fail(ErrorKind::kDecode, std::string("manifest: missing field '") + key + "'");
  try {
    return m.at(key).get<T>();
  } catch (const json::exception&) {
    fail(ErrorKind::kDecode, std::string("manifest: field '") + key + "' has the wrong type");
  }
}

}  // namespace

AssetPackage read_asset_package(const std::filesystem::path& dir) {
  const std::string text = read_text_file(dir / kManifestFile);
  json m;
  try {
    m = json::parse(text);
  } catch (const json::exception& e) {
    fail(ErrorKind::kDecode, "manifest.json is not valid JSON: " + std::string(e.what()));
  }
  const int version = field<int>(m, "version");
  if (version != kPackageVersion) {
    fail(ErrorKind::kVersion, "package version " + std::to_string(version) + " is not supported (expected " +
                                  std::to_string(kPackageVersion) + ")");
  }
  AssetPackage pkg;
  pkg.variant = m.contains("variant") ? field<std::string>(m, "variant") : std::string(kVariantFactorized);
  pkg.dim = field<int>(m, "D");
  const int p = field<int>(m, "p");
  const auto n_faces = field<std::size_t>(m, "n_faces");
  if (p < 1 || p > 64 || n_faces < 1) fail(ErrorKind::kDimension, "manifest: p or n_faces out of range");
  pkg.layout = layout_atlas(n_faces, p);
  pkg.layout.texels_per_face = field<int>(m, "texels_per_face");
  pkg.layout.width = field<int>(m, "atlas_width");
  pkg.layout.height = field<int>(m, "atlas_height");
  pkg.layout.quads_per_row = field<int>(m, "quads_per_row");
  pkg.grid.n_elev = field<int>(m, "dir_elev");
  pkg.grid.n_azim = field<int>(m, "dir_azim");
  if (field<std::string>(m, "elevation_convention") != "from+y") {
    fail(ErrorKind::kDecode, "manifest: unsupported elevation convention");
  }
  const auto bg = field<std::vector<double>>(m, "background");
  if (bg.size() != 3) fail(ErrorKind::kDecode, "manifest: background must have 3 components");
  pkg.background = Rgb(bg[0], bg[1], bg[2]);
  const auto mesh_file = field<std::string>(m, "mesh_file");
  const json quant = field<json>(m, "quant");
  const json pngs = field<json>(m, "png_files");

  const auto check_dims = [&pkg]() {
    if (pkg.dim < 4 || pkg.dim % 4 != 0 || pkg.dim > 4096) {
      fail(ErrorKind::kDimension, "manifest: D = " + std::to_string(pkg.dim) + " is not a positive multiple of 4");
    }
    if (pkg.layout.texels_per_face != texel_count(pkg.layout.p)) {
      fail(ErrorKind::kDimension, "manifest: texels_per_face differs from ceil(p^2/2)");
    }
    const TexelLayout expected = layout_atlas(pkg.layout.n_faces, pkg.layout.p);
    if (expected.width != pkg.layout.width || expected.height != pkg.layout.height ||
        expected.quads_per_row != pkg.layout.quads_per_row) {
      fail(ErrorKind::kDimension, "manifest: atlas dimensions do not match n_faces and p");
    }
  };
  check_dims();

  pkg.mesh = read_obj(dir / mesh_file);
  if (pkg.mesh.faces.size() != n_faces) {
    fail(ErrorKind::kDimension, "manifest: n_faces = " + std::to_string(n_faces) + " but " + mesh_file + " has " +
                                    std::to_string(pkg.mesh.faces.size()) + " faces");
  }

  for (AtlasRole role : roles_of(pkg.variant)) {
    const std::string key = atlas_role_key(role);
    if (!pngs.contains(key) || !quant.contains(key)) fail(ErrorKind::kDecode, "manifest: no entry for " + key);
    const std::string file = pngs.at(key).get<std::string>();
    const bool beta = role == AtlasRole::kBeta;
    const int channels = role == AtlasRole::kRgb ? 4 : pkg.dim;
    const int w = beta ? pkg.grid.n_azim : pkg.layout.width;
    const int h = beta ? pkg.grid.n_elev : pkg.layout.height;
    if (w < 1 || h < 1) fail(ErrorKind::kDimension, "manifest: " + key + " has empty dimensions");
    QuantizedAtlas qa;
    const auto bytes = read_file_bytes(dir / file);
    qa.atlas = decode_channel_tiled_png(bytes, channels, w, h, role, file);
    const json& ranges = quant.at(key);
    if (!ranges.is_array() || ranges.size() != static_cast<std::size_t>(channels)) {
      fail(ErrorKind::kDimension, "manifest: quant." + key + " has " + std::to_string(ranges.size()) +
                                      " entries, expected " + std::to_string(channels));
    }
    for (const json& r : ranges) {
      if (!r.is_array() || r.size() != 2 || !r[0].is_number() || !r[1].is_number()) {
        fail(ErrorKind::kDecode, "manifest: quant." + key + " entries must be [min, max] pairs");
      }
      qa.quant.range.emplace_back(static_cast<float>(r[0].get<double>()), static_cast<float>(r[1].get<double>()));
    }
    pkg.atlases.push_back(std::move(qa));
  }
  pkg.validate();
  return pkg;
}

std::uintmax_t package_disk_bytes(const std::filesystem::path& dir) {
  std::uintmax_t total = 0;
  for (const auto& entry : std::filesystem::directory_iterator(dir)) {
    if (entry.is_regular_file()) total += entry.file_size();
  }
  return total;
}

}  // namespace rerend
