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

#include "pipeline/config.hpp"

#include <charconv>
#include <functional>
#include <sstream>

#include "common/binary_io.hpp"
#include "common/error.hpp"

namespace rerend {

namespace {

[[noreturn]] void bad(const std::string& key, const std::string& value, const std::string& why) {
  fail(ErrorKind::kConfig, "config key '" + key + "': cannot use '" + value + "' (" + why + ")");
}

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

template <typename T>
T parse_number(const std::string& key, const std::string& value) {
  T out{};
  const char* end = value.data() + value.size();
  const auto [ptr, ec] = std::from_chars(value.data(), end, out);
  if (ec != std::errc() || ptr != end) bad(key, value, "expected a number");
  return out;
}

bool parse_bool(const std::string& key, const std::string& value) {
  if (value == "true" || value == "1" || value == "yes") return true;
  if (value == "false" || value == "0" || value == "no") return false;
  bad(key, value, "expected true or false");
}

// Shortest text that parses back to the same double.
std::string fmt(double v) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

std::string fmt_bool(bool b) { return b ? "true" : "false"; }

struct Key {
  const char* name;
  const char* doc;
  std::function<void(PipelineConfig&, const std::string&, const std::string&)> set;
  std::function<std::string(const PipelineConfig&)> get;
};

#define RR_INT(field)                                                                                  \
  [](PipelineConfig& c, const std::string& k, const std::string& v) { c.field = parse_number<int>(k, v); }, \
      [](const PipelineConfig& c) { return std::to_string(c.field); }
#define RR_I64(field)                                                                                            \
  [](PipelineConfig& c, const std::string& k, const std::string& v) { c.field = parse_number<std::int64_t>(k, v); }, \
      [](const PipelineConfig& c) { return std::to_string(c.field); }
#define RR_SIZE(field)                                                                                           \
  [](PipelineConfig& c, const std::string& k, const std::string& v) { c.field = parse_number<std::size_t>(k, v); }, \
      [](const PipelineConfig& c) { return std::to_string(c.field); }
#define RR_DBL(field)                                                                                     \
  [](PipelineConfig& c, const std::string& k, const std::string& v) { c.field = parse_number<double>(k, v); }, \
      [](const PipelineConfig& c) { return fmt(c.field); }
#define RR_BOOL(field)                                                                          \
  [](PipelineConfig& c, const std::string& k, const std::string& v) { c.field = parse_bool(k, v); }, \
      [](const PipelineConfig& c) { return fmt_bool(c.field); }

const std::vector<Key>& keys() {
  static const std::vector<Key> table = {
      {"scene", "scene oracle: sphere (textured, specular) or boxgrid (checkerboard box)",
       [](PipelineConfig& c, const std::string& k, const std::string& v) {
         if (v == "sphere") c.scene = SceneKind::kSphere;
         else if (v == "boxgrid") c.scene = SceneKind::kBoxGrid;
         else bad(k, v, "expected sphere or boxgrid");
       },
       [](const PipelineConfig& c) { return std::string(c.scene == SceneKind::kSphere ? "sphere" : "boxgrid"); }},
      {"sphere_radius", "radius of the sphere scene", RR_DBL(sphere_radius)},
      {"specular", "specular weight of the sphere material", RR_DBL(specular)},
      {"shininess", "Phong exponent of the sphere material", RR_DBL(shininess)},
      {"oracle_mode", "oracle colors: surface (analytic first hit) or volume (quadrature)",
       [](PipelineConfig& c, const std::string& k, const std::string& v) {
         if (v == "surface") c.oracle_mode = RenderMode::kSurface;
         else if (v == "volume") c.oracle_mode = RenderMode::kVolume;
         else bad(k, v, "expected surface or volume");
       },
       [](const PipelineConfig& c) { return std::string(c.oracle_mode == RenderMode::kSurface ? "surface" : "volume"); }},
      {"volume_samples", "quadrature samples per ray in volume mode", RR_INT(volume_samples)},
      {"grid_k", "density lattice side K for marching cubes", RR_INT(grid_k)},
      {"iso", "marching-cubes iso value; negative selects half of (min + max)", RR_DBL(iso)},
      {"min_component_fraction", "drop connected components below this share of faces", RR_DBL(min_component_fraction)},
      {"decimate_target", "face budget after decimation; 0 disables decimation", RR_SIZE(decimate_target)},
      {"unbounded", "enclose the mesh with a background dome and floor", RR_BOOL(unbounded)},
      {"dome_radius", "dome radius", RR_DBL(dome_radius)},
      {"dome_floor", "height of the dome floor", RR_DBL(dome_floor)},
      {"dome_subdivisions", "dome tessellation level s (8 s^2 faces)", RR_INT(dome_subdivisions)},
      {"train_cameras", "number of pseudo-image cameras", RR_INT(train_cameras)},
      {"train_width", "pseudo-image width", RR_INT(train_width)},
      {"train_height", "pseudo-image height", RR_INT(train_height)},
      {"eval_cameras", "number of held-out evaluation cameras", RR_INT(eval_cameras)},
      {"eval_width", "evaluation image width", RR_INT(eval_width)},
      {"eval_height", "evaluation image height", RR_INT(eval_height)},
      {"fov", "horizontal field of view in degrees", RR_DBL(fov)},
      {"camera_radius", "distance of all cameras from the scene centre", RR_DBL(camera_radius)},
      {"D", "embedding dimension (multiple of 4)", RR_INT(arch.dim)},
      {"pos_depth", "hidden layers of the position network", RR_INT(arch.pos_depth)},
      {"pos_width", "width of the position network", RR_INT(arch.pos_width)},
      {"pos_frequencies", "positional-encoding frequencies of the position network", RR_INT(arch.pos_frequencies)},
      {"dir_depth", "hidden layers of the direction network", RR_INT(arch.dir_depth)},
      {"dir_width", "width of the direction network", RR_INT(arch.dir_width)},
      {"dir_frequencies", "positional-encoding frequencies of the direction network", RR_INT(arch.dir_frequencies)},
      {"residual_min_depth", "networks at least this deep get residual blocks", RR_INT(arch.residual_min_depth)},
      {"batch", "rays per training step", RR_SIZE(train.batch)},
      {"steps", "training steps", RR_I64(train.steps)},
      {"lr", "peak learning rate", RR_DBL(train.base_lr)},
      {"warmup", "linear warm-up steps", RR_I64(train.warmup)},
      {"cosine", "cosine decay of the learning rate after warm-up", RR_BOOL(train.cosine)},
      {"hard_ratio", "share of each batch drawn from the top-loss decile", RR_DBL(train.hard_ratio)},
      {"hard_refresh", "steps between refreshes of the top-loss decile", RR_I64(train.hard_refresh)},
      {"log_every", "steps between loss-history entries", RR_I64(train.log_every)},
      {"drop_misses", "exclude rays that miss the mesh from the loss", RR_BOOL(train.loss.drop_misses)},
      {"detach_dir", "freeze the direction network", RR_BOOL(train.loss.detach_dir)},
      {"p", "texels per triangle side (ceil(p^2/2) texels per face)", RR_INT(p)},
      {"dir_elev", "direction-grid elevation samples (poles included)", RR_INT(grid.n_elev)},
      {"dir_azim", "direction-grid azimuth samples", RR_INT(grid.n_azim)},
      {"background", "background color r,g,b in [0,1]",
       [](PipelineConfig& c, const std::string& k, const std::string& v) {
         std::stringstream ss(v);
         std::string part;
         std::vector<double> rgb;
         while (std::getline(ss, part, ',')) rgb.push_back(parse_number<double>(k, trim(part)));
         if (rgb.size() != 3) bad(k, v, "expected r,g,b");
         c.background = Rgb(rgb[0], rgb[1], rgb[2]);
       },
       [](const PipelineConfig& c) {
         return fmt(c.background.x()) + "," + fmt(c.background.y()) + "," + fmt(c.background.z());
       }},
      {"direction_fetch", "direction-map fetch: nearest or bilinear",
       [](PipelineConfig& c, const std::string& k, const std::string& v) {
         if (v == "nearest") c.direction_fetch = DirectionFetch::kNearest;
         else if (v == "bilinear") c.direction_fetch = DirectionFetch::kBilinear;
         else bad(k, v, "expected nearest or bilinear");
       },
       [](const PipelineConfig& c) {
         return std::string(c.direction_fetch == DirectionFetch::kNearest ? "nearest" : "bilinear");
       }},
      {"baseline", "bake variant: off (factorized) or rgb_normal (RGB-textured baseline)",
       [](PipelineConfig& c, const std::string& k, const std::string& v) {
         if (v == "off") c.baseline = BaselineMode::kOff;
         else if (v == "rgb_normal") c.baseline = BaselineMode::kRgbNormal;
         else bad(k, v, "expected off or rgb_normal");
       },
       [](const PipelineConfig& c) { return std::string(c.baseline == BaselineMode::kOff ? "off" : "rgb_normal"); }},
      {"sweep_reference", "sweep metric reference: oracle or float (unbaked field)",
       [](PipelineConfig& c, const std::string& k, const std::string& v) {
         if (v == "oracle") c.sweep_against_float = false;
         else if (v == "float") c.sweep_against_float = true;
         else bad(k, v, "expected oracle or float");
       },
       [](const PipelineConfig& c) { return std::string(c.sweep_against_float ? "float" : "oracle"); }},
      {"out", "output directory",
       [](PipelineConfig& c, const std::string&, const std::string& v) { c.out = v; },
       [](const PipelineConfig& c) { return c.out.string(); }},
      {"seed", "root seed; every stage derives its own seed from it by label",
       [](PipelineConfig& c, const std::string& k, const std::string& v) { c.seed = parse_number<std::uint64_t>(k, v); },
       [](const PipelineConfig& c) { return std::to_string(c.seed); }},
      {"threads", "worker threads; 0 uses RRND_THREADS or all cores", RR_INT(threads)},
  };
  return table;
}

#undef RR_INT
#undef RR_I64
#undef RR_SIZE
#undef RR_DBL
#undef RR_BOOL

const Key& find_key(const std::string& key) {
  for (const Key& k : keys()) {
    if (key == k.name) return k;
  }
  fail(ErrorKind::kConfig, "unknown config key '" + key + "' (see --help for the list)");
}

void check(bool ok, const char* key, const std::string& what) {
  if (!ok) fail(ErrorKind::kConfig, std::string("config key '") + key + "': " + what);
}

}  // namespace

void PipelineConfig::validate() const {
  check(sphere_radius > 0, "sphere_radius", "must be positive");
  check(specular >= 0 && shininess > 0, "specular", "needs specular >= 0 and shininess > 0");
  check(volume_samples >= 1, "volume_samples", "must be >= 1");
  check(grid_k >= 2 && grid_k <= 512, "grid_k", "must be in [2, 512]");
  check(min_component_fraction >= 0 && min_component_fraction < 1, "min_component_fraction", "must be in [0, 1)");
  check(dome_radius > 0 && dome_subdivisions >= 1, "dome_radius", "needs a positive radius and subdivisions >= 1");
  check(train_cameras >= 1 && train_width >= 1 && train_height >= 1, "train_cameras", "cameras and sizes must be >= 1");
  check(eval_cameras >= 1 && eval_width >= 11 && eval_height >= 11, "eval_cameras",
        "needs >= 1 camera of at least 11x11 pixels (SSIM window)");
  check(fov > 0 && fov < 180, "fov", "must be in (0, 180)");
  check(camera_radius > 0, "camera_radius", "must be positive");
  check(arch.dim >= 4 && arch.dim % 4 == 0, "D", "must be a positive multiple of 4 (channel-tiled PNGs)");
  check(arch.pos_depth >= 1 && arch.pos_width >= 1 && arch.pos_frequencies >= 0, "pos_depth", "invalid position network");
  check(arch.dir_depth >= 1 && arch.dir_width >= 1 && arch.dir_frequencies >= 0, "dir_depth", "invalid direction network");
  check(train.batch >= 1, "batch", "must be >= 1");
  check(train.steps >= 0, "steps", "must be >= 0");
  check(train.base_lr > 0, "lr", "must be positive");
  check(train.warmup >= 0 && train.warmup <= train.steps, "warmup", "must be in [0, steps]");
  check(train.hard_ratio >= 0 && train.hard_ratio <= 1, "hard_ratio", "must be in [0, 1]");
  check(train.hard_refresh >= 1 && train.log_every >= 1, "hard_refresh", "refresh and log intervals must be >= 1");
  check(p >= 1 && p <= 64, "p", "must be in [1, 64]");
  check(grid.n_elev >= 2 && grid.n_azim >= 1, "dir_elev", "needs dir_elev >= 2 and dir_azim >= 1");
  check((background.array() >= 0).all() && (background.array() <= 1).all(), "background", "components must be in [0, 1]");
  check(threads >= 0, "threads", "must be >= 0");
}

void set_config_value(PipelineConfig& cfg, const std::string& key, const std::string& value) {
  find_key(key).set(cfg, key, trim(value));
}

std::string get_config_value(const PipelineConfig& cfg, const std::string& key) { return find_key(key).get(cfg); }

PipelineConfig parse_config(const std::string& text, PipelineConfig base) {
  std::istringstream in(text);
  std::string line;
  int number = 0;
  while (std::getline(in, line)) {
    ++number;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.resize(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      fail(ErrorKind::kConfig, "config line " + std::to_string(number) + ": expected key = value");
    }
    set_config_value(base, trim(line.substr(0, eq)), line.substr(eq + 1));
  }
  return base;
}

PipelineConfig load_config(const std::filesystem::path& path) {
  std::string text;
  try {
    text = read_text_file(path);
  } catch (const Error& e) {
    fail(ErrorKind::kConfig, std::string("cannot read config: ") + e.what());
  }
  return parse_config(text);
}

std::string dump_config(const PipelineConfig& cfg) {
  std::string out;
  for (const Key& k : keys()) out += std::string(k.name) + " = " + k.get(cfg) + "\n";
  return out;
}

std::string config_help() {
  const PipelineConfig defaults;
  std::string out;
  for (const Key& k : keys()) {
    std::string name = k.name;
    name.resize(std::max<std::size_t>(name.size(), 24), ' ');
    out += "  " + name + k.doc + " [default: " + k.get(defaults) + "]\n";
  }
  return out;
}

std::vector<std::string> config_keys() {
  std::vector<std::string> out;
  for (const Key& k : keys()) out.emplace_back(k.name);
  return out;
}

}  // namespace rerend
