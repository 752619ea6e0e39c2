/* Copyright 2026 The Rerend Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *      http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

/* C interface of librerend.
 *
 * Every call returns an rr_status. On failure, rr_last_error() holds a
 * one-line message for the calling thread until its next failing call.
 * Handles are opaque and owned by the caller; strings returned through
 * char** must be released with rr_string_free. */

#ifndef REREND_REREND_H_
#define REREND_REREND_H_

#include <stddef.h>
#include <stdint.h>

#ifdef __cplusplus
extern "C" {
#endif

#if defined(__GNUC__)
#define RR_API __attribute__((visibility("default")))
#else
#define RR_API
#endif

typedef enum rr_status {
  RR_OK = 0,
  RR_ERR_INVALID_ARGUMENT = 1,
  RR_ERR_CONFIG = 2,
  RR_ERR_NUMERIC = 3,
  RR_ERR_IO = 4,
  RR_ERR_MISSING_FILE = 5,
  RR_ERR_DECODE = 6,
  RR_ERR_DIMENSION = 7,
  RR_ERR_VERSION = 8,
  RR_ERR_INTERNAL = 9
} rr_status;

typedef struct rr_config rr_config;
typedef struct rr_package rr_package;
typedef struct rr_image rr_image;
typedef struct rr_server rr_server;

RR_API const char* rr_version(void);
RR_API const char* rr_last_error(void);
/* Stable identifier such as "config" or "decode". */
RR_API const char* rr_status_name(rr_status status);
/* Process exit code: 0 ok, 2 config/argument, 3 numeric, 4 I/O and format. */
RR_API int rr_exit_code(rr_status status);

/* Caps worker threads; 0 restores the default (RRND_THREADS, else all cores). */
RR_API rr_status rr_set_threads(int threads);

/* ---- configuration ---- */
RR_API rr_status rr_config_new(rr_config** out);
RR_API rr_status rr_config_load(rr_config* cfg, const char* path);
RR_API rr_status rr_config_set(rr_config* cfg, const char* key, const char* value);
RR_API rr_status rr_config_get(const rr_config* cfg, const char* key, char** value);
RR_API rr_status rr_config_dump(const rr_config* cfg, char** text);
RR_API rr_status rr_config_validate(const rr_config* cfg);
/* Every key with its default and description, one per line. */
RR_API const char* rr_config_help(void);
RR_API void rr_config_free(rr_config* cfg);

/* ---- pipeline stages ---- */
/* Writes the conditioned mesh; *report (optional) receives JSON. */
RR_API rr_status rr_distill_mesh(const rr_config* cfg, const char* out_obj, char** report);
/* Renders pseudo-images, trains from the initial field and writes the
 * checkpoint; *history (optional) receives the loss history as JSON. */
RR_API rr_status rr_train(const rr_config* cfg, const char* mesh_obj, const char* out_checkpoint, char** history);
RR_API rr_status rr_bake(const rr_config* cfg, const char* mesh_obj, const char* checkpoint, const char* out_dir);
/* Metrics on the evaluation cameras. checkpoint may be NULL, which skips
 * the comparison with the unbaked field. */
RR_API rr_status rr_eval(const rr_config* cfg, const char* package_dir, const char* checkpoint, char** report);
/* axis: "texels" or "dim"; values: comma-separated integers. The texel
 * sweep needs a checkpoint; the dim sweep retrains and ignores it. */
RR_API rr_status rr_sweep(const rr_config* cfg, const char* axis, const char* values, const char* mesh_obj,
                          const char* checkpoint, char** csv);

/* ---- packages and rendering ---- */
typedef struct rr_package_info {
  int dim;
  int p;
  int texels_per_face;
  uint64_t n_faces;
  int atlas_width;
  int atlas_height;
  int dir_elev;
  int dir_azim;
  int factorized; /* 0 for the rgb_normal baseline */
} rr_package_info;

RR_API rr_status rr_package_open(const char* dir, rr_package** out);
RR_API rr_status rr_package_info_get(const rr_package* pkg, rr_package_info* info);
RR_API void rr_package_free(rr_package* pkg);

typedef struct rr_camera {
  double eye[3];
  double target[3];
  double fov_degrees; /* horizontal */
  int width;
  int height;
} rr_camera;

typedef struct rr_render_options {
  int bilinear_directions; /* 0: nearest direction fetch */
  int use_background;      /* 0: manifest background */
  double background[3];
} rr_render_options;

/* options may be NULL. The render follows the package variant. */
RR_API rr_status rr_render(const rr_package* pkg, const rr_camera* camera, const rr_render_options* options,
                           rr_image** out);
RR_API int rr_image_width(const rr_image* image);
RR_API int rr_image_height(const rr_image* image);
/* width * height * 3 floats, row-major RGB. */
RR_API const float* rr_image_data(const rr_image* image);
RR_API rr_status rr_image_write_png(const rr_image* image, const char* path);
RR_API rr_status rr_image_write_pfm(const rr_image* image, const char* path);
RR_API rr_status rr_image_psnr(const rr_image* a, const rr_image* b, double* db);
RR_API rr_status rr_image_ssim(const rr_image* a, const rr_image* b, double* value);
RR_API void rr_image_free(rr_image* image);

/* ---- static server with CORS ---- */
/* port 0 picks a free port; the server runs on a background thread. */
RR_API rr_status rr_serve_start(const char* root, const char* host, int port, rr_server** out);
RR_API int rr_server_port(const rr_server* server);
/* Blocks until rr_server_stop is called from another thread. */
RR_API rr_status rr_server_wait(rr_server* server);
RR_API void rr_server_stop(rr_server* server);
RR_API void rr_server_free(rr_server* server);

RR_API void rr_string_free(char* s);

#ifdef __cplusplus
}
#endif

#endif /* REREND_REREND_H_ */
