// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <string>
#include <vector>

#include <json.hpp>

#include "cri/linop.hpp"
#include "cri/sky_model.hpp"

namespace cri {

using json = nlohmann::json;

// Flat binary of little-endian float64 plus a JSON sidecar (<path>.json)
// carrying n1, fov and any extra metadata.
void write_image(const std::string& path, const SkyImage& img,
                 json extra = json::object());
SkyImage read_image(const std::string& path);

// Flat binary of interleaved little-endian float64 (re, im) pairs plus a
// JSON sidecar with caller-provided metadata.
void write_cvec(const std::string& path, const cvec& v,
                json sidecar = json::object());
cvec read_cvec(const std::string& path, json* sidecar = nullptr);

// 8-bit grayscale PNG; values clamped to [lo, hi] and mapped black..white.
// `upscale` repeats each value as an upscale x upscale block.
void write_png_gray(const std::string& path, const Eigen::MatrixXd& values,
                    double lo, double hi, int upscale = 1);

// Hex SHA-256 of a file's contents.
std::string sha256_file(const std::string& path);

// Writes to a temporary file in the same directory, then renames.
void atomic_write_text(const std::string& path, const std::string& content);

std::string read_text(const std::string& path);

}  // namespace cri
