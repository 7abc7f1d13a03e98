// SPDX-License-Identifier: Apache-2.0
#include "cri/io.hpp"

#include <png.h>

#include <openssl/evp.h>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <stdexcept>

#include "cri/errors.hpp"

namespace cri {

namespace {

void write_binary(const std::string& path, const void* data, std::size_t bytes) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigError("cannot write: " + path);
  out.write(static_cast<const char*>(data), static_cast<std::streamsize>(bytes));
  if (!out) throw ConfigError("short write: " + path);
}

std::vector<char> read_binary(const std::string& path) {
  std::ifstream in(path, std::ios::binary | std::ios::ate);
  if (!in) throw ConfigError("cannot read: " + path);
  const std::streamsize size = in.tellg();
  in.seekg(0);
  std::vector<char> buf(static_cast<std::size_t>(size));
  in.read(buf.data(), size);
  if (!in) throw ConfigError("short read: " + path);
  return buf;
}

}  // namespace

void write_image(const std::string& path, const SkyImage& img, json extra) {
  img.validate();
  write_binary(path, img.values.data(),
               static_cast<std::size_t>(img.values.size()) * sizeof(double));
  json sidecar = std::move(extra);
  sidecar["n1"] = img.n1;
  sidecar["fov"] = img.fov;
  sidecar["dtype"] = "float64-le";
  atomic_write_text(path + ".json", sidecar.dump(2) + "\n");
}

SkyImage read_image(const std::string& path) {
  const json sidecar = json::parse(read_text(path + ".json"));
  SkyImage img;
  img.n1 = sidecar.at("n1").get<int>();
  img.fov = sidecar.at("fov").get<double>();
  const auto buf = read_binary(path);
  const std::size_t n = buf.size() / sizeof(double);
  if (n != static_cast<std::size_t>(img.n1) * static_cast<std::size_t>(img.n1))
    throw ConfigError("image payload does not match sidecar n1: " + path);
  img.values.resize(static_cast<Eigen::Index>(n));
  std::memcpy(img.values.data(), buf.data(), buf.size());
  img.validate();
  return img;
}

void write_cvec(const std::string& path, const cvec& v, json sidecar) {
  write_binary(path, v.data(),
               static_cast<std::size_t>(v.size()) * sizeof(std::complex<double>));
  sidecar["length"] = v.size();
  sidecar["dtype"] = "complex128-le";
  atomic_write_text(path + ".json", sidecar.dump(2) + "\n");
}

cvec read_cvec(const std::string& path, json* sidecar) {
  const json meta = json::parse(read_text(path + ".json"));
  const auto buf = read_binary(path);
  const std::size_t n = buf.size() / sizeof(std::complex<double>);
  if (meta.contains("length") &&
      meta.at("length").get<std::size_t>() != n)
    throw ConfigError("measurement payload does not match sidecar: " + path);
  cvec v(static_cast<Eigen::Index>(n));
  std::memcpy(v.data(), buf.data(), n * sizeof(std::complex<double>));
  if (sidecar) *sidecar = meta;
  return v;
}

void write_png_gray(const std::string& path, const Eigen::MatrixXd& values,
                    double lo, double hi, int upscale) {
  if (upscale < 1) upscale = 1;
  if (!(hi > lo)) throw std::invalid_argument("write_png_gray: bad range");
  const int h = static_cast<int>(values.rows()) * upscale;
  const int w = static_cast<int>(values.cols()) * upscale;

  FILE* fp = std::fopen(path.c_str(), "wb");
  if (!fp) throw ConfigError("cannot write: " + path);
  png_structp png =
      png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
  png_infop info = png ? png_create_info_struct(png) : nullptr;
  if (!png || !info || setjmp(png_jmpbuf(png))) {
    if (png) png_destroy_write_struct(&png, info ? &info : nullptr);
    std::fclose(fp);
    throw std::runtime_error("png encoding failed: " + path);
  }
  png_init_io(png, fp);
  png_set_IHDR(png, info, static_cast<png_uint_32>(w), static_cast<png_uint_32>(h),
               8, PNG_COLOR_TYPE_GRAY, PNG_INTERLACE_NONE,
               PNG_COMPRESSION_TYPE_DEFAULT, PNG_FILTER_TYPE_DEFAULT);
  png_write_info(png, info);
  std::vector<png_byte> row(static_cast<std::size_t>(w));
  for (int r = 0; r < h; ++r) {
    const int vr = r / upscale;
    for (int c = 0; c < w; ++c) {
      const double val = values(vr, c / upscale);
      const double t = std::clamp((val - lo) / (hi - lo), 0.0, 1.0);
      row[static_cast<std::size_t>(c)] = static_cast<png_byte>(std::lround(t * 255.0));
    }
    png_write_row(png, row.data());
  }
  png_write_end(png, nullptr);
  png_destroy_write_struct(&png, &info);
  std::fclose(fp);
}

std::string sha256_file(const std::string& path) {
  const auto buf = read_binary(path);
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  EVP_MD_CTX* ctx = EVP_MD_CTX_new();
  if (!ctx) throw std::runtime_error("sha256: context allocation failed");
  if (EVP_DigestInit_ex(ctx, EVP_sha256(), nullptr) != 1 ||
      EVP_DigestUpdate(ctx, buf.data(), buf.size()) != 1 ||
      EVP_DigestFinal_ex(ctx, digest, &len) != 1) {
    EVP_MD_CTX_free(ctx);
    throw std::runtime_error("sha256: digest failed");
  }
  EVP_MD_CTX_free(ctx);
  static const char* hex = "0123456789abcdef";
  std::string out;
  out.reserve(2 * len);
  for (unsigned int i = 0; i < len; ++i) {
    out.push_back(hex[digest[i] >> 4]);
    out.push_back(hex[digest[i] & 0xf]);
  }
  return out;
}

void atomic_write_text(const std::string& path, const std::string& content) {
  const std::string tmp = path + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw ConfigError("cannot write: " + tmp);
    out << content;
    if (!out) throw ConfigError("short write: " + tmp);
  }
  std::filesystem::rename(tmp, path);
}

std::string read_text(const std::string& path) {
  const auto buf = read_binary(path);
  return std::string(buf.begin(), buf.end());
}

}  // namespace cri
