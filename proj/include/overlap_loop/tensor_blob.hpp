#pragma once

#include <bit>
#include <cstdint>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <numeric>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "overlap_loop/errors.hpp"

namespace overlap_loop {

static_assert(std::endian::native == std::endian::little,
              "tensor blob I/O assumes a little-endian host");

/// Flat float32 tensor with named channels. On disk (`.tnsr`): an 8-byte
/// magic, a little-endian uint32 header length, a JSON header carrying at
/// least {"shape": [...], "channels": [...]}, then the raw little-endian
/// float32 payload, row-major.
struct TensorBlob {
  std::vector<std::uint64_t> shape;
  std::vector<std::string> channels;
  std::vector<float> data;
  nlohmann::json meta;  // optional extra header fields

  std::uint64_t element_count() const {
    std::uint64_t n = 1;
    for (auto s : shape) n *= s;
    return shape.empty() ? 0 : n;
  }

  void validate() const {
    if (element_count() != data.size())
      throw ValidationError("tensor blob shape does not match data length");
  }
};

namespace detail {

constexpr char kBlobMagic[8] = {'T', 'N', 'S', 'R', 'B', 'L', 'O', 'B'};
constexpr char kBlob64Magic[8] = {'T', 'N', 'S', 'R', 'B', 'L', '6', '4'};

inline void write_exact(std::ofstream& out, const char* buf, std::size_t n,
                        const std::string& path) {
  out.write(buf, static_cast<std::streamsize>(n));
  if (!out) throw IoError("failed writing " + path);
}

inline void read_exact(std::ifstream& in, char* buf, std::size_t n,
                       const std::string& path) {
  in.read(buf, static_cast<std::streamsize>(n));
  if (in.gcount() != static_cast<std::streamsize>(n))
    throw MalformedFileError("truncated blob file " + path);
}

template <typename Scalar>
void save_blob_impl(const std::string& path, const char magic[8],
                    const std::vector<std::uint64_t>& shape,
                    const std::vector<std::string>& channels,
                    const nlohmann::json& meta,
                    const std::vector<Scalar>& data) {
  nlohmann::json header;
  header["shape"] = shape;
  header["channels"] = channels;
  header["dtype"] = sizeof(Scalar) == 4 ? "f32" : "f64";
  if (!meta.is_null() && !meta.empty()) header["meta"] = meta;
  const std::string header_str = header.dump();

  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open for writing: " + path);
  write_exact(out, magic, 8, path);
  const std::uint32_t len = static_cast<std::uint32_t>(header_str.size());
  write_exact(out, reinterpret_cast<const char*>(&len), 4, path);
  write_exact(out, header_str.data(), header_str.size(), path);
  write_exact(out, reinterpret_cast<const char*>(data.data()),
              data.size() * sizeof(Scalar), path);
}

template <typename Scalar>
void load_blob_impl(const std::string& path, const char magic[8],
                    std::vector<std::uint64_t>& shape,
                    std::vector<std::string>& channels, nlohmann::json& meta,
                    std::vector<Scalar>& data) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open: " + path);
  char got[8];
  read_exact(in, got, 8, path);
  if (std::memcmp(got, magic, 8) != 0)
    throw MalformedFileError("bad magic in " + path);
  std::uint32_t len = 0;
  read_exact(in, reinterpret_cast<char*>(&len), 4, path);
  std::string header_str(len, '\0');
  read_exact(in, header_str.data(), len, path);
  nlohmann::json header;
  try {
    header = nlohmann::json::parse(header_str);
  } catch (const nlohmann::json::exception& e) {
    throw MalformedFileError("bad blob header in " + path + ": " + e.what());
  }
  shape = header.at("shape").get<std::vector<std::uint64_t>>();
  channels.clear();
  if (header.contains("channels"))
    channels = header["channels"].get<std::vector<std::string>>();
  meta = header.contains("meta") ? header["meta"] : nlohmann::json();

  std::uint64_t count = shape.empty() ? 0 : 1;
  for (auto s : shape) count *= s;
  data.resize(count);
  read_exact(in, reinterpret_cast<char*>(data.data()), count * sizeof(Scalar),
             path);
  // Trailing bytes mean the shape header lies about the payload.
  char extra;
  in.read(&extra, 1);
  if (in.gcount() != 0)
    throw MalformedFileError("blob payload longer than header shape: " + path);
}

}  // namespace detail

inline void save_tensor_blob(const std::string& path, const TensorBlob& blob) {
  blob.validate();
  detail::save_blob_impl(path, detail::kBlobMagic, blob.shape, blob.channels,
                         blob.meta, blob.data);
}

inline TensorBlob load_tensor_blob(const std::string& path) {
  TensorBlob blob;
  detail::load_blob_impl(path, detail::kBlobMagic, blob.shape, blob.channels,
                         blob.meta, blob.data);
  blob.validate();
  return blob;
}

/// Internal f64 container used where bit-exact doubles matter (feature
/// cache). Same layout as `.tnsr` with a distinct magic.
inline void save_tensor_blob64(const std::string& path,
                               const std::vector<std::uint64_t>& shape,
                               const std::vector<double>& data) {
  detail::save_blob_impl(path, detail::kBlob64Magic, shape, {}, {}, data);
}

inline void load_tensor_blob64(const std::string& path,
                               std::vector<std::uint64_t>& shape,
                               std::vector<double>& data) {
  std::vector<std::string> channels;
  nlohmann::json meta;
  detail::load_blob_impl(path, detail::kBlob64Magic, shape, channels, meta,
                         data);
}

/// FNV-1a over arbitrary bytes; stable across runs, used for config and
/// weight fingerprints.
inline std::uint64_t fnv1a(const void* bytes, std::size_t n,
                           std::uint64_t seed = 1469598103934665603ull) {
  const auto* p = static_cast<const unsigned char*>(bytes);
  std::uint64_t h = seed;
  for (std::size_t i = 0; i < n; ++i) {
    h ^= p[i];
    h *= 1099511628211ull;
  }
  return h;
}

inline std::uint64_t fnv1a(const std::string& s) {
  return fnv1a(s.data(), s.size());
}

}  // namespace overlap_loop
