#include <array>
#include <bit>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <vector>

#include "eventcure/dataset.hpp"
#include "eventcure/error.hpp"

namespace eventcure {

namespace {

constexpr std::array<char, 4> kMagic = {'E', 'V', 'C', 'F'};

void put_u32(std::vector<unsigned char>& out, std::uint32_t value) {
  for (int shift = 0; shift < 32; shift += 8) out.push_back(static_cast<unsigned char>((value >> shift) & 0xffu));
}

std::uint32_t get_u32(const unsigned char* in) {
  return static_cast<std::uint32_t>(in[0]) | (static_cast<std::uint32_t>(in[1]) << 8) |
         (static_cast<std::uint32_t>(in[2]) << 16) | (static_cast<std::uint32_t>(in[3]) << 24);
}

}  // namespace

void write_features(const FeatureMatrix& features, const std::filesystem::path& path) {
  std::vector<unsigned char> bytes(kMagic.begin(), kMagic.end());
  put_u32(bytes, static_cast<std::uint32_t>(features.rows()));
  put_u32(bytes, static_cast<std::uint32_t>(features.cols()));
  bytes.reserve(bytes.size() + static_cast<std::size_t>(features.size()) * 4);
  for (Eigen::Index i = 0; i < features.size(); ++i) {
    put_u32(bytes, std::bit_cast<std::uint32_t>(features.data()[i]));
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorKind::IoError, "cannot write " + path.string());
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
}

FeatureMatrix read_features(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::IoError, "cannot open " + path.string());
  std::vector<unsigned char> bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  if (bytes.size() < 12 || std::memcmp(bytes.data(), kMagic.data(), 4) != 0) {
    throw Error(ErrorKind::ParseError, path.string() + ": offset 0: missing EVCF header");
  }
  const auto rows = get_u32(bytes.data() + 4);
  const auto cols = get_u32(bytes.data() + 8);
  const auto expected = 12 + static_cast<std::size_t>(rows) * cols * 4;
  if (bytes.size() != expected) {
    throw Error(ErrorKind::ParseError, path.string() + ": offset " + std::to_string(std::min(bytes.size(), expected)) +
                                           ": expected " + std::to_string(expected) + " bytes, found " +
                                           std::to_string(bytes.size()));
  }
  FeatureMatrix features(rows, cols);
  for (std::size_t i = 0; i < static_cast<std::size_t>(rows) * cols; ++i) {
    features.data()[i] = std::bit_cast<float>(get_u32(bytes.data() + 12 + 4 * i));
  }
  return features;
}

}  // namespace eventcure
