#include "modalstab/io.hpp"

#include <array>
#include <bit>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <fstream>

#include "modalstab/errors.hpp"

namespace modalstab {
namespace {

void put_u32(std::ofstream& os, std::uint32_t v) {
  const std::array<unsigned char, 4> b{static_cast<unsigned char>(v & 0xffu),
                                       static_cast<unsigned char>((v >> 8) & 0xffu),
                                       static_cast<unsigned char>((v >> 16) & 0xffu),
                                       static_cast<unsigned char>((v >> 24) & 0xffu)};
  os.write(reinterpret_cast<const char*>(b.data()), 4);
}

std::uint32_t get_u32(const unsigned char* p) {
  return static_cast<std::uint32_t>(p[0]) | (static_cast<std::uint32_t>(p[1]) << 8) |
         (static_cast<std::uint32_t>(p[2]) << 16) | (static_cast<std::uint32_t>(p[3]) << 24);
}

}  // namespace

std::string format_double(double value) {
  if (std::isnan(value)) return "nan";
  if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", value);
  return buf;
}

std::vector<std::vector<std::string>> matrix_strings(const Eigen::MatrixXd& m) {
  std::vector<std::vector<std::string>> out(static_cast<std::size_t>(m.rows()));
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) out[i].push_back(format_double(m(i, j)));
  }
  return out;
}

void ensure_directory(const std::string& path) {
  std::error_code ec;
  std::filesystem::create_directories(path, ec);
  if (ec) throw Error("cannot create directory " + path + ": " + ec.message());
}

std::string join_path(const std::string& dir, const std::string& file) {
  return (std::filesystem::path(dir) / file).string();
}

void write_snapshots(const std::string& path, const Eigen::MatrixXd& states) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw Error("cannot open " + path + " for writing");
  os.write("MSTB", 4);
  put_u32(os, kSnapshotVersion);
  put_u32(os, static_cast<std::uint32_t>(states.rows()));
  put_u32(os, static_cast<std::uint32_t>(states.cols()));
  for (Eigen::Index s = 0; s < states.cols(); ++s) {
    for (Eigen::Index n = 0; n < states.rows(); ++n) {
      std::uint64_t bits = std::bit_cast<std::uint64_t>(states(n, s));
      std::array<unsigned char, 8> b{};
      for (int i = 0; i < 8; ++i) b[i] = static_cast<unsigned char>((bits >> (8 * i)) & 0xffu);
      os.write(reinterpret_cast<const char*>(b.data()), 8);
    }
  }
}

Eigen::MatrixXd read_snapshots(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw Error("cannot open " + path);
  std::array<unsigned char, 16> header{};
  is.read(reinterpret_cast<char*>(header.data()), 16);
  if (!is || std::memcmp(header.data(), "MSTB", 4) != 0) throw Error(path + ": not a snapshot file");
  if (get_u32(header.data() + 4) != kSnapshotVersion) throw Error(path + ": unsupported version");
  const auto rows = get_u32(header.data() + 8);
  const auto cols = get_u32(header.data() + 12);
  Eigen::MatrixXd states(rows, cols);
  std::array<unsigned char, 8> b{};
  for (std::uint32_t s = 0; s < cols; ++s) {
    for (std::uint32_t n = 0; n < rows; ++n) {
      is.read(reinterpret_cast<char*>(b.data()), 8);
      if (!is) throw Error(path + ": truncated snapshot data");
      std::uint64_t bits = 0;
      for (int i = 0; i < 8; ++i) bits |= static_cast<std::uint64_t>(b[i]) << (8 * i);
      states(n, s) = std::bit_cast<double>(bits);
    }
  }
  return states;
}

}  // namespace modalstab
