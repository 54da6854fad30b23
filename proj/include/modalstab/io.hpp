#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace modalstab {

/// Decimal rendering with 17 significant digits (lossless for binary64).
std::string format_double(double value);

/// Row-major nested vector of 17-digit decimal strings.
std::vector<std::vector<std::string>> matrix_strings(const Eigen::MatrixXd& m);

void ensure_directory(const std::string& path);

std::string join_path(const std::string& dir, const std::string& file);

/// Snapshot file: 16-byte header ("MSTB", version, N_sim, sample count as
/// little-endian uint32) followed by sample-major little-endian float64
/// coefficient vectors.
inline constexpr std::uint32_t kSnapshotVersion = 1;

void write_snapshots(const std::string& path, const Eigen::MatrixXd& states);

/// Reads a snapshot file back into an N_sim x samples matrix.
Eigen::MatrixXd read_snapshots(const std::string& path);

}  // namespace modalstab
