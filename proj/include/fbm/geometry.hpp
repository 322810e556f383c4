#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

#include "fbm/features.hpp"
#include "fbm/matcher.hpp"

namespace fbm {

/// 3x3 projective transform. Stored normalized: bottom-right entry 1 when it
/// is meaningfully nonzero, unit Frobenius norm otherwise. Construction
/// rejects matrices whose determinant magnitude (after normalization) falls
/// below the floor.
class Homography {
 public:
  explicit Homography(const Eigen::Matrix3d& m, double det_floor = 1e-12);

  static Homography identity();

  const Eigen::Matrix3d& matrix() const { return h_; }
  Homography inverse() const;

 private:
  Eigen::Matrix3d h_;
};

/// Homogeneous multiply and perspective divide. Throws DegenerateGeometry
/// when the point maps to infinity (|w| < 1e-12).
Eigen::Vector2d apply(const Homography& h, const Eigen::Vector2d& p);

/// Direct linear transform with Hartley normalization (centroid to the
/// origin, mean distance sqrt(2), each image independently). The solution is
/// the null-space direction of the 2n x 9 system via SVD. Throws
/// DegenerateGeometry when the configuration is rank-deficient (smallest to
/// second-smallest singular value ratio above 0.99) or the result is not
/// invertible. Requires src.size() == dst.size() >= 4.
Homography dlt(std::span<const Eigen::Vector2d> src,
               std::span<const Eigen::Vector2d> dst);

struct RansacResult {
  Homography model;
  std::vector<std::uint8_t> inlier;  // one flag per input match
  std::size_t inlier_count = 0;
};

/// Seeded RANSAC over match correspondences: each round samples 4 distinct
/// match indices from a Xorshift64 stream, fits dlt, and scores inliers by
/// reprojection error <= inlier_eps. Consensus ties keep the earlier
/// iteration; the best model is refit on all of its inliers. Bitwise
/// deterministic for fixed (inputs, seed, iters).
RansacResult ransac_homography(std::span<const MatchCandidate> matches,
                               std::span<const Keypoint> kps_a,
                               std::span<const Keypoint> kps_b, int iters,
                               double inlier_eps, std::uint64_t seed);

/// Number of matches confirmed by the ground-truth homography:
/// ||apply(H_gt, pA) - pB|| <= eps.
std::size_t count_correct(std::span<const MatchCandidate> matches,
                          std::span<const Keypoint> kps_a,
                          std::span<const Keypoint> kps_b,
                          const Homography& h_gt, double eps);

/// Plain-text homography file: 9 whitespace-separated reals, row-major.
Homography read_homography_file(const std::filesystem::path& path);

}  // namespace fbm
