#include "fbm/geometry.hpp"

#include <Eigen/SVD>
#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "fbm/errors.hpp"
#include "fbm/random.hpp"

namespace fbm {

namespace {

Eigen::Matrix3d normalized(const Eigen::Matrix3d& m) {
  const double fnorm = m.norm();
  if (!(fnorm > 0.0) || !std::isfinite(fnorm)) {
    throw DegenerateGeometry("Homography: matrix has no finite norm");
  }
  Eigen::Matrix3d h = m / fnorm;
  // Fix the scale on the bottom-right entry when it carries weight,
  // otherwise keep unit Frobenius norm.
  if (std::abs(h(2, 2)) > 1e-12) {
    h /= h(2, 2);
  }
  return h;
}

}  // namespace

Homography::Homography(const Eigen::Matrix3d& m, double det_floor)
    : h_(normalized(m)) {
  if (!(std::abs(h_.determinant()) > det_floor)) {
    throw DegenerateGeometry("Homography: matrix is not invertible");
  }
}

Homography Homography::identity() {
  return Homography(Eigen::Matrix3d::Identity());
}

Homography Homography::inverse() const {
  return Homography(h_.inverse());
}

Eigen::Vector2d apply(const Homography& h, const Eigen::Vector2d& p) {
  const Eigen::Vector3d q = h.matrix() * p.homogeneous();
  if (std::abs(q.z()) < 1e-12) {
    throw DegenerateGeometry("apply: point maps to infinity");
  }
  return q.hnormalized();
}

namespace {

// Hartley conditioning: centroid to the origin, mean distance sqrt(2).
Eigen::Matrix3d conditioning_transform(std::span<const Eigen::Vector2d> pts) {
  Eigen::Vector2d centroid = Eigen::Vector2d::Zero();
  for (const auto& p : pts) {
    centroid += p;
  }
  centroid /= static_cast<double>(pts.size());

  double mean_dist = 0.0;
  for (const auto& p : pts) {
    mean_dist += (p - centroid).norm();
  }
  mean_dist /= static_cast<double>(pts.size());
  if (mean_dist < 1e-12) {
    throw DegenerateGeometry("dlt: coincident points");
  }
  const double scale = std::sqrt(2.0) / mean_dist;

  Eigen::Matrix3d t = Eigen::Matrix3d::Identity();
  t(0, 0) = scale;
  t(1, 1) = scale;
  t(0, 2) = -scale * centroid.x();
  t(1, 2) = -scale * centroid.y();
  return t;
}

Eigen::Vector2d transform_point(const Eigen::Matrix3d& t,
                                const Eigen::Vector2d& p) {
  return (t * p.homogeneous()).hnormalized();
}

}  // namespace

Homography dlt(std::span<const Eigen::Vector2d> src,
               std::span<const Eigen::Vector2d> dst) {
  if (src.size() != dst.size()) {
    throw std::invalid_argument("dlt: correspondence count mismatch");
  }
  const std::size_t n = src.size();
  if (n < 4) {
    throw std::invalid_argument("dlt: need at least 4 correspondences");
  }

  const Eigen::Matrix3d t_src = conditioning_transform(src);
  const Eigen::Matrix3d t_dst = conditioning_transform(dst);

  Eigen::MatrixXd a(2 * n, 9);
  for (std::size_t i = 0; i < n; ++i) {
    const Eigen::Vector2d s = transform_point(t_src, src[i]);
    const Eigen::Vector2d d = transform_point(t_dst, dst[i]);
    a.row(2 * i) << s.x(), s.y(), 1, 0, 0, 0, -d.x() * s.x(), -d.x() * s.y(),
        -d.x();
    a.row(2 * i + 1) << 0, 0, 0, s.x(), s.y(), 1, -d.y() * s.x(),
        -d.y() * s.y(), -d.y();
  }

  Eigen::JacobiSVD<Eigen::MatrixXd> svd(a, Eigen::ComputeFullV);
  const auto& sv = svd.singularValues();
  const Eigen::Index last = sv.size() - 1;
  // Rank deficiency: a second near-null direction means the solution is not
  // unique (e.g. collinear samples).
  const double floor = 1e-13 * sv(0);
  if (!(sv(last - 1) > floor) || sv(last) / sv(last - 1) > 0.99) {
    throw DegenerateGeometry("dlt: degenerate configuration");
  }

  const Eigen::VectorXd h = svd.matrixV().col(8);
  const Eigen::Matrix3d hn =
      Eigen::Map<const Eigen::Matrix<double, 3, 3, Eigen::RowMajor>>(h.data());

  return Homography(t_dst.inverse() * hn * t_src);
}

namespace {

Eigen::Vector2d keypoint_position(const Keypoint& kp) {
  return {static_cast<double>(kp.x), static_cast<double>(kp.y)};
}

std::size_t score_inliers(const Homography& model,
                          std::span<const MatchCandidate> matches,
                          std::span<const Keypoint> kps_a,
                          std::span<const Keypoint> kps_b, double eps,
                          std::vector<std::uint8_t>* flags) {
  std::size_t count = 0;
  for (std::size_t i = 0; i < matches.size(); ++i) {
    const Eigen::Vector2d pa = keypoint_position(kps_a[matches[i].index_a]);
    const Eigen::Vector2d pb = keypoint_position(kps_b[matches[i].index_b]);
    bool inlier = false;
    try {
      inlier = (apply(model, pa) - pb).norm() <= eps;
    } catch (const DegenerateGeometry&) {
      inlier = false;  // point at infinity under this model
    }
    if (flags) {
      (*flags)[i] = inlier ? 1 : 0;
    }
    count += inlier ? 1 : 0;
  }
  return count;
}

}  // namespace

RansacResult ransac_homography(std::span<const MatchCandidate> matches,
                               std::span<const Keypoint> kps_a,
                               std::span<const Keypoint> kps_b, int iters,
                               double inlier_eps, std::uint64_t seed) {
  if (matches.size() < 4) {
    throw std::invalid_argument("ransac_homography: need at least 4 matches");
  }
  if (iters < 1) {
    throw std::invalid_argument("ransac_homography: iters must be >= 1");
  }
  if (!(inlier_eps > 0.0)) {
    throw std::invalid_argument("ransac_homography: inlier_eps must be > 0");
  }

  Xorshift64 rng(seed);
  const std::size_t n = matches.size();

  bool have_best = false;
  Eigen::Matrix3d best_model;
  std::size_t best_count = 0;

  std::array<std::size_t, 4> sample{};
  std::array<Eigen::Vector2d, 4> src{};
  std::array<Eigen::Vector2d, 4> dst{};

  for (int iter = 0; iter < iters; ++iter) {
    for (int k = 0; k < 4; ++k) {
      std::size_t idx;
      bool fresh;
      do {
        idx = static_cast<std::size_t>(rng.uniform(n));
        fresh = true;
        for (int j = 0; j < k; ++j) {
          fresh &= sample[j] != idx;
        }
      } while (!fresh);
      sample[k] = idx;
      src[k] = keypoint_position(kps_a[matches[idx].index_a]);
      dst[k] = keypoint_position(kps_b[matches[idx].index_b]);
    }

    Homography model = Homography::identity();
    try {
      model = dlt(src, dst);
    } catch (const DegenerateGeometry&) {
      continue;  // unusable sample, consume no further randomness
    }

    const std::size_t count =
        score_inliers(model, matches, kps_a, kps_b, inlier_eps, nullptr);
    if (count > best_count || !have_best) {
      have_best = true;
      best_count = count;
      best_model = model.matrix();
    }
  }

  if (!have_best || best_count < 4) {
    throw DegenerateGeometry(
        "ransac_homography: no model with at least 4 inliers");
  }

  // Consensus flags come from the best minimal model; the returned estimate
  // is the refit over that consensus set.
  RansacResult result{Homography(best_model),
                      std::vector<std::uint8_t>(n, 0), 0};
  result.inlier_count = score_inliers(result.model, matches, kps_a, kps_b,
                                      inlier_eps, &result.inlier);

  std::vector<Eigen::Vector2d> in_src;
  std::vector<Eigen::Vector2d> in_dst;
  in_src.reserve(result.inlier_count);
  in_dst.reserve(result.inlier_count);
  for (std::size_t i = 0; i < n; ++i) {
    if (result.inlier[i]) {
      in_src.push_back(keypoint_position(kps_a[matches[i].index_a]));
      in_dst.push_back(keypoint_position(kps_b[matches[i].index_b]));
    }
  }
  try {
    result.model = dlt(in_src, in_dst);
  } catch (const DegenerateGeometry&) {
    // Keep the minimal-sample model when the refit is ill-posed.
  }
  return result;
}

std::size_t count_correct(std::span<const MatchCandidate> matches,
                          std::span<const Keypoint> kps_a,
                          std::span<const Keypoint> kps_b,
                          const Homography& h_gt, double eps) {
  if (!(eps > 0.0)) {
    throw std::invalid_argument("count_correct: eps must be > 0");
  }
  return score_inliers(h_gt, matches, kps_a, kps_b, eps, nullptr);
}

Homography read_homography_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) {
    throw DataError(path.string() + ": cannot open");
  }
  Eigen::Matrix3d m;
  for (int r = 0; r < 3; ++r) {
    for (int c = 0; c < 3; ++c) {
      if (!(in >> m(r, c))) {
        throw DataError(path.string() + ": expected 9 numbers (row-major 3x3)");
      }
    }
  }
  try {
    return Homography(m);
  } catch (const DegenerateGeometry& e) {
    throw DataError(path.string() + ": " + e.what());
  }
}

}  // namespace fbm
