#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <Eigen/Dense>
#include <cmath>
#include <random>
#include <vector>

#include "fbm/errors.hpp"
#include "fbm/geometry.hpp"
#include "testutil.hpp"

using fbm::Homography;
using fbm::Keypoint;
using fbm::MatchCandidate;

namespace {

Eigen::Matrix3d translation(double tx, double ty) {
  Eigen::Matrix3d m = Eigen::Matrix3d::Identity();
  m(0, 2) = tx;
  m(1, 2) = ty;
  return m;
}

// Well-conditioned random homography: similarity plus mild projective terms.
Eigen::Matrix3d random_homography(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> scale(0.7, 1.5);
  std::uniform_real_distribution<double> angle(-0.5, 0.5);
  std::uniform_real_distribution<double> shift(-30.0, 30.0);
  std::uniform_real_distribution<double> proj(-1e-4, 1e-4);
  const double s = scale(rng);
  const double t = angle(rng);
  Eigen::Matrix3d m;
  m << s * std::cos(t), -s * std::sin(t), shift(rng),  //
      s * std::sin(t), s * std::cos(t), shift(rng),    //
      proj(rng), proj(rng), 1.0;
  return m;
}

std::vector<Eigen::Vector2d> random_points(std::mt19937_64& rng, int n) {
  std::uniform_real_distribution<double> px(0.0, 640.0);
  std::uniform_real_distribution<double> py(0.0, 480.0);
  std::vector<Eigen::Vector2d> pts;
  pts.reserve(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    pts.emplace_back(px(rng), py(rng));
  }
  return pts;
}

std::vector<Eigen::Vector2d> map_points(
    const Homography& h, const std::vector<Eigen::Vector2d>& pts) {
  std::vector<Eigen::Vector2d> out;
  out.reserve(pts.size());
  for (const auto& p : pts) {
    out.push_back(fbm::apply(h, p));
  }
  return out;
}

// A translation scene with integer keypoints: exact under the model, so the
// RANSAC tests are free of rounding slack.
struct MatchScene {
  std::vector<Keypoint> kps_a;
  std::vector<Keypoint> kps_b;
  std::vector<MatchCandidate> matches;
};

MatchScene translation_scene(int n_inliers, int n_outliers, int tx, int ty,
                             std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<int> px(20, 600);
  std::uniform_int_distribution<int> py(20, 400);
  std::uniform_int_distribution<int> off(30, 80);
  MatchScene scene;
  for (int i = 0; i < n_inliers + n_outliers; ++i) {
    const Keypoint a{px(rng), py(rng), 0};
    Keypoint b{a.x + tx, a.y + ty, 0};
    if (i >= n_inliers) {
      b.x += off(rng);  // always >= 30px away from the true mapping
      b.y += off(rng);
    }
    const auto idx = static_cast<std::size_t>(i);
    scene.kps_a.push_back(a);
    scene.kps_b.push_back(b);
    scene.matches.push_back({idx, idx, 0, std::nullopt});
  }
  return scene;
}

}  // namespace

TEST_CASE("apply: identity, translation, scale") {
  const Eigen::Vector2d p(3.5, -2.25);
  CHECK((fbm::apply(Homography::identity(), p) - p).norm() == 0.0);

  const Homography shift{translation(5.0, -3.0)};
  const Eigen::Vector2d q = fbm::apply(shift, p);
  CHECK(q.x() == doctest::Approx(8.5));
  CHECK(q.y() == doctest::Approx(-5.25));

  const Homography doubled{Eigen::Vector3d(2.0, 2.0, 1.0).asDiagonal()};
  const Eigen::Vector2d r = fbm::apply(doubled, p);
  CHECK(r.x() == doctest::Approx(7.0));
  CHECK(r.y() == doctest::Approx(-4.5));
}

TEST_CASE("apply: point mapping to infinity throws") {
  Eigen::Matrix3d m = Eigen::Matrix3d::Identity();
  m(2, 0) = 1.0;  // w = x + 1, so x = -1 has no finite image
  const Homography h{m};
  CHECK_NOTHROW(fbm::apply(h, {0.0, 0.0}));
  CHECK_THROWS_AS(fbm::apply(h, {-1.0, 0.0}), fbm::DegenerateGeometry);
}

TEST_CASE("stored form is scale invariant") {
  Eigen::Matrix3d m;
  m << 2, 0, 3, 0, 2, -1, 0, 0, 1;
  const Homography base{m};
  const Homography scaled{Eigen::Matrix3d(7.0 * m)};
  CHECK((base.matrix() - scaled.matrix()).norm() < 1e-14);
  CHECK(base.matrix()(2, 2) == doctest::Approx(1.0));
}

TEST_CASE("vanishing corner entry falls back to unit norm") {
  Eigen::Matrix3d m;
  m << 1, 2, 3, 4, 5, 6, 7, 8, 0;  // det 27, bottom-right exactly zero
  const Homography h{m};
  CHECK(h.matrix()(2, 2) == 0.0);
  CHECK(h.matrix().norm() == doctest::Approx(1.0));
  // Still a working transform away from its line at infinity.
  CHECK_NOTHROW(fbm::apply(h, {1.0, 1.0}));
}

TEST_CASE("non-invertible matrices are rejected") {
  Eigen::Matrix3d m;
  m << 1, 2, 3, 2, 4, 6, 0, 0, 1;  // first two rows dependent
  CHECK_THROWS_AS(Homography{m}, fbm::DegenerateGeometry);
  CHECK_THROWS_AS(Homography{Eigen::Matrix3d::Zero()},
                  fbm::DegenerateGeometry);
}

TEST_CASE("inverse round trip") {
  std::mt19937_64 rng(2024);
  for (int trial = 0; trial < 20; ++trial) {
    const Homography h{random_homography(rng)};
    const Homography hi = h.inverse();
    for (const auto& p : random_points(rng, 10)) {
      CHECK((fbm::apply(hi, fbm::apply(h, p)) - p).norm() < 1e-9);
    }
  }
}

TEST_CASE("dlt recovers an exact four-point homography") {
  Eigen::Matrix3d m;
  m << 1.2, 0.1, 5.0, -0.05, 0.9, -2.0, 1e-3, -5e-4, 1.0;
  const Homography truth{m};
  const std::vector<Eigen::Vector2d> src{
      {0, 0}, {1, 0}, {1, 1}, {0, 1}, {0.5, 0.25}, {0.2, 0.8}};
  const Homography fitted = fbm::dlt(src, map_points(truth, src));
  for (const auto& p :
       std::vector<Eigen::Vector2d>{{0.5, 0.5}, {0.1, 0.9}, {0.7, 0.3}}) {
    CHECK((fbm::apply(fitted, p) - fbm::apply(truth, p)).norm() < 1e-10);
  }
}

TEST_CASE("dlt input validation") {
  const std::vector<Eigen::Vector2d> four{{0, 0}, {1, 0}, {1, 1}, {0, 1}};
  const std::vector<Eigen::Vector2d> three{{0, 0}, {1, 0}, {1, 1}};
  CHECK_THROWS_AS(fbm::dlt(four, three), std::invalid_argument);
  CHECK_THROWS_AS(fbm::dlt(three, three), std::invalid_argument);
}

TEST_CASE("dlt rejects degenerate configurations") {
  // Collinear samples leave the solution underdetermined.
  std::vector<Eigen::Vector2d> line;
  for (int i = 0; i < 6; ++i) {
    line.emplace_back(i, 2.0 * i + 1.0);
  }
  CHECK_THROWS_AS(fbm::dlt(line, line), fbm::DegenerateGeometry);

  const std::vector<Eigen::Vector2d> same(4, Eigen::Vector2d(3.0, 4.0));
  const std::vector<Eigen::Vector2d> square{{0, 0}, {1, 0}, {1, 1}, {0, 1}};
  CHECK_THROWS_AS(fbm::dlt(same, square), fbm::DegenerateGeometry);
}

TEST_CASE("dlt recovers noiseless 20-point fits across seeds") {
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    std::mt19937_64 rng(seed);
    const Homography truth{random_homography(rng)};
    const auto src = random_points(rng, 20);
    const Homography fitted = fbm::dlt(src, map_points(truth, src));
    double worst = 0.0;
    for (const auto& p : random_points(rng, 20)) {
      worst = std::max(worst,
                       (fbm::apply(fitted, p) - fbm::apply(truth, p)).norm());
    }
    CHECK(worst < 1e-8);
  }
}

TEST_CASE("dlt is stable under a large coordinate offset") {
  std::mt19937_64 rng(77);
  const Homography truth{random_homography(rng)};
  const auto src = random_points(rng, 20);
  const auto dst = map_points(truth, src);

  const Eigen::Vector2d offset(1000.0, 1000.0);
  std::vector<Eigen::Vector2d> src_far;
  std::vector<Eigen::Vector2d> dst_far;
  for (std::size_t i = 0; i < src.size(); ++i) {
    src_far.push_back(src[i] + offset);
    dst_far.push_back(dst[i] + offset);
  }
  const Homography fitted = fbm::dlt(src_far, dst_far);
  for (const auto& p : random_points(rng, 20)) {
    const Eigen::Vector2d expect = fbm::apply(truth, p) + offset;
    CHECK((fbm::apply(fitted, p + offset) - expect).norm() < 1e-6);
  }
}

TEST_CASE("ransac: fully consistent scene keeps every match") {
  const MatchScene scene = translation_scene(30, 0, 7, -3, 500);
  const auto result = fbm::ransac_homography(scene.matches, scene.kps_a,
                                             scene.kps_b, 100, 0.5, 42);
  CHECK(result.inlier_count == 30);
  for (const auto flag : result.inlier) {
    CHECK(flag == 1);
  }
  const Eigen::Vector2d origin_image = fbm::apply(result.model, {0.0, 0.0});
  CHECK(origin_image.x() == doctest::Approx(7.0).epsilon(1e-6));
  CHECK(origin_image.y() == doctest::Approx(-3.0).epsilon(1e-6));
}

TEST_CASE("ransac: outliers are flagged out") {
  const MatchScene scene = translation_scene(40, 20, -12, 9, 731);
  const auto result = fbm::ransac_homography(scene.matches, scene.kps_a,
                                             scene.kps_b, 300, 1.0, 7);
  REQUIRE(result.inlier_count == 40);
  for (std::size_t i = 0; i < scene.matches.size(); ++i) {
    CHECK(result.inlier[i] == (i < 40 ? 1 : 0));
  }
}

TEST_CASE("ransac is bitwise deterministic for a fixed seed") {
  const MatchScene scene = translation_scene(25, 15, 4, 11, 99);
  const auto first = fbm::ransac_homography(scene.matches, scene.kps_a,
                                            scene.kps_b, 200, 1.0, 12345);
  const auto second = fbm::ransac_homography(scene.matches, scene.kps_a,
                                             scene.kps_b, 200, 1.0, 12345);
  CHECK(first.inlier == second.inlier);
  CHECK(first.inlier_count == second.inlier_count);
  CHECK((first.model.matrix().array() == second.model.matrix().array()).all());
}

TEST_CASE("ransac input validation") {
  const MatchScene scene = translation_scene(3, 0, 1, 1, 1);
  CHECK_THROWS_AS(fbm::ransac_homography(scene.matches, scene.kps_a,
                                         scene.kps_b, 100, 1.0, 1),
                  std::invalid_argument);
  const MatchScene ok = translation_scene(10, 0, 1, 1, 1);
  CHECK_THROWS_AS(
      fbm::ransac_homography(ok.matches, ok.kps_a, ok.kps_b, 0, 1.0, 1),
      std::invalid_argument);
  CHECK_THROWS_AS(
      fbm::ransac_homography(ok.matches, ok.kps_a, ok.kps_b, 100, 0.0, 1),
      std::invalid_argument);
}

TEST_CASE("count_correct confirms matches against the reference transform") {
  MatchScene scene = translation_scene(5, 0, 0, 0, 314);
  const Homography identity = Homography::identity();
  CHECK(fbm::count_correct(scene.matches, scene.kps_a, scene.kps_b, identity,
                           3.0) == 5);

  scene.kps_b[2].x += 10;  // push one correspondence outside eps
  CHECK(fbm::count_correct(scene.matches, scene.kps_a, scene.kps_b, identity,
                           3.0) == 4);

  CHECK_THROWS_AS(fbm::count_correct(scene.matches, scene.kps_a, scene.kps_b,
                                     identity, 0.0),
                  std::invalid_argument);
}

TEST_CASE("count_correct agrees with a direct recount") {
  std::mt19937_64 rng(888);
  const Homography truth{random_homography(rng)};
  const MatchScene scene = translation_scene(30, 30, 3, -8, 555);
  const double eps = 3.0;
  std::size_t expected = 0;
  for (const auto& m : scene.matches) {
    const auto& a = scene.kps_a[m.index_a];
    const auto& b = scene.kps_b[m.index_b];
    const Eigen::Vector2d mapped =
        fbm::apply(truth, {static_cast<double>(a.x), static_cast<double>(a.y)});
    const Eigen::Vector2d target(static_cast<double>(b.x),
                                 static_cast<double>(b.y));
    expected += (mapped - target).norm() <= eps ? 1 : 0;
  }
  CHECK(fbm::count_correct(scene.matches, scene.kps_a, scene.kps_b, truth,
                           eps) == expected);
}

TEST_CASE("homography files: parse, reject, report") {
  testutil::TempDir dir("geometry");

  const auto good = dir.path() / "H1to2p";
  testutil::write_text(good, "1 0 0\n0 1 0\n0 0 1\n");
  const Homography h = fbm::read_homography_file(good);
  CHECK((h.matrix() - Eigen::Matrix3d::Identity()).norm() < 1e-15);

  const auto sci = dir.path() / "Hsci";
  testutil::write_text(sci, "2e0 0 5\n0 2.0 -1\n0 0 1\n");
  const Homography hs = fbm::read_homography_file(sci);
  CHECK(hs.matrix()(0, 0) == doctest::Approx(2.0));
  CHECK(hs.matrix()(0, 2) == doctest::Approx(5.0));

  const auto short_file = dir.path() / "Hshort";
  testutil::write_text(short_file, "1 0 0 0 1 0 0 0\n");
  CHECK_THROWS_AS(fbm::read_homography_file(short_file), fbm::DataError);

  const auto garbage = dir.path() / "Hgarbage";
  testutil::write_text(garbage, "1 0 0\n0 one 0\n0 0 1\n");
  CHECK_THROWS_AS(fbm::read_homography_file(garbage), fbm::DataError);

  const auto singular = dir.path() / "Hsingular";
  testutil::write_text(singular, "1 2 3\n2 4 6\n0 0 1\n");
  CHECK_THROWS_AS(fbm::read_homography_file(singular), fbm::DataError);

  CHECK_THROWS_AS(fbm::read_homography_file(dir.path() / "absent"),
                  fbm::DataError);
}
