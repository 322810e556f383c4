#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "fbm/features.hpp"
#include "fbm/fuzzy.hpp"
#include "fbm/geometry.hpp"
#include "fbm/image.hpp"

namespace fbm {

/// One reference/target pair of an affine sequence (img1 vs imgN plus the
/// ground-truth homography H1toNp).
struct DatasetPair {
  std::string name;      // sequence id, e.g. "bark"
  int ref_index = 1;
  int target_index = 2;  // 2..6
  GrayImage ref_image;
  GrayImage target_image;
  Homography h_gt = Homography::identity();
};

/// A matching decision rule for the evaluation: a constant threshold
/// ("t5", "t10", ...) or the fuzzy system ("fuzzy").
struct MatchMode {
  std::string label;
  bool fuzzy = false;
  int threshold = 0;  // meaningful when !fuzzy

  friend bool operator==(const MatchMode&, const MatchMode&) = default;
};

MatchMode parse_mode(std::string_view token);
std::vector<MatchMode> parse_modes(std::string_view csv);

/// One result row: M putative matches, CM of them confirmed by the
/// ground-truth homography, and the mean per-comparison decision cost.
struct EvaluationRecord {
  std::string dataset;
  std::string pair;  // "1-N"
  std::string mode;
  std::size_t m = 0;
  std::size_t cm = 0;
  double ns_per_decision = 0.0;
};

struct ExtractionParams {
  int fast_threshold = 20;
  std::size_t max_keypoints = 2000;
  std::uint64_t pattern_seed = kDefaultPatternSeed;
};

struct EvalOptions {
  double eps = 3.0;           // reprojection tolerance for CM and RANSAC
  int ransac_iters = 2000;    // 0 disables the RANSAC report
  std::uint64_t seed = kDefaultPatternSeed;
  std::ostream* log = nullptr;  // warnings + RANSAC summary, null to silence
};

/// Load img1..img6 (.ppm or .pgm) and H1to2p..H1to6p from a sequence
/// directory. img1 is required; every present target image must come with
/// its homography file. Missing targets are skipped, so a two-image mini
/// dataset yields a single pair.
std::vector<DatasetPair> load_dataset(const std::filesystem::path& dir);

/// Detect and describe both images once, then evaluate every requested mode:
/// M, CM against the ground truth, and single-threaded decision timing
/// (total matching wall time over |A|*|B| comparisons). The RANSAC estimate
/// is computed per mode and reported to the log so the two filters can be
/// compared; it does not enter the records. Feature-starved images produce
/// zeroed records and a warning rather than a failure.
std::vector<EvaluationRecord> run_pair(const DatasetPair& pair,
                                       const ExtractionParams& params,
                                       std::span<const MatchMode> modes,
                                       const FuzzyMatcherConfig& fuzzy_cfg,
                                       const EvalOptions& options);

/// CSV with header dataset,pair,mode,M,CM,ns_per_decision; rows ordered by
/// (dataset, pair, threshold modes ascending then fuzzy).
void emit_csv(std::span<const EvaluationRecord> records,
              const std::filesystem::path& path);

}  // namespace fbm
