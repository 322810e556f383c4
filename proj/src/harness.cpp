#include "fbm/harness.hpp"

#include <algorithm>
#include <charconv>
#include <chrono>
#include <fstream>
#include <ostream>
#include <sstream>

#include "fbm/errors.hpp"
#include "fbm/matcher.hpp"

namespace fbm {

MatchMode parse_mode(std::string_view token) {
  if (token == "fuzzy") {
    return {"fuzzy", true, 0};
  }
  if (token.size() >= 2 && token.front() == 't') {
    int t = 0;
    const char* begin = token.data() + 1;
    const char* end = token.data() + token.size();
    auto [ptr, ec] = std::from_chars(begin, end, t);
    if (ec == std::errc{} && ptr == end && t >= 0 &&
        t <= BinaryDescriptor::kBits) {
      return {std::string(token), false, t};
    }
  }
  throw std::invalid_argument("unknown mode '" + std::string(token) +
                              "' (expected t<bits> or fuzzy)");
}

std::vector<MatchMode> parse_modes(std::string_view csv) {
  std::vector<MatchMode> modes;
  std::size_t pos = 0;
  while (pos <= csv.size()) {
    std::size_t comma = csv.find(',', pos);
    if (comma == std::string_view::npos) comma = csv.size();
    const std::string_view token = csv.substr(pos, comma - pos);
    if (!token.empty()) {
      modes.push_back(parse_mode(token));
    }
    pos = comma + 1;
  }
  if (modes.empty()) {
    throw std::invalid_argument("no modes requested");
  }
  return modes;
}

namespace {

std::filesystem::path find_image(const std::filesystem::path& dir, int index) {
  for (const char* ext : {".ppm", ".pgm"}) {
    std::filesystem::path candidate = dir / ("img" + std::to_string(index) + ext);
    if (std::filesystem::exists(candidate)) {
      return candidate;
    }
  }
  return {};
}

}  // namespace

std::vector<DatasetPair> load_dataset(const std::filesystem::path& dir) {
  if (!std::filesystem::is_directory(dir)) {
    throw DataError(dir.string() + ": not a directory");
  }
  const std::filesystem::path ref_path = find_image(dir, 1);
  if (ref_path.empty()) {
    throw DataError((dir / "img1.{ppm,pgm}").string() + ": missing");
  }
  const GrayImage ref = load_image(ref_path);

  std::string name = dir.filename().string();
  if (name.empty()) {  // trailing slash
    name = dir.parent_path().filename().string();
  }

  std::vector<DatasetPair> pairs;
  for (int target = 2; target <= 6; ++target) {
    const std::filesystem::path img_path = find_image(dir, target);
    if (img_path.empty()) {
      continue;
    }
    const std::filesystem::path h_path =
        dir / ("H1to" + std::to_string(target) + "p");
    if (!std::filesystem::exists(h_path)) {
      throw DataError(h_path.string() + ": missing ground-truth homography");
    }
    DatasetPair pair;
    pair.name = name;
    pair.target_index = target;
    pair.ref_image = ref;
    pair.target_image = load_image(img_path);
    pair.h_gt = read_homography_file(h_path);
    pairs.push_back(std::move(pair));
  }
  if (pairs.empty()) {
    throw DataError(dir.string() + ": no target images (img2..img6)");
  }
  return pairs;
}

std::vector<EvaluationRecord> run_pair(const DatasetPair& pair,
                                       const ExtractionParams& params,
                                       std::span<const MatchMode> modes,
                                       const FuzzyMatcherConfig& fuzzy_cfg,
                                       const EvalOptions& options) {
  if (modes.empty()) {
    throw std::invalid_argument("run_pair: at least one mode required");
  }
  const std::string pair_label =
      std::to_string(pair.ref_index) + "-" + std::to_string(pair.target_index);

  const std::vector<Keypoint> kps_a =
      detect_fast(pair.ref_image, params.fast_threshold, params.max_keypoints);
  const std::vector<Keypoint> kps_b = detect_fast(
      pair.target_image, params.fast_threshold, params.max_keypoints);

  std::vector<EvaluationRecord> records;
  if (kps_a.empty() || kps_b.empty()) {
    if (options.log) {
      *options.log << "warning: " << pair.name << " " << pair_label
                   << ": no keypoints in "
                   << (kps_a.empty() ? "reference" : "target")
                   << " image, emitting zero records\n";
    }
    for (const MatchMode& mode : modes) {
      records.push_back({pair.name, pair_label, mode.label, 0, 0, 0.0});
    }
    return records;
  }

  const SamplingPattern pattern = make_pattern(params.pattern_seed);
  const GrayImage smooth_a = box_smooth(pair.ref_image);
  const GrayImage smooth_b = box_smooth(pair.target_image);
  std::vector<BinaryDescriptor> descs_a;
  std::vector<BinaryDescriptor> descs_b;
  descs_a.reserve(kps_a.size());
  descs_b.reserve(kps_b.size());
  for (const Keypoint& kp : kps_a) {
    descs_a.push_back(describe(smooth_a, kp, pattern));
  }
  for (const Keypoint& kp : kps_b) {
    descs_b.push_back(describe(smooth_b, kp, pattern));
  }

  const double comparisons =
      static_cast<double>(descs_a.size()) * static_cast<double>(descs_b.size());

  for (const MatchMode& mode : modes) {
    using Clock = std::chrono::steady_clock;
    const auto start = Clock::now();
    const std::vector<MatchCandidate> matches =
        mode.fuzzy ? match_fuzzy(descs_a, descs_b, fuzzy_cfg)
                   : match_constant(descs_a, descs_b, mode.threshold);
    const auto stop = Clock::now();
    const double elapsed_ns =
        std::chrono::duration<double, std::nano>(stop - start).count();

    EvaluationRecord record;
    record.dataset = pair.name;
    record.pair = pair_label;
    record.mode = mode.label;
    record.m = matches.size();
    record.cm = count_correct(matches, kps_a, kps_b, pair.h_gt, options.eps);
    record.ns_per_decision = std::max(elapsed_ns, 1.0) / comparisons;
    records.push_back(std::move(record));

    // The RANSAC estimate is a report, not part of the record: CM above is
    // judged against the dataset ground truth.
    if (options.ransac_iters > 0 && options.log) {
      if (matches.size() >= 4) {
        try {
          const RansacResult ransac = ransac_homography(
              matches, kps_a, kps_b, options.ransac_iters, options.eps,
              options.seed);
          *options.log << "ransac: " << pair.name << " " << pair_label << " "
                       << mode.label << ": " << ransac.inlier_count << "/"
                       << matches.size() << " inliers\n";
        } catch (const DegenerateGeometry& e) {
          *options.log << "ransac: " << pair.name << " " << pair_label << " "
                       << mode.label << ": " << e.what() << "\n";
        }
      } else {
        *options.log << "ransac: " << pair.name << " " << pair_label << " "
                     << mode.label << ": skipped (" << matches.size()
                     << " matches)\n";
      }
    }
  }
  return records;
}

namespace {

// Row order: dataset, pair, then thresholds ascending with fuzzy last.
int mode_rank(const std::string& label) {
  if (label == "fuzzy") {
    return BinaryDescriptor::kBits + 1;
  }
  int t = 0;
  std::from_chars(label.data() + 1, label.data() + label.size(), t);
  return t;
}

}  // namespace

void emit_csv(std::span<const EvaluationRecord> records,
              const std::filesystem::path& path) {
  std::vector<const EvaluationRecord*> ordered;
  ordered.reserve(records.size());
  for (const auto& r : records) {
    ordered.push_back(&r);
  }
  std::stable_sort(ordered.begin(), ordered.end(),
                   [](const EvaluationRecord* a, const EvaluationRecord* b) {
                     if (a->dataset != b->dataset) return a->dataset < b->dataset;
                     if (a->pair != b->pair) return a->pair < b->pair;
                     return mode_rank(a->mode) < mode_rank(b->mode);
                   });

  std::ofstream out(path);
  if (!out) {
    throw DataError(path.string() + ": cannot open for writing");
  }
  out << "dataset,pair,mode,M,CM,ns_per_decision\n";
  for (const EvaluationRecord* r : ordered) {
    std::ostringstream row;
    row << r->dataset << "," << r->pair << "," << r->mode << "," << r->m << ","
        << r->cm << ",";
    row.setf(std::ios::fixed);
    row.precision(3);
    row << r->ns_per_decision;
    out << row.str() << "\n";
  }
  if (!out) {
    throw DataError(path.string() + ": write failed");
  }
}

}  // namespace fbm
