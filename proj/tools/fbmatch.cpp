// fbmatch: detect binary features, match descriptor sets with constant or
// fuzzy Hamming thresholding, and evaluate against ground-truth homographies.

#include <CLI11.hpp>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include "fbm/errors.hpp"
#include "fbm/features.hpp"
#include "fbm/fuzzy.hpp"
#include "fbm/harness.hpp"
#include "fbm/image.hpp"
#include "fbm/matcher.hpp"

namespace {

constexpr int kExitUsage = 1;
constexpr int kExitData = 2;

struct FuzzyFlags {
  std::string config_line;
  std::string low;
  std::string high;
  std::optional<double> cutoff;

  void add_to(CLI::App& cmd) {
    cmd.add_option("--fuzzy-config", config_line,
                   "Config line: low=a,b,c,d high=a,b,c,d cutoff=v");
    cmd.add_option("--low", low, "LOW trapezoid breakpoints a,b,c,d");
    cmd.add_option("--high", high, "HIGH trapezoid breakpoints a,b,c,d");
    cmd.add_option("--cutoff", cutoff, "Match decision cutoff in (0,1)");
  }

  fbm::FuzzyMatcherConfig build() const {
    std::string line = config_line;
    if (!low.empty()) line += " low=" + low;
    if (!high.empty()) line += " high=" + high;
    if (cutoff) line += " cutoff=" + std::to_string(*cutoff);
    return fbm::parse_fuzzy_config(line);
  }
};

void run_detect(const std::string& image_path, int threshold, int max_kp,
                std::uint64_t seed, const std::string& out_path) {
  const fbm::GrayImage img = fbm::load_image(image_path);
  const auto kps =
      fbm::detect_fast(img, threshold, static_cast<std::size_t>(max_kp));
  const fbm::GrayImage smoothed = fbm::box_smooth(img);
  const fbm::SamplingPattern pattern = fbm::make_pattern(seed);
  std::vector<fbm::BinaryDescriptor> descs;
  descs.reserve(kps.size());
  for (const fbm::Keypoint& kp : kps) {
    descs.push_back(fbm::describe(smoothed, kp, pattern));
  }
  fbm::write_descriptors(out_path, kps, descs);
  std::cout << kps.size() << " keypoints -> " << out_path << "\n";
}

void write_match_csv(const std::vector<fbm::MatchCandidate>& matches,
                     const std::string& out_path) {
  std::ofstream out(out_path);
  if (!out) {
    throw fbm::DataError(out_path + ": cannot open for writing");
  }
  out << "index_a,index_b,distance_bits,degree\n";
  for (const auto& m : matches) {
    out << m.index_a << "," << m.index_b << "," << m.distance_bits << ",";
    if (m.degree) {
      out << *m.degree;
    }
    out << "\n";
  }
  if (!out) {
    throw fbm::DataError(out_path + ": write failed");
  }
}

void run_match(const std::string& a_path, const std::string& b_path,
               std::optional<int> t, bool fuzzy, const FuzzyFlags& flags,
               const std::string& out_path) {
  const auto [kps_a, descs_a] = fbm::read_descriptors(a_path);
  const auto [kps_b, descs_b] = fbm::read_descriptors(b_path);
  std::vector<fbm::MatchCandidate> matches;
  if (fuzzy) {
    matches = fbm::match_fuzzy(descs_a, descs_b, flags.build());
  } else {
    matches = fbm::match_constant(descs_a, descs_b, *t);
  }
  write_match_csv(matches, out_path);
  std::cout << "M=" << matches.size() << " -> " << out_path << "\n";
}

void run_eval(const std::string& dataset_dir, const std::string& modes_csv,
              double eps, int ransac_iters, std::uint64_t seed, int threshold,
              int max_kp, const FuzzyFlags& flags,
              const std::string& out_path) {
  const std::vector<fbm::MatchMode> modes = fbm::parse_modes(modes_csv);
  const fbm::FuzzyMatcherConfig fuzzy_cfg = flags.build();

  fbm::ExtractionParams params;
  params.fast_threshold = threshold;
  params.max_keypoints = static_cast<std::size_t>(max_kp);
  params.pattern_seed = seed;

  fbm::EvalOptions options;
  options.eps = eps;
  options.ransac_iters = ransac_iters;
  options.seed = seed;
  options.log = &std::cerr;

  std::vector<fbm::EvaluationRecord> records;
  for (const fbm::DatasetPair& pair : fbm::load_dataset(dataset_dir)) {
    auto pair_records = fbm::run_pair(pair, params, modes, fuzzy_cfg, options);
    records.insert(records.end(), pair_records.begin(), pair_records.end());
  }
  fbm::emit_csv(records, out_path);
  std::cout << records.size() << " records -> " << out_path << "\n";
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Binary feature matching with constant and fuzzy Hamming "
               "thresholds"};
  app.require_subcommand(1);

  // detect
  auto* detect = app.add_subcommand("detect", "Detect and describe features");
  std::string image_path, detect_out;
  int detect_threshold = 20;
  int detect_max_kp = 2000;
  std::uint64_t detect_seed = fbm::kDefaultPatternSeed;
  detect->add_option("--image", image_path, "Input Netpbm image")->required();
  detect->add_option("--threshold", detect_threshold, "FAST threshold");
  detect->add_option("--max-kp", detect_max_kp, "Keypoint budget");
  detect->add_option("--seed", detect_seed, "Sampling pattern seed");
  detect->add_option("--out", detect_out, "Output descriptor file")->required();

  // match
  auto* match = app.add_subcommand("match", "Match two descriptor files");
  std::string a_path, b_path, match_out;
  std::optional<int> match_t;
  bool match_fuzzy_mode = false;
  FuzzyFlags match_flags;
  match->add_option("--a", a_path, "Descriptor file A")->required();
  match->add_option("--b", b_path, "Descriptor file B")->required();
  auto* t_opt = match->add_option("--t", match_t,
                                  "Constant threshold in bits [0,256]");
  auto* fuzzy_opt =
      match->add_flag("--fuzzy", match_fuzzy_mode, "Fuzzy decision rule");
  t_opt->excludes(fuzzy_opt);
  match_flags.add_to(*match);
  match->add_option("--out", match_out, "Output match CSV")->required();

  // eval
  auto* eval = app.add_subcommand("eval", "Evaluate a dataset directory");
  std::string dataset_dir, modes_csv = "t5,t10,t15,fuzzy", eval_out;
  double eval_eps = 3.0;
  int eval_ransac_iters = 2000;
  std::uint64_t eval_seed = fbm::kDefaultPatternSeed;
  int eval_threshold = 20;
  int eval_max_kp = 2000;
  FuzzyFlags eval_flags;
  eval->add_option("--dataset", dataset_dir, "Sequence directory")->required();
  eval->add_option("--modes", modes_csv, "Comma list: t<bits> and fuzzy");
  eval->add_option("--eps", eval_eps, "Reprojection tolerance in px");
  eval->add_option("--ransac-iters", eval_ransac_iters, "RANSAC iterations");
  eval->add_option("--seed", eval_seed, "Pattern and RANSAC seed");
  eval->add_option("--threshold", eval_threshold, "FAST threshold");
  eval->add_option("--max-kp", eval_max_kp, "Keypoint budget per image");
  eval_flags.add_to(*eval);
  eval->add_option("--out", eval_out, "Output CSV")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : kExitUsage;
  }

  try {
    if (detect->parsed()) {
      run_detect(image_path, detect_threshold, detect_max_kp, detect_seed,
                 detect_out);
    } else if (match->parsed()) {
      if (!match_t && !match_fuzzy_mode) {
        std::cerr << "match: either --t or --fuzzy is required\n";
        return kExitUsage;
      }
      run_match(a_path, b_path, match_t, match_fuzzy_mode, match_flags,
                match_out);
    } else if (eval->parsed()) {
      run_eval(dataset_dir, modes_csv, eval_eps, eval_ransac_iters, eval_seed,
               eval_threshold, eval_max_kp, eval_flags, eval_out);
    }
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitData;
  }
  return 0;
}
