#include "fbm/matcher.hpp"

#include <stdexcept>

namespace fbm {

std::pair<std::size_t, int> nearest_neighbor(
    const BinaryDescriptor& a, std::span<const BinaryDescriptor> B) {
  if (B.empty()) {
    throw std::invalid_argument("nearest_neighbor: empty descriptor set");
  }
  std::size_t best = 0;
  int best_dist = hamming_bits(a, B[0]);
  for (std::size_t j = 1; j < B.size(); ++j) {
    const int dist = hamming_bits(a, B[j]);
    if (dist < best_dist) {  // strict: ties keep the smaller index
      best = j;
      best_dist = dist;
    }
  }
  return {best, best_dist};
}

std::vector<MatchCandidate> match_constant(std::span<const BinaryDescriptor> A,
                                           std::span<const BinaryDescriptor> B,
                                           int t) {
  if (t < 0 || t > BinaryDescriptor::kBits) {
    throw std::invalid_argument("match_constant: threshold outside [0, 256]");
  }
  if (B.empty()) {
    throw std::invalid_argument("match_constant: empty descriptor set");
  }
  std::vector<MatchCandidate> matches;
  for (std::size_t i = 0; i < A.size(); ++i) {
    const auto [j, dist] = nearest_neighbor(A[i], B);
    if (dist < t) {
      matches.push_back({i, j, dist, std::nullopt});
    }
  }
  return matches;
}

std::vector<MatchCandidate> match_fuzzy(std::span<const BinaryDescriptor> A,
                                        std::span<const BinaryDescriptor> B,
                                        const FuzzyMatcherConfig& cfg) {
  if (B.empty()) {
    throw std::invalid_argument("match_fuzzy: empty descriptor set");
  }
  std::vector<MatchCandidate> matches;
  for (std::size_t i = 0; i < A.size(); ++i) {
    const auto [j, dist] = nearest_neighbor(A[i], B);
    const FuzzyDecision decision = fuzzy_decide(cfg, dist);
    if (decision.is_match) {
      matches.push_back({i, j, dist, decision.degree});
    }
  }
  return matches;
}

}  // namespace fbm
