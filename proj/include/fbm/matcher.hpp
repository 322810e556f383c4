#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "fbm/features.hpp"
#include "fbm/fuzzy.hpp"

namespace fbm {

/// One proposed correspondence. `degree` is present iff the candidate came
/// out of the fuzzy matcher. Each index_a appears at most once per matcher
/// output (nearest-neighbor policy).
struct MatchCandidate {
  std::size_t index_a = 0;
  std::size_t index_b = 0;
  int distance_bits = 0;
  std::optional<double> degree;

  friend bool operator==(const MatchCandidate&,
                         const MatchCandidate&) = default;
};

/// Exhaustive nearest neighbor of `a` in `B`; ties resolve to the smallest
/// index. Requires non-empty B.
std::pair<std::size_t, int> nearest_neighbor(
    const BinaryDescriptor& a, std::span<const BinaryDescriptor> B);

/// For each descriptor in A: nearest neighbor in B, kept iff
/// distance_bits < t (strict). Output ordered by index_a. t in [0, 256].
std::vector<MatchCandidate> match_constant(std::span<const BinaryDescriptor> A,
                                           std::span<const BinaryDescriptor> B,
                                           int t);

/// For each descriptor in A: nearest neighbor in B, kept iff the fuzzy
/// decision on its distance is a match; the inferred degree is attached.
std::vector<MatchCandidate> match_fuzzy(std::span<const BinaryDescriptor> A,
                                        std::span<const BinaryDescriptor> B,
                                        const FuzzyMatcherConfig& cfg);

}  // namespace fbm
