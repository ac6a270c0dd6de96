#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "tagrec/types.hpp"

namespace tagrec {

/// exp(c_j) / sum_i exp(c_i), computed with max-subtraction. Empty in, empty out.
std::vector<double> softmax_normalize(std::span<const double> raw);

/// Sorts by descending score, ties by ascending tag id, and keeps the first k.
RankedTags rank_top_k(std::vector<ScoredTag> scores, std::size_t k);

/// Combines two sparse raw score vectors into one ranking:
///   beta * softmax(first) + (1 - beta) * softmax(second)
/// Each component is softmax-normalized over its own support; a tag outside a
/// component's support receives 0 from that component. Candidates are the
/// union of both supports. Throws ConfigError unless 0 <= beta <= 1.
RankedTags mix_components(std::span<const ScoredTag> first, std::span<const ScoredTag> second,
                          double beta, std::size_t k);

/// Raw frequency vector as sparse scores.
std::vector<ScoredTag> as_scores(std::span<const TagCount> counts);

}  // namespace tagrec
