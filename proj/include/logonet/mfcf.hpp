#pragma once

#include "logonet/clique_forest.hpp"
#include "logonet/dependence.hpp"

namespace logonet {

// min clique size is fixed at 2, the gain is the sum of squared
// correlations, and separators have multiplicity one
struct BuildConfig {
    int max_clique_size = 4;
};

double gain(int v, const std::vector<int>& sep, const DependenceMatrix& corr);

// Greedy clique expansion: seed = best pair grown to min(R, p), then
// repeatedly attach the outside vertex with the highest-gain unused
// separator subset. Ties break on gain desc, vertex asc, clique asc,
// subset lexicographic.
CliqueForest build_mfcf(const DependenceMatrix& corr, const BuildConfig& cfg);

}  // namespace logonet
