#include "logonet/mfcf.hpp"

#include <algorithm>
#include <map>
#include <optional>
#include <set>

#include "logonet/errors.hpp"

namespace logonet {

namespace {

struct Candidate {
    double gain;
    std::vector<int> subset;
};

// best unused min(|c|, R-1)-subset of the clique for vertex v; the
// additive gain makes leave-one-out enumeration sufficient
std::optional<Candidate> best_unused_subset(const Eigen::MatrixXd& C2, int v,
                                            const std::vector<int>& clique, int R,
                                            const std::set<std::vector<int>>& used) {
    const std::size_t k = std::min(clique.size(), static_cast<std::size_t>(R - 1));
    double total = 0.0;
    for (int u : clique) total += C2(v, u);
    if (k == clique.size()) {
        if (used.count(clique)) return std::nullopt;
        return Candidate{total, clique};
    }
    std::optional<Candidate> best;
    for (int out : clique) {
        std::vector<int> sub;
        sub.reserve(clique.size() - 1);
        for (int u : clique)
            if (u != out) sub.push_back(u);
        if (used.count(sub)) continue;
        double g = total - C2(v, out);
        if (!best || g > best->gain || (g == best->gain && sub < best->subset))
            best = Candidate{g, std::move(sub)};
    }
    return best;
}

}  // namespace

double gain(int v, const std::vector<int>& sep, const DependenceMatrix& corr) {
    double g = 0.0;
    for (int u : sep) g += corr.matrix(v, u) * corr.matrix(v, u);
    return g;
}

CliqueForest build_mfcf(const DependenceMatrix& corr, const BuildConfig& cfg) {
    if (!corr.is_correlation())
        throw domain_error("build_mfcf expects a correlation matrix");
    const int p = static_cast<int>(corr.matrix.rows());
    if (corr.matrix.cols() != p) throw dimension_error("correlation matrix must be square");
    const int R = cfg.max_clique_size;
    if (R < 2) throw config_error("max_clique_size must be at least 2");
    if (R > p) throw config_error("max_clique_size exceeds vertex count");

    Eigen::MatrixXd C2 = corr.matrix.array().square();
    C2.diagonal().setZero();

    // seed: strongest squared-correlation pair, lexicographic tie-break,
    // grown greedily against all current members
    int sa = 0, sb = 1;
    for (int a = 0; a < p; ++a)
        for (int b = a + 1; b < p; ++b)
            if (C2(a, b) > C2(sa, sb)) {
                sa = a;
                sb = b;
            }
    std::vector<int> seed = {sa, sb};
    std::set<int> outside;
    for (int v = 0; v < p; ++v)
        if (v != sa && v != sb) outside.insert(v);
    while (static_cast<int>(seed.size()) < std::min(R, p)) {
        int bestv = -1;
        double bestg = -1.0;
        for (int v : outside) {
            double g = 0.0;
            for (int u : seed) g += C2(v, u);
            if (g > bestg) {
                bestg = g;
                bestv = v;
            }
        }
        seed.push_back(bestv);
        outside.erase(bestv);
    }
    std::sort(seed.begin(), seed.end());

    CliqueForest forest;
    forest.p = p;
    forest.max_clique_size = R;
    forest.cliques.push_back(seed);

    std::set<std::vector<int>> used;
    // gain table keyed (vertex, clique); map order matches the
    // vertex-then-clique tie-break when scanned with strict >
    std::map<std::pair<int, int>, Candidate> table;
    for (int v : outside) {
        auto cand = best_unused_subset(C2, v, forest.cliques[0], R, used);
        if (cand) table[{v, 0}] = std::move(*cand);
    }

    while (!outside.empty()) {
        const Candidate* best = nullptr;
        int bv = -1, bc = -1;
        for (const auto& [key, cand] : table) {
            if (!best || cand.gain > best->gain) {
                best = &cand;
                bv = key.first;
                bc = key.second;
            }
        }
        if (!best) throw error("mfcf builder ran out of separator subsets");

        std::vector<int> clique = best->subset;
        clique.push_back(bv);
        std::sort(clique.begin(), clique.end());
        std::vector<int> sep = best->subset;
        forest.cliques.push_back(clique);
        int new_id = static_cast<int>(forest.cliques.size()) - 1;
        forest.separators.push_back({sep, bc, new_id, 1});
        used.insert(sep);
        outside.erase(bv);

        for (auto it = table.begin(); it != table.end();) {
            if (it->first.first == bv) {
                it = table.erase(it);
                continue;
            }
            if (it->second.subset == sep) {
                // consumed subset: lazily recompute the next-best unused one
                auto cand = best_unused_subset(C2, it->first.first,
                                               forest.cliques[it->first.second], R, used);
                if (cand) {
                    it->second = std::move(*cand);
                    ++it;
                } else {
                    it = table.erase(it);
                }
                continue;
            }
            ++it;
        }
        for (int v : outside) {
            auto cand = best_unused_subset(C2, v, clique, R, used);
            if (cand) table[{v, new_id}] = std::move(*cand);
        }
    }

    ValidationReport rep = validate(forest);
    if (!rep.ok()) throw error("mfcf builder produced an invalid forest: " + rep.violations[0]);
    return forest;
}

}  // namespace logonet
