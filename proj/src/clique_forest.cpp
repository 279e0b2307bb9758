#include "logonet/clique_forest.hpp"

#include <json.hpp>

#include <algorithm>
#include <map>
#include <numeric>
#include <set>

#include "logonet/errors.hpp"

namespace logonet {

namespace {

struct UnionFind {
    explicit UnionFind(int n) : parent(n) { std::iota(parent.begin(), parent.end(), 0); }
    int find(int x) {
        while (parent[x] != x) x = parent[x] = parent[parent[x]];
        return x;
    }
    // returns false if already joined (cycle)
    bool unite(int a, int b) {
        a = find(a);
        b = find(b);
        if (a == b) return false;
        parent[a] = b;
        return true;
    }
    std::vector<int> parent;
};

bool sorted_unique(const std::vector<int>& v) {
    for (std::size_t i = 1; i < v.size(); ++i)
        if (v[i] <= v[i - 1]) return false;
    return true;
}

std::vector<int> intersect_sorted(const std::vector<int>& a, const std::vector<int>& b) {
    std::vector<int> out;
    std::set_intersection(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
    return out;
}

bool contains(const std::vector<int>& sorted, int v) {
    return std::binary_search(sorted.begin(), sorted.end(), v);
}

// maximum cardinality search followed by the perfect-elimination check
bool is_chordal(int p, const std::vector<std::pair<int, int>>& edges) {
    std::vector<std::set<int>> adj(p);
    for (auto [i, j] : edges) {
        adj[i].insert(j);
        adj[j].insert(i);
    }
    std::vector<int> weight(p, 0), pick_order;
    std::vector<bool> numbered(p, false);
    pick_order.reserve(p);
    for (int step = 0; step < p; ++step) {
        int best = -1;
        for (int v = 0; v < p; ++v)
            if (!numbered[v] && (best == -1 || weight[v] > weight[best])) best = v;
        numbered[best] = true;
        pick_order.push_back(best);
        for (int u : adj[best])
            if (!numbered[u]) ++weight[u];
    }
    // elimination order = reverse pick order
    std::vector<int> pos(p);
    std::vector<int> elim(pick_order.rbegin(), pick_order.rend());
    for (int i = 0; i < p; ++i) pos[elim[i]] = i;
    for (int i = 0; i < p; ++i) {
        int u = elim[i];
        int follower = -1;
        for (int w : adj[u])
            if (pos[w] > i && (follower == -1 || pos[w] < pos[follower])) follower = w;
        if (follower == -1) continue;
        for (int w : adj[u])
            if (pos[w] > i && w != follower && !adj[follower].count(w)) return false;
    }
    return true;
}

}  // namespace

std::vector<std::pair<int, int>> edge_set(const CliqueForest& forest) {
    std::set<std::pair<int, int>> edges;
    for (const auto& c : forest.cliques)
        for (std::size_t a = 0; a < c.size(); ++a)
            for (std::size_t b = a + 1; b < c.size(); ++b)
                edges.insert({std::min(c[a], c[b]), std::max(c[a], c[b])});
    return {edges.begin(), edges.end()};
}

ValidationReport validate(const CliqueForest& forest) {
    ValidationReport rep;
    auto flag = [&](const std::string& msg) { rep.violations.push_back(msg); };

    if (forest.p < 1) {
        flag("vertex count must be positive");
        return rep;
    }
    bool shape_ok = true;
    for (std::size_t ci = 0; ci < forest.cliques.size(); ++ci) {
        const auto& c = forest.cliques[ci];
        if (c.empty()) {
            flag("clique " + std::to_string(ci) + " is empty");
            shape_ok = false;
            continue;
        }
        if (!sorted_unique(c)) {
            flag("clique " + std::to_string(ci) + " is not sorted strictly ascending");
            shape_ok = false;
        }
        if (c.front() < 0 || c.back() >= forest.p) {
            flag("clique " + std::to_string(ci) + " has out-of-range vertices");
            shape_ok = false;
        }
        if (forest.max_clique_size > 0 && static_cast<int>(c.size()) > forest.max_clique_size)
            flag("clique " + std::to_string(ci) + " exceeds max_clique_size");
    }
    if (!shape_ok) return rep;

    std::vector<int> cover(forest.p, 0);
    for (const auto& c : forest.cliques)
        for (int v : c) ++cover[v];
    for (int v = 0; v < forest.p; ++v)
        if (cover[v] == 0) flag("vertex " + std::to_string(v) + " is not covered by any clique");

    const int nc = static_cast<int>(forest.cliques.size());
    UnionFind junction(nc);
    bool links_ok = true;
    for (std::size_t si = 0; si < forest.separators.size(); ++si) {
        const auto& s = forest.separators[si];
        std::string tag = "separator " + std::to_string(si);
        if (s.parent_clique < 0 || s.parent_clique >= nc || s.child_clique < 0 ||
            s.child_clique >= nc || s.parent_clique == s.child_clique) {
            flag(tag + " has invalid clique links");
            links_ok = false;
            continue;
        }
        if (!sorted_unique(s.vertices) || s.vertices.empty()) {
            flag(tag + " vertex set must be non-empty and sorted");
            links_ok = false;
            continue;
        }
        const auto& cp = forest.cliques[s.parent_clique];
        const auto& cc = forest.cliques[s.child_clique];
        if (s.vertices != intersect_sorted(cp, cc))
            flag(tag + " is not the intersection of its parent and child");
        if (s.vertices.size() >= cp.size() || s.vertices.size() >= cc.size())
            flag(tag + " is not a strict subset of both linked cliques");
        if (!junction.unite(s.parent_clique, s.child_clique))
            flag(tag + " closes a cycle in the junction forest");
    }

    if (links_ok) {
        // running intersection: per vertex the cliques containing it are
        // connected through separators that also contain it
        for (int v = 0; v < forest.p; ++v) {
            std::vector<int> holders;
            for (int ci = 0; ci < nc; ++ci)
                if (contains(forest.cliques[ci], v)) holders.push_back(ci);
            if (holders.size() < 2) continue;
            std::map<int, int> local;
            for (std::size_t i = 0; i < holders.size(); ++i) local[holders[i]] = static_cast<int>(i);
            UnionFind uf(static_cast<int>(holders.size()));
            for (const auto& s : forest.separators)
                if (contains(s.vertices, v) && local.count(s.parent_clique) &&
                    local.count(s.child_clique))
                    uf.unite(local[s.parent_clique], local[s.child_clique]);
            std::set<int> roots;
            for (std::size_t i = 0; i < holders.size(); ++i)
                roots.insert(uf.find(static_cast<int>(i)));
            if (roots.size() > 1)
                flag("running intersection fails for vertex " + std::to_string(v));
        }
    }

    std::map<std::vector<int>, std::pair<int, int>> sep_groups;  // set -> (count, max token)
    for (const auto& s : forest.separators) {
        auto& g = sep_groups[s.vertices];
        ++g.first;
        g.second = std::max(g.second, s.multiplicity_token);
    }
    for (const auto& [verts, g] : sep_groups)
        if (g.first > std::max(g.second, 1))
            flag("separator vertex set used " + std::to_string(g.first) +
                 " times, multiplicity allows " + std::to_string(std::max(g.second, 1)));

    if (!is_chordal(forest.p, edge_set(forest)))
        flag("implied graph is not chordal (no perfect elimination ordering)");

    return rep;
}

std::string serialize(const CliqueForest& forest) {
    nlohmann::json doc;
    doc["p"] = forest.p;
    doc["max_clique_size"] = forest.max_clique_size;
    doc["cliques"] = forest.cliques;
    auto seps = nlohmann::json::array();
    for (const auto& s : forest.separators) {
        nlohmann::json js;
        js["vertices"] = s.vertices;
        js["parent"] = s.parent_clique;
        js["child"] = s.child_clique;
        seps.push_back(js);
    }
    doc["separators"] = seps;
    return doc.dump();
}

CliqueForest deserialize(const std::string& text) {
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        throw parse_error(std::string("network document: ") + e.what());
    }
    try {
        CliqueForest f;
        f.p = doc.at("p").get<int>();
        f.max_clique_size = doc.at("max_clique_size").get<int>();
        f.cliques = doc.at("cliques").get<std::vector<std::vector<int>>>();
        for (const auto& js : doc.at("separators")) {
            Separator s;
            s.vertices = js.at("vertices").get<std::vector<int>>();
            s.parent_clique = js.at("parent").get<int>();
            s.child_clique = js.at("child").get<int>();
            f.separators.push_back(std::move(s));
        }
        return f;
    } catch (const nlohmann::json::exception& e) {
        throw parse_error(std::string("network document: ") + e.what());
    }
}

}  // namespace logonet
