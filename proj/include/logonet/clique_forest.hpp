#pragma once

#include <string>
#include <utility>
#include <vector>

namespace logonet {

struct Separator {
    std::vector<int> vertices;  // sorted; equals intersection of parent and child
    int parent_clique = -1;
    int child_clique = -1;
    int multiplicity_token = 1;
};

struct CliqueForest {
    int p = 0;
    int max_clique_size = 0;
    std::vector<std::vector<int>> cliques;  // each sorted ascending
    std::vector<Separator> separators;
};

struct ValidationReport {
    std::vector<std::string> violations;
    bool ok() const { return violations.empty(); }
};

// union over cliques of within-clique pairs, (i, j) with i < j, sorted
std::vector<std::pair<int, int>> edge_set(const CliqueForest& forest);

// checks vertex cover, separator-as-intersection, junction-forest
// acyclicity, running intersection, chordality (MCS + perfect
// elimination), clique size bounds and multiplicity-one uniqueness
ValidationReport validate(const CliqueForest& forest);

std::string serialize(const CliqueForest& forest);
CliqueForest deserialize(const std::string& text);

}  // namespace logonet
