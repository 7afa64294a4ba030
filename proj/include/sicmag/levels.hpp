#pragma once

#include <vector>

namespace sicmag {

// Hybrid level scheme: a coherent ground block plus rate-model excited and
// metastable blocks. Coherences are permitted only inside the ground block.
// Default partition is 4 ground + 4 excited + 2 metastable, ground indices
// mapped to m_S = (+3/2, +1/2, -1/2, -3/2) in order.
struct LevelScheme {
    int n_levels = 10;
    std::vector<int> ground = {0, 1, 2, 3};
    std::vector<int> excited = {4, 5, 6, 7};
    std::vector<int> metastable = {8, 9};

    static LevelScheme hybrid10() { return LevelScheme{}; }

    bool is_ground(int i) const;
    // Throws std::invalid_argument if the index sets are not disjoint or do
    // not cover 0..n_levels-1, or if the ground block is not 4 levels.
    void validate() const;
};

}  // namespace sicmag
