#pragma once

#include <vector>

namespace kslab {

// Discrete mass-coordinate grid: s is the volume-like coordinate
// (s = r^N), graded toward s = 0 where blow-up concentrates.
struct RadialGrid {
    int N = 3;
    double R = 1.0;
    double grading = 2.0;                // s_j = R^N (j/J)^grading
    std::vector<double> s;               // 0 = s_0 < ... < s_J = R^N
    std::vector<double> r;               // r_j = s_j^{1/N}

    RadialGrid() = default;
    RadialGrid(int N, double R, int cells, double grading = 2.0);

    int cells() const { return static_cast<int>(s.size()) - 1; }
    int nodes() const { return static_cast<int>(s.size()); }
};

}  // namespace kslab
