#include "kslab/grid.hpp"

#include <cmath>
#include <stdexcept>

namespace kslab {

RadialGrid::RadialGrid(int N_, double R_, int cells, double grading_)
    : N(N_), R(R_), grading(grading_) {
    if (N < 1 || !(R > 0.0) || cells < 2 || !(grading >= 1.0))
        throw std::invalid_argument("RadialGrid: bad N/R/cells/grading");
    const double sR = std::pow(R, N);
    s.resize(cells + 1);
    r.resize(cells + 1);
    for (int j = 0; j <= cells; ++j) {
        const double xi = static_cast<double>(j) / cells;
        s[j] = sR * std::pow(xi, grading);
        r[j] = std::pow(s[j], 1.0 / N);
    }
    s.front() = 0.0;
    s.back() = sR;  // pin the endpoints against pow roundoff
    r.front() = 0.0;
    r.back() = R;
}

}  // namespace kslab
