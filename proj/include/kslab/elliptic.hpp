#pragma once

#include <span>
#include <vector>

#include "kslab/grid.hpp"

namespace kslab {

// Thomas solve of a tridiagonal system; the three diagonals and rhs are
// consumed as values (the sweep works in place on copies).
std::vector<double> solve_tridiagonal(std::vector<double> lower, std::vector<double> diag,
                                      std::vector<double> upper, std::vector<double> rhs);

struct EllipticResult {
    std::vector<double> v;  // nodal chemical field
    std::vector<double> z;  // cumulative trapezoid of rho^{N-1} v
    double residual = 0.0;  // max-norm residual of the discrete system
};

// Finite-volume solve of  -(r^{N-1} v_r)_r / r^{N-1} + v = u  with zero flux
// at r = 0 and r = R. Control volumes sit around the nodes with faces at the
// r-midpoints (gradient second order there); areas and shell volumes are
// exact through s = r^N. The lumped +v term makes the matrix an M-matrix;
// the discrete sum identity  sum Vol_j v_j = sum Vol_j u_j  holds to
// roundoff, tightened by flux-form iterative refinement.
EllipticResult solve_elliptic(const RadialGrid& grid, std::span<const double> u);

// Node volumes Vol_j of the scheme above.
std::vector<double> node_volumes(const RadialGrid& grid);

}  // namespace kslab
