#pragma once

#include "kslab/grid.hpp"
#include "kslab/params.hpp"
#include "kslab/state.hpp"

namespace kslab {

// Builds admissible initial data on the grid:
//   - capped power core min(A, L r^{-p}) on [0, r1], tapered to zero just
//     inside r1 so the profile stays continuous;
//   - cap level A found by bisection so the discrete mass inside B_{r1}
//     hits a target in [M1, M0];
//   - a smooth compactly supported bump on (r1, R) carrying the remainder,
//     rescaled at the end so the discrete total mass is M0 exactly.
// The envelope u0(r) <= L r^{-p} is verified at every node. Throws
// std::runtime_error naming the binding constraint when infeasible.
State build_initial_data(const ModelParams& params, double p, double r1,
                         const RadialGrid& grid);

// Discrete mass inside B_{rcut} (physical units, i.e. multiplied by
// omega_{N-1}); partial trapezoid on the last cell crossing rcut.
double inner_mass(const RadialGrid& grid, std::span<const double> u, double rcut);

}  // namespace kslab
