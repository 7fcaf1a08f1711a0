#pragma once

#include "atlas/orbit.hpp"

namespace atlas {

// Which superattracting fixed point a point converges to (iteration count in
// *iters), or -1 when it does not settle within the budget.
int quick_target(const Map& f, cplx z, int budget, int* iters = nullptr);
int target_index(Family fam, Target t);

// Path-based membership test for the immediate basin of a superattracting
// fixed point; Thorough adds a raster flood fill when the paths fail.
bool in_immediate_basin(const Parameter& p, cplx start, Target t, ImmediacyTest mode);

}  // namespace atlas
