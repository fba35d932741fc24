#pragma once

#include "tfz/grid.hpp"

namespace tfz {

// out[x] = min_i f[i] + w (x-i)^2 for integer x in [0, n). Entries of f may
// be +inf (absent parabolas); if all are, out is +inf.
void parabola_envelope(const double* f, int n, double w, double* out);

// Same, also reporting the minimizing index per x (-1 where undefined).
void parabola_envelope_arg(const double* f, int n, double w, double* out, int* arg);

// Exact squared Euclidean distance transform of a seed grid with
// anisotropic cell spacing: cell (r, c) sits at (r*du, c*dv). +inf where the
// grid has no seeds at all.
RGrid squared_distance_transform(const BGrid& seeds, double du, double dv);

}  // namespace tfz
