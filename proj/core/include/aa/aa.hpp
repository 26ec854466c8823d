#ifndef AA_AA_HPP
#define AA_AA_HPP

// Umbrella header.

#include "aa/analysis.hpp"
#include "aa/config.hpp"
#include "aa/errors.hpp"
#include "aa/history.hpp"
#include "aa/linalg.hpp"
#include "aa/problem.hpp"
#include "aa/problems/affine.hpp"
#include "aa/problems/quasilinear.hpp"
#include "aa/problems/scalar.hpp"
#include "aa/report.hpp"
#include "aa/solver.hpp"
#include "aa/vec.hpp"

#endif // AA_AA_HPP
