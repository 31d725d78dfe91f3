#pragma once

#include "sicert/types.hpp"

#include <functional>

namespace sicert {

struct NelderMeadOptions {
  int max_iterations = 40000;
  double f_tol = 1e-12;       // simplex spread / improvement threshold
  int stall_iterations = 200; // stop after this many non-improving iterations
  Vector initial_step;        // per-coordinate; empty = 0.1 everywhere
};

struct NelderMeadResult {
  Vector x;
  double f = 0.0;
  int iterations = 0;
  bool converged = false;
};

/// Derivative-free simplex descent with the dimension-adaptive expansion and
/// contraction coefficients; suited to the smooth bounded-reparameterized
/// objectives used by the fitting stages.
NelderMeadResult nelder_mead(const std::function<double(const Vector&)>& f, const Vector& x0,
                             const NelderMeadOptions& opts = {});

}  // namespace sicert
