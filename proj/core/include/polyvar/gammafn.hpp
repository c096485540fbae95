#pragma once

namespace polyvar {

// log Γ(x) for x > 0, Lanczos approximation (g = 7, 9 terms).
double log_gamma(double x);
double gamma_fn(double x);

}  // namespace polyvar
