#pragma once

#include <functional>
#include <string>

#include "mfstop/errors.hpp"

namespace mfstop {

// Drift and diffusion of the scalar dynamics. The mean-coupling argument z
// receives either the within-scenario empirical mean (interacting system),
// the frozen deterministic mean (decoupled system), or is ignored
// (time-homogeneous Markov family).
struct CoefficientSpec {
  std::string name;
  std::function<double(double, double, double)> b;      // b(t, x, z)
  std::function<double(double, double, double)> sigma;  // sigma(t, x, z)
};

// Presets: "driftless" (b=0, sigma=1), "ou" (b=-theta*x, sigma=sigma0),
// "mf-attract" (b=kappa*(z-x), sigma=sigma0), "gbm" (b=mu*x, sigma=sigma0*x).
inline CoefficientSpec make_coefficients(const std::string& name,
                                         double p1 = 1.0, double p2 = 1.0) {
  CoefficientSpec c;
  c.name = name;
  if (name == "driftless") {
    c.b = [](double, double, double) { return 0.0; };
    c.sigma = [](double, double, double) { return 1.0; };
  } else if (name == "ou") {
    c.b = [p1](double, double x, double) { return -p1 * x; };
    c.sigma = [p2](double, double, double) { return p2; };
  } else if (name == "mf-attract") {
    c.b = [p1](double, double x, double z) { return p1 * (z - x); };
    c.sigma = [p2](double, double, double) { return p2; };
  } else if (name == "gbm") {
    c.b = [p1](double, double x, double) { return p1 * x; };
    c.sigma = [p2](double, double x, double) { return p2 * x; };
  } else {
    throw ConfigError("unknown coefficient preset: " + name);
  }
  return c;
}

}  // namespace mfstop
