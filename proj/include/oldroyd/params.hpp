#pragma once

#include <stdexcept>
#include <string>

namespace oldroyd {

// coefficients of the coupled velocity/stress system:
//   d_t u + u.grad u - mu Lap u = -grad pi + mu1 div tau,  div u = 0
//   d_t tau + u.grad tau + a tau + Q(grad u, tau) = mu2 D(u)
struct ModelParams {
    double mu = 1.0;   // viscosity, > 0
    double mu1 = 1.0;  // stress -> momentum coupling, > 0
    double mu2 = 1.0;  // strain -> stress coupling, > 0
    double a = 1.0;    // stress damping rate, > 0
    double b = 0.5;    // slip parameter in [-1, 1]

    void validate() const {
        if (!(mu > 0.0)) throw std::invalid_argument("ModelParams: mu must be positive");
        if (!(mu1 > 0.0)) throw std::invalid_argument("ModelParams: mu1 must be positive");
        if (!(mu2 > 0.0)) throw std::invalid_argument("ModelParams: mu2 must be positive");
        if (!(a > 0.0)) throw std::invalid_argument("ModelParams: a must be positive");
        if (!(b >= -1.0 && b <= 1.0)) throw std::invalid_argument("ModelParams: b must lie in [-1, 1]");
    }
};

} // namespace oldroyd
