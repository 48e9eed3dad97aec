#pragma once

#include "fracsub/core/error.hpp"
#include "fracsub/stable_laws.hpp"

namespace fracsub {

// Parameters of the space-time fractional diffusion equation: space order
// alpha, skewness theta and time order beta.
class DiffusionParams {
public:
    DiffusionParams(double alpha, double theta, double beta) : law_(alpha, theta), beta_(beta) {
        detail::require(beta > 0.0 && beta <= 1.0, "diffusion params: beta must lie in (0, 1]");
    }

    double alpha() const { return law_.alpha(); }
    double theta() const { return law_.theta(); }
    double beta() const { return beta_; }

    const StableLaw& space_law() const { return law_; }
    ExtremalStableLaw time_law() const { return ExtremalStableLaw(beta_); }

private:
    StableLaw law_;
    double beta_;
};

} // namespace fracsub
