#pragma once

#include <vector>

#include "pemc/ed.hpp"
#include "pemc/models.hpp"
#include "pemc/params.hpp"
#include "pemc/payoffs.hpp"
#include "pemc/rng.hpp"

namespace pemc::problem {

/// Payoff contract implied by theta for the path models: arithmetic Asian
/// call (GBM/Heston, daily observations), variance swap (SLV, daily fixings
/// including t=0), swaption (HJM; handled separately on the forward curve).
payoffs::PayoffSpec make_payoff_spec(const ParameterPoint& theta);

/// Draws theta uniformly from the space: scalar fields from their ranges,
/// then grid rebuilds (SLV surface with xi-noise, HJM grids with optional
/// per-maturity vol noise) keyed to the sampled scalars.
ParameterPoint sample_parameter_point(const ParameterSpaceSpec& space,
                                      pemc::rng::RngStream& stream);

/// Attaches baseline (noise-free) grids to theta when the model needs them
/// and none are present.
ParameterPoint with_default_grids(ParameterPoint theta);

struct CoupledDraw {
    double payoff = 0.0;         // f(Y)
    std::vector<double> x;       // coupled feature vector X = phi(Y)
};

/// One coupled (f(Y), X) draw for any model kind, including ED.
CoupledDraw simulate_payoff(const ParameterPoint& theta, pemc::rng::RngStream& stream);

/// iid draws of X from its marginal law.
std::vector<std::vector<double>> sample_x(const ParameterPoint& theta, std::size_t count,
                                          pemc::rng::RngStream& stream);

std::size_t x_dimension(const ParameterPoint& theta);

}  // namespace pemc::problem
