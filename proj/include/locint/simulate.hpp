#pragma once

#include "locint/intensity.hpp"
#include "locint/pattern.hpp"
#include "locint/rng.hpp"

namespace locint {

// Homogeneous Poisson process with intensity lambda0 on w.
PointPattern simulate_poisson(double lambda0, const Window& w, SeededStream& rng);

// Inhomogeneous Poisson process by thinning a homogeneous dominating process.
// lambda_max <= 0 probes the bound from the model (grid max * 1.2).
PointPattern simulate_poisson(const IntensityModel& lambda, const Window& w, SeededStream& rng,
                              double lambda_max = 0.0);

// Stationary Matern cluster process: Poisson(kappa) parents on the window
// bounding box dilated by the cluster radius, Poisson(mu) offspring uniform
// in the disc of radius cluster_radius around each parent, clipped to w.
// Parents are not part of the returned pattern.
PointPattern simulate_matern_cluster(double kappa, double mu, double cluster_radius,
                                     const Window& w, SeededStream& rng);

// Independent location-dependent thinning: point x survives with
// probability p(x).
PointPattern thin(const ThinningField& p, const PointPattern& pattern, SeededStream& rng);

// Convenience: thinned Matern cluster realization (IMCP) on w.
PointPattern simulate_imcp(double kappa, double mu, double cluster_radius,
                           const ThinningField& p, const Window& w, SeededStream& rng);

}  // namespace locint
