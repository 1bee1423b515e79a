#include "locint/simulate.hpp"

#include <cmath>

#include "locint/errors.hpp"

namespace locint {

namespace {

Vec2 uniform_in_window(const Window& w, SeededStream& rng) {
  const BBox b = w.bbox();
  for (int tries = 0; tries < 1 << 22; ++tries) {
    const Vec2 p = rng.uniform_in(b);
    if (w.contains(p)) return p;
  }
  throw NumericError("uniform sampling in window failed (degenerate window?)");
}

}  // namespace

PointPattern simulate_poisson(double lambda0, const Window& w, SeededStream& rng) {
  if (!(lambda0 >= 0)) throw InvalidModelError("intensity must be non-negative");
  const long n = rng.poisson(lambda0 * w.area());
  std::vector<Vec2> pts;
  pts.reserve(std::size_t(n));
  for (long i = 0; i < n; ++i) pts.push_back(uniform_in_window(w, rng));
  return PointPattern(std::move(pts), w);
}

PointPattern simulate_poisson(const IntensityModel& lambda, const Window& w, SeededStream& rng,
                              double lambda_max) {
  if (lambda_max <= 0) lambda_max = lambda.upper_bound(w);
  if (!std::isfinite(lambda_max)) throw InvalidModelError("dominating intensity is not finite");
  const long n = rng.poisson(lambda_max * w.area());
  std::vector<Vec2> pts;
  for (long i = 0; i < n; ++i) {
    const Vec2 p = uniform_in_window(w, rng);
    const double lam = lambda(p);
    if (lam > lambda_max)
      throw InvalidModelError("intensity exceeds its declared upper bound during rejection");
    if (rng.uniform() * lambda_max < lam) pts.push_back(p);
  }
  return PointPattern(std::move(pts), w);
}

PointPattern simulate_matern_cluster(double kappa, double mu, double cluster_radius,
                                     const Window& w, SeededStream& rng) {
  if (!(kappa >= 0) || !(mu >= 0)) throw InvalidModelError("kappa and mu must be non-negative");
  if (!(cluster_radius > 0)) throw InvalidModelError("cluster radius must be positive");
  const BBox dil = w.bbox().inflated(cluster_radius);
  const long n_parents = rng.poisson(kappa * dil.width() * dil.height());
  std::vector<Vec2> pts;
  pts.reserve(std::size_t(double(n_parents) * mu * 0.5) + 16);
  for (long i = 0; i < n_parents; ++i) {
    const Vec2 parent = rng.uniform_in(dil);
    const long n_off = rng.poisson(mu);
    for (long k = 0; k < n_off; ++k) {
      const Vec2 p = rng.uniform_in_disc(parent, cluster_radius);
      if (w.contains(p)) pts.push_back(p);
    }
  }
  return PointPattern(std::move(pts), w);
}

PointPattern thin(const ThinningField& p, const PointPattern& pattern, SeededStream& rng) {
  std::vector<Vec2> kept;
  kept.reserve(pattern.size());
  for (const Vec2& x : pattern.points()) {
    const double px = p(x);  // validates range for custom fields
    if (rng.uniform() < px) kept.push_back(x);
  }
  return PointPattern(std::move(kept), pattern.window());
}

PointPattern simulate_imcp(double kappa, double mu, double cluster_radius,
                           const ThinningField& p, const Window& w, SeededStream& rng) {
  const PointPattern base = simulate_matern_cluster(kappa, mu, cluster_radius, w, rng);
  return thin(p, base, rng);
}

}  // namespace locint
