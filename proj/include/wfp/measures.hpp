#pragma once

#include <Eigen/Core>

#include <cstdint>
#include <string>

#include "wfp/errors.hpp"

namespace wfp {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

// Probability measure with a density sampled at the centers of a uniform
// 1D grid on [lo, hi]. All integrals against it use the midpoint rule.
struct GridMeasure {
    double lo = 0.0;
    double hi = 1.0;
    Vector density;  // cell-centered values, units 1/length

    int n() const { return static_cast<int>(density.size()); }
    double dx() const { return (hi - lo) / n(); }
    double center(int i) const { return lo + (i + 0.5) * dx(); }
    Vector centers() const;
    double mass() const { return density.sum() * dx(); }

    // Midpoint-rule integral of f against the measure.
    template <typename F>
    double integrate(F&& f) const {
        const double h = dx();
        double acc = 0.0;
        for (int i = 0; i < n(); ++i) acc += f(center(i)) * density[i];
        return acc * h;
    }

    bool same_grid(const GridMeasure& other, double tol = 1e-12) const;

    // Linear interpolation of the density between cell centers
    // (constant extrapolation at the ends, zero outside the grid).
    double density_at(double x) const;
};

// Weighted point set in R^d; weights sum to 1.
struct ParticleCloud {
    int dim = 1;
    Matrix points;   // n x dim
    Vector weights;  // n entries, >= 0, sum 1

    int size() const { return static_cast<int>(points.rows()); }

    static ParticleCloud uniform_weights(Matrix pts);
    static ParticleCloud with_weights(Matrix pts, Vector w);
};

// Scale a nonnegative sample vector so that it has unit mass on [lo, hi].
GridMeasure normalize_grid(const Vector& raw, double lo, double hi);

// Evaluate a density function at cell centers and normalize.
template <typename F>
GridMeasure grid_from_function(F&& f, double lo, double hi, int n_cells) {
    Vector raw(n_cells);
    const double h = (hi - lo) / n_cells;
    for (int i = 0; i < n_cells; ++i) raw[i] = f(lo + (i + 0.5) * h);
    return normalize_grid(raw, lo, hi);
}

// H(mu|nu) = int h log h dnu with h = mu/nu. Cells where mu vanishes
// contribute zero (the h log h -> 0 limit).
double relative_entropy(const GridMeasure& mu, const GridMeasure& nu);

// I(mu|nu) = int |h'|^2 / h dnu, computed as int |(log h)'|^2 dmu with
// central differences; cells with mu below 1e-12 are excluded.
double fisher_information(const GridMeasure& mu, const GridMeasure& nu);

// i.i.d. inverse-CDF draws; deterministic given the seed.
ParticleCloud sample(const GridMeasure& mu, int n, std::uint64_t seed);

// int |x|^k dmu.
double moment(const GridMeasure& mu, int k);
double moment(const ParticleCloud& cloud, int k);

}  // namespace wfp
