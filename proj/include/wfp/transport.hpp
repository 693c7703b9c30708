#pragma once

#include <iosfwd>
#include <vector>

#include "wfp/measures.hpp"

namespace wfp {

// Piecewise-linear CDF of a grid measure with its exact left-continuous
// inverse. Mass is accumulated from both ends and inversion works from the
// lighter side, which keeps full relative precision deep in the tails.
// Ties on zero-mass cells resolve to the leftmost point.
class CdfTable {
public:
    explicit CdfTable(const GridMeasure& m);
    double cdf(double x) const;
    double quantile(double u) const;
    // Inverse at the level with mass m_lo below and m_hi above
    // (m_lo + m_hi == 1 up to rounding).
    double quantile_mass(double m_lo, double m_hi) const;
    double mass_below_center(int i) const { return cumlo_[i] + 0.5 * mass_[i]; }
    double mass_above_center(int i) const { return cumhi_[i + 1] + 0.5 * mass_[i]; }

private:
    double lo_, hi_, h_;
    Vector cumlo_;  // n+1, mass strictly below edge i
    Vector cumhi_;  // n+1, mass at or above edge i
    Vector mass_;   // n, per-cell mass
};

// W2 by quantile coupling: the root of int_0^1 |Qa - Qb|^2 du on a midpoint
// level grid. Symmetric in its arguments by construction.
double w2_exact_1d(const GridMeasure& a, const GridMeasure& b, int levels = 1 << 16);

// Convex function sampled at n uniformly spaced nodes on [lo, hi]
// (endpoints included).
struct SampledFunction {
    double lo = 0.0;
    double hi = 1.0;
    Vector values;

    int n() const { return static_cast<int>(values.size()); }
    double step() const { return (hi - lo) / (n() - 1); }
    double node(int k) const { return lo + k * step(); }
    double at(double x) const;  // linear interpolation
};

// Monotone rearrangement T with T#nu = mu, sampled at nu's cell centers.
// Tprime comes from the 1D Monge-Ampere relation nu = mu(T) T'. The reverse
// map T^{-1} is the derivative of conjugate_potential, or equivalently
// brenier_map_1d with the measures swapped.
struct MongeMap1D {
    double lo = 0.0;
    double hi = 1.0;  // grid of the source measure nu
    Vector T;
    Vector Tprime;

    int n() const { return static_cast<int>(T.size()); }
    double value_at(double x) const;  // linear interpolation of T

    // Brenier potential phi with phi' = T, integrated onto the n+1 grid edges.
    SampledFunction potential() const;
    // Legendre conjugate phi*, whose derivative is the reverse map.
    SampledFunction conjugate_potential() const;
};

MongeMap1D brenier_map_1d(const GridMeasure& nu, const GridMeasure& mu);

// Density of T#nu sampled on [lo_out, hi_out]; T_values are the (strictly
// increasing) map values at nu's cell centers.
GridMeasure pushforward_1d(const GridMeasure& nu, const Vector& T_values, double lo_out,
                           double hi_out, int n_out);

// Discrete Legendre transform phi*(q) = max_k (q x_k - phi(x_k)) on the dual
// grid spanned by the slopes of phi. Input must be convex.
SampledFunction legendre(const SampledFunction& phi, int n_out = 0);

// Sparse coupling between two point sets.
struct DiscretePlan {
    std::vector<int> src;
    std::vector<int> dst;
    Vector w;
    double cost = 0.0;  // sum of w_k |x_src - y_dst|^2
};

struct DiscreteW2 {
    double w2sq = 0.0;
    DiscretePlan plan;
};

// Exact squared-cost optimal transport between small clouds (successive
// shortest augmenting paths on the dense bipartite graph).
DiscreteW2 w2_discrete(const ParticleCloud& a, const ParticleCloud& b);

struct SinkhornResult {
    double cost = 0.0;  // <P, C> of the converged regularized plan
    double epsilon = 0.0;
    int iterations = 0;
    double marginal_error = 0.0;
    double dual_lower_bound = 0.0;  // certified lower bound on the exact cost
};

// Entropic regularization in the log domain with an epsilon-halving warm
// start; converged when the sup marginal violation is below 1e-8.
SinkhornResult sinkhorn_w2(const ParticleCloud& a, const ParticleCloud& b, double epsilon);

// W2 between a 1D cloud and a grid measure (quantile coupling against the
// empirical step CDF).
double w2_cloud_grid_1d(const ParticleCloud& cloud, const GridMeasure& m, int levels = 1 << 15);

// CSV rows (source_index,target_index,weight).
void write_plan_csv(const DiscretePlan& plan, std::ostream& out);

}  // namespace wfp
