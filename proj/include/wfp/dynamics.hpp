#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <vector>

#include "wfp/catalog.hpp"
#include "wfp/functionals.hpp"
#include "wfp/measures.hpp"

namespace wfp {

// Drift A = grad V + F with curvature metadata. F may be empty (zero field).
struct DriftSpec {
    int dim = 1;
    std::function<double(const Vector&)> V;
    std::function<Vector(const Vector&)> gradV;
    std::function<Vector(const Vector&)> F;
    std::optional<double> lambda1;  // lower bound on Hess V
    std::optional<double> lambda2;  // lower bound on the symmetric part of grad F

    // scalar fast paths, set when dim == 1
    std::function<double(double)> v1;
    std::function<double(double)> dv1;
    std::function<double(double)> f1;

    bool has_F() const { return static_cast<bool>(F) || static_cast<bool>(f1); }
    double drift1(double x) const { return dv1(x) + (f1 ? f1(x) : 0.0); }
    Vector drift(const Vector& x) const {
        Vector a = gradV(x);
        if (F) a += F(x);
        return a;
    }
};

DriftSpec make_drift_1d(std::function<double(double)> V, std::function<double(double)> dV,
                        std::optional<double> lambda1 = {},
                        std::function<double(double)> F = {},
                        std::optional<double> lambda2 = {});
DriftSpec make_drift(const CatalogEntry& entry);

struct MetricSeries {
    std::vector<double> t;
    std::vector<double> value;
};

// Recorded evolution: one state per time, plus named metric series which may
// be sampled on their own (finer) time grids. Coupled runs store the second
// cloud in partner_states, aligned with times.
struct Trajectory {
    std::vector<double> times;
    std::vector<GridMeasure> grid_states;
    std::vector<ParticleCloud> cloud_states;
    std::vector<ParticleCloud> partner_states;
    std::map<std::string, MetricSeries> metrics;
    std::vector<std::string> warnings;  // regularity conditions that failed
};

// t in {first * ratio^k} clipped to (0, t_end), plus t_end itself.
std::vector<double> geometric_times(double t_end, double first = 0.05, double ratio = 1.3);

struct FpOptions {
    std::vector<double> record_times;  // empty -> geometric grid
    bool record_metrics = true;        // w2 / entropy / fisher against e^{-V}/Z
    bool accumulate_fisher = false;    // per-step trapezoid of I, metric int_fisher_dt
    double boundary_flux_tol = 1e-9;
};

// Exponential-fitted finite-volume solve of  d/dt mu = (mu' + mu A)' with
// no-flux walls; e^{-V}/Z is an exact discrete steady state when F = 0.
Trajectory fp_solve_1d(const GridMeasure& mu0, const DriftSpec& drift, double t_end, double dt,
                       const FpOptions& opts = {});

struct SdeOptions {
    std::vector<double> record_times;  // empty -> geometric grid
};

// Euler-Maruyama particle evolution of dX = -A(X) dt + sqrt(2) dB.
// Noise is counter-based on (seed, particle, step). Metric: second moment.
Trajectory sde_evolve(const ParticleCloud& cloud0, const DriftSpec& drift, double t_end,
                      double dt, std::uint64_t seed, const SdeOptions& opts = {});

// Synchronous coupling: the same noise increments drive both clouds, so the
// pairwise difference follows the deterministic drift flow (integrated with a
// Runge-Kutta substep). Metric "coupling_msd" = E|X-Y|^2, recorded per step.
Trajectory coupled_sde(const ParticleCloud& x0, const ParticleCloud& y0, const DriftSpec& drift,
                       double t_end, double dt, std::uint64_t seed, const SdeOptions& opts = {});

// W2^2(mu_t, delta_0) = int x^2 / (1 + 2 t x^2) dmu0 for the diffusion-free
// quartic flow x' = -x^3.
double quartic_zero_diffusion_w2(const GridMeasure& mu0, double t);

// F = Jmat grad V, divergence-free with respect to e^{-V} when Jmat is
// antisymmetric.
VectorField make_rotational_F(const std::function<Vector(const Vector&)>& gradV,
                              const Matrix& Jmat);

// sup over the grid of |div(e^{-V} F)| / sup e^{-V}, fourth-order central
// differences on interior nodes. dim 1 or 2.
double stationarity_residual(const std::function<double(const Vector&)>& V,
                             const VectorField& F, double lo, double hi, int n_per_axis,
                             int dim = 2);

// CSV rows (t,metric,value) for every metric series.
void write_metric_series_csv(const Trajectory& traj, std::ostream& out);
// CSV rows (t,x,density) for the recorded grid states.
void write_density_csv(const Trajectory& traj, std::ostream& out);

}  // namespace wfp
