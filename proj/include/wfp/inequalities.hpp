#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "wfp/dynamics.hpp"
#include "wfp/functionals.hpp"
#include "wfp/measures.hpp"

namespace wfp {

// A named inequality constant with provenance. Estimated constants for
// infimum-type inequalities are certified upper bounds over their test
// family; they never claim sharpness.
struct ConstantReport {
    std::string name;  // WJ | Poincare | WH | WI | LSI | contraction
    double value = 0.0;
    std::string kind;  // estimated | derived_formula
    bool valid = true;
    std::string reason;
    std::map<std::string, double> inputs;
};

// Parameterized family of probe measures; every member is a valid
// GridMeasure at positive W2 distance from the reference.
struct TestFamily {
    std::string name;
    std::vector<std::pair<std::string, GridMeasure>> members;
};

// Shifts by whole grid cells (so shifted and reference densities share
// sample values exactly).
TestFamily translates_family(const GridMeasure& nu, int count = 20, double max_shift = 1.5);
TestFamily dilations_family(const GridMeasure& nu, int count = 20, double scale_lo = 0.5,
                            double scale_hi = 2.0);
TestFamily mixtures_family(const GridMeasure& nu, int per_axis = 5, double max_shift = 1.0);
// Pushforwards x -> x + eps f' along the lowest Dirichlet eigenfunctions f.
TestFamily eigenmode_family(const GridMeasure& nu, int modes = 5,
                            const std::vector<double>& amplitudes = {1e-3, 3e-3, 1e-2, 3e-2});
TestFamily standard_family(const GridMeasure& nu);

// Lowest nonconstant eigenpairs of the Dirichlet form f -> int f'^2 dnu.
// modes holds the generator eigenfunctions at cell centers, one per column.
struct SpectralModes {
    Vector eigenvalues;  // k smallest nonzero
    Matrix modes;        // n x k
};
SpectralModes dirichlet_modes(const GridMeasure& nu, int k);

// Spectral gap of the nu-weighted Dirichlet form (symmetric tridiagonal
// eigenproblem); the optimal Poincare constant of nu.
ConstantReport poincare_constant_1d(const GridMeasure& nu);

// inf over the family of J(mu|(nu,A)) / W2^2(nu,mu).
ConstantReport wj_constant_estimate(const GridMeasure& nu, const ScalarField& A,
                                    const TestFamily& family);

struct DecayFit {
    double rate = 0.0;  // C in  values ~ exp(-C t)
    double intercept = 0.0;
    double r_squared = 1.0;
    bool exponential = true;  // false when r_squared < 0.98
};
DecayFit decay_rate_fit(const std::vector<double>& times, const std::vector<double>& values);

// (c + lambda1 + 2 lambda2)/2, valid iff c > -lambda1 - 2 lambda2.
ConstantReport derived_agswh(double c, double lambda1, double lambda2);
// C e^{-2K} + beta + alpha (1 - e^{-2K}); requires K >= 0 and alpha <= 0.
ConstantReport derived_perturbation(double C, double alpha, double beta, double K);
// min_i C_i over positive constants.
ConstantReport derived_tensorization(const std::vector<double>& constants);
// C (1 + max(0,-rho)/(2C))^{-2}; inputs carry the weaker comparison value
// C (2 - rho/C)^{-1}.
ConstantReport derived_lsi(double C, double rho);

struct MonotonicityReport {
    bool passes = false;
    bool global_monotone = false;
    double worst_outer_ratio = 0.0;  // over pairs with |x| or |y| >= 2R
    double worst_global_ratio = 0.0;
    int outer_pairs = 0;
};
// Samples pairs in [-6 max(R,1), 6 max(R,1)]^dim and checks
// (A(x)-A(y)).(x-y) >= K/3 |x-y|^2 outside the 2R ball, plus global
// monotonicity.
MonotonicityReport monotone_at_infinity_check(const VectorField& A, int dim, double R, double K,
                                              int n_pairs, std::uint64_t seed);

struct SvrProbe {
    double c_geo = 0.0;  // inf of the pair monotonicity ratio
    double c_dyn = 0.0;  // half the fitted decay rate of E|X-Y|^2
    DecayFit fit;
};
// Compares the geometric contraction constant with the rate observed under
// synchronous coupling started from uniform clouds on the domain.
SvrProbe sturm_vonrenesse_probe(const VectorField& A, int dim, double lo, double hi, int n_pairs,
                                std::uint64_t seed);

}  // namespace wfp
