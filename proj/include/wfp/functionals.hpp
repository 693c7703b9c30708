#pragma once

#include <functional>
#include <iosfwd>
#include <string>

#include "wfp/measures.hpp"
#include "wfp/transport.hpp"

namespace wfp {

using ScalarField = std::function<double(double)>;
using VectorField = std::function<Vector(const Vector&)>;

struct FunctionalValue {
    double value = 0.0;
    double integrand_min = 0.0;  // pointwise minimum of the integrand
    std::string method;          // exact_1d | particle_nd
};

// 1D Hessian gap d + 1/d - 2 = (sqrt(d) - 1/sqrt(d))^2, zero only at d = 1.
double hessian_gap(double d);

// J(mu|(nu,A)) = int [ T' + 1/T' - 2 + (A(T) - A)(T - x) ] dnu, T#nu = mu.
FunctionalValue j_functional_1d(const GridMeasure& mu, const GridMeasure& nu,
                                const ScalarField& A);

// Per-cell decomposition of the J integrand.
struct JProfile {
    Vector x;
    Vector gap_term;
    Vector drift_term;
};
JProfile j_profile_1d(const GridMeasure& mu, const GridMeasure& nu, const ScalarField& A);
void write_j_profile_csv(const JProfile& profile, std::ostream& out);

// int (x - psi')(d/dx log mu + A) dmu with psi'#mu = nu; the negative time
// derivative of W2^2/2 along the flow driven by A.
double dissipation_1d(const GridMeasure& mu, const GridMeasure& nu, const ScalarField& A);

// W2 sqrt(I) - (lambda1/2) W2^2 - H, nonnegative when Hess V >= lambda1.
double hwi_gap(const GridMeasure& mu, const GridMeasure& nu, double lambda1);

// dissipation - H - (lambda1/2 + lambda2) W2^2, nonnegative under the
// curvature bounds on V and F.
double lemma24_gap(const GridMeasure& mu, const GridMeasure& nu, const ScalarField& A,
                   double lambda1, double lambda2);

// Drift part of J summed over the optimal discrete plan between the clouds;
// a lower bound on J for monotone A (the omitted gap term is nonnegative).
FunctionalValue j_functional_nd(const ParticleCloud& mu, const ParticleCloud& nu,
                                const VectorField& A);

}  // namespace wfp
