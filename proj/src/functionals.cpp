#include "wfp/functionals.hpp"

#include <cmath>
#include <limits>
#include <ostream>

namespace wfp {

double hessian_gap(double d) {
    if (!(d > 0)) throw NotPositive("hessian_gap: argument must be positive");
    const double r = std::sqrt(d) - 1.0 / std::sqrt(d);
    return r * r;
}

FunctionalValue j_functional_1d(const GridMeasure& mu, const GridMeasure& nu,
                                const ScalarField& A) {
    const MongeMap1D map = brenier_map_1d(nu, mu);
    const double h = nu.dx();
    double value = 0.0;
    double imin = std::numeric_limits<double>::infinity();
    for (int i = 0; i < nu.n(); ++i) {
        const double x = nu.center(i);
        const double t = map.T[i];
        const double integrand = hessian_gap(map.Tprime[i]) + (A(t) - A(x)) * (t - x);
        value += integrand * nu.density[i];
        imin = std::min(imin, integrand);
    }
    return {value * h, imin, "exact_1d"};
}

JProfile j_profile_1d(const GridMeasure& mu, const GridMeasure& nu, const ScalarField& A) {
    const MongeMap1D map = brenier_map_1d(nu, mu);
    JProfile p;
    p.x = nu.centers();
    p.gap_term.resize(nu.n());
    p.drift_term.resize(nu.n());
    for (int i = 0; i < nu.n(); ++i) {
        const double x = p.x[i];
        const double t = map.T[i];
        p.gap_term[i] = hessian_gap(map.Tprime[i]);
        p.drift_term[i] = (A(t) - A(x)) * (t - x);
    }
    return p;
}

void write_j_profile_csv(const JProfile& profile, std::ostream& out) {
    out << "x,gap_term,drift_term\n";
    char buf[128];
    for (int i = 0; i < profile.x.size(); ++i) {
        std::snprintf(buf, sizeof(buf), "%.17g,%.17g,%.17g", profile.x[i], profile.gap_term[i],
                      profile.drift_term[i]);
        out << buf << '\n';
    }
}

double dissipation_1d(const GridMeasure& mu, const GridMeasure& nu, const ScalarField& A) {
    const MongeMap1D reverse = brenier_map_1d(mu, nu);  // psi' # mu = nu
    const int n = mu.n();
    const double h = mu.dx();
    constexpr double kFloor = 1e-12;

    Vector logmu(n);
    std::vector<bool> ok(n);
    for (int i = 0; i < n; ++i) {
        ok[i] = mu.density[i] > kFloor;
        logmu[i] = ok[i] ? std::log(mu.density[i]) : 0.0;
    }

    double acc = 0.0;
    for (int i = 0; i < n; ++i) {
        if (!ok[i]) continue;
        double dlog;
        if (i > 0 && i < n - 1 && ok[i - 1] && ok[i + 1])
            dlog = (logmu[i + 1] - logmu[i - 1]) / (2.0 * h);
        else if (i < n - 1 && ok[i + 1])
            dlog = (logmu[i + 1] - logmu[i]) / h;
        else if (i > 0 && ok[i - 1])
            dlog = (logmu[i] - logmu[i - 1]) / h;
        else
            continue;
        const double x = mu.center(i);
        acc += (x - reverse.T[i]) * (dlog + A(x)) * mu.density[i];
    }
    return acc * h;
}

double hwi_gap(const GridMeasure& mu, const GridMeasure& nu, double lambda1) {
    const double w2 = w2_exact_1d(mu, nu);
    const double fisher = fisher_information(mu, nu);
    const double entropy = relative_entropy(mu, nu);
    return w2 * std::sqrt(fisher) - 0.5 * lambda1 * w2 * w2 - entropy;
}

double lemma24_gap(const GridMeasure& mu, const GridMeasure& nu, const ScalarField& A,
                   double lambda1, double lambda2) {
    const double w2 = w2_exact_1d(mu, nu);
    const double entropy = relative_entropy(mu, nu);
    return dissipation_1d(mu, nu, A) - entropy - (0.5 * lambda1 + lambda2) * w2 * w2;
}

FunctionalValue j_functional_nd(const ParticleCloud& mu, const ParticleCloud& nu,
                                const VectorField& A) {
    const DiscreteW2 ot = w2_discrete(nu, mu);  // plan couples nu (src) to mu (dst)
    double value = 0.0;
    double imin = std::numeric_limits<double>::infinity();
    for (size_t k = 0; k < ot.plan.src.size(); ++k) {
        const Vector x = nu.points.row(ot.plan.src[k]).transpose();
        const Vector y = mu.points.row(ot.plan.dst[k]).transpose();
        const double term = (A(y) - A(x)).dot(y - x);
        value += ot.plan.w[static_cast<Eigen::Index>(k)] * term;
        imin = std::min(imin, term);
    }
    return {value, imin, "particle_nd"};
}

}  // namespace wfp
