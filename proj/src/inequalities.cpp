#include "wfp/inequalities.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <cstdio>

#include "wfp/rng.hpp"
#include "wfp/transport.hpp"

namespace wfp {

namespace {

std::string fmt(double v) {
    char buf[48];
    std::snprintf(buf, sizeof(buf), "%.6g", v);
    return buf;
}

// Tridiagonal LU with partial pivoting (two superdiagonals after pivoting).
// Solves (T - shift I) x = b repeatedly for inverse iteration, where exact
// or near singularity is expected and harmless.
class TriLU {
public:
    TriLU(Vector dia, Vector low, Vector up, double shift) {
        n_ = static_cast<int>(dia.size());
        d_ = std::move(dia);
        d_.array() -= shift;
        l_ = std::move(low);
        u1_ = std::move(up);
        u2_ = Vector::Zero(std::max(0, n_ - 2));
        mult_.resize(std::max(0, n_ - 1));
        swap_.assign(std::max(0, n_ - 1), 0);
        for (int i = 0; i + 1 < n_; ++i) {
            if (std::abs(l_[i]) > std::abs(d_[i])) {
                swap_[i] = 1;
                std::swap(d_[i], l_[i]);
                // row i+1's diagonal moves into the superdiagonal slot of row i
                const double t = (i + 1 < n_ - 1) ? u1_[i + 1] : 0.0;
                const double old_u1 = u1_[i];
                u1_[i] = d_[i + 1];
                d_[i + 1] = old_u1;
                if (i < n_ - 2) {
                    u2_[i] = t;
                    u1_[i + 1] = 0.0;
                }
            }
            double pivot = d_[i];
            if (pivot == 0.0) pivot = d_[i] = 1e-300;
            const double m = l_[i] / pivot;
            mult_[i] = m;
            d_[i + 1] -= m * u1_[i];
            if (i < n_ - 2) u1_[i + 1] -= m * u2_[i];
        }
        if (d_[n_ - 1] == 0.0) d_[n_ - 1] = 1e-300;
    }

    Vector solve(Vector b) const {
        for (int i = 0; i + 1 < n_; ++i) {
            if (swap_[i]) std::swap(b[i], b[i + 1]);
            b[i + 1] -= mult_[i] * b[i];
        }
        for (int i = n_ - 1; i >= 0; --i) {
            double v = b[i];
            if (i + 1 < n_) v -= u1_[i] * b[i + 1];
            if (i + 2 < n_) v -= u2_[i] * b[i + 2];
            b[i] = v / d_[i];
        }
        return b;
    }

private:
    int n_ = 0;
    Vector d_, l_, u1_, u2_, mult_;
    std::vector<char> swap_;
};

struct TridiagonalForm {
    Vector diag;     // symmetrized operator diagonal
    Vector subdiag;  // symmetrized subdiagonal
    Vector sqrt_m;   // sqrt(nu_i h), the similarity back-transform
};

TridiagonalForm dirichlet_tridiagonal(const GridMeasure& nu) {
    const int n = nu.n();
    const double h = nu.dx();
    if ((nu.density.array() <= 0).any())
        throw SingularDensity("poincare_constant_1d: density must be strictly positive");

    Vector w(n + 1);  // face weights, zero at the walls
    w[0] = w[n] = 0.0;
    for (int k = 1; k < n; ++k) w[k] = 0.5 * (nu.density[k - 1] + nu.density[k]);

    TridiagonalForm t;
    t.diag.resize(n);
    t.subdiag.resize(n - 1);
    t.sqrt_m.resize(n);
    for (int i = 0; i < n; ++i) {
        t.diag[i] = (w[i] + w[i + 1]) / (h * nu.density[i] * h);
        t.sqrt_m[i] = std::sqrt(nu.density[i] * h);
    }
    for (int i = 0; i + 1 < n; ++i)
        t.subdiag[i] = -w[i + 1] / (h * h * std::sqrt(nu.density[i] * nu.density[i + 1]));
    return t;
}

}  // namespace

SpectralModes dirichlet_modes(const GridMeasure& nu, int k) {
    const int n = nu.n();
    const TridiagonalForm form = dirichlet_tridiagonal(nu);

    Eigen::SelfAdjointEigenSolver<Matrix> solver;
    solver.computeFromTridiagonal(form.diag, form.subdiag, Eigen::EigenvaluesOnly);
    if (solver.info() != Eigen::Success)
        throw NumericalFailure("dirichlet_modes: tridiagonal eigensolver failed");
    const Vector evals = solver.eigenvalues();

    SpectralModes out;
    out.eigenvalues.resize(k);
    out.modes.resize(n, k);

    // Inverse iteration per eigenvalue; orthogonalize against the constant
    // mode and everything found before.
    Matrix found(n, k + 1);
    found.col(0) = form.sqrt_m.normalized();
    for (int j = 0; j < k; ++j) {
        const double lambda = evals[j + 1];
        out.eigenvalues[j] = lambda;
        const double shift = lambda + 1e-12 * std::max(1.0, std::abs(lambda));
        Vector low = form.subdiag, up = form.subdiag;
        TriLU lu(form.diag, std::move(low), std::move(up), shift);

        Vector g(n);
        for (int i = 0; i < n; ++i) g[i] = std::sin((j + 1.5) * (i + 1.0) / n) + 0.5;
        g.normalize();
        for (int it = 0; it < 4; ++it) {
            g = lu.solve(g);
            for (int p = 0; p <= j; ++p) g -= found.col(p).dot(g) * found.col(p);
            const double norm = g.norm();
            if (!(norm > 0)) throw NumericalFailure("dirichlet_modes: inverse iteration broke");
            g /= norm;
        }
        found.col(j + 1) = g;
        out.modes.col(j) = g.cwiseQuotient(form.sqrt_m);
    }

    // constant extension into the numerically dead tails, and nu-normalization
    const double floor = 1e-12 * nu.density.maxCoeff();
    int first = 0, last = n - 1;
    while (first < n - 1 && nu.density[first] < floor) ++first;
    while (last > 0 && nu.density[last] < floor) --last;
    const double h = nu.dx();
    for (int j = 0; j < k; ++j) {
        for (int i = 0; i < first; ++i) out.modes(i, j) = out.modes(first, j);
        for (int i = last + 1; i < n; ++i) out.modes(i, j) = out.modes(last, j);
        double norm2 = 0.0;
        for (int i = 0; i < n; ++i)
            norm2 += out.modes(i, j) * out.modes(i, j) * nu.density[i] * h;
        out.modes.col(j) /= std::sqrt(norm2);
    }
    return out;
}

ConstantReport poincare_constant_1d(const GridMeasure& nu) {
    const TridiagonalForm form = dirichlet_tridiagonal(nu);
    Eigen::SelfAdjointEigenSolver<Matrix> solver;
    solver.computeFromTridiagonal(form.diag, form.subdiag, Eigen::EigenvaluesOnly);
    if (solver.info() != Eigen::Success)
        throw NumericalFailure("poincare_constant_1d: tridiagonal eigensolver failed");
    const double gap = solver.eigenvalues()[1];

    ConstantReport r;
    r.name = "Poincare";
    r.value = gap;
    r.kind = "estimated";
    r.valid = gap > 0;
    r.reason = "Dirichlet-form spectral gap on " + std::to_string(nu.n()) + " cells";
    r.inputs["n_cells"] = nu.n();
    return r;
}

// -------------------------------------------------------------- families

TestFamily translates_family(const GridMeasure& nu, int count, double max_shift) {
    TestFamily fam;
    fam.name = "translates";
    const int n = nu.n();
    const double h = nu.dx();
    const int half = count / 2;
    for (int j = 1; j <= half; ++j) {
        const double a = max_shift * j / half;
        const int cells = std::max(1, static_cast<int>(std::lround(a / h)));
        for (int sign : {+1, -1}) {
            Vector shifted = Vector::Zero(n);
            for (int i = 0; i < n; ++i) {
                const int src = i - sign * cells;
                if (src >= 0 && src < n) shifted[i] = nu.density[src];
            }
            fam.members.emplace_back("translate a=" + fmt(sign * cells * h),
                                     normalize_grid(shifted, nu.lo, nu.hi));
        }
    }
    return fam;
}

TestFamily dilations_family(const GridMeasure& nu, int count, double scale_lo, double scale_hi) {
    TestFamily fam;
    fam.name = "dilations";
    const double llo = std::log(scale_lo), lhi = std::log(scale_hi);
    for (int j = 0; j <= count; ++j) {
        const double s = std::exp(llo + (lhi - llo) * j / count);
        if (std::abs(s - 1.0) < 1e-3) continue;
        Vector d(nu.n());
        for (int i = 0; i < nu.n(); ++i) d[i] = nu.density_at(nu.center(i) / s) / s;
        fam.members.emplace_back("dilation s=" + fmt(s), normalize_grid(d, nu.lo, nu.hi));
    }
    return fam;
}

TestFamily mixtures_family(const GridMeasure& nu, int per_axis, double max_shift) {
    TestFamily fam;
    fam.name = "mixtures";
    const int n = nu.n();
    const double h = nu.dx();
    auto shifted = [&](double a) {
        const int cells = static_cast<int>(std::lround(a / h));
        Vector out = Vector::Zero(n);
        for (int i = 0; i < n; ++i) {
            const int src = i - cells;
            if (src >= 0 && src < n) out[i] = nu.density[src];
        }
        return out;
    };
    for (int ja = 0; ja < per_axis; ++ja) {
        for (int jb = 0; jb < per_axis; ++jb) {
            const double da = -max_shift + 2.0 * max_shift * ja / (per_axis - 1);
            const double db = -max_shift + 2.0 * max_shift * jb / (per_axis - 1);
            if (std::abs(da) < 1e-12 && std::abs(db) < 1e-12) continue;
            Vector mix = 0.5 * shifted(da) + 0.5 * shifted(db);
            fam.members.emplace_back("mixture d=(" + fmt(da) + "," + fmt(db) + ")",
                                     normalize_grid(mix, nu.lo, nu.hi));
        }
    }
    return fam;
}

TestFamily eigenmode_family(const GridMeasure& nu, int modes,
                            const std::vector<double>& amplitudes) {
    TestFamily fam;
    fam.name = "modes";
    const SpectralModes sm = dirichlet_modes(nu, modes);
    const int n = nu.n();
    const double h = nu.dx();
    const Vector centers = nu.centers();
    for (int m = 0; m < modes; ++m) {
        Vector fp(n);
        for (int i = 0; i < n; ++i) {
            if (i == 0)
                fp[i] = (sm.modes(1, m) - sm.modes(0, m)) / h;
            else if (i == n - 1)
                fp[i] = (sm.modes(n - 1, m) - sm.modes(n - 2, m)) / h;
            else
                fp[i] = (sm.modes(i + 1, m) - sm.modes(i - 1, m)) / (2.0 * h);
        }
        fp /= fp.cwiseAbs().maxCoeff();
        for (double eps : amplitudes) {
            const Vector map = centers + eps * fp;
            try {
                fam.members.emplace_back("mode " + std::to_string(m + 1) + " eps=" + fmt(eps),
                                         pushforward_1d(nu, map, nu.lo, nu.hi, n));
            } catch (const InvalidParameter&) {
                // amplitude broke monotonicity for this mode; skip it
            }
        }
    }
    return fam;
}

TestFamily standard_family(const GridMeasure& nu) {
    TestFamily fam;
    fam.name = "translates+dilations+mixtures+modes";
    TestFamily t = translates_family(nu);
    TestFamily d = dilations_family(nu);
    TestFamily m = mixtures_family(nu);
    TestFamily e = eigenmode_family(nu);
    for (auto* src : {&t, &d, &m, &e})
        for (auto& member : src->members) fam.members.push_back(std::move(member));
    return fam;
}

// -------------------------------------------------------------- estimates

ConstantReport wj_constant_estimate(const GridMeasure& nu, const ScalarField& A,
                                    const TestFamily& family) {
    if (family.members.empty())
        throw InvalidParameter("wj_constant_estimate: empty test family");
    double best = std::numeric_limits<double>::infinity();
    std::string best_name;
    for (const auto& [name, mu] : family.members) {
        const double w2 = w2_exact_1d(nu, mu);
        if (!(w2 > 1e-9))
            throw InvalidParameter("wj_constant_estimate: member '" + name +
                                   "' coincides with the reference");
        const double ratio = j_functional_1d(mu, nu, A).value / (w2 * w2);
        if (ratio < best) {
            best = ratio;
            best_name = name;
        }
    }
    ConstantReport r;
    r.name = "WJ";
    r.value = best;
    r.kind = "estimated";
    r.valid = best > 0;
    r.reason = "upper bound over family '" + family.name + "'; minimizer: " + best_name;
    r.inputs["family_size"] = static_cast<double>(family.members.size());
    return r;
}

DecayFit decay_rate_fit(const std::vector<double>& times, const std::vector<double>& values) {
    if (times.size() != values.size() || times.size() < 5)
        throw InvalidSeries("decay_rate_fit: need at least 5 samples");
    const int n = static_cast<int>(times.size());
    double st = 0, sy = 0, stt = 0, sty = 0;
    for (int i = 0; i < n; ++i) {
        if (!(values[i] > 0)) throw InvalidSeries("decay_rate_fit: nonpositive value");
        const double y = std::log(values[i]);
        st += times[i];
        sy += y;
        stt += times[i] * times[i];
        sty += times[i] * y;
    }
    const double denom = n * stt - st * st;
    if (!(denom > 0)) throw InvalidSeries("decay_rate_fit: degenerate time grid");
    const double slope = (n * sty - st * sy) / denom;
    const double intercept = (sy - slope * st) / n;

    double ss_res = 0, ss_tot = 0;
    const double mean_y = sy / n;
    for (int i = 0; i < n; ++i) {
        const double y = std::log(values[i]);
        const double r = y - (intercept + slope * times[i]);
        ss_res += r * r;
        ss_tot += (y - mean_y) * (y - mean_y);
    }
    DecayFit fit;
    fit.rate = -slope;
    fit.intercept = intercept;
    fit.r_squared = ss_tot > 0 ? 1.0 - ss_res / ss_tot : 1.0;
    fit.exponential = fit.r_squared >= 0.98;
    return fit;
}

// --------------------------------------------------------- derived formulas

ConstantReport derived_agswh(double c, double lambda1, double lambda2) {
    ConstantReport r;
    r.name = "WJ";
    r.kind = "derived_formula";
    r.value = 0.5 * (c + lambda1 + 2.0 * lambda2);
    r.valid = c > -lambda1 - 2.0 * lambda2;
    r.reason = r.valid ? "from WH(c) with curvature bounds"
                       : "requires c > -lambda1 - 2 lambda2";
    r.inputs = {{"c", c}, {"lambda1", lambda1}, {"lambda2", lambda2}};
    return r;
}

ConstantReport derived_perturbation(double C, double alpha, double beta, double K) {
    if (K < 0) throw InvalidParameter("derived_perturbation: K must be >= 0");
    ConstantReport r;
    r.name = "WJ";
    r.kind = "derived_formula";
    const double e2k = std::exp(2.0 * K);
    r.value = C / e2k + beta + alpha * (1.0 - 1.0 / e2k);
    r.valid = (-beta * e2k - alpha * (e2k - 1.0) < C) && alpha <= 0;
    r.reason = r.valid ? "bounded perturbation of a WJ measure"
                       : "perturbation bound violated";
    r.inputs = {{"C", C}, {"alpha", alpha}, {"beta", beta}, {"K", K}};
    return r;
}

ConstantReport derived_tensorization(const std::vector<double>& constants) {
    if (constants.empty()) throw InvalidParameter("derived_tensorization: empty input");
    double m = constants[0];
    for (double c : constants) {
        if (!(c > 0)) throw InvalidParameter("derived_tensorization: constants must be positive");
        m = std::min(m, c);
    }
    ConstantReport r;
    r.name = "WJ";
    r.kind = "derived_formula";
    r.value = m;
    r.valid = true;
    r.reason = "minimum over " + std::to_string(constants.size()) + " factors";
    r.inputs["factors"] = static_cast<double>(constants.size());
    return r;
}

ConstantReport derived_lsi(double C, double rho) {
    if (!(C > 0)) throw InvalidParameter("derived_lsi: C must be positive");
    ConstantReport r;
    r.name = "LSI";
    r.kind = "derived_formula";
    const double rho_minus = std::max(0.0, -rho);
    const double f = 1.0 + rho_minus / (2.0 * C);
    r.value = C / (f * f);
    r.valid = true;
    r.reason = rho >= 0 ? "nonnegative curvature, constant C preserved"
                        : "negative curvature correction";
    r.inputs = {{"C", C}, {"rho", rho}};
    if (2.0 * C - rho > 0) r.inputs["alternative"] = C * C / (2.0 * C - rho);
    return r;
}

// ------------------------------------------------------------- pair scans

namespace {

Vector uniform_point(int dim, double lo, double hi, std::uint64_t seed, std::uint64_t stream,
                     std::uint64_t& counter) {
    Vector x(dim);
    for (int c = 0; c < dim; ++c)
        x[c] = lo + (hi - lo) * rng::uniform(seed, stream, counter++);
    return x;
}

}  // namespace

MonotonicityReport monotone_at_infinity_check(const VectorField& A, int dim, double R, double K,
                                              int n_pairs, std::uint64_t seed) {
    if (n_pairs < 1) throw InvalidParameter("monotone_at_infinity_check: need n_pairs >= 1");
    const double L = 6.0 * std::max(R, 0.5);
    MonotonicityReport rep;
    rep.worst_outer_ratio = std::numeric_limits<double>::infinity();
    rep.worst_global_ratio = std::numeric_limits<double>::infinity();
    std::uint64_t counter = 0;
    for (int k = 0; k < n_pairs; ++k) {
        const Vector x = uniform_point(dim, -L, L, seed, 0, counter);
        const Vector y = uniform_point(dim, -L, L, seed, 0, counter);
        const double r2 = (x - y).squaredNorm();
        if (!(r2 > 0)) continue;
        const double ratio = (A(x) - A(y)).dot(x - y) / r2;
        rep.worst_global_ratio = std::min(rep.worst_global_ratio, ratio);
        if (x.norm() >= 2.0 * R || y.norm() >= 2.0 * R) {
            rep.worst_outer_ratio = std::min(rep.worst_outer_ratio, ratio);
            ++rep.outer_pairs;
        }
    }
    rep.global_monotone = rep.worst_global_ratio >= -1e-9;
    rep.passes = rep.global_monotone && rep.outer_pairs > 0 &&
                 rep.worst_outer_ratio >= K / 3.0 - 1e-9 * std::max(1.0, K / 3.0);
    return rep;
}

SvrProbe sturm_vonrenesse_probe(const VectorField& A, int dim, double lo, double hi, int n_pairs,
                                std::uint64_t seed) {
    if (n_pairs < 100) throw InvalidParameter("sturm_vonrenesse_probe: need n_pairs >= 100");
    SvrProbe probe;
    probe.c_geo = std::numeric_limits<double>::infinity();
    std::uint64_t counter = 0;
    for (int k = 0; k < n_pairs; ++k) {
        const Vector x = uniform_point(dim, lo, hi, seed, 0, counter);
        const Vector y = uniform_point(dim, lo, hi, seed, 0, counter);
        const double r2 = (x - y).squaredNorm();
        if (!(r2 > 0)) continue;
        probe.c_geo = std::min(probe.c_geo, (A(y) - A(x)).dot(y - x) / r2);
    }

    const int n_particles = 1000;
    Matrix px(n_particles, dim), py(n_particles, dim);
    std::uint64_t c1 = 0, c2 = 0;
    for (int p = 0; p < n_particles; ++p) {
        px.row(p) = uniform_point(dim, lo, hi, seed, 1, c1).transpose();
        py.row(p) = uniform_point(dim, lo, hi, seed, 2, c2).transpose();
    }
    DriftSpec drift;
    drift.dim = dim;
    drift.V = [](const Vector&) { return 0.0; };
    drift.gradV = A;
    if (dim == 1) {
        drift.v1 = [](double) { return 0.0; };
        drift.dv1 = [A](double x) { return A(Vector::Constant(1, x))[0]; };
    }
    const Trajectory traj =
        coupled_sde(ParticleCloud::uniform_weights(px), ParticleCloud::uniform_weights(py),
                    drift, 1.5, 1e-3, seed);
    const MetricSeries& msd = traj.metrics.at("coupling_msd");
    probe.fit = decay_rate_fit(msd.t, msd.value);
    probe.c_dyn = 0.5 * probe.fit.rate;
    return probe;
}

}  // namespace wfp
