#include "wfp/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <ostream>
#include <string>

#include "wfp/rng.hpp"
#include "wfp/transport.hpp"

namespace wfp {

namespace {

// Bernoulli function z / (e^z - 1), the exponential-fitting weight.
double bernoulli_b(double z) {
    if (std::abs(z) < 1e-5) return 1.0 - 0.5 * z + z * z / 12.0;
    return z / std::expm1(z);
}

std::vector<double> sanitize_times(std::vector<double> times, double t_end) {
    std::sort(times.begin(), times.end());
    std::vector<double> out;
    out.push_back(0.0);
    for (double t : times)
        if (t > out.back() + 1e-12 && t < t_end - 1e-12) out.push_back(t);
    if (t_end > out.back() + 1e-12) out.push_back(t_end);
    return out;
}

}  // namespace

std::vector<double> geometric_times(double t_end, double first, double ratio) {
    std::vector<double> t;
    for (double s = first; s < t_end; s *= ratio) t.push_back(s);
    return t;
}

DriftSpec make_drift_1d(std::function<double(double)> V, std::function<double(double)> dV,
                        std::optional<double> lambda1, std::function<double(double)> F,
                        std::optional<double> lambda2) {
    DriftSpec d;
    d.dim = 1;
    d.v1 = V;
    d.dv1 = dV;
    d.f1 = F;
    d.lambda1 = lambda1;
    d.lambda2 = lambda2;
    d.V = [V](const Vector& x) { return V(x[0]); };
    d.gradV = [dV](const Vector& x) { return Vector::Constant(1, dV(x[0])); };
    if (F) d.F = [F](const Vector& x) { return Vector::Constant(1, F(x[0])); };
    return d;
}

DriftSpec make_drift(const CatalogEntry& entry) {
    DriftSpec d;
    d.dim = entry.dim;
    d.V = entry.V;
    d.gradV = entry.gradV;
    d.lambda1 = entry.lambda1;
    d.lambda2 = 0.0;
    if (entry.dim == 1) {
        d.v1 = entry.v1;
        d.dv1 = entry.dv1;
    }
    return d;
}

// ------------------------------------------------------------- fp_solve_1d

Trajectory fp_solve_1d(const GridMeasure& mu0, const DriftSpec& drift, double t_end, double dt,
                       const FpOptions& opts) {
    if (drift.dim != 1 || !drift.v1) throw InvalidParameter("fp_solve_1d: need a 1D drift");
    if (!(dt > 0) || !(t_end >= 0)) throw InvalidParameter("fp_solve_1d: bad time parameters");

    const int n = mu0.n();
    const double h = mu0.dx();

    // face data: z = V(x_i) - V(x_{i-1}) + F h, interior faces 1..n-1
    Vector cP = Vector::Zero(n + 1), cM = Vector::Zero(n + 1);
    double max_a = 0.0;
    for (int k = 1; k < n; ++k) {
        const double zc = drift.v1(mu0.center(k)) - drift.v1(mu0.center(k - 1));
        const double zf = drift.f1 ? drift.f1(mu0.lo + k * h) * h : 0.0;
        const double z = zc + zf;
        cP[k] = bernoulli_b(-z) / h;
        cM[k] = bernoulli_b(z) / h;
        max_a = std::max(max_a, std::abs(z) / h);
    }

    // stability: diffusive and advective CFL
    const double dt_diff = 0.4 * h * h;
    const double dt_adv = max_a > 0 ? 0.4 * h / max_a : t_end;
    if (dt > dt_diff || dt > dt_adv) {
        const double suggestion = std::min(dt_diff, dt_adv);
        throw UnstableStep("fp_solve_1d: dt " + std::to_string(dt) +
                           " violates the stability bound, use dt <= " +
                           std::to_string(suggestion));
    }

    const GridMeasure nu_ref =
        grid_from_function([&](double x) { return std::exp(-drift.v1(x)); }, mu0.lo, mu0.hi, n);

    Trajectory traj;
    // regularity conditions gating the dissipation theory: int mu0^2 e^V and,
    // for nonzero F, int |F|^4 dnu; failures are flagged, the run proceeds
    {
        double reg = 0.0;
        for (int i = 0; i < n; ++i)
            reg += mu0.density[i] * mu0.density[i] * std::exp(drift.v1(mu0.center(i))) * h;
        if (!std::isfinite(reg))
            traj.warnings.push_back("initial datum fails the square-integrability condition");
        if (drift.f1) {
            const double f4 = nu_ref.integrate(
                [&](double x) { return std::pow(drift.f1(x), 4.0); });
            if (!std::isfinite(f4))
                traj.warnings.push_back("perturbation field fails the fourth-moment condition");
        }
    }
    const std::vector<double> record =
        sanitize_times(opts.record_times.empty() ? geometric_times(t_end) : opts.record_times,
                       t_end);

    Vector mu = mu0.density;
    Vector flux = Vector::Zero(n + 1);
    const long total_steps = static_cast<long>(std::ceil(t_end / dt - 1e-12));
    size_t next_record = 0;
    double int_fisher = 0.0;
    double prev_fisher = 0.0;

    GridMeasure state;
    state.lo = mu0.lo;
    state.hi = mu0.hi;

    auto snapshot = [&](double t) {
        state.density = mu;
        traj.times.push_back(t);
        traj.grid_states.push_back(state);
        if (opts.record_metrics) {
            traj.metrics["w2"].t.push_back(t);
            traj.metrics["w2"].value.push_back(w2_exact_1d(state, nu_ref));
            traj.metrics["entropy"].t.push_back(t);
            traj.metrics["entropy"].value.push_back(relative_entropy(state, nu_ref));
            traj.metrics["fisher"].t.push_back(t);
            traj.metrics["fisher"].value.push_back(fisher_information(state, nu_ref));
            if (opts.accumulate_fisher) {
                traj.metrics["int_fisher_dt"].t.push_back(t);
                traj.metrics["int_fisher_dt"].value.push_back(int_fisher);
            }
        }
    };

    if (opts.accumulate_fisher) {
        state.density = mu;
        prev_fisher = fisher_information(state, nu_ref);
    }
    snapshot(0.0);
    if (!record.empty() && record[next_record] == 0.0) ++next_record;

    for (long step = 0; step < total_steps; ++step) {
        for (int k = 1; k < n; ++k) flux[k] = cP[k] * mu[k] - cM[k] * mu[k - 1];
        for (int i = 0; i < n; ++i) {
            mu[i] += (dt / h) * (flux[i + 1] - flux[i]);
            if (mu[i] < 0) mu[i] = 0.0;  // roundoff guard, magnitudes ~1e-20
        }

        if (opts.accumulate_fisher) {
            state.density = mu;
            const double cur = fisher_information(state, nu_ref);
            int_fisher += 0.5 * dt * (prev_fisher + cur);
            prev_fisher = cur;
        }

        const double t = dt * static_cast<double>(step + 1);

        if ((step & 127) == 0) {
            // outward particle transport through the outermost interior
            // faces; the particle flux is -J, so positive J at the left face
            // or negative J at the right face means mass headed into a wall
            const double outflow = std::max(0.0, flux[1]) + std::max(0.0, -flux[n - 1]);
            if (outflow > opts.boundary_flux_tol)
                throw NumericalFailure("fp_solve_1d: blocked boundary outflow " +
                                       std::to_string(outflow) +
                                       " exceeds tolerance at t = " + std::to_string(t));
        }

        while (next_record < record.size() && t >= record[next_record] - 0.5 * dt) {
            snapshot(record[next_record]);
            ++next_record;
        }
    }
    while (next_record < record.size()) {
        snapshot(record[next_record]);
        ++next_record;
    }
    return traj;
}

// ---------------------------------------------------------------- SDE runs

namespace {

void fill_noise(Vector& xi, std::uint64_t seed, std::uint64_t particle, std::uint64_t step,
                int dim) {
    for (int c = 0; c < dim; c += 2) {
        const auto [g1, g2] = rng::normal_pair(seed, particle, step * 64 + c / 2);
        xi[c] = g1;
        if (c + 1 < dim) xi[c + 1] = g2;
    }
}

}  // namespace

Trajectory sde_evolve(const ParticleCloud& cloud0, const DriftSpec& drift, double t_end,
                      double dt, std::uint64_t seed, const SdeOptions& opts) {
    if (!(dt > 0)) throw InvalidParameter("sde_evolve: dt must be positive");
    if (cloud0.dim != drift.dim) throw CloudMismatch("sde_evolve: dimension mismatch");
    const int n = cloud0.size();
    const int dim = cloud0.dim;
    const double sigma = std::sqrt(2.0 * dt);
    const bool scalar = (dim == 1 && drift.dv1);

    Trajectory traj;
    const std::vector<double> record =
        sanitize_times(opts.record_times.empty() ? geometric_times(t_end) : opts.record_times,
                       t_end);
    const long total_steps = static_cast<long>(std::ceil(t_end / dt - 1e-12));

    Matrix pts = cloud0.points;
    size_t next_record = 0;

    auto snapshot = [&](double t) {
        ParticleCloud c = cloud0;
        c.points = pts;
        traj.times.push_back(t);
        traj.metrics["m2"].t.push_back(t);
        traj.metrics["m2"].value.push_back(moment(c, 2));
        traj.cloud_states.push_back(std::move(c));
    };
    snapshot(0.0);
    if (!record.empty() && record[next_record] == 0.0) ++next_record;

    Vector xi(dim), x(dim);
    for (long step = 0; step < total_steps; ++step) {
        const double t = dt * static_cast<double>(step + 1);
        for (int p = 0; p < n; ++p) {
            if (scalar) {
                const double g = rng::normal(seed, p, static_cast<std::uint64_t>(step) * 64);
                double v = pts(p, 0);
                v += -drift.drift1(v) * dt + sigma * g;
                if (!std::isfinite(v))
                    throw DivergedParticle("sde_evolve: particle " + std::to_string(p) +
                                           " at t = " + std::to_string(t));
                pts(p, 0) = v;
            } else {
                fill_noise(xi, seed, p, static_cast<std::uint64_t>(step), dim);
                x = pts.row(p).transpose();
                x += -drift.drift(x) * dt + sigma * xi;
                if (!x.allFinite())
                    throw DivergedParticle("sde_evolve: particle " + std::to_string(p) +
                                           " at t = " + std::to_string(t));
                pts.row(p) = x.transpose();
            }
        }
        while (next_record < record.size() && t >= record[next_record] - 0.5 * dt) {
            snapshot(record[next_record]);
            ++next_record;
        }
    }
    while (next_record < record.size()) {
        snapshot(record[next_record]);
        ++next_record;
    }
    return traj;
}

Trajectory coupled_sde(const ParticleCloud& x0, const ParticleCloud& y0, const DriftSpec& drift,
                       double t_end, double dt, std::uint64_t seed, const SdeOptions& opts) {
    if (!(dt > 0)) throw InvalidParameter("coupled_sde: dt must be positive");
    if (x0.size() != y0.size() || x0.dim != y0.dim)
        throw CloudMismatch("coupled_sde: clouds must have equal size and dimension");
    if ((x0.weights - y0.weights).lpNorm<Eigen::Infinity>() > 1e-12)
        throw CloudMismatch("coupled_sde: clouds must carry identical weights");
    if (x0.dim != drift.dim) throw CloudMismatch("coupled_sde: dimension mismatch with drift");

    const int n = x0.size();
    const int dim = x0.dim;
    const double sigma = std::sqrt(2.0 * dt);
    const bool scalar = (dim == 1 && drift.dv1);

    Trajectory traj;
    const std::vector<double> record =
        sanitize_times(opts.record_times.empty() ? geometric_times(t_end) : opts.record_times,
                       t_end);
    const long total_steps = static_cast<long>(std::ceil(t_end / dt - 1e-12));

    Matrix px = x0.points, py = y0.points;
    size_t next_record = 0;

    auto msd = [&]() {
        double acc = 0.0;
        for (int p = 0; p < n; ++p)
            acc += x0.weights[p] * (px.row(p) - py.row(p)).squaredNorm();
        return acc;
    };
    auto snapshot = [&](double t) {
        ParticleCloud cx = x0, cy = y0;
        cx.points = px;
        cy.points = py;
        traj.times.push_back(t);
        traj.cloud_states.push_back(std::move(cx));
        traj.partner_states.push_back(std::move(cy));
    };

    traj.metrics["coupling_msd"].t.push_back(0.0);
    traj.metrics["coupling_msd"].value.push_back(msd());
    snapshot(0.0);
    if (!record.empty() && record[next_record] == 0.0) ++next_record;

    // Runge-Kutta drift substep, then the shared noise kick. The determinis-
    // tic substep integrates the pair difference to fifth order per step, so
    // linear drifts reproduce the continuous-time contraction essentially
    // exactly.
    auto rk4_scalar = [&](double v) {
        const double k1 = -drift.drift1(v);
        const double k2 = -drift.drift1(v + 0.5 * dt * k1);
        const double k3 = -drift.drift1(v + 0.5 * dt * k2);
        const double k4 = -drift.drift1(v + dt * k3);
        return v + dt / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    };
    Vector k1(dim), k2(dim), k3(dim), k4(dim), x(dim), xi(dim);
    auto rk4_vec = [&](Vector v) {
        k1 = -drift.drift(v);
        k2 = -drift.drift(v + 0.5 * dt * k1);
        k3 = -drift.drift(v + 0.5 * dt * k2);
        k4 = -drift.drift(v + dt * k3);
        v += dt / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
        return v;
    };

    for (long step = 0; step < total_steps; ++step) {
        const double t = dt * static_cast<double>(step + 1);
        for (int p = 0; p < n; ++p) {
            if (scalar) {
                const double g = rng::normal(seed, p, static_cast<std::uint64_t>(step) * 64);
                const double nx = rk4_scalar(px(p, 0)) + sigma * g;
                const double ny = rk4_scalar(py(p, 0)) + sigma * g;
                if (!std::isfinite(nx) || !std::isfinite(ny))
                    throw DivergedParticle("coupled_sde: particle " + std::to_string(p) +
                                           " at t = " + std::to_string(t));
                px(p, 0) = nx;
                py(p, 0) = ny;
            } else {
                fill_noise(xi, seed, p, static_cast<std::uint64_t>(step), dim);
                x = rk4_vec(px.row(p).transpose()) + sigma * xi;
                if (!x.allFinite())
                    throw DivergedParticle("coupled_sde: particle " + std::to_string(p) +
                                           " at t = " + std::to_string(t));
                px.row(p) = x.transpose();
                x = rk4_vec(py.row(p).transpose()) + sigma * xi;
                py.row(p) = x.transpose();
            }
        }
        traj.metrics["coupling_msd"].t.push_back(t);
        traj.metrics["coupling_msd"].value.push_back(msd());
        while (next_record < record.size() && t >= record[next_record] - 0.5 * dt) {
            snapshot(record[next_record]);
            ++next_record;
        }
    }
    while (next_record < record.size()) {
        snapshot(record[next_record]);
        ++next_record;
    }
    return traj;
}

double quartic_zero_diffusion_w2(const GridMeasure& mu0, double t) {
    if (t < 0) throw InvalidParameter("quartic_zero_diffusion_w2: t must be >= 0");
    return mu0.integrate([t](double x) { return x * x / (1.0 + 2.0 * t * x * x); });
}

VectorField make_rotational_F(const std::function<Vector(const Vector&)>& gradV,
                              const Matrix& Jmat) {
    if (Jmat.rows() != Jmat.cols())
        throw NotAntisymmetric("make_rotational_F: matrix must be square");
    const double scale = std::max(1.0, Jmat.cwiseAbs().maxCoeff());
    if ((Jmat + Jmat.transpose()).cwiseAbs().maxCoeff() > 1e-12 * scale)
        throw NotAntisymmetric("make_rotational_F: matrix is not antisymmetric");
    Matrix J = Jmat;
    return [J, gradV](const Vector& x) -> Vector { return J * gradV(x); };
}

void write_metric_series_csv(const Trajectory& traj, std::ostream& out) {
    out << "t,metric,value\n";
    char buf[96];
    for (const auto& [name, series] : traj.metrics)
        for (size_t k = 0; k < series.t.size(); ++k) {
            std::snprintf(buf, sizeof(buf), "%.17g,%s,%.17g", series.t[k], name.c_str(),
                          series.value[k]);
            out << buf << '\n';
        }
}

void write_density_csv(const Trajectory& traj, std::ostream& out) {
    out << "t,x,density\n";
    char buf[128];
    for (size_t k = 0; k < traj.grid_states.size(); ++k) {
        const GridMeasure& m = traj.grid_states[k];
        for (int i = 0; i < m.n(); ++i) {
            std::snprintf(buf, sizeof(buf), "%.17g,%.17g,%.17g", traj.times[k], m.center(i),
                          m.density[i]);
            out << buf << '\n';
        }
    }
}

double stationarity_residual(const std::function<double(const Vector&)>& V,
                             const VectorField& F, double lo, double hi, int n_per_axis,
                             int dim) {
    if (dim < 1 || dim > 2) throw InvalidParameter("stationarity_residual: dim must be 1 or 2");
    if (n_per_axis < 9) throw InvalidParameter("stationarity_residual: grid too coarse");
    const double h = (hi - lo) / (n_per_axis - 1);

    auto G = [&](const Vector& x, int comp) { return std::exp(-V(x)) * F(x)[comp]; };
    // fourth-order central difference of G_comp along axis
    auto dG = [&](Vector x, int comp, int axis) {
        const double base = x[axis];
        x[axis] = base + 2 * h;
        const double gp2 = G(x, comp);
        x[axis] = base + h;
        const double gp1 = G(x, comp);
        x[axis] = base - h;
        const double gm1 = G(x, comp);
        x[axis] = base - 2 * h;
        const double gm2 = G(x, comp);
        return (-gp2 + 8.0 * gp1 - 8.0 * gm1 + gm2) / (12.0 * h);
    };

    double sup_div = 0.0, sup_dens = 0.0;
    Vector x(dim);
    if (dim == 1) {
        for (int i = 0; i < n_per_axis; ++i) {
            x[0] = lo + i * h;
            sup_dens = std::max(sup_dens, std::exp(-V(x)));
            if (i < 2 || i >= n_per_axis - 2) continue;
            sup_div = std::max(sup_div, std::abs(dG(x, 0, 0)));
        }
    } else {
        for (int i = 0; i < n_per_axis; ++i) {
            for (int j = 0; j < n_per_axis; ++j) {
                x[0] = lo + i * h;
                x[1] = lo + j * h;
                sup_dens = std::max(sup_dens, std::exp(-V(x)));
                if (i < 2 || i >= n_per_axis - 2 || j < 2 || j >= n_per_axis - 2) continue;
                sup_div = std::max(sup_div, std::abs(dG(x, 0, 0) + dG(x, 1, 1)));
            }
        }
    }
    if (!(sup_dens > 0)) throw NumericalFailure("stationarity_residual: density vanished");
    return sup_div / sup_dens;
}

}  // namespace wfp
