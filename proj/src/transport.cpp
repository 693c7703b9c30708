#include "wfp/transport.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <ostream>

namespace wfp {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
}

// ---------------------------------------------------------------- CdfTable

CdfTable::CdfTable(const GridMeasure& m) : lo_(m.lo), hi_(m.hi), h_(m.dx()) {
    const int n = m.n();
    mass_.resize(n);
    cumlo_.resize(n + 1);
    cumhi_.resize(n + 1);
    for (int i = 0; i < n; ++i) mass_[i] = m.density[i] * h_;
    cumlo_[0] = 0.0;
    for (int i = 0; i < n; ++i) cumlo_[i + 1] = cumlo_[i] + mass_[i];
    cumhi_[n] = 0.0;
    for (int i = n - 1; i >= 0; --i) cumhi_[i] = cumhi_[i + 1] + mass_[i];
    const double total = cumlo_[n];
    if (!(total > 0)) throw InvalidDensity("CdfTable: zero total mass");
    mass_ /= total;
    cumlo_ /= total;
    cumhi_ /= total;
    cumlo_[n] = 1.0;
    cumhi_[0] = 1.0;
}

double CdfTable::cdf(double x) const {
    if (x <= lo_) return 0.0;
    if (x >= hi_) return 1.0;
    const double s = (x - lo_) / h_;
    int i = std::min(static_cast<int>(s), static_cast<int>(mass_.size()) - 1);
    return cumlo_[i] + mass_[i] * (s - i);
}

double CdfTable::quantile_mass(double m_lo, double m_hi) const {
    const int n = static_cast<int>(mass_.size());
    if (m_lo <= 0.0) return lo_;
    if (m_hi <= 0.0) {
        // leftmost edge with nothing above it
        const double* begin = cumhi_.data();
        const double* it =
            std::lower_bound(begin, begin + n + 1, 0.0, std::greater<double>());
        return lo_ + static_cast<double>(it - begin) * h_;
    }
    if (m_lo <= m_hi) {
        // invert the forward sums: smallest edge j with cumlo_[j] >= m_lo
        const double* begin = cumlo_.data();
        const double* it = std::lower_bound(begin, begin + n + 1, m_lo);
        const int j = static_cast<int>(it - begin);
        if (j == 0) return lo_;
        if (cumlo_[j] == m_lo) return lo_ + j * h_;
        const int i = j - 1;  // cumlo_[i] < m_lo < cumlo_[i+1], cell has mass
        return lo_ + (i + (m_lo - cumlo_[i]) / mass_[i]) * h_;
    }
    // invert the backward sums: smallest edge j with cumhi_[j] <= m_hi
    const double* begin = cumhi_.data();
    const double* it = std::lower_bound(begin, begin + n + 1, m_hi, std::greater<double>());
    const int j = static_cast<int>(it - begin);
    if (j == 0) return lo_;
    if (cumhi_[j] == m_hi && j <= n) return lo_ + j * h_;
    const int i = j - 1;  // cumhi_[i] > m_hi > cumhi_[i+1], cell has mass
    return lo_ + (i + 1 - (m_hi - cumhi_[i + 1]) / mass_[i]) * h_;
}

double CdfTable::quantile(double u) const { return quantile_mass(u, 1.0 - u); }

// ------------------------------------------------------------ w2_exact_1d

double w2_exact_1d(const GridMeasure& a, const GridMeasure& b, int levels) {
    if (levels < 4096) levels = 4096;
    const CdfTable qa(a), qb(b);
    const double inv = 1.0 / levels;
    double acc = 0.0;
    for (int k = 0; k < levels; ++k) {
        const double m_lo = (k + 0.5) * inv;
        const double m_hi = (levels - k - 0.5) * inv;  // exact complement
        const double d = qa.quantile_mass(m_lo, m_hi) - qb.quantile_mass(m_lo, m_hi);
        acc += d * d;
    }
    return std::sqrt(acc * inv);
}

// -------------------------------------------------------- SampledFunction

double SampledFunction::at(double x) const {
    const double s = (x - lo) / step();
    if (s <= 0.0) return values[0];
    if (s >= n() - 1) return values[n() - 1];
    const int i = static_cast<int>(s);
    const double w = s - i;
    return (1.0 - w) * values[i] + w * values[i + 1];
}

// ------------------------------------------------------------- MongeMap1D

double MongeMap1D::value_at(double x) const {
    const double h = (hi - lo) / n();
    const double s = (x - lo) / h - 0.5;
    if (s <= 0.0) return T[0];
    if (s >= n() - 1) return T[n() - 1];
    const int i = static_cast<int>(s);
    const double w = s - i;
    return (1.0 - w) * T[i] + w * T[i + 1];
}

SampledFunction MongeMap1D::potential() const {
    // phi(edge_{k+1}) = phi(edge_k) + T_k * h  (midpoint rule, so phi is
    // convex exactly when T is nondecreasing)
    const double h = (hi - lo) / n();
    SampledFunction phi;
    phi.lo = lo;
    phi.hi = hi;
    phi.values.resize(n() + 1);
    phi.values[0] = 0.0;
    for (int k = 0; k < n(); ++k) phi.values[k + 1] = phi.values[k] + T[k] * h;
    return phi;
}

SampledFunction MongeMap1D::conjugate_potential() const { return legendre(potential()); }

namespace {

// Zero cells are allowed only in the tails (truncated translates); a hole
// inside the support breaks the Monge-Ampere relation.
void require_positive_on_support(const GridMeasure& m, const char* who) {
    int first = 0, last = m.n() - 1;
    while (first < last && m.density[first] == 0.0) ++first;
    while (last > first && m.density[last] == 0.0) --last;
    for (int i = first; i <= last; ++i)
        if (!(m.density[i] > 0.0))
            throw SingularDensity(std::string(who) + ": zero-density cell inside the support");
}

}  // namespace

MongeMap1D brenier_map_1d(const GridMeasure& nu, const GridMeasure& mu) {
    require_positive_on_support(nu, "brenier_map_1d(source)");
    require_positive_on_support(mu, "brenier_map_1d(target)");
    const int n = nu.n();
    const CdfTable fnu(nu), fmu(mu);
    MongeMap1D map;
    map.lo = nu.lo;
    map.hi = nu.hi;
    map.T.resize(n);
    map.Tprime.resize(n);
    for (int i = 0; i < n; ++i) {
        map.T[i] = fmu.quantile_mass(fnu.mass_below_center(i), fnu.mass_above_center(i));
    }
    for (int i = 0; i < n; ++i) {
        if (nu.density[i] <= 0.0) {
            map.Tprime[i] = 1.0;  // massless source cell, any positive slope works
            continue;
        }
        const double target = mu.density_at(map.T[i]);
        if (!(target > 0.0))
            throw SingularDensity("brenier_map_1d: mu vanishes on the image of the map");
        map.Tprime[i] = nu.density[i] / target;
        if (!(map.Tprime[i] > 0.0))
            throw SingularDensity("brenier_map_1d: non-positive map derivative");
    }
    return map;
}

GridMeasure pushforward_1d(const GridMeasure& nu, const Vector& T_values, double lo_out,
                           double hi_out, int n_out) {
    const int n = nu.n();
    if (T_values.size() != n) throw InvalidParameter("pushforward_1d: map size mismatch");
    for (int i = 0; i + 1 < n; ++i)
        if (!(T_values[i + 1] > T_values[i]))
            throw InvalidParameter("pushforward_1d: map must be strictly increasing");

    const double h = nu.dx();
    Vector out(n_out);
    const double hout = (hi_out - lo_out) / n_out;
    const double* tb = T_values.data();
    for (int k = 0; k < n_out; ++k) {
        const double y = lo_out + (k + 0.5) * hout;
        if (y <= T_values[0] || y >= T_values[n - 1]) {
            out[k] = 0.0;
            continue;
        }
        const double* it = std::upper_bound(tb, tb + n, y);
        const int i = static_cast<int>(it - tb) - 1;  // T_i <= y < T_{i+1}
        const double tp = (T_values[i + 1] - T_values[i]) / h;
        const double x = nu.center(i) + (y - T_values[i]) / tp;
        out[k] = nu.density_at(x) / tp;
    }
    return normalize_grid(out, lo_out, hi_out);
}

// ---------------------------------------------------------------- legendre

SampledFunction legendre(const SampledFunction& phi, int n_out) {
    const int n = phi.n();
    if (n < 3) throw InvalidParameter("legendre: need at least 3 samples");
    for (int i = 1; i + 1 < n; ++i) {
        const double d2 = phi.values[i + 1] - 2.0 * phi.values[i] + phi.values[i - 1];
        if (d2 < -1e-10) throw NotConvex("legendre: negative discrete second difference");
    }
    if (n_out <= 0) n_out = n;

    const double h = phi.step();
    const double s_lo = (phi.values[1] - phi.values[0]) / h;
    const double s_hi = (phi.values[n - 1] - phi.values[n - 2]) / h;

    SampledFunction conj;
    conj.lo = s_lo;
    conj.hi = s_hi;
    conj.values.resize(n_out);
    const double qstep = (s_hi - s_lo) / (n_out - 1);
    int j = 0;  // argmax index, nondecreasing in q
    for (int k = 0; k < n_out; ++k) {
        const double q = s_lo + k * qstep;
        while (j + 1 < n &&
               q * phi.node(j + 1) - phi.values[j + 1] >= q * phi.node(j) - phi.values[j])
            ++j;
        conj.values[k] = q * phi.node(j) - phi.values[j];
    }
    return conj;
}

// ------------------------------------------------------------- w2_discrete

DiscreteW2 w2_discrete(const ParticleCloud& a, const ParticleCloud& b) {
    if (a.dim != b.dim) throw CloudMismatch("w2_discrete: dimension mismatch");
    const int na = a.size(), nb = b.size();
    if (na + nb > 2000)
        throw TooLarge("w2_discrete: combined support exceeds 2000 points, use sinkhorn_w2");

    Matrix cost(na, nb);
    for (int i = 0; i < na; ++i)
        for (int j = 0; j < nb; ++j)
            cost(i, j) = (a.points.row(i) - b.points.row(j)).squaredNorm();

    // Successive shortest augmenting paths with node potentials. Nodes are
    // sources [0, na) and sinks [na, na+nb); the super source/sink arcs are
    // implicit in rem_a / rem_b.
    Vector rem_a = a.weights, rem_b = b.weights;
    Matrix flow = Matrix::Zero(na, nb);
    Vector pot = Vector::Zero(na + nb);
    const int N = na + nb;
    std::vector<double> dist(N);
    std::vector<int> parent(N);
    std::vector<char> done(N);

    double remaining = rem_a.sum();
    const double tol = 1e-15 * std::max(1, na);
    int guard = 0;
    const int max_augment = 64 * (na + nb) + 1024;

    while (remaining > tol) {
        if (++guard > max_augment)
            throw NumericalFailure("w2_discrete: augmentation limit exceeded");
        std::fill(dist.begin(), dist.end(), kInf);
        std::fill(parent.begin(), parent.end(), -1);
        std::fill(done.begin(), done.end(), 0);
        for (int i = 0; i < na; ++i)
            if (rem_a[i] > tol) dist[i] = 0.0;  // super-source arcs, cost 0

        int target = -1;
        while (true) {
            int u = -1;
            double best = kInf;
            for (int v = 0; v < N; ++v)
                if (!done[v] && dist[v] < best) {
                    best = dist[v];
                    u = v;
                }
            if (u < 0) break;
            done[u] = 1;
            if (u >= na && rem_b[u - na] > tol) {
                target = u;  // first sink with residual demand closes the path
                break;
            }
            if (u < na) {
                for (int j = 0; j < nb; ++j) {
                    const double rc = std::max(0.0, cost(u, j) + pot[u] - pot[na + j]);
                    if (dist[u] + rc < dist[na + j]) {
                        dist[na + j] = dist[u] + rc;
                        parent[na + j] = u;
                    }
                }
            } else {
                const int j = u - na;
                for (int i = 0; i < na; ++i) {
                    if (flow(i, j) <= tol) continue;
                    const double rc = std::max(0.0, -cost(i, j) + pot[u] - pot[i]);
                    if (dist[u] + rc < dist[i]) {
                        dist[i] = dist[u] + rc;
                        parent[i] = u;
                    }
                }
            }
        }
        if (target < 0) throw NumericalFailure("w2_discrete: no augmenting path found");

        // bottleneck along the path
        double delta = rem_b[target - na];
        for (int v = target; parent[v] >= 0; v = parent[v])
            if (v < na) delta = std::min(delta, flow(v, parent[v] - na));
        {
            int v = target;
            while (parent[v] >= 0) v = parent[v];
            delta = std::min(delta, rem_a[v]);
        }
        if (!(delta > 0)) throw NumericalFailure("w2_discrete: empty augmentation");

        // apply
        rem_b[target - na] -= delta;
        int v = target;
        while (parent[v] >= 0) {
            const int p = parent[v];
            if (v >= na)
                flow(p, v - na) += delta;  // forward arc p -> sink v
            else
                flow(v, p - na) -= delta;  // reverse of arc v -> sink p
            v = p;
        }
        rem_a[v] -= delta;
        remaining -= delta;

        const double dt = dist[target];
        for (int w = 0; w < N; ++w) pot[w] += std::min(dist[w], dt);
    }

    DiscreteW2 result;
    for (int i = 0; i < na; ++i)
        for (int j = 0; j < nb; ++j)
            if (flow(i, j) > 0) {
                result.plan.src.push_back(i);
                result.plan.dst.push_back(j);
                result.w2sq += flow(i, j) * cost(i, j);
            }
    result.plan.w.resize(static_cast<Eigen::Index>(result.plan.src.size()));
    for (size_t k = 0; k < result.plan.src.size(); ++k)
        result.plan.w[static_cast<Eigen::Index>(k)] = flow(result.plan.src[k], result.plan.dst[k]);
    result.plan.cost = result.w2sq;
    return result;
}

// -------------------------------------------------------------- sinkhorn_w2

namespace {

double log_sum_exp(const Vector& v) {
    const double c = v.maxCoeff();
    if (!std::isfinite(c)) return c;
    return c + std::log((v.array() - c).exp().sum());
}

}  // namespace

SinkhornResult sinkhorn_w2(const ParticleCloud& a, const ParticleCloud& b, double epsilon) {
    if (!(epsilon > 0)) throw InvalidParameter("sinkhorn_w2: epsilon must be positive");
    if (a.dim != b.dim) throw CloudMismatch("sinkhorn_w2: dimension mismatch");

    // drop zero-weight support points
    std::vector<int> ia, ib;
    for (int i = 0; i < a.size(); ++i)
        if (a.weights[i] > 0) ia.push_back(i);
    for (int j = 0; j < b.size(); ++j)
        if (b.weights[j] > 0) ib.push_back(j);
    const int na = static_cast<int>(ia.size()), nb = static_cast<int>(ib.size());

    Matrix cost(na, nb);
    Vector wa(na), wb(nb), la(na), lb(nb);
    for (int i = 0; i < na; ++i) {
        wa[i] = a.weights[ia[i]];
        la[i] = std::log(wa[i]);
    }
    for (int j = 0; j < nb; ++j) {
        wb[j] = b.weights[ib[j]];
        lb[j] = std::log(wb[j]);
    }
    for (int i = 0; i < na; ++i)
        for (int j = 0; j < nb; ++j)
            cost(i, j) = (a.points.row(ia[i]) - b.points.row(ib[j])).squaredNorm();

    Vector f = Vector::Zero(na), g = Vector::Zero(nb);

    // epsilon-halving schedule, warm-starting the potentials
    std::vector<double> schedule;
    double e = std::max(epsilon, 0.25 * std::max(cost.maxCoeff(), epsilon));
    while (e > epsilon * 1.5) {
        schedule.push_back(e);
        e *= 0.5;
    }
    schedule.push_back(epsilon);

    constexpr int kMaxIter = 100000;
    int iterations = 0;
    double violation = kInf;
    Vector tmp(nb), tmpa(na);

    for (size_t stage = 0; stage < schedule.size(); ++stage) {
        const double eps = schedule[stage];
        const bool last = stage + 1 == schedule.size();
        const double goal = last ? 1e-8 : 1e-4;
        while (true) {
            // f-update makes row marginals exact, then g-update the columns
            for (int i = 0; i < na; ++i) {
                tmp = (g - cost.row(i).transpose()) / eps + lb;
                f[i] = -eps * log_sum_exp(tmp);
            }
            for (int j = 0; j < nb; ++j) {
                tmpa = (f - cost.col(j)) / eps + la;
                g[j] = -eps * log_sum_exp(tmpa);
            }
            ++iterations;

            // row marginal violation of the implied plan
            violation = 0.0;
            for (int i = 0; i < na; ++i) {
                double row = 0.0;
                for (int j = 0; j < nb; ++j)
                    row += std::exp((f[i] + g[j] - cost(i, j)) / eps + la[i] + lb[j]);
                violation = std::max(violation, std::abs(row - wa[i]));
            }
            if (violation < goal) break;
            if (iterations >= kMaxIter)
                throw NoConvergence("sinkhorn_w2: residual " + std::to_string(violation) +
                                    " after iteration cap");
        }
    }

    SinkhornResult res;
    res.epsilon = epsilon;
    res.iterations = iterations;
    res.marginal_error = violation;
    for (int i = 0; i < na; ++i)
        for (int j = 0; j < nb; ++j)
            res.cost += cost(i, j) * std::exp((f[i] + g[j] - cost(i, j)) / epsilon + la[i] + lb[j]);

    // c-transform of f gives a feasible dual pair for the unregularized LP
    double lb_dual = f.dot(wa);
    for (int j = 0; j < nb; ++j) {
        double m = kInf;
        for (int i = 0; i < na; ++i) m = std::min(m, cost(i, j) - f[i]);
        lb_dual += wb[j] * m;
    }
    res.dual_lower_bound = lb_dual;
    return res;
}

// --------------------------------------------------------- cloud-grid W2

double w2_cloud_grid_1d(const ParticleCloud& cloud, const GridMeasure& m, int levels) {
    if (cloud.dim != 1) throw CloudMismatch("w2_cloud_grid_1d: cloud must be 1D");
    const int n = cloud.size();
    std::vector<int> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(),
              [&](int i, int j) { return cloud.points(i, 0) < cloud.points(j, 0); });
    Vector cumw(n);
    double acc_w = 0.0;
    for (int k = 0; k < n; ++k) {
        acc_w += cloud.weights[order[k]];
        cumw[k] = acc_w;
    }
    cumw /= acc_w;

    const CdfTable q(m);
    double acc = 0.0;
    const double* cb = cumw.data();
    for (int k = 0; k < levels; ++k) {
        const double u = (k + 0.5) / levels;
        const double* it = std::lower_bound(cb, cb + n, u);
        const int idx = std::min(static_cast<int>(it - cb), n - 1);
        const double d = cloud.points(order[idx], 0) - q.quantile(u);
        acc += d * d;
    }
    return std::sqrt(acc / levels);
}

void write_plan_csv(const DiscretePlan& plan, std::ostream& out) {
    out << "source_index,target_index,weight\n";
    char buf[64];
    for (size_t k = 0; k < plan.src.size(); ++k) {
        std::snprintf(buf, sizeof(buf), "%.17g", plan.w[static_cast<Eigen::Index>(k)]);
        out << plan.src[k] << ',' << plan.dst[k] << ',' << buf << '\n';
    }
}

}  // namespace wfp
