#include "wfp/measures.hpp"

#include <algorithm>
#include <cmath>

#include "wfp/rng.hpp"

namespace wfp {

Vector GridMeasure::centers() const {
    Vector c(n());
    for (int i = 0; i < n(); ++i) c[i] = center(i);
    return c;
}

bool GridMeasure::same_grid(const GridMeasure& other, double tol) const {
    return n() == other.n() && std::abs(lo - other.lo) < tol && std::abs(hi - other.hi) < tol;
}

double GridMeasure::density_at(double x) const {
    if (x < lo || x > hi) return 0.0;
    const double h = dx();
    // position relative to the first cell center
    const double s = (x - lo) / h - 0.5;
    if (s <= 0.0) return density[0];
    if (s >= n() - 1) return density[n() - 1];
    const int i = static_cast<int>(s);
    const double w = s - i;
    return (1.0 - w) * density[i] + w * density[i + 1];
}

ParticleCloud ParticleCloud::uniform_weights(Matrix pts) {
    ParticleCloud c;
    c.dim = static_cast<int>(pts.cols());
    c.weights = Vector::Constant(pts.rows(), 1.0 / static_cast<double>(pts.rows()));
    c.points = std::move(pts);
    return c;
}

ParticleCloud ParticleCloud::with_weights(Matrix pts, Vector w) {
    if (pts.rows() != w.size())
        throw InvalidParameter("point/weight count mismatch");
    if ((w.array() < 0).any())
        throw InvalidParameter("negative particle weight");
    const double total = w.sum();
    if (!(total > 0) || !std::isfinite(total))
        throw InvalidParameter("weights must have positive finite total");
    if (!pts.allFinite())
        throw InvalidParameter("non-finite particle position");
    ParticleCloud c;
    c.dim = static_cast<int>(pts.cols());
    c.points = std::move(pts);
    c.weights = w / total;
    return c;
}

GridMeasure normalize_grid(const Vector& raw, double lo, double hi) {
    if (raw.size() < 2) throw InvalidDensity("need at least 2 cells");
    if (!(hi > lo)) throw InvalidDensity("grid endpoints must satisfy lo < hi");
    if (!raw.allFinite()) throw InvalidDensity("non-finite density value");
    if ((raw.array() < 0).any()) throw InvalidDensity("negative density value");
    const double h = (hi - lo) / static_cast<double>(raw.size());
    const double total = raw.sum() * h;
    if (!(total > 0)) throw InvalidDensity("density is identically zero");
    GridMeasure m;
    m.lo = lo;
    m.hi = hi;
    m.density = raw / total;
    return m;
}

double relative_entropy(const GridMeasure& mu, const GridMeasure& nu) {
    if (!mu.same_grid(nu)) throw GridMismatch("relative_entropy: measures on different grids");
    const double h = mu.dx();
    double acc = 0.0;
    for (int i = 0; i < mu.n(); ++i) {
        const double m = mu.density[i];
        if (m <= 0.0) continue;  // h log h -> 0
        const double v = nu.density[i];
        if (v <= 0.0) throw SingularDensity("relative_entropy: nu vanishes where mu > 0");
        acc += m * std::log(std::max(m / v, 1e-300));
    }
    return acc * h;
}

double fisher_information(const GridMeasure& mu, const GridMeasure& nu) {
    if (!mu.same_grid(nu)) throw GridMismatch("fisher_information: measures on different grids");
    const int n = mu.n();
    const double h = mu.dx();
    constexpr double kFloor = 1e-12;

    // log h = log mu - log nu where both are meaningfully positive
    Vector logh(n);
    std::vector<bool> ok(n);
    for (int i = 0; i < n; ++i) {
        const double m = mu.density[i];
        const double v = nu.density[i];
        if (m > 0.0 && v <= 0.0)
            throw SingularDensity("fisher_information: nu vanishes where mu > 0");
        ok[i] = (m > kFloor && v > 0.0);
        logh[i] = ok[i] ? std::log(m) - std::log(v) : 0.0;
    }

    double acc = 0.0;
    for (int i = 0; i < n; ++i) {
        if (!ok[i]) continue;
        double d;
        if (i > 0 && i < n - 1 && ok[i - 1] && ok[i + 1])
            d = (logh[i + 1] - logh[i - 1]) / (2.0 * h);
        else if (i < n - 1 && ok[i + 1])
            d = (logh[i + 1] - logh[i]) / h;
        else if (i > 0 && ok[i - 1])
            d = (logh[i] - logh[i - 1]) / h;
        else
            continue;
        acc += d * d * mu.density[i];
    }
    return acc * h;
}

ParticleCloud sample(const GridMeasure& mu, int n, std::uint64_t seed) {
    if (n < 1) throw InvalidParameter("sample: need n >= 1");
    const int nc = mu.n();
    const double h = mu.dx();

    // cumulative mass at cell edges, normalized to end exactly at 1
    Vector cum(nc + 1);
    cum[0] = 0.0;
    for (int i = 0; i < nc; ++i) cum[i + 1] = cum[i] + mu.density[i] * h;
    const double total = cum[nc];
    cum /= total;
    cum[nc] = 1.0;

    Matrix pts(n, 1);
    for (int k = 0; k < n; ++k) {
        const double u = rng::uniform(seed, 0, static_cast<std::uint64_t>(k));
        // first edge with cum > u, then interpolate inside the cell
        const double* begin = cum.data();
        const double* it = std::upper_bound(begin, begin + nc + 1, u);
        int i = static_cast<int>(it - begin) - 1;
        i = std::clamp(i, 0, nc - 1);
        const double cell_mass = cum[i + 1] - cum[i];
        const double frac = cell_mass > 0 ? (u - cum[i]) / cell_mass : 0.0;
        pts(k, 0) = mu.lo + (i + frac) * h;
    }
    return ParticleCloud::uniform_weights(std::move(pts));
}

double moment(const GridMeasure& mu, int k) {
    if (k < 0) throw InvalidParameter("moment: order must be >= 0");
    if (k == 0) return mu.mass();
    return mu.integrate([k](double x) { return std::pow(std::abs(x), k); });
}

double moment(const ParticleCloud& cloud, int k) {
    if (k < 0) throw InvalidParameter("moment: order must be >= 0");
    if (k == 0) return cloud.weights.sum();
    double acc = 0.0;
    for (int i = 0; i < cloud.size(); ++i)
        acc += cloud.weights[i] * std::pow(cloud.points.row(i).norm(), k);
    return acc;
}

}  // namespace wfp
