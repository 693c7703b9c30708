#include "wfp/catalog.hpp"

#include <cmath>

namespace wfp {

namespace {

CatalogEntry make_1d(const std::string& name, std::function<double(double)> v,
                     std::function<double(double)> dv, std::optional<double> lambda1,
                     double lo, double hi, int n_cells) {
    CatalogEntry e;
    e.name = name;
    e.dim = 1;
    e.lo = lo;
    e.hi = hi;
    e.n_cells = n_cells;
    e.v1 = v;
    e.dv1 = dv;
    e.lambda1 = lambda1;
    e.V = [v](const Vector& x) { return v(x[0]); };
    e.gradV = [dv](const Vector& x) { return Vector::Constant(1, dv(x[0])); };

    const double h = (hi - lo) / n_cells;
    Vector raw(n_cells);
    for (int i = 0; i < n_cells; ++i) raw[i] = std::exp(-v(lo + (i + 0.5) * h));
    e.Z = raw.sum() * h;
    e.reference = normalize_grid(raw, lo, hi);
    return e;
}

CatalogEntry make_product(std::shared_ptr<const CatalogEntry> a,
                          std::shared_ptr<const CatalogEntry> b, const std::string& name) {
    CatalogEntry e;
    e.name = name;
    e.dim = 2;
    e.lo = std::min(a->lo, b->lo);
    e.hi = std::max(a->hi, b->hi);
    e.V = [a, b](const Vector& x) { return a->v1(x[0]) + b->v1(x[1]); };
    e.gradV = [a, b](const Vector& x) {
        Vector g(2);
        g[0] = a->dv1(x[0]);
        g[1] = b->dv1(x[1]);
        return g;
    };
    if (a->lambda1 && b->lambda1) e.lambda1 = std::min(*a->lambda1, *b->lambda1);
    e.Z = a->Z * b->Z;
    e.factors = {std::move(a), std::move(b)};
    return e;
}

}  // namespace

CatalogEntry catalog(const std::string& name, const CatalogParams& params) {
    const int n = params.n_cells;
    if (name == "gaussian") {
        return make_1d(
            name, [](double x) { return 0.5 * x * x; }, [](double x) { return x; }, 1.0, -8.0,
            8.0, n);
    }
    if (name == "quartic") {
        return make_1d(
            name, [](double x) { return x * x * x * x; },
            [](double x) { return 4.0 * x * x * x; }, 0.0, -4.0, 4.0, n);
    }
    if (name == "double_well") {
        // V'' = 3x^2 - 1, minimized at the origin
        return make_1d(
            name, [](double x) { return 0.25 * x * x * x * x - 0.5 * x * x; },
            [](double x) { return x * x * x - x; }, -1.0, -4.0, 4.0, n);
    }
    if (name == "product") {
        auto a = std::make_shared<const CatalogEntry>(catalog(params.factor1, params));
        auto b = std::make_shared<const CatalogEntry>(catalog(params.factor2, params));
        if (a->dim != 1 || b->dim != 1)
            throw UnknownCatalogEntry("product factors must be one-dimensional");
        return make_product(std::move(a), std::move(b), name);
    }
    if (name == "gaussian_2d") {
        auto g = std::make_shared<const CatalogEntry>(catalog("gaussian", params));
        CatalogEntry e = make_product(g, g, name);
        e.lambda1 = 1.0;
        return e;
    }
    throw UnknownCatalogEntry(name);
}

}  // namespace wfp
