#pragma once

#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "wfp/measures.hpp"

namespace wfp {

// A reference potential V with its gradient, convexity lower bound and
// normalizer Z, so that e^{-V}/Z is a probability density. 1D entries carry
// the discretized reference measure on their quadrature domain.
struct CatalogEntry {
    std::string name;
    int dim = 1;

    std::function<double(const Vector&)> V;
    std::function<Vector(const Vector&)> gradV;
    std::optional<double> lambda1;  // lower bound on the Hessian of V
    double Z = 1.0;                 // int e^{-V} dx over the quadrature domain

    // quadrature domain (per axis) and 1D reference measure
    double lo = -8.0;
    double hi = 8.0;
    int n_cells = 0;
    GridMeasure reference;  // only meaningful when dim == 1

    // scalar forms, set when dim == 1
    std::function<double(double)> v1;
    std::function<double(double)> dv1;

    // factor entries for product measures (dim == 2)
    std::vector<std::shared_ptr<const CatalogEntry>> factors;
};

struct CatalogParams {
    int n_cells = 4001;  // resolution of 1D reference grids
    std::string factor1 = "quartic";
    std::string factor2 = "gaussian";  // factors used by "product"
};

// Known names: gaussian, quartic, double_well, product, gaussian_2d.
CatalogEntry catalog(const std::string& name, const CatalogParams& params = {});

}  // namespace wfp
