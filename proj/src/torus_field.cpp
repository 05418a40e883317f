#include "chb/torus_field.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace chb {

std::size_t grid_size(int n, Dimension d) {
    std::size_t total = 1;
    for (int a = 0; a < d.value(); ++a) total *= static_cast<std::size_t>(n);
    return total;
}

TorusField::TorusField(Dimension d, int n, double length, Eigen::VectorXd values)
    : d_(d), n_(n), length_(length), values_(std::move(values)) {
    if (n < 2) throw std::invalid_argument("grid needs at least 2 cells per axis");
    if (!(length > 0.0)) throw std::invalid_argument("torus side must be positive");
    if (static_cast<std::size_t>(values_.size()) != grid_size(n, d)) {
        throw std::invalid_argument("field payload has " + std::to_string(values_.size()) +
                                    " values, expected " + std::to_string(grid_size(n, d)));
    }
    if (!values_.allFinite()) throw std::invalid_argument("field contains non-finite values");
}

TorusField TorusField::constant(Dimension d, int n, double length, double value) {
    if (n < 2) throw std::invalid_argument("grid needs at least 2 cells per axis");
    return TorusField(d, n, length,
                      Eigen::VectorXd::Constant(static_cast<Eigen::Index>(grid_size(n, d)), value));
}

double TorusField::cell_volume() const noexcept { return std::pow(spacing(), d_.as_double()); }

double TorusField::coordinate(std::size_t index, int axis) const noexcept {
    std::size_t stride = 1;
    for (int a = axis + 1; a < d_.value(); ++a) stride *= static_cast<std::size_t>(n_);
    const auto c = static_cast<long>((index / stride) % static_cast<std::size_t>(n_));
    return static_cast<double>(c - n_ / 2) * spacing();
}

double TorusField::radius(std::size_t index) const noexcept {
    double r2 = 0.0;
    for (int a = 0; a < d_.value(); ++a) {
        const double x = coordinate(index, a);
        r2 += x * x;
    }
    return std::sqrt(r2);
}

double grid_dot(const TorusField& a, const TorusField& b) {
    if (!a.same_grid(b)) throw std::invalid_argument("grid_dot: fields live on different grids");
    return a.cell_volume() * a.values().dot(b.values());
}

double grid_norm(const TorusField& a) { return std::sqrt(grid_dot(a, a)); }

}  // namespace chb
