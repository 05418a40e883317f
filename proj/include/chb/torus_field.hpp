#pragma once

#include <cstddef>
#include <Eigen/Core>

#include "chb/types.hpp"

namespace chb {

/// Scalar order parameter on a uniform periodic grid of the d-torus
/// [-L/2, L/2)^d with n cells per axis, stored row-major (last axis fastest).
/// Sample i along an axis sits at (i - n/2) h, so index n/2 is the origin.
class TorusField {
public:
    TorusField(Dimension d, int n, double length, Eigen::VectorXd values);

    static TorusField constant(Dimension d, int n, double length, double value);

    Dimension dim() const noexcept { return d_; }
    int cells_per_axis() const noexcept { return n_; }
    double length() const noexcept { return length_; }
    double spacing() const noexcept { return length_ / n_; }
    /// h^d
    double cell_volume() const noexcept;
    std::size_t size() const noexcept { return static_cast<std::size_t>(values_.size()); }

    const Eigen::VectorXd& values() const noexcept { return values_; }
    Eigen::VectorXd& values() noexcept { return values_; }

    double mean() const { return values_.mean(); }
    /// Shift all values by the discrete mean defect.
    void project_mean(double target) { values_.array() += target - mean(); }

    /// Coordinate of cell `index` along `axis`.
    double coordinate(std::size_t index, int axis) const noexcept;
    /// Distance from the sample at the origin (torus-minimal).
    double radius(std::size_t index) const noexcept;

    bool same_grid(const TorusField& other) const noexcept {
        return d_ == other.d_ && n_ == other.n_ && length_ == other.length_;
    }

private:
    Dimension d_;
    int n_;
    double length_;
    Eigen::VectorXd values_;
};

std::size_t grid_size(int n, Dimension d);

/// Calls fn(i, j) once for every forward bond i -> i + e_axis (periodic),
/// in a fixed order.
template <class Fn>
void for_each_axis_bond(int n, Dimension d, int axis, Fn&& fn) {
    std::size_t stride = 1;
    for (int a = axis + 1; a < d.value(); ++a) stride *= static_cast<std::size_t>(n);
    const std::size_t block = stride * static_cast<std::size_t>(n);
    const std::size_t total = grid_size(n, d);
    for (std::size_t base = 0; base < total; base += block) {
        for (int c = 0; c < n; ++c) {
            const std::size_t row = base + static_cast<std::size_t>(c) * stride;
            const std::size_t next = base + static_cast<std::size_t>((c + 1) % n) * stride;
            for (std::size_t k = 0; k < stride; ++k) fn(row + k, next + k);
        }
    }
}

/// Grid L2 inner product h^d <a, b>.
double grid_dot(const TorusField& a, const TorusField& b);
double grid_norm(const TorusField& a);

}  // namespace chb
