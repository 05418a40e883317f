#pragma once

#include <cmath>
#include <string>

#include "chb/types.hpp"

namespace chb {

/// Torus side L, mean offset phi (mean = -1 + phi) and dimension.
/// xi = phi L^{d/(d+1)} is derived and cached.
struct ModelParams {
    ModelParams(Dimension d, double length, double phi);

    /// L chosen so that phi L^{d/(d+1)} = xi.
    static ModelParams from_xi(Dimension d, double xi, double phi);

    Dimension d;
    double length;
    double phi;
    double xi;

    double mean() const noexcept { return -1.0 + phi; }
    double volume() const noexcept { return std::pow(length, d.as_double()); }
    /// Diagnostic only: "critical-like" when xi <= 10.
    std::string regime() const { return xi <= 10.0 ? "critical-like" : "off-critical-like"; }
};

}  // namespace chb
