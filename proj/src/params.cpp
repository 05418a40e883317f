#include "chb/params.hpp"

#include <stdexcept>

namespace chb {

double Xi::inverse_power(Dimension d) const {
    if (infinite_) return 0.0;
    return std::pow(value_, -(d.as_double() + 1.0));
}

ModelParams::ModelParams(Dimension dim, double L, double ph) : d(dim), length(L), phi(ph) {
    if (!(phi > 0.0 && phi < 1.0)) {
        throw std::invalid_argument("phi must lie in (0,1), got " + std::to_string(phi));
    }
    if (!(length > 0.0) || !std::isfinite(length)) {
        throw std::invalid_argument("length must be positive, got " + std::to_string(length));
    }
    const double dd = d.as_double();
    xi = phi * std::pow(length, dd / (dd + 1.0));
}

ModelParams ModelParams::from_xi(Dimension d, double xi, double phi) {
    if (!(xi > 0.0)) throw std::invalid_argument("xi must be positive");
    if (!(phi > 0.0 && phi < 1.0)) throw std::invalid_argument("phi must lie in (0,1)");
    const double dd = d.as_double();
    return ModelParams(d, std::pow(xi / phi, (dd + 1.0) / dd), phi);
}

}  // namespace chb
