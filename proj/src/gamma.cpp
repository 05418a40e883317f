#include "chb/gamma.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

#include "json.hpp"

#include "chb/construction.hpp"
#include "chb/field.hpp"
#include "chb/format.hpp"
#include "chb/parallel.hpp"
#include "chb/reduced_model.hpp"

namespace chb {

RescaledParams::RescaledParams(Dimension d_, double xi_, double phi_) : d(d_), xi(xi_), phi(phi_) {
    if (!(phi > 0.0 && phi < 1.0)) throw std::invalid_argument("phi must lie in (0,1), got " + format_double(phi));
    if (!(xi > 0.0) || !std::isfinite(xi)) throw std::invalid_argument("xi must be a positive finite number");
}

double RescaledParams::length() const {
    const double dd = d.as_double();
    return std::pow(xi / phi, (dd + 1.0) / dd);
}

double RescaledParams::domain_side() const { return phi * length(); }

LimitSet::LimitSet(double r) : radius(r) {
    if (!(r > 0.0)) throw std::invalid_argument("limit set radius must be positive");
}

double LimitSet::volume(Dimension d) const { return sphere_area(d) / d.as_double() * std::pow(radius, d.as_double()); }

double LimitSet::perimeter(Dimension d) const { return sphere_area(d) * std::pow(radius, d.as_double() - 1.0); }

double rescaled_gap(const TorusField& u, const RescaledParams& rp) {
    if (!(u.dim() == rp.d) || std::abs(u.length() - rp.domain_side()) > 1e-12 * rp.domain_side()) {
        throw std::invalid_argument("field grid does not match the rescaled box");
    }
    require_mean(u, rp.mean(), 1e-10, "rescaled_gap");
    const auto& v = u.values();
    double grad = 0.0;
    for (int axis = 0; axis < u.dim().value(); ++axis) {
        for_each_axis_bond(u.cells_per_axis(), u.dim(), axis, [&](std::size_t i, std::size_t j) {
            const double diff = v[static_cast<Eigen::Index>(j)] - v[static_cast<Eigen::Index>(i)];
            grad += diff * diff;
        });
    }
    const double h = u.spacing();
    const double gb = double_well(rp.mean());
    double bulk = 0.0;
    for (double x : v) bulk += double_well(x) - gb;
    return u.cell_volume() * (0.5 * rp.phi * grad / (h * h) + bulk / rp.phi);
}

double limit_functional(const LimitSet& c, Xi xi, Dimension d) {
    const double vol = c.volume(d);
    return interface_cost() * c.perimeter(d) - 4.0 * vol + 4.0 * xi.inverse_power(d) * vol * vol;
}

RecoveryField recovery_field(const LimitSet& c, const RescaledParams& rp, int n) {
    const double side = rp.domain_side();
    if (!(2.0 * c.radius + 4.0 * std::sqrt(rp.phi) < side)) {
        throw DomainError("ball too large for rescaled domain: 2r + 4 phi^{1/2} = " +
                          format_double(2.0 * c.radius + 4.0 * std::sqrt(rp.phi)) + " >= side " +
                          format_double(side));
    }
    const double R = 1.0 / std::sqrt(rp.phi);
    TorusField u = TorusField::constant(rp.d, n, side, 0.0);
    auto& v = u.values();
    for (Eigen::Index i = 0; i < v.size(); ++i) {
        v[i] = clamped_kink((u.radius(static_cast<std::size_t>(i)) - c.radius) / rp.phi, R);
    }
    const double alpha = rp.mean() - v.mean();
    v.array() += alpha;
    return {std::move(u), alpha};
}

double recovery_alpha_leading(const LimitSet& c, const RescaledParams& rp) {
    return rp.phi * (1.0 - 2.0 * c.volume(rp.d) / std::pow(rp.xi, rp.d.as_double() + 1.0));
}

int recovery_grid(const RescaledParams& rp, double resolution) {
    if (!(resolution > 0.0)) throw std::invalid_argument("resolution must be positive");
    int n = static_cast<int>(std::ceil(rp.domain_side() / (resolution * rp.phi)));
    if (n % 2 != 0) ++n;
    return std::max(n, 2);
}

SweepResult convergence_sweep(const LimitSet& c, double xi, Dimension d, const std::vector<double>& phis,
                              double resolution) {
    if (phis.empty()) throw std::invalid_argument("convergence_sweep needs at least one phi");
    for (std::size_t k = 1; k < phis.size(); ++k) {
        if (!(phis[k] < phis[k - 1])) throw std::invalid_argument("phis must be strictly decreasing");
    }
    const double limit = limit_functional(c, Xi::finite(xi), d);
    SweepResult out;
    out.rows.resize(phis.size());
    parallel_for(phis.size(), [&](std::size_t k) {
        const RescaledParams rp(d, xi, phis[k]);
        const int n = recovery_grid(rp, resolution);
        const auto rec = recovery_field(c, rp, n);
        const double value = rescaled_gap(rec.field, rp);
        const double err = std::abs(value - limit);
        out.rows[k] = {phis[k], n, value, limit, err, err / std::abs(limit), rec.alpha,
                       recovery_alpha_leading(c, rp)};
    });

    out.monotone = true;
    for (std::size_t k = 1; k < out.rows.size(); ++k) {
        if (!(out.rows[k].abs_error < out.rows[k - 1].abs_error)) out.monotone = false;
    }
    out.fitted_exponent = 0.0;
    if (out.rows.size() >= 2) {
        double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
        const double m = static_cast<double>(out.rows.size());
        for (const auto& row : out.rows) {
            const double x = std::log(row.phi);
            const double y = std::log(row.abs_error);
            sx += x;
            sy += y;
            sxx += x * x;
            sxy += x * y;
        }
        out.fitted_exponent = (m * sxy - sx * sy) / (m * sxx - sx * sx);
    }
    return out;
}

std::string sweep_csv(const SweepResult& sweep) {
    std::ostringstream out;
    out << "phi,rescaled_gap,limit,abs_error,rel_error\n";
    for (const auto& row : sweep.rows) {
        out << format_double(row.phi) << ',' << format_double(row.rescaled_gap) << ',' << format_double(row.limit)
            << ',' << format_double(row.abs_error) << ',' << format_double(row.rel_error) << '\n';
    }
    return out.str();
}

std::string sweep_summary_json(const SweepResult& sweep) {
    nlohmann::ordered_json j;
    j["fitted_exponent"] = sweep.fitted_exponent;
    j["monotone"] = sweep.monotone;
    return j.dump();
}

}  // namespace chb
