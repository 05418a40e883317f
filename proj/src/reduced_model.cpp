#include "chb/reduced_model.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>
#include <stdexcept>

#include "json.hpp"

#include "chb/format.hpp"
#include "chb/numerics.hpp"
#include "chb/params.hpp"

namespace chb {

double interface_cost() { return 2.0 * std::numbers::sqrt2 / 3.0; }

double sphere_area(Dimension d) {
    const double half = 0.5 * d.as_double();
    return 2.0 * std::exp(half * std::log(std::numbers::pi) - std::lgamma(half));
}

double cbar1(Dimension d) {
    const double dd = d.as_double();
    return interface_cost() * std::pow(sphere_area(d), 1.0 / dd) * std::pow(dd, (dd - 1.0) / dd);
}

namespace {

double reduced_energy_k(double nu, double quad_coeff, Dimension d) {
    if (nu < 0.0) throw std::invalid_argument("reduced energy: nu must be >= 0");
    if (nu == 0.0) return 0.0;
    const double dd = d.as_double();
    return cbar1(d) * std::pow(nu, (dd - 1.0) / dd) - 4.0 * nu + 4.0 * quad_coeff * nu * nu;
}

// f_xi'(nu) for finite quadratic coefficient k = xi^{-(d+1)}.
double reduced_slope(double nu, double k, Dimension d) {
    const double dd = d.as_double();
    return cbar1(d) * (dd - 1.0) / dd * std::pow(nu, -1.0 / dd) - 4.0 + 8.0 * k * nu;
}

// Inflection point of f_xi: f'' = 0.
double reduced_inflection(double k, Dimension d) {
    const double dd = d.as_double();
    return std::pow(cbar1(d) * (dd - 1.0) / (8.0 * k * dd * dd), dd / (dd + 1.0));
}

}  // namespace

double reduced_energy(double nu, Xi xi, Dimension d) {
    return reduced_energy_k(nu, xi.inverse_power(d), d);
}

double reduced_energy_phiL(double nu, const ModelParams& params) {
    const double dd = params.d.as_double();
    const double k = 1.0 / (std::pow(params.phi, dd + 1.0) * std::pow(params.length, dd));
    return reduced_energy_k(nu, k, params.d);
}

CertificateCoefficients certificate_coefficients(double phi, Dimension d) {
    if (!(phi > 0.0 && phi < 1.0)) throw std::invalid_argument("phi must lie in (0,1)");
    const double cube_root = std::cbrt(phi);
    if (8.0 * cube_root >= 1.0) {
        throw DomainError("phi too large for certificate: need 8 phi^{1/3} < 1, got phi = " +
                          format_double(phi));
    }
    const double dd = d.as_double();
    const double c1 = std::sqrt(1.0 - 8.0 * cube_root) *
                      (interface_cost() - 8.0 * std::numbers::sqrt2 * cube_root * cube_root) *
                      std::pow(sphere_area(d), 1.0 / dd) * std::pow(dd, (dd - 1.0) / dd);
    // G'(-1+phi) = phi (1-phi) (2-phi)
    const double g1 = phi * (1.0 - phi) * (2.0 - phi);
    const double c2 = (2.0 + cube_root) * g1 / phi;
    const double t = -1.0 + 2.0 * cube_root;
    const double g2 = 3.0 * t * t - 1.0;
    const double c3 = 0.5 * g2 * std::pow(2.0 - 2.0 * cube_root - phi, 2) * (1.0 - 2.0 * cube_root);
    return {c1, c2, c3};
}

double critical_xi(Dimension d) {
    const double dd = d.as_double();
    return std::pow(interface_cost(), dd / (dd + 1.0)) * std::pow(sphere_area(d), 1.0 / (dd + 1.0)) *
           (dd + 1.0) / (std::pow(4.0, dd / (dd + 1.0)) * std::pow(dd, 1.0 / (dd + 1.0)));
}

OffCriticalBarrier barrier_constant_offcritical(Dimension d) {
    const double dd = d.as_double();
    const double nu_m = std::pow(cbar1(d) * (dd - 1.0) / (4.0 * dd), dd);
    const double c_star = sphere_area(d) * std::pow(interface_cost(), dd) / dd *
                          std::pow((dd - 1.0) / 4.0, dd - 1.0);
    const double check = reduced_energy(nu_m, Xi::infinite(), d);
    if (std::abs(check - c_star) > 1e-12 * std::abs(c_star)) {
        throw std::logic_error("closed-form barrier constant disagrees with f_inf(nu_m)");
    }
    return {nu_m, c_star};
}

std::optional<double> reduced_local_min(double xi, Dimension d) {
    const double k = std::pow(xi, -(d.as_double() + 1.0));
    const double nu_c = reduced_inflection(k, d);
    if (reduced_slope(nu_c, k, d) >= 0.0) return std::nullopt;
    double hi = 2.0 * nu_c;
    while (reduced_slope(hi, k, d) <= 0.0) hi *= 2.0;
    return numerics::bisect([&](double nu) { return reduced_slope(nu, k, d); }, nu_c, hi);
}

CriticalBarrier barrier_constant_critical(double xi, Dimension d) {
    const double xi_d = critical_xi(d);
    if (!(xi > xi_d)) {
        throw DomainError("no positive zero of f_xi: xi = " + format_double(xi) +
                          " <= xi_d = " + format_double(xi_d));
    }
    const Xi tag = Xi::finite(xi);
    auto f = [&](double nu) { return reduced_energy(nu, tag, d); };
    const auto nu_min = reduced_local_min(xi, d);
    if (!nu_min || f(*nu_min) >= 0.0) {
        throw DomainError("no positive zero of f_xi at xi = " + format_double(xi) +
                          " (too close to xi_d for double precision)");
    }
    // f_xi >= f_inf > 0 at the off-critical maximizer, and f_xi is increasing there.
    const double lo = barrier_constant_offcritical(d).nu_m;
    const double nu_xi = numerics::bisect(f, lo, *nu_min);
    const auto peak = numerics::golden_section_max(f, 0.0, nu_xi, 1e-10);
    return {nu_xi, std::max(peak.value, 0.0)};
}

CriticalBarrier barrier_constant(Xi xi, Dimension d) {
    if (!xi.is_infinite()) return barrier_constant_critical(xi.value(), d);
    const auto off = barrier_constant_offcritical(d);
    auto f = [&](double nu) { return reduced_energy(nu, xi, d); };
    double hi = 2.0 * off.nu_m;
    while (f(hi) >= 0.0) hi *= 2.0;
    return {numerics::bisect(f, off.nu_m, hi), off.c_star};
}

double reduced_barrier_height_any(double xi, Dimension d) {
    const auto nu_min = reduced_local_min(xi, d);
    if (!nu_min) return std::numeric_limits<double>::infinity();
    const Xi tag = Xi::finite(xi);
    return numerics::golden_section_max([&](double nu) { return reduced_energy(nu, tag, d); }, 0.0,
                                        *nu_min, 1e-10)
        .value;
}

ReducedCurve sample_reduced_curve(Xi xi, Dimension d, int samples, std::optional<double> nu_hi) {
    if (samples < 2) throw std::invalid_argument("reduced curve needs at least 2 samples");
    const double hi = nu_hi.value_or(xi.is_infinite() ? 2.0 * std::pow(cbar1(d) / 4.0, d.as_double())
                                                      : std::pow(xi.value(), d.as_double() + 1.0));
    if (!(hi > 0.0)) throw std::invalid_argument("reduced curve range must be positive");

    ReducedCurve curve{xi, d, {}, std::nullopt, 0.0, 0.0};
    curve.samples.reserve(static_cast<std::size_t>(samples));
    for (int i = 0; i < samples; ++i) {
        const double nu = hi * static_cast<double>(i) / static_cast<double>(samples - 1);
        curve.samples.emplace_back(nu, reduced_energy(nu, xi, d));
    }
    curve.samples.front().second = 0.0;

    auto f = [&](double nu) { return reduced_energy(nu, xi, d); };
    std::optional<double> window;
    if (xi.is_infinite() || xi.value() > critical_xi(d)) {
        try {
            curve.nu_zero = barrier_constant(xi, d).nu_xi;
            window = curve.nu_zero;
        } catch (const DomainError&) {
        }
    }
    if (!window && !xi.is_infinite()) window = reduced_local_min(xi.value(), d);
    if (window) {
        const auto peak = numerics::golden_section_max(f, 0.0, *window, 1e-10);
        curve.nu_max = peak.x;
        curve.f_max = peak.value;
    } else {
        const auto best = std::max_element(curve.samples.begin(), curve.samples.end(),
                                           [](auto& a, auto& b) { return a.second < b.second; });
        curve.nu_max = best->first;
        curve.f_max = best->second;
    }
    return curve;
}

std::string reduced_curve_csv(const ReducedCurve& curve) {
    std::ostringstream out;
    out << "nu,f\n";
    for (const auto& [nu, f] : curve.samples) out << format_double(nu) << ',' << format_double(f) << '\n';
    return out.str();
}

std::string reduced_curve_summary_json(const ReducedCurve& curve) {
    nlohmann::ordered_json j;
    if (curve.xi.is_infinite()) {
        j["xi"] = "inf";
    } else {
        j["xi"] = curve.xi.value();
    }
    j["d"] = curve.d.value();
    j["nu_zero"] = curve.nu_zero ? nlohmann::ordered_json(*curve.nu_zero) : nlohmann::ordered_json(nullptr);
    j["nu_max"] = curve.nu_max;
    j["f_max"] = curve.f_max;
    return j.dump();
}

}  // namespace chb
