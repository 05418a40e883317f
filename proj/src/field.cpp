#include "chb/field.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "chb/format.hpp"
#include "chb/reduced_model.hpp"

namespace chb {

namespace {

double smoothstep(double t) {
    t = std::clamp(t, 0.0, 1.0);
    return t * t * (3.0 - 2.0 * t);
}

double gradient_energy_sum(const TorusField& u) {
    const auto& v = u.values();
    double total = 0.0;
    for (int axis = 0; axis < u.dim().value(); ++axis) {
        for_each_axis_bond(u.cells_per_axis(), u.dim(), axis, [&](std::size_t i, std::size_t j) {
            const double diff = v[static_cast<Eigen::Index>(j)] - v[static_cast<Eigen::Index>(i)];
            total += diff * diff;
        });
    }
    const double h = u.spacing();
    return 0.5 * total / (h * h);
}

void require_same_torus(const TorusField& u, const ModelParams& params) {
    if (!(u.dim() == params.d) || std::abs(u.length() - params.length) > 1e-12 * params.length) {
        throw std::invalid_argument("field grid does not match model parameters");
    }
}

}  // namespace

void require_mean(const TorusField& u, double target, double tol, const char* what) {
    const double m = u.mean();
    if (!(std::abs(m - target) <= tol)) {
        throw std::invalid_argument(std::string(what) + ": mean constraint violated, measured mean " +
                                    format_double(m) + ", expected " + format_double(target));
    }
}

TorusField uniform_state(const ModelParams& params, int n) {
    return TorusField::constant(params.d, n, params.length, params.mean());
}

double energy(const TorusField& u) {
    double potential_sum = 0.0;
    for (double x : u.values()) potential_sum += double_well(x);
    return u.cell_volume() * (gradient_energy_sum(u) + potential_sum);
}

double energy_gap(const TorusField& u, const ModelParams& params) {
    require_same_torus(u, params);
    const double ubar = params.mean();
    require_mean(u, ubar, 1e-10, "energy_gap");
    const auto pb = potential(ubar);
    double density = 0.0;
    for (double x : u.values()) density += double_well(x) - pb.g - pb.g1 * (x - ubar);
    return u.cell_volume() * (gradient_energy_sum(u) + density);
}

PartitionWeights partition_weights(double u, double kappa) {
    if (!(kappa > 0.0 && kappa < 0.5)) throw std::invalid_argument("kappa must lie in (0, 1/2)");
    const double w1 = 1.0 - smoothstep((u - (-1.0 + kappa)) / kappa);
    const double w3 = smoothstep((u - (1.0 - 2.0 * kappa)) / kappa);
    return {w1, 1.0 - w1 - w3, w3};
}

double plus_phase_volume(const TorusField& u, double kappa) {
    if (!(kappa > 0.0 && kappa < 0.5)) throw std::invalid_argument("kappa must lie in (0, 1/2)");
    double total = 0.0;
    for (double x : u.values()) total += partition_weights(x, kappa).w3;
    return u.cell_volume() * total;
}

TorusField truncate_excess(const TorusField& u, const ModelParams& params, double kappa) {
    require_same_torus(u, params);
    if (!(kappa > 0.0 && kappa < 0.5)) throw std::invalid_argument("kappa must lie in (0, 1/2)");
    if (params.phi > kappa / 10.0) {
        throw std::invalid_argument("truncate_excess requires phi <= kappa/10 (phi = " +
                                    format_double(params.phi) + ", kappa = " + format_double(kappa) + ")");
    }
    const double ubar = params.mean();
    require_mean(u, ubar, 1e-10, "truncate_excess");

    const double cap = 1.0 + kappa;
    const auto& v = u.values();
    if (v.maxCoeff() <= cap) return u;

    // Mass after clamping outside {u <= ubar}, and what the low region holds.
    double kept = 0.0;
    double low = 0.0;
    std::size_t low_count = 0;
    for (double x : v) {
        if (x <= ubar) {
            low += x;
            ++low_count;
        } else {
            kept += std::min(x, cap);
        }
    }
    const double target = ubar * static_cast<double>(v.size());
    const double room = ubar * static_cast<double>(low_count) - low;
    if (low_count == 0 || room <= 0.0) {
        throw DomainError("cannot rebalance: the region {u <= -1+phi} is empty or already at -1+phi");
    }
    // Mean of the interpolated low region is linear in lambda.
    const double lambda = (target - kept - low) / room;
    if (!(lambda >= 0.0 && lambda <= 1.0)) {
        throw DomainError("cannot rebalance: required interpolation weight " + format_double(lambda) +
                          " outside [0,1]");
    }
    Eigen::VectorXd out(v.size());
    for (Eigen::Index i = 0; i < v.size(); ++i) {
        const double x = v[i];
        out[i] = x <= ubar ? (1.0 - lambda) * x + lambda * ubar : std::min(x, cap);
    }
    return TorusField(u.dim(), u.cells_per_axis(), u.length(), std::move(out));
}

double isoperimetric_profile(double v, const ModelParams& params, double eps0) {
    if (v < 0.0) throw std::invalid_argument("volume must be >= 0");
    if (v > eps0 * params.volume()) {
        throw DomainError("isoperimetric profile only valid for v <= eps0 L^d = " +
                          format_double(eps0 * params.volume()) + ", got v = " + format_double(v));
    }
    const double dd = params.d.as_double();
    return std::pow(sphere_area(params.d), 1.0 / dd) * std::pow(dd, (dd - 1.0) / dd) *
           std::pow(v, (dd - 1.0) / dd);
}

Certificate lower_bound_certificate(const TorusField& u, const ModelParams& params,
                                    const CertificateOptions& opts) {
    const auto coeff = certificate_coefficients(params.phi, params.d);
    const double kappa = std::cbrt(params.phi);
    const TorusField trimmed = truncate_excess(u, params, kappa);

    Certificate cert;
    cert.kappa = kappa;
    cert.c1 = coeff.c1;
    cert.c2 = coeff.c2;
    cert.c3 = coeff.c3;
    cert.V = plus_phase_volume(trimmed, kappa);
    const double dd = params.d.as_double();
    cert.bound_offcritical =
        coeff.c1 * std::pow(cert.V, (dd - 1.0) / dd) - params.phi * coeff.c2 * cert.V;

    std::string reason;
    const bool volume_ok = cert.V <= opts.eps0 * params.volume();
    if (!volume_ok) reason += "V exceeds eps0 L^d; ";
    const bool phi_ok = params.phi <= std::pow(opts.eps0 / 4.0, 0.75);
    if (!phi_ok) reason += "phi exceeds (eps0/4)^{3/4}; ";
    cert.hypotheses_ok = volume_ok && phi_ok;

    // Critical refinement: energy window and V >> phi^{-d+1}.
    const double window = reduced_barrier_height_any(critical_xi(params.d), params.d) *
                          std::pow(params.phi, 1.0 - dd);
    const double gap = energy_gap(u, params);
    const bool energy_ok = gap <= window;
    const bool large_v = cert.V >= opts.reg_factor * std::pow(params.phi, 1.0 - dd);
    if (!energy_ok) reason += "energy gap above C_{xi_d} phi^{-d+1}; ";
    if (!large_v) reason += "V not >> phi^{-d+1}; ";
    cert.critical_hypotheses_ok = cert.hypotheses_ok && energy_ok && large_v;
    if (cert.critical_hypotheses_ok) {
        cert.bound_critical = cert.bound_offcritical + coeff.c3 * std::pow(params.phi, dd + 1.0) *
                                                           std::pow(params.xi, -(dd + 1.0)) * cert.V *
                                                           cert.V;
    }
    cert.reason = reason.empty() ? "all hypotheses hold" : reason.substr(0, reason.size() - 2);
    return cert;
}

}  // namespace chb
