#include "chb/construction.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <sstream>
#include <stdexcept>

#include "chb/field.hpp"
#include "chb/field_io.hpp"
#include "chb/format.hpp"
#include "chb/numerics.hpp"
#include "chb/parallel.hpp"
#include "chb/reduced_model.hpp"

namespace chb {

namespace {

constexpr double inv_sqrt2 = 1.0 / std::numbers::sqrt2;

// Radial profile clamped_kink(|x| - r, R) + alpha with alpha from the mean.
Droplet radial_droplet(double r, double R, const ModelParams& params, int n) {
    TorusField u = TorusField::constant(params.d, n, params.length, 0.0);
    auto& v = u.values();
    for (Eigen::Index i = 0; i < v.size(); ++i) {
        v[i] = clamped_kink(u.radius(static_cast<std::size_t>(i)) - r, R);
    }
    const double alpha = params.mean() - v.mean();
    v.array() += alpha;
    DropletSpec spec;
    spec.R = R;
    spec.r_eta = r;
    spec.alpha_exact = alpha;
    return {std::move(u), spec};
}

double volume_fraction_of_radius(double r, const ModelParams& params) {
    const double dd = params.d.as_double();
    return sphere_area(params.d) / dd * std::pow(r, dd) / (0.5 * params.phi * params.volume());
}

}  // namespace

double kink(double x) { return -std::tanh(x * inv_sqrt2); }

double clamped_kink(double x, double R) {
    if (!(R >= 1.0)) throw std::invalid_argument("clamped_kink requires R >= 1");
    const double ax = std::abs(x);
    if (ax < R) return kink(x);
    const double sign = x > 0.0 ? 1.0 : -1.0;
    if (ax > 2.0 * R) return -sign;
    // Kink tail damped by a quintic smoothstep w on [R, 2R]: w(0) = 1 and
    // w(1) = 0 with vanishing first and second derivatives at both ends, so the
    // profile is C2 and, as a product of positive decreasing factors, monotone.
    const double t = (ax - R) / R;
    const double w = 1.0 - t * t * t * (10.0 - 15.0 * t + 6.0 * t * t);
    const double e = std::exp(-std::numbers::sqrt2 * ax);
    const double tail = 2.0 * e / (1.0 + e);  // 1 + kink(ax)
    const double blend = -1.0 + tail * w;
    return sign * blend;
}

double kink_mass_moment(Dimension d) {
    static const double moment = 2.0 * numerics::integrate(
                                           [](double s) { return (1.0 + kink(s)) * s; }, 0.0, 80.0, 1e-14);
    return (d.as_double() - 1.0) * sphere_area(d) * moment;
}

double droplet_radius(double eta, const ModelParams& params) {
    if (!(eta >= 0.0 && eta <= 1.0)) throw std::invalid_argument("eta must lie in [0,1]");
    const double dd = params.d.as_double();
    return std::pow(eta, 1.0 / dd) *
           std::pow(params.phi * dd / (2.0 * sphere_area(params.d)), 1.0 / dd) * params.length;
}

Droplet droplet_state(double eta, double R, const ModelParams& params, int n) {
    const double r = droplet_radius(eta, params);
    if (eta == 0.0) {
        DropletSpec spec{0.0, R, 0.0, params.phi, params.phi};
        return {uniform_state(params, n), spec};
    }
    if (r > 0.25 * params.length) {
        throw DomainError("droplet too large for torus: r_eta = " + format_double(r) + " > L/4 = " +
                          format_double(0.25 * params.length));
    }
    if (R > r * (1.0 + 1e-12)) {
        throw std::invalid_argument("droplet_state requires R <= r_eta (R = " + format_double(R) +
                                    ", r_eta = " + format_double(r) + ")");
    }
    Droplet out = radial_droplet(r, R, params, n);
    out.spec.eta = eta;
    if (1.0 - eta >= 100.0 * params.phi * params.phi) out.spec.alpha_asymptotic = alpha_asymptotic(eta, R, params);
    return out;
}

double alpha_asymptotic(double eta, double R, const ModelParams& params) {
    if (!(1.0 - eta >= 100.0 * params.phi * params.phi)) {
        throw DomainError("alpha asymptotics need 1 - eta >> phi^2 (enforced as 1 - eta >= 100 phi^2)");
    }
    if (!(R >= 1.0)) throw std::invalid_argument("alpha_asymptotic requires R >= 1");
    const double dd = params.d.as_double();
    const double r = droplet_radius(eta, params);
    return params.phi * (1.0 - eta) - kink_mass_moment(params.d) * std::pow(r, dd - 2.0) / params.volume();
}

double droplet_gap_asymptotic(double eta, const ModelParams& params, bool offcritical) {
    const double dd = params.d.as_double();
    const double V = eta * params.phi * params.volume() / 2.0;
    double gap = cbar1(params.d) * std::pow(V, (dd - 1.0) / dd) - 4.0 * params.phi * V;
    if (!offcritical) gap += 4.0 * V * V / params.volume();
    return gap;
}

TorusField seed_segment(double lambda, double R, const ModelParams& params, int n) {
    if (!(lambda >= 0.0 && lambda <= 1.0)) throw std::invalid_argument("lambda must lie in [0,1]");
    if (!(R >= 1.0)) throw std::invalid_argument("seed segment requires R >= 1");
    if (3.0 * R > 0.5 * params.length) throw DomainError("seed droplet does not fit in the torus");
    TorusField w = radial_droplet(R, R, params, n).field;
    w.values() = (1.0 - lambda) * params.mean() + lambda * w.values().array();
    return w;
}

double default_clamp_width(const ModelParams& params) {
    const double dd = params.d.as_double();
    const double upper = std::min(0.2 * std::pow(params.phi, -1.0 + 1.0 / dd), 3.0 / std::sqrt(params.phi));
    return std::max(2.0, upper);
}

void PathProfile::evaluate(const ModelParams& params) {
    const std::size_t count = images.size();
    gap.assign(count, 0.0);
    V.assign(count, 0.0);
    parallel_for(count, [&](std::size_t k) {
        gap[k] = energy_gap(images[k], params);
        V[k] = plus_phase_volume(images[k], kappa);
    });
    max_index = static_cast<std::size_t>(std::max_element(gap.begin(), gap.end()) - gap.begin());
    max_gap = gap[max_index];
    end_gap = gap.back();
}

PathProfile barrier_path(const ModelParams& params, int n, double R, int n_images,
                         const BarrierPathOptions& opts) {
    if (!(R >= 1.0)) throw std::invalid_argument("barrier_path requires R >= 1");
    if (n_images < 16) throw std::invalid_argument("barrier_path requires at least 16 images");
    const Dimension d = params.d;
    const double eta_seed = volume_fraction_of_radius(R, params);
    if (!(eta_seed < 1.0)) throw DomainError("seed radius R holds more than the excess mass");

    // Endpoint search: start at the reduced model's zero, grow until the gap is negative.
    double nu_start = 0.0;
    if (params.xi > critical_xi(d)) {
        try {
            nu_start = barrier_constant_critical(params.xi, d).nu_xi;
        } catch (const DomainError&) {
            nu_start = barrier_constant_offcritical(d).nu_m;
        }
    } else {
        nu_start = reduced_local_min(params.xi, d).value_or(barrier_constant_offcritical(d).nu_m);
    }
    const double xi_pow = std::pow(params.xi, d.as_double() + 1.0);
    double eta_end = std::max(2.0 * nu_start / xi_pow, eta_seed);
    const std::string subcritical =
        "no lower state found; parameters likely subcritical (xi = " + format_double(params.xi) +
        ", xi_d = " + format_double(critical_xi(d)) + ")";
    for (;;) {
        if (droplet_radius(eta_end, params) > 0.25 * params.length) throw DomainError(subcritical);
        const Droplet candidate = droplet_state(eta_end, R, params, n);
        if (energy_gap(candidate.field, params) < 0.0) break;
        if (eta_end >= 1.0) throw DomainError(subcritical);
        eta_end = std::min(1.0, eta_end * opts.eta_growth);
    }

    PathProfile path;
    path.kappa = opts.kappa;
    const auto total = static_cast<std::size_t>(n_images);
    path.seed_images = std::max<std::size_t>(4, total / 4);
    const std::size_t droplet_images = total - path.seed_images;
    path.images.reserve(total);
    for (std::size_t k = 0; k < total; ++k) {
        path.t.push_back(static_cast<double>(k) / static_cast<double>(total - 1));
        path.images.push_back(TorusField::constant(d, n, params.length, params.mean()));
    }
    parallel_for(total, [&](std::size_t k) {
        if (k < path.seed_images) {
            const double lambda = static_cast<double>(k) / static_cast<double>(path.seed_images);
            path.images[k] = seed_segment(lambda, R, params, n);
        } else {
            const double s = static_cast<double>(k - path.seed_images) / static_cast<double>(droplet_images - 1);
            const double eta = eta_seed + s * (eta_end - eta_seed);
            path.images[k] = k == path.seed_images ? radial_droplet(R, R, params, n).field
                                                   : droplet_state(eta, R, params, n).field;
        }
    });
    path.evaluate(params);
    return path;
}

std::string path_profile_csv(const PathProfile& path) {
    std::ostringstream out;
    out << "t,gap,V\n";
    for (std::size_t k = 0; k < path.t.size(); ++k) {
        out << format_double(path.t[k]) << ',' << format_double(path.gap[k]) << ',' << format_double(path.V[k])
            << '\n';
    }
    return out.str();
}

void write_path_snapshots(const std::filesystem::path& dir, const PathProfile& path, double phi) {
    std::filesystem::create_directories(dir);
    for (std::size_t k = 0; k < path.images.size(); ++k) {
        char name[32];
        std::snprintf(name, sizeof name, "image_%04zu.chf", k);
        write_chf(dir / name, path.images[k], phi);
    }
}

}  // namespace chb
