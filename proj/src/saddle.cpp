#include "chb/saddle.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "json.hpp"

#include "chb/field.hpp"
#include "chb/format.hpp"
#include "chb/parallel.hpp"

namespace chb {

namespace {

using Images = std::vector<TorusField>;

// Moves images strictly between lo and hi to equal L2 arc length; lo and hi stay fixed.
void reparameterize(Images& images, std::size_t lo, std::size_t hi) {
    if (hi <= lo + 1) return;
    std::vector<double> s(hi - lo + 1, 0.0);
    for (std::size_t k = lo + 1; k <= hi; ++k) {
        s[k - lo] = s[k - lo - 1] + (images[k].values() - images[k - 1].values()).norm();
    }
    const double total = s.back();
    if (!(total > 0.0)) return;
    std::vector<Eigen::VectorXd> fresh;
    fresh.reserve(hi - lo - 1);
    std::size_t j = 0;
    for (std::size_t k = 1; k < hi - lo; ++k) {
        const double target = total * static_cast<double>(k) / static_cast<double>(hi - lo);
        while (j + 1 < s.size() - 1 && s[j + 1] < target) ++j;
        const double width = s[j + 1] - s[j];
        const double w = width > 0.0 ? (target - s[j]) / width : 0.0;
        fresh.push_back((1.0 - w) * images[lo + j].values() + w * images[lo + j + 1].values());
    }
    for (std::size_t k = 1; k < hi - lo; ++k) images[lo + k].values() = std::move(fresh[k - 1]);
}

Eigen::VectorXd unit_tangent(const Images& images, std::size_t k) {
    Eigen::VectorXd tau = images[k + 1].values() - images[k - 1].values();
    const double norm = tau.norm();
    if (norm > 0.0) tau /= norm;
    return tau;
}

std::vector<double> arc_fractions(const Images& images) {
    std::vector<double> s(images.size(), 0.0);
    for (std::size_t k = 1; k < images.size(); ++k) {
        s[k] = s[k - 1] + (images[k].values() - images[k - 1].values()).norm();
    }
    if (s.back() > 0.0) {
        for (double& x : s) x /= s.back();
    }
    return s;
}

}  // namespace

Eigen::VectorXd discrete_laplacian(const TorusField& u) {
    const auto& v = u.values();
    Eigen::VectorXd lap = Eigen::VectorXd::Zero(v.size());
    for (int axis = 0; axis < u.dim().value(); ++axis) {
        for_each_axis_bond(u.cells_per_axis(), u.dim(), axis, [&](std::size_t i, std::size_t j) {
            const auto a = static_cast<Eigen::Index>(i);
            const auto b = static_cast<Eigen::Index>(j);
            const double diff = v[b] - v[a];
            lap[a] += diff;
            lap[b] -= diff;
        });
    }
    const double h = u.spacing();
    return lap / (h * h);
}

TorusField constrained_force(const TorusField& u) {
    Eigen::VectorXd slope = u.values().unaryExpr([](double x) { return double_well_slope(x); });
    Eigen::VectorXd f = discrete_laplacian(u) - slope;
    f.array() -= f.mean();
    return TorusField(u.dim(), u.cells_per_axis(), u.length(), std::move(f));
}

ElResidual euler_lagrange_residual(const TorusField& u) {
    Eigen::VectorXd slope = u.values().unaryExpr([](double x) { return double_well_slope(x); });
    const double lambda = slope.mean();
    Eigen::VectorXd r = -discrete_laplacian(u) + slope;
    r.array() -= lambda;
    return {lambda, std::sqrt(u.cell_volume()) * r.norm()};
}

double stable_step_bound(const TorusField& u) {
    const double h = u.spacing();
    return 2.0 / (4.0 * u.dim().as_double() / (h * h) + 2.0);
}

std::pair<PathProfile, SaddleResult> string_relax(const PathProfile& initial, const ModelParams& params,
                                                  const StringOptions& opts) {
    if (initial.images.size() < 3) throw std::invalid_argument("string_relax needs at least 3 images");
    if (initial.gap.size() != initial.images.size()) throw std::invalid_argument("path profile not evaluated");
    if (std::abs(initial.gap.front()) > 1e-9) {
        throw std::invalid_argument("string_relax: first image must be the uniform state (gap " +
                                    format_double(initial.gap.front()) + ")");
    }
    if (!(initial.end_gap < 0.0)) throw std::invalid_argument("string_relax: end image must have negative gap");
    if (opts.max_iter < 1) throw std::invalid_argument("max_iter must be positive");
    if (!(opts.tol > 0.0)) throw std::invalid_argument("tol must be positive");

    PathProfile path = initial;
    Images& images = path.images;
    const std::size_t N = images.size();
    double step = opts.step > 0.0 ? opts.step : 0.9 * stable_step_bound(images.front());
    const double ubar = params.mean();

    std::vector<double> gaps(N);
    std::vector<Eigen::VectorXd> forces(N);
    const auto update_gaps = [&] {
        parallel_for(N, [&](std::size_t k) { gaps[k] = energy_gap(images[k], params); });
    };
    update_gaps();

    std::size_t climber = 1;
    bool frozen = false;
    double previous_max = *std::max_element(gaps.begin(), gaps.end());
    int rising = 0;
    int halvings = 0;
    int iter = 0;
    double residual = INFINITY;
    double perpendicular = INFINITY;

    for (iter = 1; iter <= opts.max_iter; ++iter) {
        if (!frozen) {
            climber = static_cast<std::size_t>(std::max_element(gaps.begin() + 1, gaps.end() - 1) - gaps.begin());
            frozen = iter > opts.climb_after;
        }
        parallel_for(N - 2, [&](std::size_t m) { forces[m + 1] = constrained_force(images[m + 1]).values(); });

        // Diagnostics on the pre-step path.
        const double h_half = std::sqrt(images.front().cell_volume());
        residual = h_half * forces[climber].norm();
        perpendicular = 0.0;
        std::vector<Eigen::VectorXd> moves(N);
        for (std::size_t k = 1; k + 1 < N; ++k) {
            const Eigen::VectorXd tau = unit_tangent(images, k);
            const double along = forces[k].dot(tau);
            if (k == climber && frozen) {
                moves[k] = forces[k] - 2.0 * along * tau;
            } else {
                moves[k] = forces[k];
                if (k != climber) perpendicular = std::max(perpendicular, h_half * (forces[k] - along * tau).norm());
            }
        }
        if (frozen && residual <= opts.tol) break;

        for (std::size_t k = 1; k + 1 < N; ++k) images[k].values() += step * moves[k];
        if (frozen) {
            reparameterize(images, 0, climber);
            reparameterize(images, climber, N - 1);
        } else {
            reparameterize(images, 0, N - 1);
        }
        for (std::size_t k = 1; k + 1 < N; ++k) images[k].project_mean(ubar);
        for (const auto& img : images) {
            if (!img.values().allFinite() || img.values().lpNorm<Eigen::Infinity>() > 1e3) {
                throw DomainError("unstable step: field diverged; choose a smaller step than " + format_double(step));
            }
        }
        update_gaps();

        const double current_max = *std::max_element(gaps.begin(), gaps.end());
        rising = current_max > previous_max + 1e-3 * std::abs(previous_max) ? rising + 1 : 0;
        previous_max = current_max;
        if (rising >= 10) {
            if (halvings >= opts.max_halvings) {
                throw DomainError("unstable step: path maximum rose for 10 consecutive iterations; choose a step below " +
                                  format_double(step));
            }
            step *= 0.5;
            ++halvings;
            rising = 0;
        }
    }
    if (iter > opts.max_iter) iter = opts.max_iter;

    path.t = arc_fractions(images);
    path.evaluate(params);

    const auto el = euler_lagrange_residual(images[climber]);
    SaddleResult result{images[climber], gaps[climber], el.lambda, el.residual, iter, el.residual <= opts.tol,
                        climber, perpendicular};
    return {std::move(path), std::move(result)};
}

std::string saddle_summary_json(const SaddleResult& result) {
    nlohmann::ordered_json j;
    j["gap"] = result.gap;
    j["lambda"] = result.lambda;
    j["residual"] = result.residual;
    j["iterations"] = result.iterations;
    j["converged"] = result.converged;
    return j.dump();
}

}  // namespace chb
