#pragma once

// Mass-constrained string method with a climbing image, and Euler-Lagrange
// diagnostics for the mountain-pass critical point.

#include <string>
#include <utility>

#include "chb/construction.hpp"
#include "chb/params.hpp"
#include "chb/torus_field.hpp"

namespace chb {

/// 2d+1-point periodic Laplacian, consistent with the forward-difference energy.
Eigen::VectorXd discrete_laplacian(const TorusField& u);

/// Delta_h u - G'(u) + mean(G'(u)): the negative energy gradient (divided by
/// h^d) projected onto mean-zero perturbations. Output mean is zero.
TorusField constrained_force(const TorusField& u);

struct ElResidual {
    double lambda;    ///< mean of G'(u)
    double residual;  ///< h^{d/2} || -Delta_h u + G'(u) - lambda ||
};

ElResidual euler_lagrange_residual(const TorusField& u);

struct StringOptions {
    int max_iter = 20000;
    double step = 0.0;       ///< 0 selects 0.9 * 2 / (4d/h^2 + 2)
    double tol = 1e-5;       ///< climbing-image residual at which the run stops
    int climb_after = 200;   ///< plain string iterations before the climbing image is frozen
    int max_halvings = 4;    ///< step halvings on instability before giving up
};

struct SaddleResult {
    TorusField field;
    double gap = 0.0;
    double lambda = 0.0;
    double residual = 0.0;
    int iterations = 0;
    bool converged = false;
    std::size_t image = 0;          ///< index of the climbing image in the relaxed path
    double perpendicular_force = 0.0;  ///< max interior force normal to the path
};

/// Stable explicit step bound 2 / (4d/h^2 + 2) for fields within [-1, 1].
double stable_step_bound(const TorusField& u);

/// Requires gap[0] = 0 and end_gap < 0. Endpoints stay fixed.
/// Throws DomainError("unstable step ...") when the path maximum keeps growing.
std::pair<PathProfile, SaddleResult> string_relax(const PathProfile& initial, const ModelParams& params,
                                                  const StringOptions& opts = {});

/// {"gap", "lambda", "residual", "iterations", "converged"} in that order.
std::string saddle_summary_json(const SaddleResult& result);

}  // namespace chb
