#pragma once

// Energy of discretized order parameters on the torus, the mean-constrained
// energy gap, the smooth three-phase partition and the lower-bound
// certificate built from it.

#include <optional>
#include <string>

#include "chb/params.hpp"
#include "chb/torus_field.hpp"

namespace chb {

/// Double well G(u) = (1 - u^2)^2 / 4 and its first two derivatives.
template <class Scalar>
struct Potential {
    Scalar g;
    Scalar g1;
    Scalar g2;
};

template <class Scalar>
constexpr Potential<Scalar> potential(Scalar u) {
    const Scalar w = Scalar(1) - u * u;
    return {w * w / Scalar(4), -u * w, Scalar(3) * u * u - Scalar(1)};
}

template <class Scalar>
constexpr Scalar double_well(Scalar u) {
    const Scalar w = Scalar(1) - u * u;
    return w * w / Scalar(4);
}

template <class Scalar>
constexpr Scalar double_well_slope(Scalar u) {
    return -u * (Scalar(1) - u * u);
}

/// The constant field -1 + phi.
TorusField uniform_state(const ModelParams& params, int n);

/// h^d sum_cells [ 1/2 sum_axes (forward difference / h)^2 + G(u) ].
double energy(const TorusField& u);

/// Integral of e(u) = 1/2|grad u|^2 + G(u) - G(ubar) - G'(ubar)(u - ubar).
/// Requires mean(u) = -1 + phi within 1e-10.
double energy_gap(const TorusField& u, const ModelParams& params);

struct PartitionWeights {
    double w1;  ///< bulk near -1
    double w2;  ///< transition layer
    double w3;  ///< droplet near +1
};

/// Smooth partition of unity with plateaus at t <= -1+kappa, [-1+2kappa, 1-2kappa]
/// and t >= 1-kappa; cubic smoothstep on each transition band.
PartitionWeights partition_weights(double u, double kappa);

/// V(u) = integral of w3(u): a smooth stand-in for the volume of the +1 phase.
double plus_phase_volume(const TorusField& u, double kappa);

/// Clamp values above 1 + kappa and pull the region {u <= ubar} toward ubar
/// to restore the mean. Leaves {ubar <= u <= 1+kappa} untouched and does not
/// raise the energy. Requires phi <= kappa / 10.
TorusField truncate_excess(const TorusField& u, const ModelParams& params, double kappa);

struct CertificateOptions {
    double eps0 = 0.05;         ///< validity window V <= eps0 L^d of the torus isoperimetry
    double reg_factor = 10.0;   ///< "V >> phi^{-d+1}" read as V >= reg_factor phi^{-d+1}
};

struct Certificate {
    double kappa = 0.0;
    double V = 0.0;
    double c1 = 0.0;
    double c2 = 0.0;
    double c3 = 0.0;
    double bound_offcritical = 0.0;
    std::optional<double> bound_critical;
    bool hypotheses_ok = false;
    bool critical_hypotheses_ok = false;
    std::string reason;
};

/// Evaluates the lower bound C1 V^{(d-1)/d} - phi C2 V (and, when its side
/// conditions hold, the critical refinement) at kappa = phi^{1/3}, after
/// truncating overshoot above 1 + kappa.
Certificate lower_bound_certificate(const TorusField& u, const ModelParams& params,
                                    const CertificateOptions& opts = {});

/// Minimal perimeter of a set of volume v in the torus; valid for v <= eps0 L^d.
double isoperimetric_profile(double v, const ModelParams& params, double eps0 = 0.05);

/// Throws unless |mean(u) - (-1+phi)| <= tol.
void require_mean(const TorusField& u, double target, double tol, const char* what);

}  // namespace chb
