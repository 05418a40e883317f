#pragma once

// Rescaled energy gap on the shrunk box [-phi L/2, phi L/2]^d, the sharp
// interface limit functional for balls, the recovery construction and
// convergence sweeps between the two.

#include <string>
#include <vector>

#include "chb/torus_field.hpp"
#include "chb/types.hpp"

namespace chb {

/// (phi, xi, d) with L = (xi / phi)^{(d+1)/d} derived exactly, so that
/// phi |Omega| = phi (phi L)^d = xi^{d+1} holds by construction.
struct RescaledParams {
    RescaledParams(Dimension d, double xi, double phi);

    Dimension d;
    double xi;
    double phi;

    /// L = (xi / phi)^{(d+1)/d}
    double length() const;
    /// phi L
    double domain_side() const;
    double mean() const noexcept { return -1.0 + phi; }
};

/// Ball of the given radius centered at the origin.
struct LimitSet {
    explicit LimitSet(double radius);

    double radius;

    double volume(Dimension d) const;
    double perimeter(Dimension d) const;
};

/// Discrete integral of phi/2 |grad u|^2 + (G(u) - G(-1+phi)) / phi over the
/// rescaled box. Requires mean(u) = -1 + phi within 1e-10.
double rescaled_gap(const TorusField& u, const RescaledParams& rp);

/// c0 Per(C) - 4|C| + 4 xi^{-(d+1)} |C|^2; the infinite tag drops the last term.
double limit_functional(const LimitSet& c, Xi xi, Dimension d);

struct RecoveryField {
    TorusField field;
    double alpha;  ///< bulk shift solved from the mean constraint
};

/// clamped_kink(dist / phi, phi^{-1/2}) + alpha with dist the signed distance to
/// the sphere (negative inside). Requires 2r + 4 phi^{1/2} < phi L.
RecoveryField recovery_field(const LimitSet& c, const RescaledParams& rp, int n);

/// Leading-order bulk shift phi (1 - 2|C| / xi^{d+1}).
double recovery_alpha_leading(const LimitSet& c, const RescaledParams& rp);

/// Smallest even n with spacing phi L / n <= resolution * phi.
int recovery_grid(const RescaledParams& rp, double resolution);

struct SweepRow {
    double phi;
    int n;
    double rescaled_gap;
    double limit;
    double abs_error;
    double rel_error;
    double alpha;
    double alpha_leading;
};

struct SweepResult {
    std::vector<SweepRow> rows;
    double fitted_exponent;  ///< least-squares slope of log abs_error against log phi
    bool monotone;           ///< abs_error strictly decreasing along the sweep
};

/// phis must be strictly decreasing; grid spacing is resolution * phi.
SweepResult convergence_sweep(const LimitSet& c, double xi, Dimension d, const std::vector<double>& phis,
                              double resolution = 0.25);

std::string sweep_csv(const SweepResult& sweep);
/// {"fitted_exponent", "monotone"}
std::string sweep_summary_json(const SweepResult& sweep);

}  // namespace chb
