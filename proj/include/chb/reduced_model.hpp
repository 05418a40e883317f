#pragma once

// Closed-form constants of the sharp-interface picture and the reduced
// one-dimensional energies f_xi(nu) = Cbar1 nu^{(d-1)/d} - 4 nu + 4 xi^{-(d+1)} nu^2.

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "chb/types.hpp"

namespace chb {

/// Surface tension of a flat transition layer, 2 sqrt(2) / 3.
double interface_cost();

/// Area of the unit (d-1)-sphere, computed through lgamma.
double sphere_area(Dimension d);

/// c0 sigma_d^{1/d} d^{(d-1)/d}: perimeter-to-volume constant of a ball times c0.
double cbar1(Dimension d);

double reduced_energy(double nu, Xi xi, Dimension d);

struct ModelParams;
/// Same function parameterized by (phi, L): xi^{d+1} = phi^{d+1} L^d.
double reduced_energy_phiL(double nu, const ModelParams& params);

struct CertificateCoefficients {
    double c1;
    double c2;
    double c3;
};

/// Coefficients of the lower-bound certificate; requires 8 phi^{1/3} < 1.
CertificateCoefficients certificate_coefficients(double phi, Dimension d);

/// Crossover value xi_d separating f_xi >= 0 from f_xi with negative values.
double critical_xi(Dimension d);

struct OffCriticalBarrier {
    double nu_m;
    double c_star;
};

OffCriticalBarrier barrier_constant_offcritical(Dimension d);

struct CriticalBarrier {
    double nu_xi;  ///< first strictly positive zero of f_xi
    double c_xi;   ///< max of f_xi on [0, nu_xi]
};

/// Throws DomainError when xi <= xi_d (no strictly positive zero).
CriticalBarrier barrier_constant_critical(double xi, Dimension d);

/// Works for both tags; the infinite tag yields nu_xi = (Cbar1/4)^d and C*.
CriticalBarrier barrier_constant(Xi xi, Dimension d);

/// Interior local minimum of f_xi for finite xi (the point where f_xi' = 0
/// a second time). Absent for the infinite tag.
std::optional<double> reduced_local_min(double xi, Dimension d);

/// max f_xi on [0, nu*] where nu* is the local minimum; used as the energy
/// window of the critical certificate (C_{xi_d}).
double reduced_barrier_height_any(double xi, Dimension d);

struct ReducedCurve {
    Xi xi;
    Dimension d;
    std::vector<std::pair<double, double>> samples;  ///< (nu, f)
    std::optional<double> nu_zero;
    double nu_max;
    double f_max;
};

/// Samples f_xi on [0, nu_hi] (nu_hi > 0) and locates zero/maximum.
ReducedCurve sample_reduced_curve(Xi xi, Dimension d, int samples,
                                  std::optional<double> nu_hi = std::nullopt);

std::string reduced_curve_csv(const ReducedCurve& curve);
std::string reduced_curve_summary_json(const ReducedCurve& curve);

}  // namespace chb
