#pragma once

// Upper-bound constructions: tanh kink, clamped kink, fractional droplets and
// the two-stage path from the uniform state to a state of lower energy.

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "chb/params.hpp"
#include "chb/torus_field.hpp"

namespace chb {

/// -tanh(x / sqrt 2), the optimal one-dimensional transition layer.
double kink(double x);

/// Kink that reaches -sgn(x) exactly for |x| > 2R; on R <= |x| <= 2R the tail
/// 1 + kink is damped by a quintic smoothstep, giving a C2 monotone profile. R >= 1.
double clamped_kink(double x, double R);

/// Amplitude of the mass correction of a radial kink,
/// (d-1) sigma_d integral (sgn s + kink(s)) s ds, by quadrature.
double kink_mass_moment(Dimension d);

struct DropletSpec {
    double eta = 0.0;
    double R = 0.0;
    double r_eta = 0.0;
    double alpha_exact = 0.0;
    std::optional<double> alpha_asymptotic;  ///< present when 1 - eta >= 100 phi^2
};

/// eta^{1/d} (phi d / (2 sigma_d))^{1/d} L: radius of a ball holding eta V_+.
double droplet_radius(double eta, const ModelParams& params);

struct Droplet {
    TorusField field;
    DropletSpec spec;
};

/// u = clamped_kink(|x| - r_eta, R) + alpha with alpha fixed by the mean
/// constraint. eta = 0 gives the uniform state. Requires r_eta <= L/4 and
/// R <= r_eta when eta > 0.
Droplet droplet_state(double eta, double R, const ModelParams& params, int n);

/// phi (1 - eta) - C1' r_eta^{d-2} / L^d, dropping exponentially small clamp
/// terms and the O(r^{d-4}) remainder. Requires 1 - eta >= 100 phi^2.
double alpha_asymptotic(double eta, double R, const ModelParams& params);

/// Leading-order gap Cbar1 V^{(d-1)/d} - 4 phi V + 4 phi^{d+1} V^2 / xi^{d+1}
/// with V = eta phi L^d / 2; the quadratic term is dropped when offcritical.
double droplet_gap_asymptotic(double eta, const ModelParams& params, bool offcritical = false);

/// (1 - lambda) ubar + lambda w_R where w_R is the radius-R droplet.
TorusField seed_segment(double lambda, double R, const ModelParams& params, int n);

/// Default clamp width / seed radius: max(2, min(0.2 phi^{-1+1/d}, 3 phi^{-1/2})).
double default_clamp_width(const ModelParams& params);

struct PathProfile {
    std::vector<TorusField> images;
    std::vector<double> t;
    std::vector<double> gap;
    std::vector<double> V;
    double kappa = 0.0;         ///< kappa used for the V column
    std::size_t seed_images = 0;  ///< images [0, seed_images) come from the seed stage
    double max_gap = 0.0;
    std::size_t max_index = 0;
    double end_gap = 0.0;

    /// Recomputes gap, V, max and end from the images.
    void evaluate(const ModelParams& params);
};

struct BarrierPathOptions {
    double kappa = 0.2;         ///< partition width for the V diagnostic
    double eta_growth = 1.2;    ///< expansion factor of the endpoint search
};

/// Seed segment followed by growing droplets until the gap is negative.
/// Throws DomainError when no lower state exists along the droplet family.
PathProfile barrier_path(const ModelParams& params, int n, double R, int n_images,
                         const BarrierPathOptions& opts = {});

std::string path_profile_csv(const PathProfile& path);
/// Writes image_####.chf files into dir (created if missing).
void write_path_snapshots(const std::filesystem::path& dir, const PathProfile& path, double phi);

}  // namespace chb
