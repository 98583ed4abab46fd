#pragma once

#include <string>
#include <vector>

namespace bergerflow {

enum class ProfileKind { Bryant, Cylinder };

std::string profile_kind_name(ProfileKind kind);

/// A rotationally symmetric reference metric d sigma^2 + phi(sigma)^2 g_{S^3}
/// sampled on a uniform sigma grid starting at 0.
struct Profile {
    ProfileKind kind = ProfileKind::Cylinder;
    std::vector<double> sigma;
    std::vector<double> phi;
    std::vector<double> dphi;
    /// Radial derivative of the soliton potential f (Bryant only).
    std::vector<double> dpotential;
    std::string normalization;
    /// Largest deviation of the first integral R + |df|^2 = 1 (Bryant only).
    double residual = 0.0;

    double sigma_max() const { return sigma.empty() ? 0.0 : sigma.back(); }
    /// phi at an arbitrary sigma in range, by monotone cubic interpolation.
    double phi_at(double s) const;
};

/// The Bryant steady soliton on R^4 normalized to scalar curvature 1 at the
/// tip. Integrates phi' = p, p' = F p - 2 (p^2 - 1) / phi, F' = 3 p' / phi with
/// F = f' from the regular series at the origin. Results are cached per
/// (sigma_max, tolerance, spacing).
Profile bryant_profile(double sigma_max, double tolerance = 1e-10, double spacing = 0.01);

/// The round cylinder of the given radius.
Profile cylinder_profile(double radius, double sigma_max, double spacing = 0.01);

}  // namespace bergerflow
