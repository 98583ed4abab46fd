#pragma once

#include <cstddef>
#include <memory>
#include <string>
#include <string_view>

#include "bergerflow/metric_state.hpp"

namespace bergerflow {

enum class Family { Flat, CapCylinder, TaubNutLike, Neck, Cylinder };

std::string_view family_name(Family f);
Family parse_family(std::string_view name);

/// Parameters of the built-in families; each family reads only its own.
///  cap_cylinder: b = B tanh(x/B), c = b (1 - a tanh^2(x/B))
///  taubnut_like: b = x (1 + x^2/ell^2)^q, c = mu0 tanh(x/mu0)
///  neck:         b = c = x (1 - d exp(-(x - x0)^2 / w^2))
///  cylinder:     b = c = r (mirror-symmetric inner end)
struct FamilyParams {
    double B = 1.0;
    double a = 0.0;
    double ell = 1.0;
    double q = 0.0;
    double mu0 = 1.0;
    double d = 0.6;
    double x0 = 3.0;
    double w = 1.0;
    double r = 1.0;

    bool operator==(const FamilyParams&) const = default;
};

/// Checks the documented parameter ranges; throws InvalidArgument.
void check_family_params(Family family, const FamilyParams& p);

/// Samples a family on the grid with xi = 1. Throws InvalidArgument on bad
/// parameters or if the closed form is not odd to 1e-6 across the origin.
MetricState construct_initial(Family family, const FamilyParams& p, std::shared_ptr<const Grid> grid);

enum class InitialClass { G, GInf, Neck, Other };

std::string_view class_name(InitialClass c);

struct ClassValidation {
    bool smooth_at_origin = false;
    double bs_origin_residual = 0.0;
    double cs_origin_residual = 0.0;
    double min_bs = 0.0;
    double min_H = 0.0;
    double min_H_x = 0.0;
    double sup_b = 0.0;
    bool sup_b_finite = false;
    double ratio_floor = 0.0;
    double ratio_ceiling = 0.0;
    bool curvature_decay_ok = false;
    double fiber_floor = 0.0;
    InitialClass verdict = InitialClass::Other;
};

/// Class membership from the sampled state. Boundedness of b and positivity of
/// the injectivity radius are judged through finite-grid proxies: b counts as
/// bounded when b_s <= 1e-2 over the outer quarter, and the fiber floor is
/// min c over the outer half.
ClassValidation validate_class(const MetricState& state);

}  // namespace bergerflow
