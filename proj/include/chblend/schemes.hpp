#pragma once

#include <span>
#include <string>
#include <string_view>

#include "chblend/sparse.hpp"

namespace chblend {

/// Linearization of the potential phi(x) = (1 - x^2) x, applied to both
/// fields within one run.
enum class SchemeKind { OD2, WVV, EY, LS };

/// "od2" | "wvv" | "ey" | "ls" (case-insensitive). Throws std::invalid_argument.
SchemeKind parse_scheme(std::string_view name);
std::string to_string(SchemeKind kind);

/// phi(x_new) ~= a(prev) * x_new + g(prev), nodewise.
struct LinearizedPotential {
  NodalField a;
  NodalField g;
};

struct PotentialCoefficients {
  double a = 0.0;
  double g = 0.0;
};

/// Coefficients at a single node with previous value p.
///
///   OD2  a = 1/2 - 3/2 p^2              g = (p^3 + p) / 2
///   EY   a = -2                         g = 3p - p^3
///   LS   a = 1 - p^2                    g = 0
///   WVV  p < -1:      a = 3             g = -p - 2
///        -1<=p<=1:    a = 3 + 3/2(1-p^2) g = (p + p^3) / 2
///        p > 1:       a = 3             g = -p + 2
///
/// OD2, EY and LS reproduce phi(p) at a fixed point. The WVV middle branch
/// evaluates to 5p - p^3 there; it is kept as given.
PotentialCoefficients linearize_at(SchemeKind kind, double p);

LinearizedPotential linearize(SchemeKind kind, std::span<const double> prev);

/// Split of the eps^2 gradient term between the new step (implicit) and the
/// previous step (moved to the right-hand side).
struct GradientSplit {
  double c_implicit = 0.0;
  double c_explicit = 0.0;
  double stab = 0.0;
};

/// WVV: c_implicit = eps^2/2 + stab, c_explicit = eps^2/2 - stab.
/// Others: c_implicit = eps^2, c_explicit = 0 (stab ignored).
GradientSplit gradient_split(SchemeKind kind, double eps, double stab);

}  // namespace chblend
