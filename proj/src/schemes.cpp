#include "chblend/schemes.hpp"

#include <algorithm>
#include <cctype>
#include <stdexcept>

namespace chblend {

SchemeKind parse_scheme(std::string_view name) {
  std::string lower(name);
  std::transform(lower.begin(), lower.end(), lower.begin(),
                 [](unsigned char ch) { return static_cast<char>(std::tolower(ch)); });
  if (lower == "od2") return SchemeKind::OD2;
  if (lower == "wvv") return SchemeKind::WVV;
  if (lower == "ey") return SchemeKind::EY;
  if (lower == "ls") return SchemeKind::LS;
  throw std::invalid_argument("unknown scheme '" + std::string(name) +
                              "' (expected od2, wvv, ey or ls)");
}

std::string to_string(SchemeKind kind) {
  switch (kind) {
    case SchemeKind::OD2: return "od2";
    case SchemeKind::WVV: return "wvv";
    case SchemeKind::EY: return "ey";
    case SchemeKind::LS: return "ls";
  }
  return "unknown";
}

PotentialCoefficients linearize_at(SchemeKind kind, double p) {
  const double p2 = p * p;
  switch (kind) {
    case SchemeKind::OD2:
      return {0.5 - 1.5 * p2, 0.5 * p2 * p + 0.5 * p};
    case SchemeKind::EY:
      return {-2.0, 3.0 * p - p2 * p};
    case SchemeKind::LS:
      return {(1.0 - p) * (1.0 + p), 0.0};
    case SchemeKind::WVV:
      if (p < -1.0) return {3.0, -p - 2.0};
      if (p > 1.0) return {3.0, -p + 2.0};
      return {3.0 + 1.5 * (1.0 - p2), 0.5 * p + 0.5 * p2 * p};
  }
  throw std::invalid_argument("linearize_at: bad scheme");
}

LinearizedPotential linearize(SchemeKind kind, std::span<const double> prev) {
  LinearizedPotential out;
  out.a.resize(prev.size());
  out.g.resize(prev.size());
  for (std::size_t i = 0; i < prev.size(); ++i) {
    const auto c = linearize_at(kind, prev[i]);
    out.a[i] = c.a;
    out.g[i] = c.g;
  }
  return out;
}

GradientSplit gradient_split(SchemeKind kind, double eps, double stab) {
  if (!(eps > 0.0)) throw std::invalid_argument("gradient_split: eps must be positive");
  const double eps2 = eps * eps;
  if (kind == SchemeKind::WVV) {
    if (stab < 0.0) throw std::invalid_argument("gradient_split: stab must be non-negative");
    return {0.5 * eps2 + stab, 0.5 * eps2 - stab, stab};
  }
  return {eps2, 0.0, stab};
}

}  // namespace chblend
