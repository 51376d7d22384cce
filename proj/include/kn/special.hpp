#pragma once

#include <functional>

#include "kn/params.hpp"

namespace kn {

/// Truncated infinite product (z; p)_infinity = prod_{k>=0} (1 - z p^k),
/// keeping tr.product_order factors.  Requires |p| < 1.
cplx qpochhammer(cplx z, cplx p, const TruncationConfig& tr);

/// Multiplicative theta function
///   Theta_p(z) = (z; p)_inf (p/z; p)_inf (p; p)_inf.
/// Satisfies Theta_p(pz) = Theta_p(z^{-1}) = -z^{-1} Theta_p(z).
cplx theta_big(cplx z, const ParameterSet& ps, const TruncationConfig& tr);

/// Additive theta function theta(u) = p^{u^2/2 - u/2} Theta_p(p^u).
/// Odd, with theta(u+1) = -theta(u) and
/// theta(u+tau) = -exp(-2 pi i u - pi i tau) theta(u).
cplx theta_u(cplx u, const ParameterSet& ps, const TruncationConfig& tr);

/// theta'(0) = -log(p) (p; p)_inf^3, from the product representation.
cplx theta_deriv0(const ParameterSet& ps, const TruncationConfig& tr);

/// xi(u) = p^{u^2/2} (1 - x) (x; p)_inf (p^2 q^2 x; p)_inf (p; p)_inf,
/// x = p^u.
cplx xi(cplx u, const ParameterSet& ps, const TruncationConfig& tr);

/// eta(u) = p^{u^2/2 - (beta + 1/2) u} d^{-1/2} / (1 - x^{-1})
///          * (q d^{-1} x; p)_inf (q d x^{-1}; p)_inf (p; p)_inf,  x = p^u.
/// Throws PoleError at x = 1.
cplx eta(cplx u, const ParameterSet& ps, const TruncationConfig& tr);

/// Residue of f at a simple pole u0, by an N-point circle average of
/// (u - u0) f(u) at radius tr.residue_epsilon.  The 4-point and 8-point
/// averages must agree; a larger disagreement means the pole is not simple
/// (or f is wildly scaled there) and raises DomainError.
cplx residue_at(const std::function<cplx(cplx)>& f, cplx u0,
                const TruncationConfig& tr);

}  // namespace kn
