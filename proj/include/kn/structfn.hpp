#pragma once

#include "kn/params.hpp"
#include "kn/special.hpp"

namespace kn {

/// Relation of color j to color i, cyclically mod n.
enum class ColorClass { same, next, prev, far_apart, n2_off, n1_all };

ColorClass color_class(int i, int j, int n);

/// Rational structure function g_{i,j}(z, w).  Case split by color class
/// (and specialized closed forms for n = 1 and n = 2).
cplx g_fun(int i, int j, cplx z, cplx w, const ParameterSet& ps);

/// Exchange factor G_{i,j}(x), x = w/z, with
///   G_{i,j}(w/z) = -g_{j,i}(w, z) / (d_{i,j} g_{i,j}(z, w)).
cplx G_fun(int i, int j, cplx x, const ParameterSet& ps);

/// The constant d_{i,j} in the relation above.
cplx d_factor(int i, int j, const ParameterSet& ps);

/// Rational prefactor lambda^0_{i,j}(x).
cplx lambda0(int i, int j, cplx x, const ParameterSet& ps);

/// Elliptic prefactor lambda_{i,j} evaluated at x = p^u (the additive
/// argument u is passed so fractional powers x^{+-gamma/2} are well defined
/// on the fixed branch).
cplx lambda_elliptic(int i, int j, cplx u, const ParameterSet& ps,
                     const TruncationConfig& tr);

/// Square root of the exchange factor in the sense
///   G_{i,j}(x) = G~_{i,j}(x) G~_{i,j}(q^{-1} x).
/// For n >= 3 this is the standard three-class form; for n = 1 and n = 2
/// the same factorization holds for the product of the class forms, which
/// is what this returns.
cplx G_tilde(int i, int j, cplx x, const ParameterSet& ps);

/// Cubic Serre-type kernel for n = 1:
/// X(z1,z2,z3) = sum over cyclic structure of
///   (z_a + z_b)(z_c^2 - z_a z_b)/(z1 z2 z3) * G(...).
/// Symmetrization over z1, z2, z3 annihilates it on the wheel conditions.
cplx serre_X_n1(cplx z1, cplx z2, cplx z3, const ParameterSet& ps);

/// Residual of the two fusion identities (n >= 3):
///   G_{i,i-1}(q1 x) G_{i,i}(x) G_{i,i+1}(q1^{-1} x) = 1
///   G_{i-1,i}(q3 x) G_{i,i}(x) G_{i,i+1}(q1^{-1} x) = 1
/// Returns the max |lhs - 1| over both, for one (i, x).
double check_fusion_identities(int i, cplx x, const ParameterSet& ps);

}  // namespace kn
