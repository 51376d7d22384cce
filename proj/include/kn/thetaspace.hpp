#pragma once

#include <utility>
#include <vector>

#include "kn/params.hpp"

namespace kn {

/// One element of the n-dimensional space of entire functions
/// vartheta(u_1, ..., u_n) satisfying
///   vartheta(..., u_i + 1, ...)  = vartheta(u),
///   vartheta(..., u_i + tau, ...) =
///       exp(-2 pi i (2 u_i - u_{i-1} - u_{i+1} - mu_i + tau)) vartheta(u)
/// (indices cyclic mod n; for n = 1 the space is the constants).
///
/// Stored as a finite Fourier sum  sum_k c_k exp(2 pi i k . u)  supported on
/// {sum_j k_j = 0}; the shift laws fix all coefficients within a coset of
/// the root sublattice up to one overall constant, and there are exactly n
/// cosets, one basis element per coset.
struct ThetaElement {
    int n = 1;
    int coset = 0;  // sum_j j k_j mod n, constant on the support
    std::vector<std::pair<std::vector<int>, cplx>> coeffs;  // sorted by key
};

/// Construct the n basis elements.  Coefficients are generated from the
/// minimal-norm representative of each coset by the two-term recursion the
/// tau-shift law imposes; every revisited lattice point re-checks
/// consistency.  Throws DomainError if |exp(2 pi i tau)| is too close to 1
/// for the coefficients to decay.
std::vector<ThetaElement> build_basis(const ParameterSet& ps,
                                      const TruncationConfig& tr);

/// Evaluate an element at u (size n).
cplx theta_eval(const ThetaElement& el, const std::vector<cplx>& u);

/// The multiplier of the tau-shift law in direction i at the point u.
/// Returns 1 for n = 1 (the space is constants by definition).
cplx tau_shift_multiplier(const ParameterSet& ps, const std::vector<cplx>& u,
                          int i);

/// Max relative residual of both shift laws over `trials` random points.
double check_quasiperiodicity(const ThetaElement& el, const ParameterSet& ps,
                              int trials, std::uint64_t seed);

}  // namespace kn
