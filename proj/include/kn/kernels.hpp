#pragma once

#include <functional>
#include <vector>

#include "kn/params.hpp"
#include "kn/special.hpp"
#include "kn/thetaspace.hpp"

namespace kn {

/// A theta-space element as a plain callable, so shifted/composed variants
/// (needed by the reduction identities) can be passed uniformly.
using ThetaFn = std::function<cplx(const std::vector<cplx>&)>;

ThetaFn theta_fn_of(const ThetaElement& el);
ThetaFn const_theta_fn(cplx value);

/// Kernel h_M: for n >= 2,
///   vartheta(ubar_1..ubar_n)
///   * prod_i prod_{a<b} theta(u_{i,a}-u_{i,b}) theta(u_{i,a}-u_{i,b}-gamma)
///   / [ prod_{i<n} prod_{a,b} theta(u_{i,a}-u_{i+1,b}-beta-gamma/2)
///       * prod_{a,b} theta(u_{n,a}-u_{1,b}-beta+gamma/2) ].
/// For n = 1 the specialized form
///   prod_{a<b} theta(x)theta(x-gamma) / (theta(x-beta-gamma/2)
///   theta(x+beta-gamma/2)),  x = u_a - u_b.
/// u is an n x M grid (row i = color i).
cplx kernel_h(int M, const std::vector<std::vector<cplx>>& u, const ThetaFn& th,
              const ParameterSet& ps, const TruncationConfig& tr);

/// Kernel k_M (n >= 2):
///   vartheta(ubar) * prod_i prod_{a != b} xi(u_{i,a}-u_{i,b})
///   / prod_i prod_{a,b} eta(u_{i,a}-u_{i+1,b}),  row n+1 = row 1.
cplx kernel_k(int M, const std::vector<std::vector<cplx>>& u, const ThetaFn& th,
              const ParameterSet& ps, const TruncationConfig& tr);

/// Two-kernel commutation integrand T (u: n x M, v: n x N):
///   th1(ubar) th2(vbar) * prod_i prod_{a,b}
///     theta(u_{i,a}-v_{i+1,b}-gamma/2-beta) theta(v_{i,b}-u_{i+1,a}+gamma/2-beta)
///     / (theta(u_{i,a}-v_{i,b}) theta(u_{i,a}-v_{i,b}-gamma)).
cplx T_func(const std::vector<std::vector<cplx>>& u,
            const std::vector<std::vector<cplx>>& v, const ThetaFn& th1,
            const ThetaFn& th2, const ParameterSet& ps,
            const TruncationConfig& tr);

/// The swapped variant T':
///   th1(ubar) th2(vbar) * prod_i prod_{a,b}
///     theta(v_{i,b}-u_{i+1,a}-gamma/2-beta) theta(u_{i,a}-v_{i+1,b}+gamma/2-beta)
///     / (theta(v_{i,b}-u_{i,a}) theta(v_{i,b}-u_{i,a}-gamma)).
cplx Tprime_func(const std::vector<std::vector<cplx>>& u,
                 const std::vector<std::vector<cplx>>& v, const ThetaFn& th1,
                 const ThetaFn& th2, const ParameterSet& ps,
                 const TruncationConfig& tr);

/// Symmetrization of T or T' over the combined per-row variable group: for
/// every row i, the M+N values (u_{i,1..M}, v_{i,1..N}) are permuted jointly,
/// the first M slots of each arrangement playing the u role.  Guarded by a
/// cost envelope.
cplx sym_T(const std::vector<std::vector<cplx>>& u,
           const std::vector<std::vector<cplx>>& v, const ThetaFn& th1,
           const ThetaFn& th2, const ParameterSet& ps,
           const TruncationConfig& tr, bool prime);

struct SumResult {
    cplx value;
    double scale;  // max |summand|, the natural magnitude for tolerances
};

/// One side of the partition-sum identity: u is n x (M+N), the sum runs over
/// all per-row partitions I_i | J_i with |I_i| = M.  `lhs` selects the
/// orientation of the theta families.  Kahan-compensated.
/// Throws CostError if C(M+N, M)^n exceeds 1e6.
SumResult theta_identity_side(bool lhs, int M, int N, cplx alpha,
                              const std::vector<std::vector<cplx>>& u,
                              const ThetaFn& th1, const ThetaFn& th2,
                              const ParameterSet& ps,
                              const TruncationConfig& tr);

/// phi = LHS - RHS of the partition-sum identity; expected 0.
SumResult phi_residual(int M, int N, cplx alpha,
                       const std::vector<std::vector<cplx>>& u,
                       const ThetaFn& th1, const ThetaFn& th2,
                       const ParameterSet& ps, const TruncationConfig& tr);

/// Closed form of the n = 1 sum at the lattice point u_a = a alpha:
///   (-1)^{MN} [prod_{a<=M} f(a)] [prod_{a<=N} f(a)] / prod_{a<=M+N} f(a),
///   f(a) = theta((a-1) alpha + gamma) / theta(a alpha).
cplx n1_closed_form(int M, int N, cplx alpha, const ParameterSet& ps,
                    const TruncationConfig& tr);

/// The residue-extraction constant A = theta(gamma)^{-1} res_{u=0} 1/theta(u)
/// = 1/(theta(gamma) theta'(0)).
cplx residue_constant_A(const ParameterSet& ps, const TruncationConfig& tr);

/// Both sides of the single-row residue reduction (n = 1): the nested
/// residue of one side at u_1 = u_2 + gamma versus
/// A * prod_{a>=2} theta(u_a - u_2 - alpha) theta(u_2 - u_a - alpha + gamma)
///   / prod_{a>=3} theta(u_a - u_2) theta(u_a - u_2 - gamma)
///   * side_{1,M-1,N-1}(u_3.., th shifted by u_2).
/// Returns {actual - predicted, scale}.
SumResult iterated_residue_check(bool lhs, int M, int N, cplx alpha,
                                 const std::vector<cplx>& u, const ThetaFn& th1,
                                 const ThetaFn& th2, const ParameterSet& ps,
                                 const TruncationConfig& tr);

/// Row-collapse reduction at u_{i+1,a} = u_{i,a} - aeff, where aeff = alpha
/// (variant 0) or alpha - gamma (variant 1): one side at rank n against
/// (-1)^{MN} times the same side at rank n-1 with the doubled-row theta
/// families.  The collapsed row's coupling to its successor absorbs the
/// shift, so in the reduced sum the pair (row i, old row i+2) couples with
/// parameter alpha + aeff while all other pairs keep alpha.  `flip_sign`
/// replaces (-1)^{MN} by its negative, as a falsification control.
/// Returns {difference, scale}.
SumResult specialization_check(bool lhs, int M, int N, cplx alpha, int i,
                               int variant,
                               const std::vector<std::vector<cplx>>& u,
                               const ThetaFn& th1, const ThetaFn& th2,
                               const ParameterSet& ps,
                               const TruncationConfig& tr,
                               bool flip_sign = false);

/// Generic variable grid: entries with real part in [0,1), imaginary part
/// in [-0.2, 0.2], resampled until within-row differences stay away from
/// the zeros of theta(x) and theta(x -+ gamma).
std::vector<std::vector<cplx>> sample_grid(std::uint64_t seed, int rows,
                                           int cols, const ParameterSet& ps,
                                           const TruncationConfig& tr);

}  // namespace kn
