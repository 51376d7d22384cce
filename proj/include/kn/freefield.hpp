#pragma once

#include <map>
#include <utility>
#include <vector>

#include "kn/params.hpp"
#include "kn/structfn.hpp"

namespace kn {

/// One of the 2*ell summand labels of the current decomposition:
/// slots 1 < ... < ell < ell-bar < ... < 1-bar.
struct Slot {
    int k = 1;         // 1-based tensor position
    bool bar = false;

    int ord(int ell) const { return bar ? 2 * ell + 1 - k : k; }
};

inline bool slot_equal(Slot a, Slot b) { return a.k == b.k && a.bar == b.bar; }
inline bool is_bar_pair(Slot a, Slot b) { return a.k == b.k && a.bar != b.bar; }

enum class WheelCase { one, two, three };

/// The tensor-product family F(u_1) x ... x F(u_ell) x F^D whose currents
/// decompose into 2*ell vertex operators.  The central scalar is fixed to
/// C = q^{ell-1} (so C^2 = q^{2 ell - 2}).
struct ExampleFamily {
    int ell = 3;
    std::vector<cplx> u_spec;  // spectral parameters u_1..u_ell
    ParameterSet ps;           // with C overwritten to q^{ell-1}

    /// Constant prefactor of the slot's vertex operator inside E_i(z)/z:
    /// -q^{k-ell} u_k for plain slots, q^{-k+ell-1} u_k^{-1} for barred.
    cplx coefficient(Slot a) const;

    std::vector<Slot> all_slots() const;
};

/// Build the family; requires ell >= 3 and n >= 3 (distinct color classes).
ExampleFamily make_example_module(int ell, const std::vector<cplx>& u_spectral,
                                  const ParameterSet& params);

/// Oscillator-part contraction <Lambda_{i,a}(z) Lambda_{j,b}(w)> at x = w/z.
/// Tabulated by color class (same / next / prev, far colors give 1) and the
/// slot relation (order, equality, bar-pairing).
cplx contract(const ExampleFamily& fam, int i, Slot a, int j, Slot b, cplx x);

/// Scalar prefactor of an ordered product of current summands at given
/// points: product of coefficients times all pairwise contractions,
/// times an optional extra multiplier.  Throws PoleError on a contraction
/// pole (no limit handling here; see wheel_check for matched pairs).
struct Term {
    int color;
    Slot slot;
    cplx z;
};
cplx product_prefactor(const ExampleFamily& fam, const std::vector<Term>& terms,
                       cplx multiplier = cplx(1.0, 0.0));

struct WheelResult {
    cplx value;    // limit of the dressed prefactor at the specialization
    double scale;  // |same expression| at a generic nearby point
};

/// Evaluate the dressed triple-product prefactor
///   [lambda0-type bracket] * <Lambda_{i,a}(z1) Lambda_{i,b}(z2)
///                             Lambda_{i+sign,c}(w)>
/// at the wheel specialization selected by `wcase`
///   (one)   (z1,z2,w) = (z, q2 z, e1^{-1} z)
///   (two)   (z1,z2,w) = (z, C^2 z, C^2 e3 z)
///   (three) (z1,z2,w) = (z, C^{-2} z, C^{-2} e1^{-1} z)
/// with (e1,e3) = (q1,q3) for sign=+1 and (q3,q1) for sign=-1.
/// Matched zero/pole pairs are resolved by a 4-point circle average in a
/// multiplicative perturbation of (z2, w), Richardson-extrapolated over two
/// radii.  Expected value: 0.
/// Special case: at specialization (one) the same-color pair (k-bar, k) with
/// k in {ell-1, ell-2} has a genuine contraction pole at z2 = q2 z1 (the
/// central value C^2 = q2^{ell-1} pins a pole of its contraction to q2).
/// The two summands k = ell-1 and k = ell-2 then cancel jointly (their
/// residue operators coincide), so the check evaluates the zero-mode-dressed
/// sum of the two partner terms; both partner triples report the same limit.
/// If negative_control is set, the (wrong) specialization (z, q2 z, z) is
/// used instead; the result is then expected to be far from 0.
WheelResult wheel_check(const ExampleFamily& fam, int i, int sign, Slot a,
                        Slot b, Slot c, cplx base_u, WheelCase wcase,
                        const TruncationConfig& tr,
                        bool negative_control = false);

/// Scalar residual of the quadratic-residue boundary identity at C^2 = c2:
///   q k^2 (1 - q^{-2} c2)(1 - q^2 c2)/(1 - c2)^2
///     - 1/(q - q^{-1}) (1 + c2)(1 - q^2 c2)/(1 - c2)^2,
/// k = 1/(q^{1/2} - q^{-1/2}).  Zero exactly when c2 = q (the boundary
/// value); pass c2 != q as a negative control.
cplx quadres_check_boundaryB(const ParameterSet& ps, cplx c2);

/// The scalar factor of the boundary image of the dressed triple product,
///   k^3 (1-q^{-2} z2/z1)(1-q^2 z2/z1)/(1-z2/z1)^2
///       * (1-d^{s} w/z1)/(1-w/z1) * (1-d^{s} w/z2)/(1-w/z2),  s = sign.
/// Vanishes (with no pole) at the wheel specializations
/// (z, q^2 z, q d^{-s} z) and (z, q z, d^{-s} z).
cplx serre_check_boundaryB(const ParameterSet& ps, int sign, cplx z1, cplx z2,
                           cplx w);

/// g_{i,i}(z, C^2 z) at C = q^{-1}; identically 0 (trivial-module check).
cplx fd_gzero_check(const ParameterSet& ps, cplx z);

// ---------------------------------------------------------------------------
// Zero-mode engine: lattice charges with fermionic sign cocycle, diagonal
// z^{charge} / d^{charge/2} factors, and the K-zero-mode exchange rule.
// Used for the order-symmetry invariants of the dressed products.

struct ZmOp {
    enum Kind { charge_shift, diagonal, k_mode } kind;
    int pos;    // tensor position 1..ell (unused for k_mode)
    int idx;    // lattice index 0..n-1 (color for k_mode)
    int sgn;    // +-1 for charge_shift and k_mode
    cplx base;  // multiplier base for diagonal: contributes base^{m}
};

/// Zero-mode word of Lambda_{i,a}(z), operator (left-to-right) order.
std::vector<ZmOp> lambda_zero_modes(const ExampleFamily& fam, int i, Slot a,
                                    cplx z);

struct ZmVacuum {
    cplx coeff;                             // scalar against the final state
    std::map<std::pair<int, int>, int> charge;  // (pos, idx) -> lattice charge
    std::vector<std::pair<int, int>> kword;     // canonical (sgn, color) list
};

/// Apply a concatenated word to the vacuum; K zero modes are normalized to
/// the canonical order (all minus before plus) via the q^{2(alpha_i,alpha_j)}
/// exchange factors and reported as kword.
ZmVacuum zero_mode_vacuum(const ExampleFamily& fam,
                          const std::vector<ZmOp>& word);

/// Residual of the dressed-product order symmetry for one unordered slot
/// pair {a, b} of color i:
///   S(z1,z2) = lambda0_{i,i}(z2/z1) sum over the two orders of
///              coefficient * contraction * zero-mode vacuum coefficient
/// must satisfy S(z1,z2) = S(z2,z1).  Returns |S12 - S21| / scale.
double symmetry_pair_residual(const ExampleFamily& fam, int i, Slot a, Slot b,
                              cplx z1, cplx z2);

/// Exact order-independence for far colors (|i-j| >= 2 mod n): relative
/// difference of the two vacuum coefficients (contractions are 1).
double far_color_commutation_residual(const ExampleFamily& fam, int i, int j,
                                      Slot a, Slot b, cplx z1, cplx z2);

}  // namespace kn
