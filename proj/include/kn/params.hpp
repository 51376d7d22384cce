#pragma once

#include <complex>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace kn {

using cplx = std::complex<double>;

inline constexpr double PI = 3.14159265358979323846;

/// Evaluation hit (or came too close to) a pole of the expression.
/// Callers running randomized campaigns catch this and resample.
struct PoleError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Input outside the domain where the implementation is valid
/// (bad region, non-generic parameters, divergent series, ...).
struct DomainError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// A requested computation would exceed the configured cost envelope.
struct CostError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Truncation and tolerance knobs shared by all numeric routines.
struct TruncationConfig {
    int product_order = 48;      // terms kept in infinite q-products
    int fourier_cutoff = 8;      // coefficient box radius for theta-space elements
    double tolerance_abs = 1e-12;
    double tolerance_rel = 1e-9;
    double residue_epsilon = 1e-3;  // circle radius for residue extraction
};

/// Multiplicative parameters with fixed logarithm branches.
///
/// Conventions: q = q_half^2, d = d_half^2, p = exp(-2 pi i / tau) with
/// Im tau > 0.  We store log_p = -2 pi i / tau exactly (so p^tau == 1 holds
/// to machine precision), log_q = Log q and log_d = Log d (principal), and
/// the exponents gamma, beta defined by q^2 = p^gamma, d = p^beta.  Every
/// fractional power of p is exp(w * log_p); half-integer powers of q and d
/// always mean the supplied square roots q_half, d_half.
struct ParameterSet {
    int n = 1;                 // number of colors, indices mod n
    cplx q_half, d_half, tau;
    cplx p;                    // exp(log_p)
    cplx C;                    // central-like scalar entering lambda_{i,i}
    std::vector<cplx> mu;      // size n, sum = 0
    cplx gamma, beta;
    cplx q1, q2, q3;           // q1 = d/q, q2 = q^2, q3 = 1/(q d); q1 q2 q3 = 1
    cplx log_p, log_q, log_d;
    bool im_context = false;   // if set, C^2 = p q^2

    cplx q() const { return q_half * q_half; }
    cplx d() const { return d_half * d_half; }

    /// p^w on the fixed branch.
    cplx pow_p(cplx w) const { return std::exp(w * log_p); }
    /// x = p^u, the multiplicative coordinate of an additive variable.
    cplx x_of_u(cplx u) const { return std::exp(u * log_p); }
    /// q^w on the fixed branch (coherent with gamma: q^w = p^{gamma w / 2}).
    cplx pow_q(cplx w) const { return std::exp(w * log_q); }
    /// d^w on the fixed branch.
    cplx pow_d(cplx w) const { return std::exp(w * log_d); }

    /// Stable hash of all defining data, for report provenance.
    std::uint64_t fingerprint() const;
    std::string fingerprint_hex() const;
};

/// Assemble a ParameterSet from primitive data, enforcing the convergence
/// region |p| < 1, |q^2| < 1, |q d^{+-1}| < 1, |p q^{-2}| < 1,
/// |p q^{-1} d^{+-1}| < 1.  Throws DomainError when violated.
/// If im_context is set, C is overwritten with exp((log_p + 2 log_q)/2),
/// i.e. the root of C^2 = p q^2 coherent with the stored branches.
/// Otherwise C_explicit is used (must be nonzero).
ParameterSet build_params(int n, cplx q_half, cplx d_half, cplx tau,
                          const std::vector<cplx>& mu, bool im_context,
                          cplx C_explicit = cplx(1.0, 0.0));

/// Draw a generic parameter point from the documented sampling region.
/// Rejects non-generic points with |q1^i q2^j - 1| < 1e-6 for |i|,|j| <= 6.
ParameterSet sample_params(std::uint64_t seed, int n, bool im_context);

/// Derive an independent RNG seed from a base seed and a textual label,
/// so distinct checks never share a random stream.
std::uint64_t split_seed(std::uint64_t seed, const std::string& label);

}  // namespace kn
