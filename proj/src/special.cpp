#include "kn/special.hpp"

#include <cmath>
#include <sstream>

namespace kn {

cplx qpochhammer(cplx z, cplx p, const TruncationConfig& tr) {
    if (!(std::abs(p) < 1.0))
        throw DomainError("qpochhammer: requires |p| < 1");
    cplx result = 1.0;
    cplx pk = 1.0;
    for (int k = 0; k < tr.product_order; ++k) {
        result *= (1.0 - z * pk);
        pk *= p;
    }
    return result;
}

cplx theta_big(cplx z, const ParameterSet& ps, const TruncationConfig& tr) {
    if (std::abs(z) < 1e-300)
        throw DomainError("theta_big: z must be nonzero");
    return qpochhammer(z, ps.p, tr) * qpochhammer(ps.p / z, ps.p, tr) *
           qpochhammer(ps.p, ps.p, tr);
}

cplx theta_u(cplx u, const ParameterSet& ps, const TruncationConfig& tr) {
    return ps.pow_p(0.5 * u * u - 0.5 * u) * theta_big(ps.x_of_u(u), ps, tr);
}

cplx theta_deriv0(const ParameterSet& ps, const TruncationConfig& tr) {
    cplx pp = qpochhammer(ps.p, ps.p, tr);
    return -ps.log_p * pp * pp * pp;
}

cplx xi(cplx u, const ParameterSet& ps, const TruncationConfig& tr) {
    cplx x = ps.x_of_u(u);
    cplx p2q2 = ps.p * ps.p * ps.q2;
    return ps.pow_p(0.5 * u * u) * (1.0 - x) * qpochhammer(x, ps.p, tr) *
           qpochhammer(p2q2 * x, ps.p, tr) * qpochhammer(ps.p, ps.p, tr);
}

cplx eta(cplx u, const ParameterSet& ps, const TruncationConfig& tr) {
    cplx x = ps.x_of_u(u);
    cplx xinv = 1.0 / x;
    if (std::abs(1.0 - xinv) < 1e-12)
        throw PoleError("eta: pole at p^u = 1");
    cplx q = ps.q(), d = ps.d();
    return ps.pow_p(0.5 * u * u - (ps.beta + 0.5) * u) * (1.0 / ps.d_half) /
           (1.0 - xinv) * qpochhammer(q / d * x, ps.p, tr) *
           qpochhammer(q * d * xinv, ps.p, tr) * qpochhammer(ps.p, ps.p, tr);
}

namespace {

// Samples f(u0 + eps w) * (eps w) at 8 equispaced points of the circle.
// For a simple pole plus an analytic part the samples cluster around the
// residue with spread O(eps); the mean of a pole of order m >= 2 vanishes
// (it is blind to the circle average) but its per-point spread grows like
// eps^{1-m} as the radius shrinks.
void circle_samples(const std::function<cplx(cplx)>& f, cplx u0, double eps,
                    cplx& mean, double& spread) {
    constexpr int npts = 8;
    cplx g[npts];
    cplx acc = 0.0;
    for (int k = 0; k < npts; ++k) {
        double t = 2.0 * PI * k / npts;
        cplx du = eps * cplx(std::cos(t), std::sin(t));
        g[k] = f(u0 + du) * du;
        acc += g[k];
    }
    mean = acc / static_cast<double>(npts);
    spread = 0.0;
    for (int k = 0; k < npts; ++k)
        spread = std::max(spread, std::abs(g[k] - mean));
}

}  // namespace

cplx residue_at(const std::function<cplx(cplx)>& f, cplx u0,
                const TruncationConfig& tr) {
    double eps = tr.residue_epsilon;
    cplx m1, m2;
    double s1, s2;
    circle_samples(f, u0, eps, m1, s1);
    circle_samples(f, u0, 0.5 * eps, m2, s2);
    double tol =
        10.0 * std::max(tr.tolerance_abs, tr.tolerance_rel * std::abs(m2));
    if (s2 > 0.6 * s1 + tol) {
        std::ostringstream os;
        os << "residue_at: sample spread grew from " << s1 << " to " << s2
           << " when halving the radius " << eps
           << "; the pole is not simple";
        throw DomainError(os.str());
    }
    if (std::abs(m1 - m2) > tol) {
        std::ostringstream os;
        os << "residue_at: estimates at radii " << eps << " and " << 0.5 * eps
           << " disagree by " << std::abs(m1 - m2)
           << "; the radius is unsuitable";
        throw DomainError(os.str());
    }
    return m2;
}

}  // namespace kn
