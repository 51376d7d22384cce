#include "kn/structfn.hpp"

#include <cmath>

namespace kn {

namespace {

cplx safe_div(cplx num, cplx den, const char* where) {
    if (std::abs(den) < 1e-13)
        throw PoleError(std::string(where) + ": evaluation at a pole");
    return num / den;
}

// Pochhammer-ratio (a x; p)_inf / (b x; p)_inf.
cplx poch_ratio(cplx a, cplx b, cplx x, const ParameterSet& ps,
                const TruncationConfig& tr) {
    return safe_div(qpochhammer(a * x, ps.p, tr), qpochhammer(b * x, ps.p, tr),
                    "lambda_elliptic");
}

}  // namespace

ColorClass color_class(int i, int j, int n) {
    if (n < 1) throw DomainError("color_class: n must be >= 1");
    if (n == 1) return ColorClass::n1_all;
    auto m = [n](int a) { return ((a % n) + n) % n; };
    int di = m(j - i);
    if (di == 0) return ColorClass::same;
    if (n == 2) return ColorClass::n2_off;
    if (di == 1) return ColorClass::next;
    if (di == n - 1) return ColorClass::prev;
    return ColorClass::far_apart;
}

cplx g_fun(int i, int j, cplx z, cplx w, const ParameterSet& ps) {
    cplx q = ps.q(), d = ps.d();
    switch (color_class(i, j, ps.n)) {
        case ColorClass::same:
            return z - q * q * w;
        case ColorClass::next:
            return z - d / q * w;
        case ColorClass::prev:
            return z - w / (q * d);
        case ColorClass::far_apart:
            return z - w;
        case ColorClass::n2_off:
            return (z - ps.q1 * w) * (z - ps.q3 * w);
        case ColorClass::n1_all:
            return (z - ps.q1 * w) * (z - ps.q2 * w) * (z - ps.q3 * w);
    }
    throw DomainError("g_fun: unreachable");
}

cplx G_fun(int i, int j, cplx x, const ParameterSet& ps) {
    cplx q = ps.q(), d = ps.d();
    switch (color_class(i, j, ps.n)) {
        case ColorClass::same:
            return q * q * safe_div(1.0 - x / (q * q), 1.0 - q * q * x, "G_fun");
        case ColorClass::next:
            return safe_div(1.0 - q * d * x, 1.0 - d / q * x, "G_fun") / q;
        case ColorClass::prev:
            return safe_div(1.0 - q / d * x, 1.0 - x / (q * d), "G_fun") / q;
        case ColorClass::far_apart:
            return 1.0;
        case ColorClass::n2_off:
            return safe_div((1.0 - x / ps.q1) * (1.0 - x / ps.q3),
                            (1.0 - ps.q1 * x) * (1.0 - ps.q3 * x), "G_fun") /
                   (q * q);
        case ColorClass::n1_all:
            return safe_div(
                (1.0 - x / ps.q1) * (1.0 - x / ps.q2) * (1.0 - x / ps.q3),
                (1.0 - ps.q1 * x) * (1.0 - ps.q2 * x) * (1.0 - ps.q3 * x),
                "G_fun");
    }
    throw DomainError("G_fun: unreachable");
}

cplx d_factor(int i, int j, const ParameterSet& ps) {
    switch (color_class(i, j, ps.n)) {
        case ColorClass::same:
        case ColorClass::far_apart:
        case ColorClass::n1_all:
            return 1.0;
        case ColorClass::next:
            return 1.0 / ps.d();
        case ColorClass::prev:
            return ps.d();
        case ColorClass::n2_off:
            return -1.0;
    }
    throw DomainError("d_factor: unreachable");
}

cplx lambda0(int i, int j, cplx x, const ParameterSet& ps) {
    cplx q = ps.q(), d = ps.d(), C = ps.C;
    cplx one_mx = 1.0 - x;
    switch (color_class(i, j, ps.n)) {
        case ColorClass::same:
            return safe_div((1.0 - C * C * x) * (1.0 - x / (C * C)) *
                                (1.0 - q * q * x),
                            one_mx * one_mx * one_mx, "lambda0");
        case ColorClass::next:
            return safe_div(1.0 - d / q * x, one_mx, "lambda0") / ps.d_half;
        case ColorClass::prev:
            return ps.d_half * safe_div(1.0 - x / (q * d), one_mx, "lambda0");
        case ColorClass::far_apart:
            return 1.0;
        case ColorClass::n2_off:
            return safe_div((1.0 - ps.q1 * x) * (1.0 - ps.q3 * x),
                            one_mx * one_mx, "lambda0");
        case ColorClass::n1_all:
            return safe_div((1.0 - C * C * x) * (1.0 - x / (C * C)) *
                                (1.0 - ps.q1 * x) * (1.0 - ps.q2 * x) *
                                (1.0 - ps.q3 * x),
                            one_mx * one_mx * one_mx * one_mx * one_mx,
                            "lambda0");
    }
    throw DomainError("lambda0: unreachable");
}

cplx lambda_elliptic(int i, int j, cplx u, const ParameterSet& ps,
                     const TruncationConfig& tr) {
    cplx x = ps.x_of_u(u);
    cplx q = ps.q(), d = ps.d();
    // x^w on the fixed branch, x = p^u.
    auto pow_x = [&](cplx w) { return ps.pow_p(u * w); };
    switch (color_class(i, j, ps.n)) {
        case ColorClass::same:
            return pow_x(-ps.gamma) * lambda0(i, j, x, ps) *
                   poch_ratio(1.0 / (q * q), q * q, x, ps, tr);
        case ColorClass::next:
            return pow_x(0.5 * ps.gamma) * lambda0(i, j, x, ps) *
                   poch_ratio(q * d, d / q, x, ps, tr);
        case ColorClass::prev:
            return pow_x(0.5 * ps.gamma) * lambda0(i, j, x, ps) *
                   poch_ratio(q / d, 1.0 / (q * d), x, ps, tr);
        case ColorClass::far_apart:
            return 1.0;
        case ColorClass::n2_off:
            return pow_x(ps.gamma) * lambda0(i, j, x, ps) *
                   poch_ratio(1.0 / ps.q1, ps.q1, x, ps, tr) *
                   poch_ratio(1.0 / ps.q3, ps.q3, x, ps, tr);
        case ColorClass::n1_all:
            return lambda0(i, j, x, ps) *
                   poch_ratio(1.0 / ps.q1, ps.q1, x, ps, tr) *
                   poch_ratio(1.0 / ps.q2, ps.q2, x, ps, tr) *
                   poch_ratio(1.0 / ps.q3, ps.q3, x, ps, tr);
    }
    throw DomainError("lambda_elliptic: unreachable");
}

namespace {

cplx G_tilde_same(cplx x, const ParameterSet& ps) {
    cplx q = ps.q();
    return q * (1.0 - x / q) * (1.0 - q * x) /
           ((1.0 - x) * (1.0 - q * q * x));
}

cplx G_tilde_next(cplx x, const ParameterSet& ps) {
    cplx q = ps.q(), d = ps.d();
    return (1.0 - q * d * x) / (1.0 - d * x) / ps.q_half;
}

cplx G_tilde_prev(cplx x, const ParameterSet& ps) {
    cplx q = ps.q(), d = ps.d();
    return (1.0 - q / d * x) / (1.0 - x / d) / ps.q_half;
}

}  // namespace

cplx G_tilde(int i, int j, cplx x, const ParameterSet& ps) {
    switch (color_class(i, j, ps.n)) {
        case ColorClass::same:
            return G_tilde_same(x, ps);
        case ColorClass::next:
            return G_tilde_next(x, ps);
        case ColorClass::prev:
            return G_tilde_prev(x, ps);
        case ColorClass::far_apart:
            return 1.0;
        case ColorClass::n2_off:
            return G_tilde_next(x, ps) * G_tilde_prev(x, ps);
        case ColorClass::n1_all:
            return G_tilde_same(x, ps) * G_tilde_next(x, ps) *
                   G_tilde_prev(x, ps);
    }
    throw DomainError("G_tilde: unreachable");
}

cplx serre_X_n1(cplx z1, cplx z2, cplx z3, const ParameterSet& ps) {
    if (ps.n != 1) throw DomainError("serre_X_n1: requires n = 1");
    cplx zzz = z1 * z2 * z3;
    return (z1 + z2) * (z3 * z3 - z1 * z2) / zzz * G_fun(0, 0, z2 / z3, ps) +
           (z2 + z3) * (z1 * z1 - z2 * z3) / zzz * G_fun(0, 0, z1 / z2, ps) +
           (z3 + z1) * (z2 * z2 - z3 * z1) / zzz;
}

double check_fusion_identities(int i, cplx x, const ParameterSet& ps) {
    if (ps.n < 3) throw DomainError("check_fusion_identities: requires n >= 3");
    cplx a = G_fun(i, i - 1, ps.q1 * x, ps) * G_fun(i, i, x, ps) *
             G_fun(i, i + 1, x / ps.q1, ps);
    cplx b = G_fun(i - 1, i, ps.q3 * x, ps) * G_fun(i, i, x, ps) *
             G_fun(i, i + 1, x / ps.q1, ps);
    return std::max(std::abs(a - 1.0), std::abs(b - 1.0));
}

}  // namespace kn
