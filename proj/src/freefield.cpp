#include "kn/freefield.hpp"

#include <cmath>

namespace kn {

namespace {

cplx ipow(cplx z, int e) {
    cplx r = 1.0;
    cplx b = e >= 0 ? z : 1.0 / z;
    for (int k = std::abs(e); k > 0; --k) r *= b;
    return r;
}

cplx inv(cplx den, const char* where) {
    if (std::abs(den) < 1e-12)
        throw PoleError(std::string(where) + ": contraction pole");
    return 1.0 / den;
}

}  // namespace

cplx ExampleFamily::coefficient(Slot a) const {
    cplx q = ps.q();
    if (!a.bar) return -ipow(q, a.k - ell) * u_spec[a.k - 1];
    return ipow(q, -a.k + ell - 1) / u_spec[a.k - 1];
}

std::vector<Slot> ExampleFamily::all_slots() const {
    std::vector<Slot> s;
    for (int k = 1; k <= ell; ++k) s.push_back({k, false});
    for (int k = ell; k >= 1; --k) s.push_back({k, true});
    return s;
}

ExampleFamily make_example_module(int ell, const std::vector<cplx>& u_spectral,
                                  const ParameterSet& params) {
    if (ell < 3) throw DomainError("make_example_module: requires ell >= 3");
    if (params.n < 3)
        throw DomainError("make_example_module: requires n >= 3 "
                          "(distinct color classes)");
    if (static_cast<int>(u_spectral.size()) != ell)
        throw DomainError("make_example_module: need ell spectral parameters");
    for (const auto& u : u_spectral)
        if (std::abs(u) < 1e-300)
            throw DomainError("make_example_module: zero spectral parameter");
    ExampleFamily fam;
    fam.ell = ell;
    fam.u_spec = u_spectral;
    fam.ps = params;
    fam.ps.C = fam.ps.pow_q(static_cast<double>(ell - 1));  // C^2 = q^{2l-2}
    return fam;
}

cplx contract(const ExampleFamily& fam, int i, Slot a, int j, Slot b, cplx x) {
    const ParameterSet& ps = fam.ps;
    cplx q2 = ps.q2;
    cplx C2 = ps.C * ps.C;
    ColorClass cc = color_class(i, j, ps.n);
    if (cc == ColorClass::far_apart) return 1.0;
    if (cc != ColorClass::same && cc != ColorClass::next &&
        cc != ColorClass::prev)
        throw DomainError("contract: family requires n >= 3");

    int oa = a.ord(fam.ell), ob = b.ord(fam.ell);
    bool pair_bar = is_bar_pair(a, b);

    if (cc == ColorClass::same) {
        if (slot_equal(a, b)) return (1.0 - x) * (1.0 - x / q2);
        if (!pair_bar) {
            if (oa < ob) return (1.0 - x / q2) * inv(1.0 - q2 * x, "contract");
            return 1.0;
        }
        if (oa < ob) {  // a plain, b = a-bar
            int k = a.k;
            return (1.0 - x / q2) * inv(1.0 - q2 * x, "contract") *
                   inv(1.0 - C2 * ipow(q2, 1 - k) * x, "contract") *
                   inv(1.0 - C2 * ipow(q2, -k) * x, "contract");
        }
        int k = b.k;  // a barred, b plain
        return inv(1.0 - ipow(q2, k) / C2 * x, "contract") *
               inv(1.0 - ipow(q2, k - 1) / C2 * x, "contract");
    }

    // next: (e1, e3) = (q1, q3); prev is the q1 <-> q3 swap.
    cplx e1 = cc == ColorClass::next ? ps.q1 : ps.q3;
    cplx e3 = cc == ColorClass::next ? ps.q3 : ps.q1;
    if (slot_equal(a, b)) return inv(1.0 - e1 * x, "contract");
    if (!pair_bar) {
        if (oa < ob) return (1.0 - x / e3) * inv(1.0 - e1 * x, "contract");
        return 1.0;
    }
    if (oa < ob) {
        int k = a.k;
        return (1.0 - x / e3) * inv(1.0 - e1 * x, "contract") *
               (1.0 - C2 * ipow(q2, 1 - k) * e1 * x);
    }
    int k = b.k;
    return 1.0 - ipow(q2, k - 1) / (C2 * e3) * x;
}

cplx product_prefactor(const ExampleFamily& fam, const std::vector<Term>& terms,
                       cplx multiplier) {
    cplx acc = multiplier;
    for (const auto& t : terms) acc *= fam.coefficient(t.slot) * t.z;
    for (std::size_t r = 0; r < terms.size(); ++r)
        for (std::size_t s = r + 1; s < terms.size(); ++s)
            acc *= contract(fam, terms[r].color, terms[r].slot, terms[s].color,
                            terms[s].slot, terms[s].z / terms[r].z);
    return acc;
}

namespace {

// The dressed triple-product scalar at explicit points; brackets use the
// (e1, e3) pair selected by the sign.
cplx wheel_value(const ExampleFamily& fam, int i, int sign, Slot a, Slot b,
                 Slot c, cplx z1, cplx z2, cplx w) {
    const ParameterSet& ps = fam.ps;
    cplx C2 = ps.C * ps.C;
    cplx e1 = sign > 0 ? ps.q1 : ps.q3;
    cplx x21 = z2 / z1, xw1 = w / z1, xw2 = w / z2;
    cplx bracket = (1.0 - C2 * x21) * (1.0 - x21 / C2) * (1.0 - ps.q2 * x21) /
                   ((1.0 - x21) * (1.0 - x21) * (1.0 - x21)) *
                   (1.0 - e1 * xw1) / (1.0 - xw1) * (1.0 - e1 * xw2) /
                   (1.0 - xw2);
    int j = sign > 0 ? i + 1 : i - 1;
    return bracket * fam.coefficient(a) * fam.coefficient(b) *
           fam.coefficient(c) * contract(fam, i, a, i, b, x21) *
           contract(fam, i, a, j, c, xw1) * contract(fam, i, b, j, c, xw2);
}

// Same dressed scalar, additionally multiplied by the zero-mode vacuum
// coefficient of the full three-factor word and the z1 z2 w monomial.
// Needed whenever two summands of the current must be combined: their
// oscillator prefactors alone are only defined up to the relative
// zero-mode monomial.
cplx wheel_value_dressed(const ExampleFamily& fam, int i, int sign, Slot a,
                         Slot b, Slot c, cplx z1, cplx z2, cplx w) {
    int j = sign > 0 ? i + 1 : i - 1;
    std::vector<ZmOp> word = lambda_zero_modes(fam, i, a, z1);
    std::vector<ZmOp> wb = lambda_zero_modes(fam, i, b, z2);
    std::vector<ZmOp> wc = lambda_zero_modes(fam, j, c, w);
    word.insert(word.end(), wb.begin(), wb.end());
    word.insert(word.end(), wc.begin(), wc.end());
    ZmVacuum st = zero_mode_vacuum(fam, word);
    return wheel_value(fam, i, sign, a, b, c, z1, z2, w) * z1 * z2 * w *
           st.coeff;
}

}  // namespace

WheelResult wheel_check(const ExampleFamily& fam, int i, int sign, Slot a,
                        Slot b, Slot c, cplx base_u, WheelCase wcase,
                        const TruncationConfig& tr, bool negative_control) {
    const ParameterSet& ps = fam.ps;
    cplx C2 = ps.C * ps.C;
    cplx e1 = sign > 0 ? ps.q1 : ps.q3;
    cplx e3 = sign > 0 ? ps.q3 : ps.q1;

    cplx z = ps.x_of_u(base_u);
    cplx s2, sw;  // z2 = s2 z, w = sw z
    if (negative_control) {
        s2 = ps.q2;
        sw = 1.0;
    } else {
        switch (wcase) {
            case WheelCase::one:   s2 = ps.q2;    sw = 1.0 / e1;      break;
            case WheelCase::two:   s2 = C2;       sw = C2 * e3;       break;
            case WheelCase::three: s2 = 1.0 / C2; sw = 1.0 / (C2 * e1); break;
        }
    }

    // At (z1, z2) = (z, q2 z) the pair <Lambda_{i,kbar} Lambda_{i,k}> has a
    // genuine simple pole when k = ell-1 or k = ell-2, because C^2 = q2^{ell-1}
    // pins one of its pole locations to x = q2.  The corresponding two
    // summands of the current are then singular individually, but their
    // residue operators coincide (:V(z) V^{-1}(q2 z): equals the
    // psi^-(z) psi^+(q z)^{-1} chain segment up to zero modes), so the pair
    // of summands cancels jointly.  Evaluate the two-member sum, with zero
    // modes included, instead of the single ill-defined term.
    Slot partner{0, false};
    bool paired = wcase == WheelCase::one && !negative_control && a.bar &&
                  !b.bar && a.k == b.k &&
                  (a.k == fam.ell - 1 || a.k == fam.ell - 2);
    if (paired) partner.k = (a.k == fam.ell - 1) ? fam.ell - 2 : fam.ell - 1;

    auto F = [&](cplx eps) {
        // Irrational ratio between the two perturbations avoids accidental
        // cancellations along the probing direction.
        const double rho = 1.6180339887498949;
        cplx z2 = s2 * z * (1.0 + eps);
        cplx w = sw * z * (1.0 + rho * eps);
        if (!paired) return wheel_value(fam, i, sign, a, b, c, z, z2, w);
        Slot pa{partner.k, true}, pb{partner.k, false};
        return wheel_value_dressed(fam, i, sign, a, b, c, z, z2, w) +
               wheel_value_dressed(fam, i, sign, pa, pb, c, z, z2, w);
    };
    auto circle4 = [&](double r) {
        cplx acc = 0.0;
        for (int k = 0; k < 4; ++k) {
            double t = 2.0 * PI * k / 4.0 + 0.39269908169872414;  // pi/8 offset
            acc += F(r * cplx(std::cos(t), std::sin(t)));
        }
        return acc / 4.0;
    };
    // A(r) = F0 + c4 r^4 + O(r^8): the 4-point average annihilates pole
    // parts up to third order and all Taylor terms of order not divisible
    // by 4.  Richardson over two radii removes the r^4 term.
    double r = std::max(tr.residue_epsilon, 1e-3) * 10.0;
    cplx A1 = circle4(r), A2 = circle4(0.5 * r);
    WheelResult res;
    res.value = (16.0 * A2 - A1) / 15.0;
    res.scale = std::abs(F(cplx(0.25, 0.1)));
    if (!(res.scale > 1e-300)) res.scale = std::abs(F(cplx(0.31, -0.17)));
    return res;
}

cplx quadres_check_boundaryB(const ParameterSet& ps, cplx c2) {
    cplx q = ps.q();
    cplx kk = 1.0 / (ps.q_half - 1.0 / ps.q_half);
    cplx den = (1.0 - c2) * (1.0 - c2);
    if (std::abs(den) < 1e-12)
        throw PoleError("quadres_check_boundaryB: c2 = 1");
    cplx lhs = q * kk * kk * (1.0 - c2 / (q * q)) * (1.0 - q * q * c2) / den;
    cplx rhs = 1.0 / (q - 1.0 / q) * (1.0 + c2) * (1.0 - q * q * c2) / den;
    return lhs - rhs;
}

cplx serre_check_boundaryB(const ParameterSet& ps, int sign, cplx z1, cplx z2,
                           cplx w) {
    cplx q = ps.q();
    cplx ds = sign > 0 ? ps.d() : 1.0 / ps.d();
    cplx kk = 1.0 / (ps.q_half - 1.0 / ps.q_half);
    cplx x21 = z2 / z1, xw1 = w / z1, xw2 = w / z2;
    cplx den = (1.0 - x21) * (1.0 - x21) * (1.0 - xw1) * (1.0 - xw2);
    if (std::abs(den) < 1e-12)
        throw PoleError("serre_check_boundaryB: coincident points");
    return kk * kk * kk * (1.0 - x21 / (q * q)) * (1.0 - q * q * x21) *
           (1.0 - ds * xw1) * (1.0 - ds * xw2) / den;
}

cplx fd_gzero_check(const ParameterSet& ps, cplx z) {
    cplx q = ps.q();
    cplx C2 = 1.0 / (q * q);  // trivial boundary module value C = q^{-1}
    return g_fun(0, 0, z, C2 * z, ps);
}

// ---------------------------------------------------------------------------
// Zero-mode engine

namespace {

int mod_idx(int i, int n) { return ((i % n) + n) % n; }

// (alpha_i, alpha_j) for the cyclic root pairing; 0 for n = 1.
int alpha_pairing(int i, int j, int n) {
    if (n == 1) return 0;
    int di = mod_idx(j - i, n);
    int v = (di == 0) ? 2 : 0;
    if (di == 1) v -= 1;
    if (di == n - 1) v -= 1;
    return v;
}

}  // namespace

std::vector<ZmOp> lambda_zero_modes(const ExampleFamily& fam, int i, Slot a,
                                    cplx z) {
    const ParameterSet& ps = fam.ps;
    int n = ps.n;
    int ci = mod_idx(i, n), cim = mod_idx(i - 1, n);
    cplx q = ps.q();
    std::vector<ZmOp> w;
    if (!a.bar) {
        cplx w0 = ipow(q, a.k - fam.ell + 1) * z;
        // :V_i(w0)^{-1}: zero modes, operator order left to right
        w.push_back({ZmOp::charge_shift, a.k, cim, -1, 0.0});
        w.push_back({ZmOp::charge_shift, a.k, ci, +1, 0.0});
        w.push_back({ZmOp::diagonal, a.k, cim, 0, 1.0 / (w0 * ps.d_half)});
        w.push_back({ZmOp::diagonal, a.k, ci, 0, w0 / ps.d_half});
        // psi^+_i(.)^{-1} on the remaining Fock slots: q^{-alpha_i}
        for (int t = a.k + 1; t <= fam.ell; ++t) {
            w.push_back({ZmOp::diagonal, t, cim, 0, 1.0 / q});
            w.push_back({ZmOp::diagonal, t, ci, 0, q});
        }
        w.push_back({ZmOp::k_mode, 0, ci, +1, 0.0});
    } else {
        cplx w0 = ipow(q, -a.k + fam.ell - 1) * z;
        // V_i(w0) zero modes
        w.push_back({ZmOp::charge_shift, a.k, ci, -1, 0.0});
        w.push_back({ZmOp::charge_shift, a.k, cim, +1, 0.0});
        w.push_back({ZmOp::diagonal, a.k, cim, 0, w0 * ps.d_half});
        w.push_back({ZmOp::diagonal, a.k, ci, 0, ps.d_half / w0});
        // psi^-_i zero modes: also q^{-alpha_i}
        for (int t = a.k + 1; t <= fam.ell; ++t) {
            w.push_back({ZmOp::diagonal, t, cim, 0, 1.0 / q});
            w.push_back({ZmOp::diagonal, t, ci, 0, q});
        }
        w.push_back({ZmOp::k_mode, 0, ci, -1, 0.0});
    }
    return w;
}

ZmVacuum zero_mode_vacuum(const ExampleFamily& fam,
                          const std::vector<ZmOp>& word) {
    const ParameterSet& ps = fam.ps;
    ZmVacuum st;
    st.coeff = 1.0;
    // Apply right to left (rightmost operator hits the vacuum first).
    for (auto it = word.rbegin(); it != word.rend(); ++it) {
        const ZmOp& op = *it;
        switch (op.kind) {
            case ZmOp::charge_shift: {
                int s = 0;
                for (int j = 0; j < op.idx; ++j) {
                    auto f = st.charge.find({op.pos, j});
                    if (f != st.charge.end()) s += f->second;
                }
                if (s & 1) st.coeff = -st.coeff;
                st.charge[{op.pos, op.idx}] += op.sgn;
                break;
            }
            case ZmOp::diagonal: {
                auto f = st.charge.find({op.pos, op.idx});
                int m = f == st.charge.end() ? 0 : f->second;
                if (m != 0) st.coeff *= ipow(op.base, m);
                break;
            }
            case ZmOp::k_mode:
                // collect in operator order: rbegin visits rightmost first,
                // so prepend
                st.kword.insert(st.kword.begin(), {op.sgn, op.idx});
                break;
        }
    }
    // Canonicalize the K word: all minus modes left of all plus modes,
    // picking up q^{2(alpha_i, alpha_j)} per (+,-) transposition; modes of
    // equal sign commute exactly, so they are additionally sorted by color
    // with no factor.
    bool moved = true;
    while (moved) {
        moved = false;
        for (std::size_t t = 0; t + 1 < st.kword.size(); ++t) {
            if (st.kword[t].first > 0 && st.kword[t + 1].first < 0) {
                st.coeff *= ipow(
                    ps.q2, alpha_pairing(st.kword[t].second,
                                         st.kword[t + 1].second, ps.n));
                std::swap(st.kword[t], st.kword[t + 1]);
                moved = true;
            } else if (st.kword[t].first == st.kword[t + 1].first &&
                       st.kword[t].second > st.kword[t + 1].second) {
                std::swap(st.kword[t], st.kword[t + 1]);
                moved = true;
            }
        }
    }
    for (auto it = st.charge.begin(); it != st.charge.end();)
        it = it->second == 0 ? st.charge.erase(it) : std::next(it);
    return st;
}

namespace {

cplx ordered_pair_value(const ExampleFamily& fam, int i, Slot a, Slot b,
                        cplx z1, cplx z2, ZmVacuum* out_state) {
    std::vector<ZmOp> word = lambda_zero_modes(fam, i, a, z1);
    std::vector<ZmOp> wb = lambda_zero_modes(fam, i, b, z2);
    word.insert(word.end(), wb.begin(), wb.end());
    ZmVacuum st = zero_mode_vacuum(fam, word);
    if (out_state) *out_state = st;
    return fam.coefficient(a) * z1 * fam.coefficient(b) * z2 *
           contract(fam, i, a, i, b, z2 / z1) * st.coeff;
}

}  // namespace

double symmetry_pair_residual(const ExampleFamily& fam, int i, Slot a, Slot b,
                              cplx z1, cplx z2) {
    auto S = [&](cplx w1, cplx w2) {
        cplx acc = ordered_pair_value(fam, i, a, b, w1, w2, nullptr);
        if (!slot_equal(a, b))
            acc += ordered_pair_value(fam, i, b, a, w1, w2, nullptr);
        return lambda0(i, i, w2 / w1, fam.ps) * acc;
    };
    cplx s12 = S(z1, z2), s21 = S(z2, z1);
    double scale = std::max({std::abs(s12), std::abs(s21), 1e-30});
    return std::abs(s12 - s21) / scale;
}

double far_color_commutation_residual(const ExampleFamily& fam, int i, int j,
                                      Slot a, Slot b, cplx z1, cplx z2) {
    std::vector<ZmOp> wa = lambda_zero_modes(fam, i, a, z1);
    std::vector<ZmOp> wb = lambda_zero_modes(fam, j, b, z2);
    std::vector<ZmOp> w1 = wa, w2 = wb;
    w1.insert(w1.end(), wb.begin(), wb.end());
    w2.insert(w2.end(), wa.begin(), wa.end());
    ZmVacuum r1 = zero_mode_vacuum(fam, w1);
    ZmVacuum r2 = zero_mode_vacuum(fam, w2);
    if (r1.charge != r2.charge || r1.kword != r2.kword)
        return 1.0;  // different sectors: maximal violation
    double scale = std::max({std::abs(r1.coeff), std::abs(r2.coeff), 1e-30});
    return std::abs(r1.coeff - r2.coeff) / scale;
}

}  // namespace kn
