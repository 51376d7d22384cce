#include "kn/kernels.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <numeric>
#include <random>
#include <sstream>

namespace kn {

namespace {

// Neumaier-compensated accumulator, applied per component.
struct Kahan {
    double s = 0.0, c = 0.0;
    void add(double x) {
        double t = s + x;
        if (std::abs(s) >= std::abs(x))
            c += (s - t) + x;
        else
            c += (x - t) + s;
        s = t;
    }
    double get() const { return s + c; }
};

struct KahanC {
    Kahan re, im;
    void add(cplx z) {
        re.add(z.real());
        im.add(z.imag());
    }
    cplx get() const { return {re.get(), im.get()}; }
};

double binom(int n, int k) {
    double r = 1.0;
    for (int j = 1; j <= k; ++j) r *= double(n - k + j) / j;
    return r;
}

std::vector<unsigned> masks_with_popcount(int len, int m) {
    std::vector<unsigned> out;
    for (unsigned mask = 0; mask < (1u << len); ++mask)
        if (std::popcount(mask) == m) out.push_back(mask);
    if (len == 0 && m == 0) { /* loop above already yielded mask 0 */ }
    return out;
}

cplx checked_div(cplx num, cplx den, const char* where) {
    if (std::abs(den) < 1e-12)
        throw PoleError(std::string(where) + ": theta denominator vanished");
    return num / den;
}

}  // namespace

ThetaFn theta_fn_of(const ThetaElement& el) {
    return [el](const std::vector<cplx>& u) { return theta_eval(el, u); };
}

ThetaFn const_theta_fn(cplx value) {
    return [value](const std::vector<cplx>&) { return value; };
}

cplx kernel_h(int M, const std::vector<std::vector<cplx>>& u, const ThetaFn& th,
              const ParameterSet& ps, const TruncationConfig& tr) {
    int n = static_cast<int>(u.size());
    if (n < 1) throw DomainError("kernel_h: empty grid");
    for (const auto& row : u)
        if (static_cast<int>(row.size()) != M)
            throw DomainError("kernel_h: grid must be n x M");
    auto th_u = [&](cplx x) { return theta_u(x, ps, tr); };
    cplx g = ps.gamma, b = ps.beta;
    if (n == 1) {
        cplx acc = 1.0;
        for (int a = 0; a < M; ++a)
            for (int c = a + 1; c < M; ++c) {
                cplx x = u[0][a] - u[0][c];
                acc *= th_u(x) * th_u(x - g);
                acc = checked_div(acc, th_u(x - b - 0.5 * g), "kernel_h");
                acc = checked_div(acc, th_u(x + b - 0.5 * g), "kernel_h");
            }
        return acc;
    }
    std::vector<cplx> ubar(n, 0.0);
    for (int i = 0; i < n; ++i)
        ubar[i] = std::accumulate(u[i].begin(), u[i].end(), cplx(0.0));
    cplx acc = th(ubar);
    for (int i = 0; i < n; ++i)
        for (int a = 0; a < M; ++a)
            for (int c = a + 1; c < M; ++c) {
                cplx x = u[i][a] - u[i][c];
                acc *= th_u(x) * th_u(x - g);
            }
    for (int i = 0; i + 1 < n; ++i)
        for (int a = 0; a < M; ++a)
            for (int c = 0; c < M; ++c)
                acc = checked_div(acc, th_u(u[i][a] - u[i + 1][c] - b - 0.5 * g),
                                  "kernel_h");
    for (int a = 0; a < M; ++a)
        for (int c = 0; c < M; ++c)
            acc = checked_div(acc, th_u(u[n - 1][a] - u[0][c] - b + 0.5 * g),
                              "kernel_h");
    return acc;
}

cplx kernel_k(int M, const std::vector<std::vector<cplx>>& u, const ThetaFn& th,
              const ParameterSet& ps, const TruncationConfig& tr) {
    int n = static_cast<int>(u.size());
    if (n < 2) throw DomainError("kernel_k: requires n >= 2");
    for (const auto& row : u)
        if (static_cast<int>(row.size()) != M)
            throw DomainError("kernel_k: grid must be n x M");
    std::vector<cplx> ubar(n, 0.0);
    for (int i = 0; i < n; ++i)
        ubar[i] = std::accumulate(u[i].begin(), u[i].end(), cplx(0.0));
    cplx acc = th(ubar);
    for (int i = 0; i < n; ++i)
        for (int a = 0; a < M; ++a)
            for (int c = 0; c < M; ++c)
                if (a != c) acc *= xi(u[i][a] - u[i][c], ps, tr);
    for (int i = 0; i < n; ++i) {
        int ip = (i + 1) % n;
        for (int a = 0; a < M; ++a)
            for (int c = 0; c < M; ++c)
                acc = checked_div(acc, eta(u[i][a] - u[ip][c], ps, tr),
                                  "kernel_k");
    }
    return acc;
}

namespace {

cplx T_common(const std::vector<std::vector<cplx>>& u,
              const std::vector<std::vector<cplx>>& v, const ThetaFn& th1,
              const ThetaFn& th2, const ParameterSet& ps,
              const TruncationConfig& tr, bool prime) {
    int n = static_cast<int>(u.size());
    if (n < 1 || static_cast<int>(v.size()) != n)
        throw DomainError("T_func: u and v must have n rows each");
    int M = static_cast<int>(u[0].size()), N = static_cast<int>(v[0].size());
    auto th_u = [&](cplx x) { return theta_u(x, ps, tr); };
    cplx g = ps.gamma, b = ps.beta;
    std::vector<cplx> ubar(n, 0.0), vbar(n, 0.0);
    for (int i = 0; i < n; ++i) {
        ubar[i] = std::accumulate(u[i].begin(), u[i].end(), cplx(0.0));
        vbar[i] = std::accumulate(v[i].begin(), v[i].end(), cplx(0.0));
    }
    cplx acc = th1(ubar) * th2(vbar);
    for (int i = 0; i < n; ++i) {
        int ip = (i + 1) % n;
        for (int a = 0; a < M; ++a)
            for (int c = 0; c < N; ++c) {
                if (!prime) {
                    acc *= th_u(u[i][a] - v[ip][c] - 0.5 * g - b) *
                           th_u(v[i][c] - u[ip][a] + 0.5 * g - b);
                    cplx x = u[i][a] - v[i][c];
                    acc = checked_div(acc, th_u(x) * th_u(x - g), "T_func");
                } else {
                    acc *= th_u(v[i][c] - u[ip][a] - 0.5 * g - b) *
                           th_u(u[i][a] - v[ip][c] + 0.5 * g - b);
                    cplx x = v[i][c] - u[i][a];
                    acc = checked_div(acc, th_u(x) * th_u(x - g),
                                      "Tprime_func");
                }
            }
    }
    return acc;
}

}  // namespace

cplx T_func(const std::vector<std::vector<cplx>>& u,
            const std::vector<std::vector<cplx>>& v, const ThetaFn& th1,
            const ThetaFn& th2, const ParameterSet& ps,
            const TruncationConfig& tr) {
    return T_common(u, v, th1, th2, ps, tr, false);
}

cplx Tprime_func(const std::vector<std::vector<cplx>>& u,
                 const std::vector<std::vector<cplx>>& v, const ThetaFn& th1,
                 const ThetaFn& th2, const ParameterSet& ps,
                 const TruncationConfig& tr) {
    return T_common(u, v, th1, th2, ps, tr, true);
}

namespace {

// All permutations of {0..m-1}.
std::vector<std::vector<int>> all_perms(int m) {
    std::vector<int> idx(m);
    std::iota(idx.begin(), idx.end(), 0);
    std::vector<std::vector<int>> out;
    do {
        out.push_back(idx);
    } while (std::next_permutation(idx.begin(), idx.end()));
    return out;
}

}  // namespace

cplx sym_T(const std::vector<std::vector<cplx>>& u,
           const std::vector<std::vector<cplx>>& v, const ThetaFn& th1,
           const ThetaFn& th2, const ParameterSet& ps,
           const TruncationConfig& tr, bool prime) {
    // Symmetrization is over the combined group {u_{i,a}} u {v_{i,b}} within
    // each row i: all (M+N)! rearrangements per row, the first M slots
    // playing the u role and the last N the v role.
    int n = static_cast<int>(u.size());
    int M = static_cast<int>(u[0].size()), N = static_cast<int>(v[0].size());
    int L = M + N;
    auto pw = all_perms(L);
    double total = std::pow(double(pw.size()), n);
    if (total > 1e5) {
        std::ostringstream os;
        os << "sym_T: " << total << " permutation terms exceed the 1e5 budget";
        throw CostError(os.str());
    }
    std::vector<std::vector<cplx>> w(n, std::vector<cplx>(L));
    for (int i = 0; i < n; ++i) {
        for (int a = 0; a < M; ++a) w[i][a] = u[i][a];
        for (int c = 0; c < N; ++c) w[i][M + c] = v[i][c];
    }
    std::vector<int> iw(n, 0);
    KahanC sum;
    while (true) {
        std::vector<std::vector<cplx>> up(n), vp(n);
        for (int i = 0; i < n; ++i) {
            up[i].resize(M);
            vp[i].resize(N);
            const auto& perm = pw[iw[i]];
            for (int a = 0; a < M; ++a) up[i][a] = w[i][perm[a]];
            for (int c = 0; c < N; ++c) vp[i][c] = w[i][perm[M + c]];
        }
        sum.add(T_common(up, vp, th1, th2, ps, tr, prime));
        int pos = 0;
        for (; pos < n; ++pos) {
            if (++iw[pos] < static_cast<int>(pw.size())) break;
            iw[pos] = 0;
        }
        if (pos == n) break;
    }
    return sum.get();
}

namespace {

// Core of the partition sum with a per-row-pair coupling parameter:
// alphas[i] is used for the factors linking row i to row i+1 (cyclically).
// The uniform case recovers the identity's two sides; the row-collapse
// reduction needs one doubled entry.
SumResult theta_identity_side_alphas(bool lhs, int M, int N,
                                     const std::vector<cplx>& alphas,
                                     const std::vector<std::vector<cplx>>& u,
                                     const ThetaFn& th1, const ThetaFn& th2,
                                     const ParameterSet& ps,
                                     const TruncationConfig& tr) {
    int n = static_cast<int>(u.size());
    if (static_cast<int>(alphas.size()) != n)
        throw DomainError("theta_identity_side: need one alpha per row");
    int L = M + N;
    if (n < 1) throw DomainError("theta_identity_side: empty grid");
    for (const auto& row : u)
        if (static_cast<int>(row.size()) != L)
            throw DomainError("theta_identity_side: grid must be n x (M+N)");
    double cost = std::pow(binom(L, M), n);
    if (cost > 1e6) {
        std::ostringstream os;
        os << "theta_identity_side: " << cost
           << " partition tuples exceed the 1e6 budget";
        throw CostError(os.str());
    }
    auto th_u = [&](cplx x) { return theta_u(x, ps, tr); };
    cplx g = ps.gamma;
    auto masks = masks_with_popcount(L, M);
    std::vector<std::vector<int>> Iof(masks.size()), Jof(masks.size());
    for (std::size_t m = 0; m < masks.size(); ++m)
        for (int a = 0; a < L; ++a)
            (masks[m] >> a & 1 ? Iof[m] : Jof[m]).push_back(a);

    std::vector<int> idx(n, 0);
    KahanC sum;
    double scale = 0.0;
    while (true) {
        std::vector<cplx> ibar(n, 0.0), jbar(n, 0.0);
        for (int i = 0; i < n; ++i) {
            for (int a : Iof[idx[i]]) ibar[i] += u[i][a];
            for (int b : Jof[idx[i]]) jbar[i] += u[i][b];
        }
        cplx term = th1(ibar) * th2(jbar);
        for (int i = 0; i < n; ++i) {
            int ip = (i + 1) % n;
            const auto &Ii = Iof[idx[i]], &Ji = Jof[idx[i]];
            const auto &Iip = Iof[idx[ip]], &Jip = Jof[idx[ip]];
            cplx alpha_i = alphas[i];
            if (lhs) {
                for (int a : Ii)
                    for (int b : Jip)
                        term *= th_u(u[i][a] - u[ip][b] - alpha_i);
                for (int b : Ji)
                    for (int a : Iip)
                        term *= th_u(u[i][b] - u[ip][a] - alpha_i + g);
                for (int a : Ii)
                    for (int b : Ji) {
                        cplx x = u[i][a] - u[i][b];
                        term = checked_div(term, th_u(x) * th_u(x - g),
                                           "theta_identity_side");
                    }
            } else {
                for (int b : Ji)
                    for (int a : Iip)
                        term *= th_u(u[i][b] - u[ip][a] - alpha_i);
                for (int a : Ii)
                    for (int b : Jip)
                        term *= th_u(u[i][a] - u[ip][b] - alpha_i + g);
                for (int a : Ii)
                    for (int b : Ji) {
                        cplx x = u[i][b] - u[i][a];
                        term = checked_div(term, th_u(x) * th_u(x - g),
                                           "theta_identity_side");
                    }
            }
        }
        sum.add(term);
        scale = std::max(scale, std::abs(term));
        int pos = 0;
        for (; pos < n; ++pos) {
            if (++idx[pos] < static_cast<int>(masks.size())) break;
            idx[pos] = 0;
        }
        if (pos == n) break;
    }
    return {sum.get(), std::max(scale, 1e-300)};
}

}  // namespace

SumResult theta_identity_side(bool lhs, int M, int N, cplx alpha,
                              const std::vector<std::vector<cplx>>& u,
                              const ThetaFn& th1, const ThetaFn& th2,
                              const ParameterSet& ps,
                              const TruncationConfig& tr) {
    std::vector<cplx> alphas(u.size(), alpha);
    return theta_identity_side_alphas(lhs, M, N, alphas, u, th1, th2, ps, tr);
}

SumResult phi_residual(int M, int N, cplx alpha,
                       const std::vector<std::vector<cplx>>& u,
                       const ThetaFn& th1, const ThetaFn& th2,
                       const ParameterSet& ps, const TruncationConfig& tr) {
    SumResult l = theta_identity_side(true, M, N, alpha, u, th1, th2, ps, tr);
    SumResult r = theta_identity_side(false, M, N, alpha, u, th1, th2, ps, tr);
    return {l.value - r.value, std::max(l.scale, r.scale)};
}

cplx n1_closed_form(int M, int N, cplx alpha, const ParameterSet& ps,
                    const TruncationConfig& tr) {
    auto f = [&](int a) {
        return checked_div(
            theta_u((a - 1.0) * alpha + ps.gamma, ps, tr),
            theta_u(static_cast<double>(a) * alpha, ps, tr), "n1_closed_form");
    };
    cplx acc = (M * N) % 2 == 0 ? 1.0 : -1.0;
    for (int a = 1; a <= M; ++a) acc *= f(a);
    for (int a = 1; a <= N; ++a) acc *= f(a);
    for (int a = 1; a <= M + N; ++a) acc = checked_div(acc, f(a), "n1_closed_form");
    return acc;
}

cplx residue_constant_A(const ParameterSet& ps, const TruncationConfig& tr) {
    return 1.0 / (theta_u(ps.gamma, ps, tr) * theta_deriv0(ps, tr));
}

SumResult iterated_residue_check(bool lhs, int M, int N, cplx alpha,
                                 const std::vector<cplx>& u, const ThetaFn& th1,
                                 const ThetaFn& th2, const ParameterSet& ps,
                                 const TruncationConfig& tr) {
    int L = M + N;
    if (static_cast<int>(u.size()) != L)
        throw DomainError("iterated_residue_check: need M+N points");
    if (M < 1 || N < 1)
        throw DomainError("iterated_residue_check: need M, N >= 1");

    // Actual: residue of the n = 1 partition sum at u_1 = u_2 + gamma.
    auto side_of = [&](cplx u1) {
        std::vector<cplx> row = u;
        row[0] = u1;
        return theta_identity_side(lhs, M, N, alpha, {row}, th1, th2, ps, tr)
            .value;
    };
    cplx actual = residue_at(side_of, u[1] + ps.gamma, tr);

    // Predicted: A * theta prefactor * reduced sum with shifted theta inputs.
    cplx pref = residue_constant_A(ps, tr);
    auto th_u = [&](cplx x) { return theta_u(x, ps, tr); };
    for (int a = 1; a < L; ++a)
        pref *= th_u(u[a] - u[1] - alpha) * th_u(u[1] - u[a] - alpha + ps.gamma);
    for (int a = 2; a < L; ++a)
        pref = checked_div(pref, th_u(u[a] - u[1]) * th_u(u[a] - u[1] - ps.gamma),
                           "iterated_residue_check");
    cplx u2 = u[1];
    ThetaFn th1s = [th1, u2](const std::vector<cplx>& v) {
        std::vector<cplx> w = v;
        for (auto& x : w) x += u2;
        return th1(w);
    };
    ThetaFn th2s = [th2, u2](const std::vector<cplx>& v) {
        std::vector<cplx> w = v;
        for (auto& x : w) x += u2;
        return th2(w);
    };
    std::vector<cplx> rest(u.begin() + 2, u.end());
    cplx reduced = theta_identity_side(lhs, M - 1, N - 1, alpha, {rest}, th1s,
                                       th2s, ps, tr)
                       .value;
    cplx predicted = pref * reduced;
    double scale = std::max({std::abs(actual), std::abs(predicted), 1e-300});
    return {actual - predicted, scale};
}

SumResult specialization_check(bool lhs, int M, int N, cplx alpha, int i,
                               int variant,
                               const std::vector<std::vector<cplx>>& u,
                               const ThetaFn& th1, const ThetaFn& th2,
                               const ParameterSet& ps,
                               const TruncationConfig& tr, bool flip_sign) {
    int n = static_cast<int>(u.size());
    if (n < 2) throw DomainError("specialization_check: requires n >= 2");
    if (i < 0 || i + 1 >= n)
        throw DomainError("specialization_check: need 0 <= i < n-1");
    int L = M + N;
    cplx shift = variant == 0 ? -alpha : -alpha + ps.gamma;
    std::vector<std::vector<cplx>> spec = u;
    for (int a = 0; a < L; ++a) spec[i + 1][a] = u[i][a] + shift;

    SumResult full =
        theta_identity_side(lhs, M, N, alpha, spec, th1, th2, ps, tr);

    cplx aeff = variant == 0 ? alpha : alpha - ps.gamma;
    cplx shift1 = -static_cast<double>(M) * aeff;
    cplx shift2 = -static_cast<double>(N) * aeff;
    auto doubled = [i](ThetaFn th, cplx sh) {
        return ThetaFn([th, i, sh](const std::vector<cplx>& v) {
            std::vector<cplx> w;
            w.reserve(v.size() + 1);
            for (int j = 0; j < static_cast<int>(v.size()); ++j) {
                w.push_back(v[j]);
                if (j == i) w.push_back(v[j] + sh);
            }
            return th(w);
        });
    };
    std::vector<std::vector<cplx>> reduced_grid;
    for (int j = 0; j < n; ++j)
        if (j != i + 1) reduced_grid.push_back(u[j]);
    // Dropping the collapsed row splices its two couplings into one: the
    // factors from row i+1 (= row i shifted by -aeff) to its successor carry
    // the shift, so the surviving pair (row i -> old row i+2) couples with
    // alpha + aeff while every other pair keeps alpha.  (For n = 2 this is
    // the single self-coupling of the remaining row.)
    std::vector<cplx> alphas(n - 1, alpha);
    alphas[i] = alpha + aeff;
    SumResult reduced = theta_identity_side_alphas(lhs, M, N, alphas,
                                                   reduced_grid,
                                                   doubled(th1, shift1),
                                                   doubled(th2, shift2), ps,
                                                   tr);
    cplx sgn = (M * N) % 2 == 0 ? 1.0 : -1.0;
    if (flip_sign) sgn = -sgn;
    cplx predicted = sgn * reduced.value;
    double scale = std::max({full.scale, std::abs(predicted), 1e-300});
    return {full.value - predicted, scale};
}

std::vector<std::vector<cplx>> sample_grid(std::uint64_t seed, int rows,
                                           int cols, const ParameterSet& ps,
                                           const TruncationConfig& tr) {
    std::mt19937_64 rng(split_seed(seed, "variable_grid"));
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    for (int attempt = 0; attempt < 1000; ++attempt) {
        std::vector<std::vector<cplx>> u(rows, std::vector<cplx>(cols));
        for (auto& row : u)
            for (auto& x : row)
                x = cplx(unit(rng), 0.4 * unit(rng) - 0.2);
        bool ok = true;
        for (int i = 0; i < rows && ok; ++i)
            for (int a = 0; a < cols && ok; ++a)
                for (int b = 0; b < cols && ok; ++b) {
                    if (a == b) continue;
                    cplx x = u[i][a] - u[i][b];
                    if (std::abs(theta_u(x, ps, tr)) < 1e-4 ||
                        std::abs(theta_u(x - ps.gamma, ps, tr)) < 1e-4 ||
                        std::abs(theta_u(x + ps.gamma, ps, tr)) < 1e-4)
                        ok = false;
                }
        if (ok) return u;
    }
    throw DomainError("sample_grid: could not find a generic grid");
}

}  // namespace kn
