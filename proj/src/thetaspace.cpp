#include "kn/thetaspace.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <map>
#include <random>

namespace kn {

namespace {

const cplx TWO_PI_I(0.0, 2.0 * PI);

// Lattice step imposed by the tau-shift law in direction i:
// row i of the cyclic Cartan matrix, A_i[j] = 2 d_{ij} - d_{j,i-1} - d_{j,i+1}.
std::vector<int> cartan_row(int i, int n) {
    std::vector<int> a(n, 0);
    a[i] += 2;
    a[((i - 1) % n + n) % n] -= 1;
    a[(i + 1) % n] -= 1;
    return a;
}

int coset_label(const std::vector<int>& k) {
    int n = static_cast<int>(k.size());
    long acc = 0;
    for (int j = 0; j < n; ++j) acc += static_cast<long>(j) * k[j];
    return static_cast<int>(((acc % n) + n) % n);
}

long norm2(const std::vector<int>& k) {
    long s = 0;
    for (int v : k) s += static_cast<long>(v) * v;
    return s;
}

// Enumerate {k in Z^n : sum k = 0, |k_j| <= radius}.
void enumerate_zero_sum(int n, int radius, std::vector<int>& cur, int pos,
                        int partial, std::vector<std::vector<int>>& out) {
    if (pos == n - 1) {
        int last = -partial;
        if (std::abs(last) <= radius) {
            cur[pos] = last;
            out.push_back(cur);
        }
        return;
    }
    for (int v = -radius; v <= radius; ++v) {
        cur[pos] = v;
        enumerate_zero_sum(n, radius, cur, pos + 1, partial + v, out);
    }
}

}  // namespace

std::vector<ThetaElement> build_basis(const ParameterSet& ps,
                                      const TruncationConfig& tr) {
    int n = ps.n;
    if (n == 1) {
        ThetaElement el;
        el.n = 1;
        el.coset = 0;
        el.coeffs.push_back({{0}, cplx(1.0, 0.0)});
        return {el};
    }

    // Nome of the shift recursion; coefficients decay like powers of it.
    cplx qq = std::exp(TWO_PI_I * ps.tau);
    if (std::abs(qq) >= 1.0 - 1e-6)
        throw DomainError("build_basis: |exp(2 pi i tau)| too close to 1, "
                          "Fourier coefficients would not decay");

    // Keep the enumeration box affordable for larger n.
    int radius = tr.fourier_cutoff + 2;
    while (n >= 4 && std::pow(2.0 * radius + 1.0, n - 1) > 3e5) --radius;
    if (radius < 3)
        throw CostError("build_basis: n too large for the coefficient box");

    std::vector<std::vector<int>> box;
    std::vector<int> cur(n, 0);
    enumerate_zero_sum(n, radius, cur, 0, 0, box);

    std::vector<std::vector<int>> reps(n);
    std::vector<long> best(n, -1);
    for (const auto& k : box) {
        int c = coset_label(k);
        long nn = norm2(k);
        if (best[c] < 0 || nn < best[c] ||
            (nn == best[c] && k < reps[c])) {
            best[c] = nn;
            reps[c] = k;
        }
    }

    std::vector<cplx> emu(n);
    for (int i = 0; i < n; ++i) emu[i] = std::exp(-TWO_PI_I * ps.mu[i]);

    std::vector<ThetaElement> basis;
    for (int c = 0; c < n; ++c) {
        if (best[c] < 0)
            throw DomainError("build_basis: empty coset (cutoff too small)");
        std::map<std::vector<int>, cplx> coef;
        coef[reps[c]] = 1.0;
        std::deque<std::vector<int>> queue{reps[c]};
        auto in_box = [&](const std::vector<int>& k) {
            for (int v : k)
                if (std::abs(v) > radius) return false;
            return true;
        };
        auto offer = [&](const std::vector<int>& k, cplx val) {
            auto it = coef.find(k);
            if (it == coef.end()) {
                coef[k] = val;
                queue.push_back(k);
                return;
            }
            double m = std::max(std::abs(it->second), std::abs(val));
            if (m > 1e-200 && std::abs(it->second - val) > 1e-8 * m)
                throw DomainError(
                    "build_basis: inconsistent coefficient recursion "
                    "(shift laws are incompatible at this parameter point)");
        };
        while (!queue.empty()) {
            std::vector<int> k = queue.front();
            queue.pop_front();
            cplx ck = coef[k];
            for (int i = 0; i < n; ++i) {
                std::vector<int> a = cartan_row(i, n);
                // forward: c_{k+A_i} = c_k qq^{k_i + 1} exp(-2 pi i mu_i)
                std::vector<int> kf = k;
                for (int j = 0; j < n; ++j) kf[j] += a[j];
                if (in_box(kf))
                    offer(kf, ck * std::pow(qq, k[i] + 1) * emu[i]);
                // backward: with m = k - A_i, c_m = c_k qq^{-(m_i + 1)} exp(2 pi i mu_i)
                std::vector<int> kb = k;
                for (int j = 0; j < n; ++j) kb[j] -= a[j];
                if (in_box(kb))
                    offer(kb, ck * std::pow(qq, -(kb[i] + 1)) / emu[i]);
            }
        }
        ThetaElement el;
        el.n = n;
        el.coset = c;
        for (auto& [k, v] : coef)
            if (std::abs(v) > 1e-300) el.coeffs.push_back({k, v});
        basis.push_back(std::move(el));
    }
    return basis;
}

cplx theta_eval(const ThetaElement& el, const std::vector<cplx>& u) {
    if (static_cast<int>(u.size()) != el.n)
        throw DomainError("theta_eval: wrong argument size");
    cplx acc = 0.0;
    for (const auto& [k, c] : el.coeffs) {
        cplx ku = 0.0;
        for (int j = 0; j < el.n; ++j) ku += static_cast<double>(k[j]) * u[j];
        acc += c * std::exp(TWO_PI_I * ku);
    }
    return acc;
}

cplx tau_shift_multiplier(const ParameterSet& ps, const std::vector<cplx>& u,
                          int i) {
    int n = ps.n;
    if (n == 1) return 1.0;
    int im = ((i - 1) % n + n) % n, ip = (i + 1) % n;
    cplx arg = 2.0 * u[i] - u[im] - u[ip] - ps.mu[i] + ps.tau;
    return std::exp(-TWO_PI_I * arg);
}

double check_quasiperiodicity(const ThetaElement& el, const ParameterSet& ps,
                              int trials, std::uint64_t seed) {
    std::mt19937_64 rng(split_seed(seed, "theta_space_qp"));
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    double worst = 0.0;
    for (int t = 0; t < trials; ++t) {
        std::vector<cplx> u(el.n);
        for (auto& v : u)
            v = cplx(unit(rng), 0.5 * unit(rng) - 0.25);
        cplx base = theta_eval(el, u);
        double scale = std::max(std::abs(base), 1e-30);
        for (int i = 0; i < el.n; ++i) {
            std::vector<cplx> u1 = u, u2 = u;
            u1[i] += 1.0;
            u2[i] += ps.tau;
            double r1 = std::abs(theta_eval(el, u1) - base) / scale;
            // The tau-shifted value carries the multiplier's magnitude
            // (which can be large); compare relative to that magnitude.
            cplx shifted = theta_eval(el, u2);
            cplx expected = tau_shift_multiplier(ps, u, i) * base;
            double scale2 = std::max(
                {std::abs(shifted), std::abs(expected), 1e-30});
            double r2 = std::abs(shifted - expected) / scale2;
            worst = std::max({worst, r1, r2});
        }
    }
    return worst;
}

}  // namespace kn
