#include "kn/params.hpp"

#include <cmath>
#include <cstring>
#include <random>
#include <sstream>

namespace kn {

namespace {

void hash_bytes(std::uint64_t& h, const void* data, std::size_t len) {
    // FNV-1a, 64 bit
    const auto* bytes = static_cast<const unsigned char*>(data);
    for (std::size_t i = 0; i < len; ++i) {
        h ^= bytes[i];
        h *= 0x100000001b3ULL;
    }
}

void hash_cplx(std::uint64_t& h, cplx z) {
    double re = z.real(), im = z.imag();
    hash_bytes(h, &re, sizeof re);
    hash_bytes(h, &im, sizeof im);
}

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

void require_mod_lt1(cplx z, const char* what) {
    if (!(std::abs(z) < 1.0)) {
        std::ostringstream os;
        os << "parameter region violated: |" << what << "| = " << std::abs(z)
           << " >= 1";
        throw DomainError(os.str());
    }
}

}  // namespace

std::uint64_t ParameterSet::fingerprint() const {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    hash_bytes(h, &n, sizeof n);
    hash_cplx(h, q_half);
    hash_cplx(h, d_half);
    hash_cplx(h, tau);
    hash_cplx(h, C);
    for (const auto& m : mu) hash_cplx(h, m);
    unsigned char im = im_context ? 1 : 0;
    hash_bytes(h, &im, 1);
    return h;
}

std::string ParameterSet::fingerprint_hex() const {
    std::ostringstream os;
    os << std::hex << fingerprint();
    return os.str();
}

ParameterSet build_params(int n, cplx q_half, cplx d_half, cplx tau,
                          const std::vector<cplx>& mu, bool im_context,
                          cplx C_explicit) {
    if (n < 1) throw DomainError("n must be >= 1");
    if (!(tau.imag() > 0.0)) throw DomainError("Im tau must be positive");
    if (static_cast<int>(mu.size()) != n)
        throw DomainError("mu must have exactly n entries");
    cplx musum = 0.0;
    for (const auto& m : mu) musum += m;
    if (std::abs(musum) > 1e-12)
        throw DomainError("mu entries must sum to zero");

    ParameterSet ps;
    ps.n = n;
    ps.q_half = q_half;
    ps.d_half = d_half;
    ps.tau = tau;
    ps.mu = mu;
    ps.im_context = im_context;

    const cplx I(0.0, 1.0);
    ps.log_p = -2.0 * PI * I / tau;  // fixed branch: p^tau == 1 exactly
    ps.p = std::exp(ps.log_p);
    const cplx q = q_half * q_half;
    const cplx d = d_half * d_half;
    ps.log_q = std::log(q);
    ps.log_d = std::log(d);
    ps.gamma = 2.0 * ps.log_q / ps.log_p;
    ps.beta = ps.log_d / ps.log_p;
    ps.q1 = d / q;
    ps.q2 = q * q;
    ps.q3 = 1.0 / (q * d);

    require_mod_lt1(ps.p, "p");
    require_mod_lt1(ps.q2, "q^2");
    require_mod_lt1(q * d, "q d");
    require_mod_lt1(q / d, "q d^{-1}");
    require_mod_lt1(ps.p / ps.q2, "p q^{-2}");
    require_mod_lt1(ps.p * d / q, "p q^{-1} d");
    require_mod_lt1(ps.p / (q * d), "p q^{-1} d^{-1}");

    if (im_context) {
        ps.C = std::exp(0.5 * (ps.log_p + 2.0 * ps.log_q));  // C^2 = p q^2
    } else {
        if (std::abs(C_explicit) < 1e-300)
            throw DomainError("C must be nonzero");
        ps.C = C_explicit;
    }
    return ps;
}

ParameterSet sample_params(std::uint64_t seed, int n, bool im_context) {
    std::mt19937_64 rng(split_seed(seed, "sample_params"));
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    auto uni = [&](double lo, double hi) { return lo + (hi - lo) * unit(rng); };
    auto phase = [&]() {
        double t = uni(0.0, 2.0 * PI);
        return cplx(std::cos(t), std::sin(t));
    };

    for (int attempt = 0; attempt < 10000; ++attempt) {
        cplx tau(uni(-0.25, 0.25), uni(1.0, 1.6));
        // |q| in [0.55, 0.8], |d| in [0.85, 1.15]: keeps |q d^{+-1}| < 1 and
        // |p| small enough that all p-mixed bounds hold with wide margins.
        cplx q_half = std::sqrt(uni(0.55, 0.8)) * phase();
        cplx d_half = std::sqrt(uni(0.85, 1.15)) * phase();
        cplx C = uni(0.8, 1.25) * phase();

        std::vector<cplx> mu(n, cplx(0.0, 0.0));
        if (n > 1) {
            cplx acc = 0.0;
            for (int i = 0; i + 1 < n; ++i) {
                mu[i] = cplx(uni(-0.4, 0.4), uni(-0.4, 0.4));
                acc += mu[i];
            }
            mu[n - 1] = -acc;
        }

        ParameterSet ps;
        try {
            ps = build_params(n, q_half, d_half, tau, mu, im_context, C);
        } catch (const DomainError&) {
            continue;
        }

        // Genericity: no small multiplicative relation between q1 and q2.
        bool generic = true;
        for (int i = -6; i <= 6 && generic; ++i) {
            for (int j = -6; j <= 6 && generic; ++j) {
                if (i == 0 && j == 0) continue;
                cplx rel = std::pow(ps.q1, i) * std::pow(ps.q2, j);
                if (std::abs(rel - 1.0) < 1e-6) generic = false;
            }
        }
        if (!generic) continue;
        return ps;
    }
    throw DomainError("sample_params: no generic point found (bad seed loop)");
}

std::uint64_t split_seed(std::uint64_t seed, const std::string& label) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    hash_bytes(h, label.data(), label.size());
    return splitmix64(seed ^ splitmix64(h));
}

}  // namespace kn
