#include "kn/report.hpp"

#include <algorithm>
#include <map>
#include <sstream>

#include "json.hpp"

namespace kn {

using ordered_json = nlohmann::ordered_json;

namespace {

ordered_json config_json(const CampaignConfig& cfg) {
    ordered_json j;
    j["campaign"] = cfg.campaign;
    j["n"] = cfg.n;
    j["M"] = cfg.M;
    j["N"] = cfg.N;
    j["ell"] = cfg.ell;
    j["seeds"] = cfg.seeds;
    j["trunc"] = {{"product_order", cfg.trunc.product_order},
                  {"fourier_cutoff", cfg.trunc.fourier_cutoff},
                  {"tolerance_abs", cfg.trunc.tolerance_abs},
                  {"tolerance_rel", cfg.trunc.tolerance_rel},
                  {"residue_epsilon", cfg.trunc.residue_epsilon}};
    j["tol"] = cfg.tol;
    j["out"] = cfg.out;
    j["jobs"] = cfg.jobs;
    return j;
}

}  // namespace

std::string report_json(const Report& rep, bool include_timing) {
    ordered_json j;
    j["schema"] = rep.schema;
    j["tool_version"] = rep.tool_version;
    j["config"] = config_json(rep.config);
    ordered_json recs = ordered_json::array();
    for (const auto& r : rep.records) {
        ordered_json e;
        e["check"] = r.check;
        e["campaign"] = r.campaign;
        e["seed"] = r.seed;
        e["params_fp"] = r.params_fp;
        e["inputs"] = r.inputs;
        e["scale"] = r.scale;
        e["residual"] = r.residual;
        e["tolerance"] = r.tolerance;
        e["pass"] = r.pass;
        if (include_timing) e["wall_ms"] = r.wall_ms;
        recs.push_back(std::move(e));
    }
    j["records"] = std::move(recs);

    int passed = 0;
    std::map<std::string, double> worst;
    std::map<std::string, int> failed_by;
    for (const auto& r : rep.records) {
        if (r.pass) ++passed;
        else ++failed_by[r.check];
        auto it = worst.find(r.check);
        if (it == worst.end() || r.residual > it->second)
            worst[r.check] = r.residual;
    }
    ordered_json summary;
    summary["total"] = rep.records.size();
    summary["passed"] = passed;
    summary["failed"] = static_cast<int>(rep.records.size()) - passed;
    ordered_json per_check = ordered_json::object();
    for (const auto& [name, res] : worst) {
        per_check[name] = {{"max_residual", res},
                           {"failed", failed_by.count(name) ? failed_by[name] : 0}};
    }
    summary["per_check"] = std::move(per_check);
    j["summary"] = std::move(summary);
    return j.dump(2) + "\n";
}

bool report_all_passed(const Report& rep) {
    return std::all_of(rep.records.begin(), rep.records.end(),
                       [](const CheckRecord& r) { return r.pass; });
}

std::vector<std::string> campaign_names() {
    return {"special",  "structfn", "fusion",         "thetaspace",
            "wheel",    "boundary", "theta-identity", "residue-lemmas"};
}

namespace {

const std::map<std::string, std::string>& explain_map() {
    static const std::map<std::string, std::string> m = {
        {"all", "Run every campaign in sequence: " +
                    [] {
                        std::string s;
                        for (const auto& c : campaign_names())
                            s += (s.empty() ? "" : ", ") + c;
                        return s;
                    }()},
        {"special",
         "Campaign over the scalar special functions: the additive theta "
         "function theta(u) = p^{u^2/2-u/2} (p^u, p^{1-u}, p; p)_inf, its "
         "lattice behaviour, the truncated q-Pochhammer products, the "
         "numeric residue extractor, and the four exchange relations tying "
         "the elliptic prefactors lambda_{i,j} to theta, xi and eta."},
        {"theta-quasi-periodicity",
         "At random points u, verify theta(-u) = -theta(u), "
         "theta(u+1) = -theta(u) and "
         "theta(u+tau) = -exp(-2 pi i u - pi i tau) theta(u), relative to "
         "|theta(u)|.  These three laws plus the zero at u = 0 characterize "
         "theta up to a constant, so passing them pins the implementation.  "
         "Tolerance 1e-9 (double precision with a 48-term product leaves "
         "margin of several orders)."},
        {"theta-lattice-zeros",
         "theta must vanish at the lattice points u = 0, 1, tau.  The "
         "residual is |theta(u0)| / |theta'(0)|.  Tolerance 1e-9."},
        {"qpochhammer-truncation",
         "Compare (z; p)_inf truncated at the configured order against the "
         "same product with 16 more factors, at random z in the unit disk.  "
         "With |p| <= ~0.05 the tail is below 1e-40, so any visible "
         "difference means the truncation order is mis-applied.  Tolerance "
         "1e-12."},
        {"residue-estimator",
         "Feed the circle-average residue extractor a function "
         "c/(u-u0) + (analytic part) with known residue c and compare.  "
         "Tolerance 1e-10."},
        {"lambda-exchange-diagonal",
         "lambda_{i,i}(p^{-u}) / lambda_{i,i}(p^u) = "
         "theta(u+gamma)/theta(u-gamma): the diagonal prefactor's exchange "
         "ratio collapses to a ratio of two thetas.  100 random u per "
         "parameter set, relative tolerance 1e-9."},
        {"lambda-exchange-offdiagonal",
         "lambda_{i,i-s}(p^{-u}) / lambda_{i,i+s}(p^u) = "
         "q^{2 s beta} theta(u + s beta - gamma/2)/theta(u + s beta + "
         "gamma/2) for s = +-1.  Relative tolerance 1e-9."},
        {"lambda-xi-product",
         "With C^2 = p q^2 (the context where the diagonal prefactor is "
         "elliptic), lambda_{i,i}(p^u) xi(u) xi(-u) = "
         "-p^{-gamma^2/2 - 3 gamma/2 - 1} theta(u) theta(u - gamma).  "
         "Relative tolerance 1e-9."},
        {"lambda-eta-product",
         "lambda_{i,i+s}(p^{-s u}) theta(u + s gamma/2 - beta) = "
         "p^{(gamma/2 - s beta)^2/2 - (gamma/2 - beta)/2} eta(u) for "
         "s = +-1.  Relative tolerance 1e-9."},
        {"structfn",
         "Campaign over the rational structure functions g_{i,j}, the "
         "exchange factors G_{i,j}, their square roots, and the zeros of "
         "the diagonal prefactor, for n in {1, 2, 3, 5}."},
        {"g-G-reflection",
         "G_{i,j}(w/z) d_{i,j} g_{i,j}(z,w) + g_{j,i}(w,z) = 0 at random "
         "(z, w) for every color class.  Tolerance 1e-11 relative to "
         "|g_{j,i}(w,z)|."},
        {"G-inverse-symmetry",
         "G_{i,j}(x) G_{j,i}(1/x) = 1 at random x for every color class.  "
         "Tolerance 1e-11."},
        {"G-tilde-factorization",
         "G_{i,j}(x) = G~_{i,j}(x) G~_{i,j}(q^{-1} x) at random x.  "
         "Tolerance 1e-11."},
        {"lambda0-zeros",
         "The diagonal rational prefactor lambda0_{i,i}(x) = "
         "(1-C^2 x)(1-C^{-2} x)(1-q^2 x)/(1-x)^3 must vanish at "
         "x = C^{-2}, C^2, q^{-2}, relative to its value at a generic "
         "point.  Tolerance 1e-11."},
        {"fusion",
         "Campaign checking the two fusion identities of the exchange "
         "factors for n >= 3, plus a falsification control."},
        {"fusion-identity",
         "G_{i,i-1}(q1 x) G_{i,i}(x) G_{i,i+1}(q1^{-1} x) = 1 and "
         "G_{i-1,i}(q3 x) G_{i,i}(x) G_{i,i+1}(q1^{-1} x) = 1, where "
         "q1 = d/q, q3 = 1/(q d).  100 random x per seed, every color i, "
         "tolerance 1e-11 on |product - 1|."},
        {"fusion-negative-control",
         "Same products with the first argument detuned by 0.3%; the "
         "residual must exceed 1e-3 for some sample, showing the check has "
         "teeth."},
        {"thetaspace",
         "Campaign over the n-dimensional space of quasi-periodic entire "
         "functions vartheta(u_1..u_n): shift laws, diagonal invariance, "
         "linear independence (rank), truncation stability, and a "
         "corruption control."},
        {"theta-space-shift-laws",
         "Every constructed basis element must satisfy "
         "vartheta(.., u_i+1, ..) = vartheta(u) and the tau-shift law "
         "vartheta(.., u_i+tau, ..) = exp(-2 pi i (2u_i - u_{i-1} - "
         "u_{i+1} - mu_i + tau)) vartheta(u) at random points.  Relative "
         "tolerance 1e-8 (Fourier truncation dominates)."},
        {"theta-space-diagonal-invariance",
         "vartheta(u + c(1,..,1)) = vartheta(u): the Fourier support lies "
         "in {sum k_j = 0}, so the diagonal acts trivially.  Tolerance "
         "1e-8."},
        {"theta-space-rank",
         "Evaluate the n basis elements at n random points and take the "
         "singular values of the n x n matrix; the basis is independent iff "
         "sigma_min/sigma_max is far from 0.  Encoded as residual 0 (ratio "
         "> 1e-6) or 1, tolerance 0.5; the ratio is recorded in the "
         "inputs field."},
        {"theta-space-cutoff-stability",
         "Rebuild the basis with the Fourier cutoff raised by 2 and compare "
         "values at random points; agreement to 1e-10 shows the cutoff is "
         "already converged."},
        {"theta-space-corruption-control",
         "Multiply one interior Fourier coefficient by 10 and re-run the "
         "shift-law check; it must now fail by more than 1e-3.  Guards "
         "against a vacuously-passing shift-law check."},
        {"wheel",
         "Campaign over the wheel conditions of the level-(ell-1) tensor "
         "family: the dressed triple products "
         "lambda0 <Lambda_{i,a}(z1) Lambda_{i,b}(z2) Lambda_{i+-1,c}(w)> "
         "must vanish at the three wheel specializations, for all slot "
         "triples (a,b,c)."},
        {"wheel-vanishing",
         "One record per (slot triple, specialization case, sign): the "
         "matched zero/pole limit of the dressed product at the wheel "
         "point, extracted by a 4-point circle average in a multiplicative "
         "perturbation and Richardson extrapolation over two radii.  For "
         "the same-color pair (k-bar, k) with k in {ell-1, ell-2} at the "
         "first specialization, the central value pins a genuine "
         "contraction pole to the wheel point; those two summands cancel "
         "only jointly, so the record evaluates the zero-mode-dressed sum "
         "of the partner pair.  Residual is |limit| / |generic value|; "
         "tolerance 1e-9."},
        {"wheel-negative-control",
         "The same limit at the wrong specialization (z, q^2 z, z); the "
         "residual must exceed 1e-3 for some triple."},
        {"prefactor-symmetry",
         "For every unordered slot pair {a, b} of one color, the "
         "zero-mode-dressed two-point function S(z1,z2) = lambda0(z2/z1) "
         "sum over the two orders must satisfy S(z1,z2) = S(z2,z1), the "
         "scalar shadow of the quadratic exchange relation.  Tolerance "
         "1e-9."},
        {"far-color-commutativity",
         "For colors at cyclic distance >= 2 the currents commute exactly; "
         "the two zero-mode vacuum coefficients must agree to 1e-12."},
        {"boundary",
         "Campaign over the scalar identities of the boundary (degenerate) "
         "module: the quadratic-residue identity, the Serre-type scalar "
         "factor's vanishing at its wheel points, and the trivial-module "
         "diagonal zero."},
        {"boundary-quad-res",
         "q k^2 (1-q^{-2} c2)(1-q^2 c2)/(1-c2)^2 = "
         "1/(q-q^{-1}) (1+c2)(1-q^2 c2)/(1-c2)^2 at c2 = q, with "
         "k = 1/(q^{1/2}-q^{-1/2}).  Residual relative to the right side; "
         "tolerance 1e-10."},
        {"boundary-quad-res-negative-control",
         "Same identity at c2 = 1.37 q; must fail by more than 1e-3."},
        {"boundary-serre-wheel1",
         "The boundary Serre scalar k^3 (1-q^{-2}x21)(1-q^2 x21)/(1-x21)^2 "
         "* prod (1-d^s xw)/(1-xw) vanishes at (z, q^2 z, q d^{-s} z).  "
         "Tolerance 1e-10 relative to a generic value."},
        {"boundary-serre-wheel2",
         "Same scalar vanishes at (z, q z, d^{-s} z).  Tolerance 1e-10 "
         "relative to a generic value."},
        {"boundary-serre-negative-control",
         "The same scalar at a generic (z1, z2, w) must stay above "
         "1e-3 |k|^3."},
        {"boundary-fd-g-zero",
         "g_{i,i}(z, C^2 z) = 0 exactly at C = q^{-1} (the one-dimensional "
         "module): |g| / |z| <= 1e-12."},
        {"boundary-k-normalization",
         "k = 1/(q^{1/2} - q^{-1/2}) satisfies (q^{1/2}-q^{-1/2})^2 k^2 = 1 "
         "to 1e-14 (a pure arithmetic sanity pin)."},
        {"theta-identity",
         "Campaign over the partition-sum theta identity: for an n x (M+N) "
         "grid, the sum over per-row partitions I|J with |I| = M of theta "
         "products oriented one way equals the sum oriented the other way, "
         "for every pair of quasi-periodicity-space elements as weights."},
        {"partition-sum-identity",
         "LHS_{n,M,N}(u; alpha) - RHS_{n,M,N}(u; alpha) = 0 at random "
         "generic grids and random alpha, for all basis-element pairs.  "
         "Residual relative to the largest summand; tolerance 1e-8."},
        {"partition-sum-negative-control",
         "LHS(alpha) against RHS(alpha + delta) with a fixed detuning "
         "delta; must differ by more than 1e-3 of scale."},
        {"sym-T-match",
         "The row-wise symmetrization (over the combined M+N variables per "
         "row) of the two-kernel integrand T equals (M! N!)^n times the "
         "partition-sum LHS at alpha = beta + gamma/2, and likewise T' "
         "matches the RHS; hence Sym T = Sym T'.  Tolerance 1e-8."},
        {"residue-lemmas",
         "Campaign over the residue and specialization lemmas used to "
         "reduce the partition-sum identity: the residue constant, the "
         "single-row iterated-residue reduction, the n = 1 closed form and "
         "its constancy, and the row-collapse reduction n -> n-1."},
        {"residue-constant-A",
         "A = 1/(theta(gamma) theta'(0)) against an independent numeric "
         "evaluation of theta(gamma)^{-1} res_{u=0} theta(u)^{-1} by circle "
         "averaging.  Relative tolerance 1e-8."},
        {"iterated-residue-reduction",
         "For n = 1, M = N = 1: the residue of one side at u_1 = u_2 + "
         "gamma equals A times an explicit theta prefactor times the "
         "(M-1, N-1) sum with shifted weights.  Both orientations.  "
         "Tolerance 1e-6 of scale (numeric residue extraction dominates)."},
        {"n1-closed-form",
         "At the lattice point u_a = a alpha the n = 1 sum collapses to "
         "(-1)^{MN} prod f(a)|_{a<=M} prod f(a)|_{a<=N} / prod "
         "f(a)|_{a<=M+N}, f(a) = theta((a-1)alpha+gamma)/theta(a alpha).  "
         "Checked for (M,N) in {(1,1),(2,1),(2,2)}; tolerance 1e-9 of "
         "scale."},
        {"n1-constancy",
         "For n = 1 the two-sided difference is an elliptic function "
         "without poles, hence constant (each side alone keeps poles at "
         "u_a = u_b + gamma and is not constant): its values at two "
         "independent random grids must agree to 1e-8 of scale."},
        {"specialization-reduction",
         "Setting row i+1 = row i - aeff, aeff = alpha (variant 0) or "
         "alpha - gamma (variant 1), collapses one side at rank n to "
         "(-1)^{MN} times the same side at rank n-1 with doubled-row "
         "weights, where the spliced coupling (row i to old row i+2) "
         "carries parameter alpha + aeff and all other pairs keep alpha.  "
         "Checked for n = 2 -> 1, both variants, both sides; tolerance "
         "1e-8 of scale."},
        {"specialization-sign-control",
         "Same reduction with the sign (-1)^{MN} deliberately flipped; "
         "must fail by more than 1e-3."},
    };
    return m;
}

}  // namespace

std::string explain(const std::string& name) {
    const auto& m = explain_map();
    auto it = m.find(name);
    if (it != m.end()) return it->second;
    std::ostringstream os;
    os << "unknown name '" << name << "'; valid names:";
    for (const auto& [k, v] : m) os << " " << k;
    throw DomainError(os.str());
}

}  // namespace kn
