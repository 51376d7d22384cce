// Acceptance gate: one line per criterion, exit 1 if any fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <string>
#include <thread>
#include <vector>

#include "kn/report.hpp"
#include "kn/special.hpp"
#include "kn/thetaspace.hpp"

using namespace kn;

namespace {

int failures = 0;

void report(const std::string& name, bool ok, const std::string& detail) {
    std::printf("%s %s: %s\n", ok ? "PASS" : "FAIL", name.c_str(),
                detail.c_str());
    if (!ok) ++failures;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
        .count();
}

// Run one campaign and summarize outcomes of selected checks.
struct CampaignOutcome {
    bool all_pass = true;
    double worst = 0.0;
    int count = 0;
    double secs = 0.0;
    Report rep;
};

CampaignOutcome run(const std::string& campaign,
                    const std::vector<std::uint64_t>& seeds, int jobs,
                    const std::vector<std::string>& checks) {
    CampaignConfig cfg;
    cfg.campaign = campaign;
    cfg.seeds = seeds;
    cfg.jobs = jobs;
    auto t0 = std::chrono::steady_clock::now();
    CampaignOutcome out;
    out.rep = run_campaign(cfg);
    out.secs = seconds_since(t0);
    for (const auto& r : out.rep.records) {
        bool wanted = checks.empty();
        for (const auto& c : checks) wanted = wanted || r.check == c;
        if (!wanted) continue;
        ++out.count;
        out.all_pass = out.all_pass && r.pass;
        out.worst = std::max(out.worst, r.residual);
    }
    return out;
}

std::string fmt(double x) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.3g", x);
    return buf;
}

}  // namespace

int main() {
    int jobs = std::max(2u, std::thread::hardware_concurrency());
    TruncationConfig tr;

    // 1: theta quasi-periodicity, 10 parameter sets x 100 points, < 5 s.
    {
        auto t0 = std::chrono::steady_clock::now();
        double worst = 0.0;
        for (std::uint64_t s = 201; s <= 210; ++s) {
            ParameterSet ps = sample_params(s, 3, false);
            std::mt19937_64 rng(split_seed(s, "acceptance-theta"));
            std::uniform_real_distribution<double> re(0.0, 1.0), im(-0.3, 0.3);
            cplx twopii(0.0, 2.0 * PI), pii(0.0, PI);
            for (int k = 0; k < 100; ++k) {
                cplx u(re(rng), im(rng));
                cplx th = theta_u(u, ps, tr);
                double sc = std::max(std::abs(th), 1e-300);
                worst = std::max(
                    worst, std::abs(theta_u(u + 1.0, ps, tr) + th) / sc);
                cplx mult = -std::exp(-twopii * u - pii * ps.tau);
                worst = std::max(worst, std::abs(theta_u(u + ps.tau, ps, tr) -
                                                 mult * th) /
                                            sc);
            }
        }
        double secs = seconds_since(t0);
        report("criterion-01 theta-quasi-periodicity",
               worst < 1e-9 && secs < 5.0,
               "max residual " + fmt(worst) + ", " + fmt(secs) + " s");
    }

    // 2: the four prefactor exchange relations, < 10 s.
    {
        auto o = run("special", {1, 2, 3}, 1,
                     {"lambda-exchange-diagonal", "lambda-exchange-offdiagonal",
                      "lambda-xi-product", "lambda-eta-product"});
        report("criterion-02 prefactor-exchange-relations",
               o.all_pass && o.count == 12 && o.secs < 10.0,
               "max residual " + fmt(o.worst) + ", " + fmt(o.secs) + " s");
    }

    // 3: reflection and inverse symmetry of the exchange factors,
    //    all classes, n in {1,2,3,5}.
    {
        auto o = run("structfn", {1, 2, 3}, 1,
                     {"g-G-reflection", "G-inverse-symmetry"});
        report("criterion-03 exchange-factor-reflection",
               o.all_pass && o.count == 24,
               "max residual " + fmt(o.worst));
    }

    // 4: fusion identities, n = 3.
    {
        auto o = run("fusion", {1, 2, 3}, 1, {"fusion-identity"});
        report("criterion-04 fusion-identities", o.all_pass && o.count == 3,
               "max residual " + fmt(o.worst));
    }

    // 5: quasi-periodicity space: shift laws, diagonal invariance and rank,
    //    n in {1,2,3}, < 30 s.
    {
        auto o = run("thetaspace", {1, 2, 3}, 1,
                     {"theta-space-shift-laws",
                      "theta-space-diagonal-invariance", "theta-space-rank"});
        report("criterion-05 theta-space",
               o.all_pass && o.count == 27 && o.secs < 30.0,
               "max residual " + fmt(o.worst) + ", " + fmt(o.secs) + " s");
    }

    // 6: wheel vanishing, ell = 3: 216 triples x 3 cases x 2 signs x 3
    //    seeds, plus the wrong-specialization control, < 60 s.
    {
        auto o = run("wheel", {1, 2, 3}, jobs,
                     {"wheel-vanishing", "wheel-negative-control"});
        int expected = 3 * (216 * 3 * 2) + 3;
        report("criterion-06 wheel-vanishing",
               o.all_pass && o.count == expected && o.secs < 60.0,
               "max residual " + fmt(o.worst) + ", " + std::to_string(o.count) +
                   " records, " + fmt(o.secs) + " s");
    }

    // 7: boundary scalars: quadratic residue, Serre wheel specializations,
    //    diagonal zero; 10 seeds.
    {
        auto o = run("boundary", {1, 2, 3, 4, 5, 6, 7, 8, 9, 10}, 1,
                     {"boundary-quad-res", "boundary-serre-wheel1",
                      "boundary-serre-wheel2", "boundary-fd-g-zero"});
        report("criterion-07 boundary-scalars", o.all_pass && o.count == 40,
               "max residual " + fmt(o.worst));
    }

    // 8: partition-sum identity across (n,M,N) tuples, all weight pairs,
    //    3 grids x 3 seeds, with a one-sided detuning control, < 300 s.
    {
        auto o = run("theta-identity", {1, 2, 3}, 1,
                     {"partition-sum-identity",
                      "partition-sum-negative-control"});
        report("criterion-08 partition-sum-identity",
               o.all_pass && o.count > 0 && o.secs < 300.0,
               "max residual " + fmt(o.worst) + ", " + std::to_string(o.count) +
                   " records, " + fmt(o.secs) + " s");
    }

    // 9-11 share one residue-lemmas run.
    {
        auto o = run("residue-lemmas", {1, 2, 3}, 1, {});
        auto pick = [&](const std::string& name) {
            CampaignOutcome sub;
            sub.count = 0;
            for (const auto& r : o.rep.records)
                if (r.check == name) {
                    ++sub.count;
                    sub.all_pass = sub.all_pass && r.pass;
                    sub.worst = std::max(sub.worst, r.residual);
                }
            return sub;
        };
        auto cf = pick("n1-closed-form");
        auto cons = pick("n1-constancy");
        report("criterion-09 single-row-closed-form",
               cf.all_pass && cf.count == 3 && cons.all_pass &&
                   cons.count == 3,
               "max residual " + fmt(std::max(cf.worst, cons.worst)));
        auto ra = pick("residue-constant-A");
        auto ir = pick("iterated-residue-reduction");
        report("criterion-10 residue-reduction",
               ra.all_pass && ra.count == 3 && ir.all_pass && ir.count == 3,
               "max residual " + fmt(std::max(ra.worst, ir.worst)));
        auto sp = pick("specialization-reduction");
        auto sc = pick("specialization-sign-control");
        report("criterion-11 row-collapse-reduction",
               sp.all_pass && sp.count == 3 && sc.all_pass && sc.count == 3,
               "max residual " + fmt(sp.worst));
    }

    // 12: determinism: identical configs give byte-identical reports once
    //     timing is stripped.
    {
        CampaignConfig cfg;
        cfg.campaign = "structfn";
        cfg.seeds = {7};
        Report a = run_campaign(cfg);
        Report b = run_campaign(cfg);
        bool same = report_json(a, false) == report_json(b, false);
        report("criterion-12 determinism", same,
               same ? "byte-identical" : "reports differ");
    }

    return failures == 0 ? 0 : 1;
}
