#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include "CLI11.hpp"
#include "json.hpp"
#include "kn/report.hpp"

namespace {

// Parse "1,2,3" into seeds.
std::vector<std::uint64_t> parse_seeds(const std::string& csv) {
    std::vector<std::uint64_t> out;
    std::stringstream ss(csv);
    std::string item;
    while (std::getline(ss, item, ',')) {
        if (item.empty()) continue;
        out.push_back(std::stoull(item));
    }
    return out;
}

void apply_config_file(const std::string& path, kn::CampaignConfig& cfg) {
    std::ifstream in(path);
    if (!in) throw kn::DomainError("cannot open config file: " + path);
    nlohmann::json j = nlohmann::json::parse(in);
    if (j.contains("campaign")) cfg.campaign = j["campaign"].get<std::string>();
    if (j.contains("n")) cfg.n = j["n"].get<int>();
    if (j.contains("M")) cfg.M = j["M"].get<int>();
    if (j.contains("N")) cfg.N = j["N"].get<int>();
    if (j.contains("ell")) cfg.ell = j["ell"].get<int>();
    if (j.contains("seeds"))
        cfg.seeds = j["seeds"].get<std::vector<std::uint64_t>>();
    if (j.contains("trunc_order"))
        cfg.trunc.product_order = j["trunc_order"].get<int>();
    if (j.contains("tol")) cfg.tol = j["tol"].get<double>();
    if (j.contains("out")) cfg.out = j["out"].get<std::string>();
    if (j.contains("jobs")) cfg.jobs = j["jobs"].get<int>();
}

}  // namespace

int main(int argc, char** argv) {
    // `explain <name>` is a lookup, not a run; handle it before CLI11 so the
    // name is not mistaken for a campaign.
    if (argc >= 2 && std::string(argv[1]) == "explain") {
        if (argc != 3) {
            std::cerr << "usage: knverify explain <check-or-campaign-name>\n";
            return 2;
        }
        try {
            std::cout << kn::explain(argv[2]) << "\n";
            return 0;
        } catch (const std::exception& e) {
            std::cerr << "error: " << e.what() << "\n";
            return 2;
        }
    }

    CLI::App app{"Numerical verification campaigns for the toroidal "
                 "current-algebra structure functions, kernels and "
                 "free-field data"};
    app.require_subcommand(1);

    auto* verify = app.add_subcommand("verify", "run a verification campaign");
    std::string campaign;
    std::string seeds_csv, config_path;
    kn::CampaignConfig cfg;
    int trunc_order = 0;
    verify->add_option("campaign", campaign,
                       "campaign name (or 'all')")
        ->required();
    verify->add_option("--config", config_path,
                       "JSON config file; explicit flags override it");
    auto* opt_n = verify->add_option("--n", cfg.n, "number of colors");
    auto* opt_M = verify->add_option("--M", cfg.M, "first variable count");
    auto* opt_N = verify->add_option("--N", cfg.N, "second variable count");
    auto* opt_ell = verify->add_option("--ell", cfg.ell, "tensor factor count");
    auto* opt_seeds =
        verify->add_option("--seeds", seeds_csv, "comma-separated seed list");
    auto* opt_trunc = verify->add_option("--trunc-order", trunc_order,
                                         "product truncation order");
    auto* opt_tol = verify->add_option(
        "--tol", cfg.tol, "override every per-check tolerance");
    auto* opt_out = verify->add_option("--out", cfg.out, "report output path");
    auto* opt_jobs = verify->add_option("--jobs", cfg.jobs, "worker threads");

    auto* explain_cmd =
        app.add_subcommand("explain", "describe a check or campaign");
    std::string explain_name;
    explain_cmd->add_option("name", explain_name)->required();

    CLI11_PARSE(app, argc, argv);

    try {
        // Config file first, then flags that were actually given.
        kn::CampaignConfig base;
        if (!config_path.empty()) apply_config_file(config_path, base);
        base.campaign = campaign;
        if (*opt_n) base.n = cfg.n;
        if (*opt_M) base.M = cfg.M;
        if (*opt_N) base.N = cfg.N;
        if (*opt_ell) base.ell = cfg.ell;
        if (*opt_seeds) base.seeds = parse_seeds(seeds_csv);
        if (*opt_trunc) base.trunc.product_order = trunc_order;
        if (*opt_tol) base.tol = cfg.tol;
        if (*opt_out) base.out = cfg.out;
        if (*opt_jobs) base.jobs = cfg.jobs;
        if (base.seeds.empty())
            throw kn::DomainError("config rejected: empty seed list");
        if (base.jobs < 1)
            throw kn::DomainError("config rejected: jobs must be >= 1");

        kn::Report rep = kn::run_campaign(base);
        std::string text = kn::report_json(rep);
        std::cout << text;
        if (!base.out.empty()) {
            std::ofstream out(base.out);
            if (!out)
                throw kn::DomainError("cannot write report to " + base.out);
            out << text;
        }
        return kn::report_all_passed(rep) ? 0 : 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
}
