#include <pybind11/complex.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "json.hpp"
#include "kn/freefield.hpp"
#include "kn/kernels.hpp"
#include "kn/report.hpp"
#include "kn/special.hpp"
#include "kn/structfn.hpp"
#include "kn/thetaspace.hpp"

namespace py = pybind11;
using namespace kn;

namespace {

CampaignConfig config_from_json(const std::string& text) {
    nlohmann::json j = nlohmann::json::parse(text);
    CampaignConfig cfg;
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
    if (j.contains("jobs")) cfg.jobs = j["jobs"].get<int>();
    return cfg;
}

}  // namespace

PYBIND11_MODULE(_knverify, m) {
    m.doc() = "Numerical verification of the toroidal current-algebra "
              "structure functions, theta kernels and free-field data";

    py::register_exception<PoleError>(m, "PoleError");
    py::register_exception<DomainError>(m, "DomainError");
    py::register_exception<CostError>(m, "CostError");

    py::class_<TruncationConfig>(m, "TruncationConfig")
        .def(py::init<>())
        .def_readwrite("product_order", &TruncationConfig::product_order)
        .def_readwrite("fourier_cutoff", &TruncationConfig::fourier_cutoff)
        .def_readwrite("tolerance_abs", &TruncationConfig::tolerance_abs)
        .def_readwrite("tolerance_rel", &TruncationConfig::tolerance_rel)
        .def_readwrite("residue_epsilon", &TruncationConfig::residue_epsilon);

    py::class_<ParameterSet>(m, "ParameterSet")
        .def_readonly("n", &ParameterSet::n)
        .def_readonly("q_half", &ParameterSet::q_half)
        .def_readonly("d_half", &ParameterSet::d_half)
        .def_readonly("tau", &ParameterSet::tau)
        .def_readonly("p", &ParameterSet::p)
        .def_readonly("C", &ParameterSet::C)
        .def_readonly("mu", &ParameterSet::mu)
        .def_readonly("gamma", &ParameterSet::gamma)
        .def_readonly("beta", &ParameterSet::beta)
        .def_readonly("q1", &ParameterSet::q1)
        .def_readonly("q2", &ParameterSet::q2)
        .def_readonly("q3", &ParameterSet::q3)
        .def("q", &ParameterSet::q)
        .def("d", &ParameterSet::d)
        .def("fingerprint_hex", &ParameterSet::fingerprint_hex);

    m.def("build_params", &build_params, py::arg("n"), py::arg("q_half"),
          py::arg("d_half"), py::arg("tau"), py::arg("mu"),
          py::arg("im_context"), py::arg("C_explicit") = cplx(1.0, 0.0));
    m.def("sample_params", &sample_params, py::arg("seed"), py::arg("n"),
          py::arg("im_context"));

    m.def("theta_u",
          [](cplx u, const ParameterSet& ps) {
              return theta_u(u, ps, TruncationConfig{});
          },
          py::arg("u"), py::arg("params"));
    m.def("xi",
          [](cplx u, const ParameterSet& ps) {
              return xi(u, ps, TruncationConfig{});
          },
          py::arg("u"), py::arg("params"));
    m.def("eta",
          [](cplx u, const ParameterSet& ps) {
              return eta(u, ps, TruncationConfig{});
          },
          py::arg("u"), py::arg("params"));
    m.def("qpochhammer",
          [](cplx z, cplx p) { return qpochhammer(z, p, TruncationConfig{}); },
          py::arg("z"), py::arg("p"));

    m.def("g_fun", &g_fun, py::arg("i"), py::arg("j"), py::arg("z"),
          py::arg("w"), py::arg("params"));
    m.def("G_fun", &G_fun, py::arg("i"), py::arg("j"), py::arg("x"),
          py::arg("params"));
    m.def("lambda0", &lambda0, py::arg("i"), py::arg("j"), py::arg("x"),
          py::arg("params"));
    m.def("lambda_elliptic",
          [](int i, int j, cplx u, const ParameterSet& ps) {
              return lambda_elliptic(i, j, u, ps, TruncationConfig{});
          },
          py::arg("i"), py::arg("j"), py::arg("u"), py::arg("params"));
    m.def("check_fusion_identities", &check_fusion_identities, py::arg("i"),
          py::arg("x"), py::arg("params"));

    m.def("phi_residual",
          [](int M, int N, cplx alpha,
             const std::vector<std::vector<cplx>>& u, const ParameterSet& ps) {
              TruncationConfig tr;
              auto basis = build_basis(ps, tr);
              ThetaFn th1 = theta_fn_of(basis[0]);
              ThetaFn th2 = theta_fn_of(basis[ps.n > 1 ? 1 : 0]);
              SumResult r = phi_residual(M, N, alpha, u, th1, th2, ps, tr);
              return py::make_tuple(r.value, r.scale);
          },
          py::arg("M"), py::arg("N"), py::arg("alpha"), py::arg("grid"),
          py::arg("params"));

    m.def("run_campaign",
          [](const std::string& config_json_text, bool include_timing) {
              Report rep = run_campaign(config_from_json(config_json_text));
              return report_json(rep, include_timing);
          },
          py::arg("config_json"), py::arg("include_timing") = true);

    m.def("campaign_names", &campaign_names);
    m.def("explain", &explain, py::arg("name"));
}
