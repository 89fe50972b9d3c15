#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "rosen/ergodic_stats.hpp"

#include <optional>

namespace py = pybind11;
using namespace rosen;

namespace {

double to_double(const Real& v) { return static_cast<double>(v); }

py::dict fiber_dict(const Fiber& f) {
    py::dict d;
    d["x_lo"] = to_double(f.x_lo);
    d["x_hi"] = to_double(f.x_hi);
    d["y_lo"] = f.lower_infinite() ? py::object(py::none()) : py::object(py::float_(to_double(f.y_lo)));
    d["y_hi"] = to_double(f.y_hi);
    return d;
}

}  // namespace

PYBIND11_MODULE(rosencf, m) {
    m.doc() = "Rosen continued fractions, mediant maps and planar natural extensions";

    py::class_<HeckeContext>(m, "Context")
        .def(py::init<int, unsigned>(), py::arg("k"), py::arg("precision_bits") = 256)
        .def_property_readonly("k", &HeckeContext::k)
        .def_property_readonly("even", &HeckeContext::even)
        .def_property_readonly("ell", &HeckeContext::ell)
        .def_property_readonly("lam", [](const HeckeContext& c) { return to_double(c.lambda()); })
        .def_property_readonly("R", [](const HeckeContext& c) { return to_double(c.R()); })
        .def_property_readonly("hurwitz_C",
                               [](const HeckeContext& c) { return to_double(c.hurwitz_C()); })
        .def_property_readonly("lambda_str",
                               [](const HeckeContext& c) { return to_decimal(c.lambda(), 0); })
        .def_property_readonly("min_poly",
                               [](const HeckeContext& c) {
                                   std::vector<std::string> out;
                                   for (const BigInt& z : c.min_poly()) out.push_back(z.str());
                                   return out;
                               })
        .def_property_readonly("phi",
                               [](const HeckeContext& c) {
                                   std::vector<double> out;
                                   for (const Real& v : c.phi()) out.push_back(to_double(v));
                                   return out;
                               })
        .def_property_readonly("L",
                               [](const HeckeContext& c) {
                                   std::vector<double> out;
                                   for (std::size_t i = 1; i < c.L().size(); ++i)
                                       out.push_back(to_double(c.L()[i]));
                                   return out;
                               })
        .def("closed_form_constants",
             [](const HeckeContext& c) {
                 ConstantsReport r = c.closed_form_constants();
                 py::dict d;
                 d["rosen_lenstra"] = to_double(r.rosen_lenstra);
                 d["mediant_lenstra"] = to_double(r.mediant_lenstra);
                 d["hurwitz_C"] = to_double(r.hurwitz_C);
                 return d;
             })
        .def("to_json", &HeckeContext::to_json, py::arg("sig_digits") = 30);

    m.def(
        "rosen_step",
        [](const HeckeContext& ctx, double x) {
            RosenStep st = rosen_step(ctx, Real(x));
            return py::make_tuple(to_double(st.x), st.digit.eps,
                                  static_cast<long long>(st.digit.r), st.terminal);
        },
        py::arg("ctx"), py::arg("x"), "One Rosen step: (T(x), eps, r, terminal)");

    m.def(
        "mediant_step",
        [](const HeckeContext& ctx, double x) {
            MediantStepResult st = mediant_step(ctx, Real(x));
            return py::make_tuple(to_double(st.x), std::string(symbol_name(st.symbol)),
                                  st.terminal);
        },
        py::arg("ctx"), py::arg("x"), "One mediant step: (S(x), symbol, terminal)");

    m.def(
        "expand",
        [](const HeckeContext& ctx, double x, int n) {
            DigitString d = expand(ctx, Real(x), n);
            std::vector<std::pair<int, long long>> digits;
            for (const Digit& dg : d.digits) digits.emplace_back(dg.eps, dg.r);
            py::dict out;
            out["digits"] = digits;
            out["terminated"] = d.terminated;
            return out;
        },
        py::arg("ctx"), py::arg("x"), py::arg("n"), "Rosen digit expansion");

    m.def(
        "symbol_expand",
        [](const HeckeContext& ctx, double x, int n) {
            SymbolString s = symbol_expand(ctx, Real(x), n);
            std::vector<std::string> symbols;
            for (MediantSymbol ms : s.symbols) symbols.emplace_back(symbol_name(ms));
            return symbols;
        },
        py::arg("ctx"), py::arg("x"), py::arg("n"), "mediant symbol expansion");

    m.def(
        "induced_length",
        [](const HeckeContext& ctx, double x) {
            InducedReport r = induced_length(ctx, Real(x), Real(1) / Real("1e12"));
            py::dict d;
            d["length"] = r.length;
            d["verified"] = r.verified;
            d["matches_first_digit"] = r.matches_first_digit;
            d["deviation"] = to_double(r.deviation);
            return d;
        },
        py::arg("ctx"), py::arg("x"), "return time of S into the outer branches");

    m.def(
        "convergents",
        [](const HeckeContext& ctx, double x, int n) {
            DigitString d = expand(ctx, Real(x), n);
            auto cs = convergents(ctx, d.digits);
            std::vector<py::dict> out;
            for (const auto& st : cs) {
                py::dict e;
                e["p"] = st.p_cur.str();
                e["q"] = st.q_cur.str();
                e["value"] = to_double(st.p_cur.to_real() / st.q_cur.to_real());
                out.push_back(e);
            }
            return out;
        },
        py::arg("ctx"), py::arg("x"), py::arg("n"), "exact convergents p_n/q_n");

    m.def(
        "mediant_convergents",
        [](const HeckeContext& ctx, double x, int depth) {
            auto entries = mediant_convergents(ctx, Real(x), depth);
            std::vector<py::dict> out;
            for (const auto& e : entries) {
                py::dict d;
                d["value"] = to_double(e.num.to_real() / e.den.to_real());
                d["principal"] = e.principal;
                d["level"] = e.level;
                d["offset"] = e.offset;
                out.push_back(d);
            }
            return out;
        },
        py::arg("ctx"), py::arg("x"), py::arg("depth"),
        "interleaved principal/mediant convergent values");

    m.def(
        "theta_series",
        [](const HeckeContext& ctx, double x, int n) {
            ThetaSeries ts = theta_orbit(ctx, Real(x), n);
            std::vector<double> out;
            for (const Real& t : ts.theta) out.push_back(to_double(t));
            return out;
        },
        py::arg("ctx"), py::arg("x"), py::arg("n"), "approximation coefficients Theta_n");

    m.def(
        "omega0",
        [](const HeckeContext& ctx) {
            std::vector<py::dict> out;
            for (const Fiber& f : build_omega0(ctx).fibers) out.push_back(fiber_dict(f));
            return out;
        },
        py::arg("ctx"));
    m.def(
        "omega_star",
        [](const HeckeContext& ctx) {
            std::vector<py::dict> out;
            for (const Fiber& f : build_omega_star(ctx).fibers) out.push_back(fiber_dict(f));
            return out;
        },
        py::arg("ctx"));

    m.def(
        "nat_ext_step",
        [](const HeckeContext& ctx, double x, std::optional<double> y) {
            Real yy = y ? Real(*y) : Real(-std::numeric_limits<double>::infinity());
            NatExtStep st = nat_ext_step(ctx, PlanarPoint{Real(x), yy});
            return py::make_tuple(to_double(st.p.x), to_double(st.p.y),
                                  std::string(symbol_name(st.symbol)));
        },
        py::arg("ctx"), py::arg("x"), py::arg("y") = py::none(),
        "S-hat on (x, y); y = None means -infinity");

    m.def(
        "domain_measure",
        [](const HeckeContext& ctx, const std::string& which, std::optional<double> clip) {
            PlanarDomain dom = (which == "omega0") ? build_omega0(ctx) : build_omega_star(ctx);
            std::optional<Real> t;
            if (clip) t = Real(*clip);
            return to_double(domain_measure(dom, t));
        },
        py::arg("ctx"), py::arg("which") = "omega0", py::arg("clip_t") = py::none(),
        "mu-hat of a domain, optionally clipped to {x - y > t}");

    m.def(
        "geometric_lenstra",
        [](const HeckeContext& ctx, const std::string& variant) {
            auto g = geometric_lenstra(ctx, variant == "rosen" ? LenstraVariant::Rosen
                                                               : LenstraVariant::Mediant);
            py::dict d;
            d["t_corner"] = to_double(g.t_corner);
            d["constant_corner"] = to_double(g.constant_corner);
            d["constant_clipped"] = to_double(g.constant_clipped);
            d["argmax_fiber"] = g.argmax_fiber;
            return d;
        },
        py::arg("ctx"), py::arg("variant") = "mediant");

    m.def(
        "witness_orbit",
        [](const HeckeContext& ctx) {
            WitnessOrbit w = witness_orbit(ctx);
            py::dict d;
            d["period"] = w.period;
            d["rosen_period"] = w.rosen_period;
            d["min_theta"] = to_double(w.min_theta);
            d["exact_certified"] = w.exact_certified;
            d["interval_certified"] = w.interval_certified;
            d["has_unit_point"] = w.has_unit_point;
            std::vector<py::tuple> pts;
            for (std::size_t i = 0; i < w.points.size(); ++i)
                pts.push_back(py::make_tuple(to_double(w.points[i].x), to_double(w.points[i].y),
                                             to_double(w.theta[i])));
            d["points"] = pts;
            return d;
        },
        py::arg("ctx"), "periodic witness orbit of tau_0");

    m.def(
        "check_bijectivity",
        [](const HeckeContext& ctx, long n, std::uint64_t seed) {
            BijectivityReport r = check_bijectivity(ctx, n, seed);
            py::dict d;
            d["samples"] = r.samples;
            d["containment_violations"] = r.containment_violations;
            d["preimage_violations"] = r.preimage_violations;
            d["boundary_skipped"] = r.boundary_skipped;
            return d;
        },
        py::arg("ctx"), py::arg("n_samples") = 10000, py::arg("seed") = 42);

    m.def(
        "breakpoint_estimate",
        [](const HeckeContext& ctx, int seeds, long n, double lo, double hi, int steps,
           std::uint64_t seed) {
            std::vector<double> grid;
            for (int i = 0; i < steps; ++i) grid.push_back(lo + (hi - lo) * i / (steps - 1));
            BreakpointEstimate est = breakpoint_estimate(ctx, seeds, n, grid, seed);
            py::dict d;
            d["L_hat"] = est.L_hat;
            d["plateau"] = est.plateau;
            return d;
        },
        py::arg("ctx"), py::arg("seeds") = 3, py::arg("n_iter") = 200000,
        py::arg("grid_lo") = 0.01, py::arg("grid_hi") = 2.0, py::arg("grid_steps") = 200,
        py::arg("seed") = 1);

    m.def(
        "lyapunov_entropy",
        [](const HeckeContext& ctx, long n, std::uint64_t seed) {
            EntropyEstimate est = lyapunov_entropy(ctx, n, seed);
            py::dict d;
            d["h_hat"] = est.h_hat;
            d["mu_omega0"] = est.mu_omega0;
            d["krengel"] = est.krengel;
            d["target"] = est.target;
            d["rel_error"] = est.rel_error;
            return d;
        },
        py::arg("ctx"), py::arg("n_iter") = 200000, py::arg("seed") = 1);

    m.attr("__version__") = "1.0.0";
}
