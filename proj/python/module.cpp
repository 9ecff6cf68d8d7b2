#include <pybind11/complex.h>
#include <pybind11/eigen.h>
#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "duetdyn/analysis.hpp"
#include "duetdyn/experiment.hpp"

namespace py = pybind11;
using namespace duetdyn;

namespace {

py::dict trajectory_arrays(const Trajectory& traj) {
    const auto n = static_cast<py::ssize_t>(traj.size());
    py::array_t<double> t(n), rr(n), ll(n), re(n), im(n), z(n), coh(n), pur(n);
    auto T = t.mutable_unchecked<1>(), RR = rr.mutable_unchecked<1>(), LL = ll.mutable_unchecked<1>(),
         RE = re.mutable_unchecked<1>(), IM = im.mutable_unchecked<1>(), Z = z.mutable_unchecked<1>(),
         C = coh.mutable_unchecked<1>(), P = pur.mutable_unchecked<1>();
    for (py::ssize_t i = 0; i < n; ++i) {
        const auto& s = traj[static_cast<std::size_t>(i)];
        T(i) = s.t;
        RR(i) = s.rho.rr().real();
        LL(i) = s.rho.ll().real();
        RE(i) = s.rho.rl().real();
        IM(i) = s.rho.rl().imag();
        Z(i) = s.z;
        C(i) = s.coherence;
        P(i) = s.purity;
    }
    py::dict d;
    d["t"] = t;
    d["rho_rr"] = rr;
    d["rho_ll"] = ll;
    d["re_rho_rl"] = re;
    d["im_rho_rl"] = im;
    d["z"] = z;
    d["coherence"] = coh;
    d["purity"] = pur;
    return d;
}

DensityMatrix density_arg(const Matrix2c& m) { return DensityMatrix::from_matrix(m); }

} // namespace

PYBIND11_MODULE(_duetdyn, m) {
    m.doc() = "Mean-field double-well dynamics under decoherence";
    m.attr("__version__") = std::string(library_version());

    py::register_exception<GuardError>(m, "GuardError", PyExc_RuntimeError);
    py::register_exception<IoError>(m, "IoError", PyExc_OSError);

    py::enum_<LindbladPreset>(m, "LindbladPreset")
        .value("sigma_plus", LindbladPreset::SigmaPlus)
        .value("sigma_x", LindbladPreset::SigmaX)
        .value("sigma_z", LindbladPreset::SigmaZ)
        .value("custom", LindbladPreset::Custom);

    py::class_<LindbladSpec>(m, "LindbladSpec")
        .def(py::init<>())
        .def_static("sigma_plus", &LindbladSpec::sigma_plus, py::arg("scale") = 1.0)
        .def_static("sigma_x", &LindbladSpec::sigma_x, py::arg("scale") = 1.0)
        .def_static("sigma_z", &LindbladSpec::sigma_z, py::arg("scale") = 1.0)
        .def_static("custom", &LindbladSpec::custom, py::arg("lambdas"), py::arg("scale") = 1.0)
        .def_readwrite("preset", &LindbladSpec::preset)
        .def_readwrite("lambdas", &LindbladSpec::lambdas)
        .def_readwrite("scale", &LindbladSpec::scale);

    py::class_<ModelParams>(m, "ModelParams")
        .def(py::init([](double gamma, double c, double v, double decoherence_rate, LindbladSpec lindblad) {
                 ModelParams p{gamma, c, v, decoherence_rate, lindblad};
                 p.validate();
                 return p;
             }),
             py::kw_only(), py::arg("gamma") = 0.0, py::arg("c") = 0.0, py::arg("v") = 1.0,
             py::arg("decoherence_rate") = 0.0, py::arg("lindblad") = LindbladSpec::sigma_x())
        .def_readwrite("gamma", &ModelParams::gamma)
        .def_readwrite("c", &ModelParams::c)
        .def_readwrite("v", &ModelParams::v)
        .def_readwrite("decoherence_rate", &ModelParams::decoherence_rate)
        .def_readwrite("lindblad", &ModelParams::lindblad);

    py::class_<InitialState>(m, "InitialState")
        .def(py::init([](double z0, double theta0) {
                 InitialState s{z0, theta0};
                 s.validate();
                 return s;
             }),
             py::arg("z0") = 1.0, py::arg("theta0") = 0.0)
        .def_readwrite("z0", &InitialState::z0)
        .def_readwrite("theta0", &InitialState::theta0);

    py::class_<TimeGrid>(m, "TimeGrid")
        .def(py::init([](double t_final, double dt, std::size_t record_stride) {
                 TimeGrid g{t_final, dt, record_stride};
                 g.validate();
                 return g;
             }),
             py::arg("t_final") = 50.0, py::arg("dt") = 1e-3, py::arg("record_stride") = 1)
        .def_readwrite("t_final", &TimeGrid::t_final)
        .def_readwrite("dt", &TimeGrid::dt)
        .def_readwrite("record_stride", &TimeGrid::record_stride);

    m.def("density_from_initial", [](const InitialState& s) { return density_from_initial(s).matrix(); });
    m.def("rhs", [](const Matrix2c& rho, const ModelParams& p) { return rhs(density_arg(rho), p); });
    m.def("hamiltonian", [](const Matrix2c& rho, const ModelParams& p) { return build_hamiltonian(density_arg(rho), p); });

    m.def(
        "evolve",
        [](const InitialState& init, const ModelParams& p, const TimeGrid& grid, const std::string& method) {
            IntegratorConfig cfg;
            cfg.method = parse_method(method);
            Trajectory traj;
            {
                py::gil_scoped_release release;
                traj = evolve(density_from_initial(init), p, grid, cfg);
            }
            return trajectory_arrays(traj);
        },
        py::arg("init"), py::arg("params"), py::arg("grid"), py::arg("method") = "rk4_fixed");
    m.def(
        "evolve_gpe",
        [](const InitialState& init, const ModelParams& p, const TimeGrid& grid) {
            Trajectory traj;
            {
                py::gil_scoped_release release;
                traj = evolve_gpe(init, p, grid);
            }
            return trajectory_arrays(traj);
        },
        py::arg("init"), py::arg("params"), py::arg("grid"));
    m.def(
        "steady_state",
        [](const Matrix2c& rho0, const ModelParams& p, double t_max, double eps, double dt) {
            const auto ss = steady_state(density_arg(rho0), p, {}, t_max, eps, dt);
            return py::make_tuple(ss.rho.matrix(), ss.converged, ss.t);
        },
        py::arg("rho0"), py::arg("params"), py::arg("t_max"), py::arg("eps"), py::arg("dt") = 1e-3);

    m.def(
        "window_mean_z",
        [](const InitialState& init, const ModelParams& p, const TimeGrid& grid, double t_start, double t_end) {
            return window_summary(evolve(density_from_initial(init), p, grid), t_start, t_end).mean_z;
        },
        py::arg("init"), py::arg("params"), py::arg("grid"), py::arg("t_start"), py::arg("t_end"));
    m.def(
        "detect_critical_c",
        [](const std::vector<double>& c, const std::vector<double>& mean_z, double floor) {
            if (c.size() != mean_z.size()) throw ValidationError("c and mean_z differ in length");
            std::vector<CurvePoint> curve;
            for (std::size_t i = 0; i < c.size(); ++i) curve.push_back({c[i], mean_z[i]});
            const auto r = detect_critical_c(curve, floor);
            py::dict d;
            d["c_star"] = r.c_star ? py::cast(*r.c_star) : py::none();
            d["sharpness"] = r.sharpness;
            d["resolution"] = r.resolution;
            return d;
        },
        py::arg("c"), py::arg("mean_z"), py::arg("sharpness_floor") = kDefaultSharpnessFloor);

    m.def(
        "figure_curve",
        [](const std::string& name, unsigned threads) {
            SweepResult result;
            {
                py::gil_scoped_release release;
                result = run_sweep(figure_preset(parse_figure_name(name)), threads);
            }
            py::dict out;
            for (std::size_t gi = 0; gi < result.gamma_count(); ++gi) {
                std::vector<double> c, mz;
                for (const auto& pt : result.summary_curve(gi)) {
                    c.push_back(pt.c);
                    mz.push_back(pt.mean_z);
                }
                out[py::float_(result.provenance().spec.gamma_axis[gi])] = py::make_tuple(c, mz);
            }
            return out;
        },
        py::arg("name"), py::arg("threads") = 0);
    m.def(
        "run_sweep_json",
        [](const std::string& spec_json, unsigned threads) {
            const auto spec = spec_from_json(spec_json);
            std::string out;
            {
                py::gil_scoped_release release;
                out = to_json(run_sweep(spec, threads));
            }
            return out;
        },
        py::arg("spec_json"), py::arg("threads") = 0);
}
