#include "duetdyn/cli.hpp"

#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "duetdyn/experiment.hpp"
#include "duetdyn/validate.hpp"

namespace duetdyn::cli {

namespace {

// Thrown for flag combinations CLI11 cannot express; maps to exit 2.
class UsageError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct EvolveOptions {
    double c = 0.0;
    double gamma_rate = 0.0;
    double bias = 0.0;
    double v = 1.0;
    std::string op = "sigma_x";
    std::string lambdas;
    double op_scale = 1.0;
    double z0 = 1.0;
    double theta0 = 0.0;
    double t_final = 50.0;
    double dt = 1e-3;
    std::size_t stride = 1;
    std::string method = "rk4_fixed";
    std::string out;
};

std::array<Complex, 3> parse_lambdas(const std::string& text) {
    std::array<Complex, 3> out{};
    std::stringstream ss(text);
    std::string item;
    std::size_t k = 0;
    while (std::getline(ss, item, ',')) {
        if (k == 3) throw UsageError("--lambdas takes exactly three comma-separated values");
        out[k++] = parse_complex_literal(item);
    }
    if (k != 3) throw UsageError("--lambdas takes exactly three comma-separated values");
    return out;
}

LindbladSpec lindblad_from_options(const EvolveOptions& o) {
    const auto preset = parse_lindblad_preset(o.op);
    if (preset == LindbladPreset::Custom) {
        if (o.lambdas.empty()) throw UsageError("--op custom requires --lambdas");
        return LindbladSpec::custom(parse_lambdas(o.lambdas), o.op_scale);
    }
    if (!o.lambdas.empty()) throw UsageError("--lambdas is only valid with --op custom");
    return LindbladSpec::from_preset(preset, o.op_scale);
}

// Inputs are in units of V; with --v the run is carried out in dimensional
// units (couplings times v, times divided by v).
SweepSpec spec_from_options(const EvolveOptions& o) {
    if (!(o.v > 0.0)) throw ValidationError("--v must be > 0");
    SweepSpec spec;
    spec.base.v = o.v;
    spec.base.gamma = o.bias * o.v;
    spec.base.c = o.c * o.v;
    spec.base.decoherence_rate = o.gamma_rate * o.v;
    spec.base.lindblad = lindblad_from_options(o);
    spec.c_axis = {spec.base.c, spec.base.c, 1};
    spec.gamma_axis = {spec.base.decoherence_rate};
    spec.init = {o.z0, o.theta0};
    spec.grid = {o.t_final / o.v, o.dt / o.v, o.stride};
    spec.cfg.method = parse_method(o.method);
    spec.summary_window = {0.0, spec.grid.t_final};
    return spec;
}

void report_cell_failures(const SweepResult& result, std::ostream& err, bool& any) {
    for (const auto& cell : result.cells()) {
        if (cell.ok()) continue;
        any = true;
        err << "error: " << cell.error->kind << " in cell c=" << cell.c << " gamma_rate=" << cell.decoherence_rate;
        if (cell.error->time) err << " at t=" << *cell.error->time;
        err << ": " << cell.error->message << '\n';
    }
}

void write_to(const std::string& path, std::ostream& out, const std::function<void(std::ostream&)>& writer) {
    if (path.empty() || path == "-") {
        writer(out);
        return;
    }
    std::ofstream file(path, std::ios::binary | std::ios::trunc);
    if (!file) throw IoError("cannot open '" + path + "' for writing");
    writer(file);
    file.flush();
    if (!file) throw IoError("write to '" + path + "' failed");
}

int cmd_evolve(const EvolveOptions& o, std::ostream& out, std::ostream& err) {
    const SweepSpec spec = spec_from_options(o);
    const SweepResult result = run_sweep(spec, 1);
    bool failed = false;
    report_cell_failures(result, err, failed);
    if (failed) return kExitFailure;
    write_to(o.out, out, [&](std::ostream& os) { write_csv(result, os); });
    return kExitOk;
}

int cmd_sweep(const std::string& config, std::ostream& err) {
    const RunConfig rc = load_run_config(config);
    const SweepResult result = run_sweep(rc.spec);
    export_result(result, rc.output.format, rc.output.path);
    bool failed = false;
    report_cell_failures(result, err, failed);
    return failed ? kExitFailure : kExitOk;
}

std::string gamma_label(double rate) {
    std::ostringstream os;
    os << rate;
    return os.str();
}

int cmd_figures(const std::vector<std::string>& names, const std::string& out_dir, std::ostream& out,
                std::ostream& err) {
    std::vector<FigureName> figs;
    for (const auto& n : names) {
        if (n == "all") {
            for (auto f : {FigureName::Fig1, FigureName::Fig2, FigureName::Fig3, FigureName::Fig4, FigureName::Fig5,
                           FigureName::Fig6})
                figs.push_back(f);
        } else {
            figs.push_back(parse_figure_name(n));
        }
    }
    std::filesystem::create_directories(out_dir);
    bool failed = false;
    for (auto f : figs) {
        const SweepResult result = run_sweep(figure_preset(f));
        report_cell_failures(result, err, failed);
        const auto& rates = result.provenance().spec.gamma_axis;
        for (std::size_t gi = 0; gi < rates.size(); ++gi) {
            const auto path = std::filesystem::path(out_dir) /
                              (std::string(to_string(f)) + "_gamma" + gamma_label(rates[gi]) + ".csv");
            write_to(path.string(), out, [&](std::ostream& os) { write_csv(result, os, gi); });
            out << path.string() << '\n';
        }
    }
    return failed ? kExitFailure : kExitOk;
}

int cmd_validate(std::ostream& out) {
    bool all = true;
    for (const auto& r : run_validation_suite()) {
        out << (r.passed ? "PASS " : "FAIL ") << r.name << " (" << r.detail << ")\n";
        all = all && r.passed;
    }
    return all ? kExitOk : kExitFailure;
}

} // namespace

int run_command(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Mean-field double-well condensate dynamics under decoherence", "duetdyn"};
    app.require_subcommand(1);

    EvolveOptions eo;
    auto* evolve_cmd = app.add_subcommand("evolve", "Integrate one trajectory and write it as CSV");
    evolve_cmd->add_option("--c", eo.c, "Nonlinearity c in units of V");
    evolve_cmd->add_option("--gamma-rate", eo.gamma_rate, "Decoherence rate Gamma in units of V");
    evolve_cmd->add_option("--bias", eo.bias, "Energy bias between the wells in units of V");
    evolve_cmd->add_option("--v", eo.v, "Inter-well coupling for dimensional output");
    evolve_cmd->add_option("--op", eo.op, "Lindblad operator")
        ->check(CLI::IsMember({"sigma_plus", "sigma_x", "sigma_z", "custom"}));
    evolve_cmd->add_option("--lambdas", eo.lambdas, "lx,ly,lz for --op custom, each as a+bi");
    evolve_cmd->add_option("--op-scale", eo.op_scale, "Multiplier on the Lindblad operator");
    evolve_cmd->add_option("--z0", eo.z0, "Initial population imbalance in [-1, 1]");
    evolve_cmd->add_option("--theta0", eo.theta0, "Initial relative phase in [0, 2pi)");
    evolve_cmd->add_option("--t-final", eo.t_final, "Final time in units of 1/V");
    evolve_cmd->add_option("--dt", eo.dt, "Step size in units of 1/V");
    evolve_cmd->add_option("--stride", eo.stride, "Keep every n-th step")->check(CLI::PositiveNumber);
    evolve_cmd->add_option("--method", eo.method, "Integrator")
        ->check(CLI::IsMember({"rk4_fixed", "rk45_adaptive", "rk4", "rk45"}));
    evolve_cmd->add_option("--out", eo.out, "Output CSV path (stdout if omitted)");

    std::string config;
    auto* sweep_cmd = app.add_subcommand("sweep", "Run a sweep described by a JSON run config");
    sweep_cmd->add_option("--config", config, "Run-config JSON file")->required();

    std::vector<std::string> fig_names;
    std::string out_dir = ".";
    auto* fig_cmd = app.add_subcommand("figures", "Write the datasets for figure presets");
    fig_cmd->add_option("names", fig_names, "fig1 .. fig6, or all")
        ->required()
        ->check(CLI::IsMember({"fig1", "fig2", "fig3", "fig4", "fig5", "fig6", "all"}));
    fig_cmd->add_option("--out-dir", out_dir, "Directory for the CSV files");

    auto* validate_cmd = app.add_subcommand("validate", "Run the built-in invariant checks");

    std::vector<std::string> argv_storage{"duetdyn"};
    argv_storage.insert(argv_storage.end(), args.begin(), args.end());
    std::vector<const char*> argv;
    for (const auto& a : argv_storage) argv.push_back(a.c_str());

    try {
        app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return kExitOk;
    } catch (const CLI::CallForAllHelp&) {
        out << app.help("", CLI::AppFormatMode::All);
        return kExitOk;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << "\n\n" << app.help();
        return kExitUsage;
    }

    try {
        if (*evolve_cmd) return cmd_evolve(eo, out, err);
        if (*sweep_cmd) return cmd_sweep(config, err);
        if (*fig_cmd) return cmd_figures(fig_names, out_dir, out, err);
        if (*validate_cmd) return cmd_validate(out);
    } catch (const UsageError& e) {
        err << "error: " << e.what() << "\n\n" << app.help();
        return kExitUsage;
    } catch (const GuardError& e) {
        err << "error: " << e.what() << '\n';
        return kExitFailure;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return kExitFailure;
    }
    return kExitUsage;
}

} // namespace duetdyn::cli
