#include "duetdyn/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <stdexcept>
#include <string>
#include <thread>

#ifndef DUETDYN_VERSION
#define DUETDYN_VERSION "0.0.0"
#endif

namespace duetdyn {

namespace {

[[noreturn]] void fail(const std::string& what) { throw ValidationError(what); }

SweepCell run_cell(const SweepSpec& spec, const DensityMatrix& rho0, std::size_t ci, std::size_t gi, double c,
                   double rate) {
    SweepCell cell;
    cell.c_index = ci;
    cell.gamma_index = gi;
    cell.c = c;
    cell.decoherence_rate = rate;
    ModelParams params = spec.base;
    params.c = c;
    params.decoherence_rate = rate;
    try {
        cell.trajectory = evolve(rho0, params, spec.grid, spec.cfg);
        cell.summary = window_summary(cell.trajectory, spec.summary_window);
    } catch (const GuardError& e) {
        cell.trajectory = Trajectory{};
        cell.error = CellError{std::string(to_string(e.kind())), e.what(), e.time()};
    } catch (const ValidationError& e) {
        cell.trajectory = Trajectory{};
        cell.error = CellError{"ValidationError", e.what(), std::nullopt};
    }
    return cell;
}

} // namespace

std::string_view to_string(Observable o) {
    switch (o) {
    case Observable::Z: return "z";
    case Observable::Coherence: return "coherence";
    case Observable::Purity: return "purity";
    }
    return "z";
}

Observable parse_observable(std::string_view name) {
    if (name == "z") return Observable::Z;
    if (name == "coherence") return Observable::Coherence;
    if (name == "purity") return Observable::Purity;
    fail("unknown observable '" + std::string(name) + "'");
}

std::vector<double> CAxis::values() const {
    if (steps < 1) fail("c axis needs at least one point");
    if (steps == 1) return {min};
    std::vector<double> out(steps);
    const double span = max - min;
    for (std::size_t i = 0; i < steps; ++i)
        out[i] = min + span * static_cast<double>(i) / static_cast<double>(steps - 1);
    out.back() = max;
    return out;
}

void SweepSpec::validate() const {
    // The swept fields are overwritten per cell, so check the base with a
    // representative value in place.
    ModelParams probe = base;
    probe.decoherence_rate = 0.0;
    probe.validate();
    if (c_axis.steps < 1) fail("c axis needs steps >= 1");
    if (!std::isfinite(c_axis.min) || !std::isfinite(c_axis.max)) fail("c axis bounds must be finite");
    if (c_axis.steps > 1 && !(c_axis.max > c_axis.min)) fail("c axis needs max > min when steps > 1");
    if (gamma_axis.empty()) fail("gamma axis must be nonempty");
    for (double g : gamma_axis) {
        probe.decoherence_rate = g;
        probe.validate();
    }
    init.validate();
    grid.validate();
    cfg.validate();
    if (!(summary_window.t_start < summary_window.t_end)) fail("summary window needs t_start < t_end");
    if (summary_window.t_start < 0.0 || summary_window.t_end > grid.t_final + 1e-9)
        fail("summary window must lie inside [0, t_final]");
}

bool SweepSpec::wants(Observable o) const {
    return std::find(observables.begin(), observables.end(), o) != observables.end();
}

SweepResult::SweepResult(Provenance provenance, std::size_t c_count, std::size_t gamma_count)
    : provenance_(std::move(provenance)), c_count_(c_count), gamma_count_(gamma_count),
      cells_(c_count * gamma_count) {}

const SweepCell& SweepResult::at(std::size_t ci, std::size_t gi) const {
    if (ci >= c_count_ || gi >= gamma_count_) throw std::out_of_range("sweep cell index out of range");
    return cells_[ci * gamma_count_ + gi];
}

SweepCell& SweepResult::at(std::size_t ci, std::size_t gi) {
    if (ci >= c_count_ || gi >= gamma_count_) throw std::out_of_range("sweep cell index out of range");
    return cells_[ci * gamma_count_ + gi];
}

std::vector<CurvePoint> SweepResult::summary_curve(std::size_t gi) const {
    std::vector<CurvePoint> out;
    for (std::size_t ci = 0; ci < c_count_; ++ci) {
        const auto& cell = at(ci, gi);
        if (cell.summary) out.push_back({cell.c, cell.summary->mean_z});
    }
    return out;
}

std::string_view library_version() { return DUETDYN_VERSION; }

unsigned default_worker_count() {
    if (const char* env = std::getenv("DUETDYN_THREADS")) {
        char* end = nullptr;
        const long n = std::strtol(env, &end, 10);
        if (end != env && *end == '\0' && n > 0) return static_cast<unsigned>(n);
    }
    return std::max(1u, std::thread::hardware_concurrency());
}

SweepResult run_sweep(const SweepSpec& spec, unsigned threads) {
    spec.validate();
    const auto cs = spec.c_axis.values();
    const auto& rates = spec.gamma_axis;
    SweepResult result(Provenance{spec, std::string(library_version())}, cs.size(), rates.size());
    const DensityMatrix rho0 = density_from_initial(spec.init);

    const std::size_t total = cs.size() * rates.size();
    const unsigned workers =
        static_cast<unsigned>(std::min<std::size_t>(threads == 0 ? default_worker_count() : threads, total));

    // Each worker claims cell indices from a shared counter and writes only
    // to its claimed slot.
    std::atomic<std::size_t> next{0};
    auto work = [&] {
        for (std::size_t idx = next.fetch_add(1); idx < total; idx = next.fetch_add(1)) {
            const std::size_t ci = idx / rates.size();
            const std::size_t gi = idx % rates.size();
            result.cells()[idx] = run_cell(spec, rho0, ci, gi, cs[ci], rates[gi]);
        }
    };
    if (workers <= 1) {
        work();
    } else {
        std::vector<std::jthread> pool;
        pool.reserve(workers);
        for (unsigned w = 0; w < workers; ++w) pool.emplace_back(work);
    }
    return result;
}

std::string_view to_string(FigureName f) {
    switch (f) {
    case FigureName::Fig1: return "fig1";
    case FigureName::Fig2: return "fig2";
    case FigureName::Fig3: return "fig3";
    case FigureName::Fig4: return "fig4";
    case FigureName::Fig5: return "fig5";
    case FigureName::Fig6: return "fig6";
    }
    return "fig1";
}

FigureName parse_figure_name(std::string_view name) {
    for (auto f : {FigureName::Fig1, FigureName::Fig2, FigureName::Fig3, FigureName::Fig4, FigureName::Fig5,
                   FigureName::Fig6})
        if (to_string(f) == name) return f;
    fail("unknown figure preset '" + std::string(name) + "'");
}

// Stated in the figure captions: operator, Gamma values, c (figs 4-6), the
// initial condition (all atoms in the right well). Chosen defaults: t_final,
// dt, record stride, the c grid [0, 4] with 201 points, and the summary window
// over the second half of the run.
SweepSpec figure_preset(FigureName name) {
    SweepSpec spec;
    spec.init = InitialState{1.0, 0.0};
    spec.grid = TimeGrid{50.0, 1e-3, 100};
    spec.summary_window = Window{25.0, 50.0};
    spec.c_axis = CAxis{0.0, 4.0, 201};

    switch (name) {
    case FigureName::Fig1:
        spec.base.lindblad = LindbladSpec::sigma_plus();
        spec.gamma_axis = {0.1, 0.0};
        break;
    case FigureName::Fig2:
        spec.base.lindblad = LindbladSpec::sigma_plus();
        spec.gamma_axis = {0.3, 0.5};
        break;
    case FigureName::Fig3:
        spec.base.lindblad = LindbladSpec::sigma_plus();
        spec.gamma_axis = {0.1};
        spec.observables = {Observable::Coherence};
        break;
    case FigureName::Fig4:
    case FigureName::Fig5:
    case FigureName::Fig6: {
        const double c = name == FigureName::Fig4 ? 3.0 : name == FigureName::Fig5 ? 1.0 : 2.0;
        spec.base.lindblad = LindbladSpec::sigma_x();
        spec.base.c = c;
        spec.c_axis = CAxis{c, c, 1};
        spec.gamma_axis = {0.01, 0.0};
        spec.grid.record_stride = 10;
        break;
    }
    }
    return spec;
}

ExportFormat parse_export_format(std::string_view name) {
    if (name == "csv") return ExportFormat::Csv;
    if (name == "json") return ExportFormat::Json;
    fail("unknown export format '" + std::string(name) + "'");
}

} // namespace duetdyn
