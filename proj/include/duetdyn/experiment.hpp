// experiment.hpp: declarative (c, Gamma) sweeps, figure presets and
// serialization of their results.

#pragma once

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "duetdyn/analysis.hpp"
#include "duetdyn/integrator.hpp"

namespace duetdyn {

enum class Observable { Z, Coherence, Purity };

std::string_view to_string(Observable o);
Observable parse_observable(std::string_view name);

// `steps` is the number of grid points; steps == 1 gives the single value min.
struct CAxis {
    double min = 0.0;
    double max = 0.0;
    std::size_t steps = 1;

    std::vector<double> values() const;
};

struct SweepSpec {
    ModelParams base{};
    CAxis c_axis{};
    std::vector<double> gamma_axis{0.0};
    InitialState init{};
    TimeGrid grid{};
    IntegratorConfig cfg{};
    std::vector<Observable> observables{Observable::Z, Observable::Coherence, Observable::Purity};
    Window summary_window{25.0, 50.0};

    void validate() const;
    bool wants(Observable o) const;
};

struct CellError {
    std::string kind; // GuardKind name, or "ValidationError"
    std::string message;
    std::optional<double> time;
};

struct SweepCell {
    std::size_t c_index = 0;
    std::size_t gamma_index = 0;
    double c = 0.0;
    double decoherence_rate = 0.0;
    Trajectory trajectory;
    std::optional<WindowSummary> summary;
    std::optional<CellError> error;

    bool ok() const { return !error.has_value(); }
};

struct Provenance {
    SweepSpec spec;
    std::string version;
};

class SweepResult {
public:
    SweepResult() = default;
    SweepResult(Provenance provenance, std::size_t c_count, std::size_t gamma_count);

    const Provenance& provenance() const { return provenance_; }
    std::size_t c_count() const { return c_count_; }
    std::size_t gamma_count() const { return gamma_count_; }

    // Cells are laid out c-major: index = c_index * gamma_count + gamma_index.
    const std::vector<SweepCell>& cells() const { return cells_; }
    std::vector<SweepCell>& cells() { return cells_; }
    const SweepCell& at(std::size_t c_index, std::size_t gamma_index) const;
    SweepCell& at(std::size_t c_index, std::size_t gamma_index);

    // (c, mean_z) for one Gamma column, skipping failed cells.
    std::vector<CurvePoint> summary_curve(std::size_t gamma_index) const;

private:
    Provenance provenance_;
    std::size_t c_count_ = 0;
    std::size_t gamma_count_ = 0;
    std::vector<SweepCell> cells_;
};

std::string_view library_version();

// Worker count from DUETDYN_THREADS, falling back to the hardware count.
unsigned default_worker_count();

// threads == 0 selects default_worker_count(). The result does not depend on
// the worker count or on scheduling.
SweepResult run_sweep(const SweepSpec& spec, unsigned threads = 0);

enum class FigureName { Fig1, Fig2, Fig3, Fig4, Fig5, Fig6 };

std::string_view to_string(FigureName f);
FigureName parse_figure_name(std::string_view name);
SweepSpec figure_preset(FigureName name);

enum class ExportFormat { Csv, Json };

ExportFormat parse_export_format(std::string_view name);

inline constexpr std::string_view kCsvHeader =
    "c,gamma_rate,t,rho_rr,rho_ll,re_rho_rl,im_rho_rl,z,coherence,purity";

// Long-form CSV, one row per sample. gamma_index restricts output to one
// Gamma column.
void write_csv(const SweepResult& result, std::ostream& os, std::optional<std::size_t> gamma_index = std::nullopt);
std::string to_json(const SweepResult& result);
// Rebuilds cells, summaries, errors and provenance from to_json output.
// Trajectories come back with only the exported observables populated.
SweepResult sweep_result_from_json(std::string_view text);

void export_result(const SweepResult& result, ExportFormat format, const std::filesystem::path& path);

struct OutputBlock {
    std::filesystem::path path;
    ExportFormat format = ExportFormat::Csv;
};

struct RunConfig {
    SweepSpec spec;
    OutputBlock output;
};

std::string spec_to_json(const SweepSpec& spec);
SweepSpec spec_from_json(std::string_view text);
RunConfig parse_run_config(std::string_view text);
RunConfig load_run_config(const std::filesystem::path& path);

} // namespace duetdyn
