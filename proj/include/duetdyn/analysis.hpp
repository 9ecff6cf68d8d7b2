// analysis.hpp: observables and detectors over trajectories and c-sweeps.

#pragma once

#include <map>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "duetdyn/integrator.hpp"

namespace duetdyn {

struct Window {
    double t_start = 0.0;
    double t_end = 0.0;
};

struct WindowSummary {
    Window window;
    double mean_z = 0.0;
    double min_z = 0.0;
    double max_z = 0.0;
    double mean_coherence = 0.0;
    std::size_t sample_count = 0;
};

// Arithmetic statistics over the samples with t in [t_start, t_end].
WindowSummary window_summary(const Trajectory& traj, double t_start, double t_end);
inline WindowSummary window_summary(const Trajectory& traj, const Window& w) {
    return window_summary(traj, w.t_start, w.t_end);
}

struct CurvePoint {
    double c = 0.0;
    double mean_z = 0.0;
};

struct CriticalReport {
    std::optional<double> c_star;
    double sharpness = 0.0;  // max |d mean_z / dc| over adjacent grid pairs
    double resolution = 0.0; // spacing of the pair that carries the maximum
};

// Below this slope no jump is declared.
inline constexpr double kDefaultSharpnessFloor = 2.0;

CriticalReport detect_critical_c(std::span<const CurvePoint> curve, double sharpness_floor = kDefaultSharpnessFloor);

struct GammaSharpness {
    double decoherence_rate = 0.0;
    double sharpness = 0.0;
};

std::vector<GammaSharpness> jump_sharpness_vs_gamma(const std::map<double, std::vector<CurvePoint>>& sweeps,
                                                    double sharpness_floor = kDefaultSharpnessFloor);

// z keeps the sign of the trajectory's initial imbalance throughout the
// window: min z > 0 when z(0) >= 0, max z < 0 otherwise.
bool self_trapping_indicator(const Trajectory& traj, double t_start, double t_end);
inline bool self_trapping_indicator(const Trajectory& traj, const Window& w) {
    return self_trapping_indicator(traj, w.t_start, w.t_end);
}

std::vector<std::pair<double, double>> coherence_series(const Trajectory& traj);

} // namespace duetdyn
