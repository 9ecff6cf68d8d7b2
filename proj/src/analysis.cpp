#include "duetdyn/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <string>

namespace duetdyn {

namespace {

[[noreturn]] void fail(const std::string& what) { throw ValidationError(what); }

// Samples are stored at k*dt; window edges given as round numbers must still
// catch the sample that sits on them.
constexpr double kEdgeSlack = 1e-9;

void check_window(const Trajectory& traj, double t_start, double t_end) {
    if (traj.empty()) fail("window on an empty trajectory");
    if (!(t_start < t_end)) fail("window needs t_start < t_end");
    const double lo = traj.front().t - kEdgeSlack;
    const double hi = traj.back().t + kEdgeSlack;
    if (t_start < lo || t_end > hi) {
        std::ostringstream os;
        os << "window [" << t_start << ", " << t_end << "] outside trajectory span [" << traj.front().t << ", "
           << traj.back().t << "]";
        fail(os.str());
    }
}

bool in_window(double t, double t_start, double t_end) {
    return t >= t_start - kEdgeSlack && t <= t_end + kEdgeSlack;
}

} // namespace

WindowSummary window_summary(const Trajectory& traj, double t_start, double t_end) {
    check_window(traj, t_start, t_end);
    WindowSummary out;
    out.window = {t_start, t_end};
    out.min_z = std::numeric_limits<double>::infinity();
    out.max_z = -std::numeric_limits<double>::infinity();
    double sum_z = 0.0;
    double sum_coh = 0.0;
    for (const auto& s : traj) {
        if (!in_window(s.t, t_start, t_end)) continue;
        sum_z += s.z;
        sum_coh += s.coherence;
        out.min_z = std::min(out.min_z, s.z);
        out.max_z = std::max(out.max_z, s.z);
        ++out.sample_count;
    }
    if (out.sample_count == 0) fail("window contains no samples");
    out.mean_z = sum_z / static_cast<double>(out.sample_count);
    out.mean_coherence = sum_coh / static_cast<double>(out.sample_count);
    return out;
}

CriticalReport detect_critical_c(std::span<const CurvePoint> curve, double sharpness_floor) {
    if (curve.size() < 3) fail("detect_critical_c needs at least 3 points");
    for (std::size_t i = 1; i < curve.size(); ++i)
        if (!(curve[i].c > curve[i - 1].c)) fail("detect_critical_c needs strictly increasing c");

    CriticalReport report;
    std::size_t best = 0;
    for (std::size_t i = 0; i + 1 < curve.size(); ++i) {
        const double dc = curve[i + 1].c - curve[i].c;
        const double slope = std::abs(curve[i + 1].mean_z - curve[i].mean_z) / dc;
        if (slope > report.sharpness) {
            report.sharpness = slope;
            best = i;
        }
    }
    report.resolution = curve[best + 1].c - curve[best].c;
    if (report.sharpness >= sharpness_floor && report.sharpness > 0.0)
        report.c_star = 0.5 * (curve[best].c + curve[best + 1].c);
    return report;
}

std::vector<GammaSharpness> jump_sharpness_vs_gamma(const std::map<double, std::vector<CurvePoint>>& sweeps,
                                                    double sharpness_floor) {
    std::vector<GammaSharpness> out;
    out.reserve(sweeps.size());
    for (const auto& [rate, curve] : sweeps)
        out.push_back({rate, detect_critical_c(curve, sharpness_floor).sharpness});
    return out;
}

bool self_trapping_indicator(const Trajectory& traj, double t_start, double t_end) {
    const auto summary = window_summary(traj, t_start, t_end);
    if (traj.front().z >= 0.0) return summary.min_z > 0.0;
    return summary.max_z < 0.0;
}

std::vector<std::pair<double, double>> coherence_series(const Trajectory& traj) {
    std::vector<std::pair<double, double>> out;
    out.reserve(traj.size());
    for (const auto& s : traj) out.emplace_back(s.t, s.coherence);
    return out;
}

} // namespace duetdyn
