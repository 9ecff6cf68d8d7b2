#include "duetdyn/integrator.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <string>

namespace duetdyn {

namespace {

[[noreturn]] void fail(const std::string& what) { throw ValidationError(what); }

template <typename State>
double weighted_error(const State& err, const State& y0, const State& y1, double abs_tol, double rel_tol) {
    double worst = 0.0;
    for (Eigen::Index i = 0; i < err.size(); ++i) {
        const double scale = abs_tol + rel_tol * std::max(std::abs(y0.data()[i]), std::abs(y1.data()[i]));
        worst = std::max(worst, std::abs(err.data()[i]) / scale);
    }
    return worst;
}

// Advances a state across one grid interval, either with a single classical
// RK4 step or with as many Dormand-Prince 5(4) substeps as the tolerances
// require. The adaptive step size carries over between intervals.
template <typename State, typename Flow>
class Propagator {
public:
    Propagator(const Flow& flow, const IntegratorConfig& cfg, double initial_step)
        : flow_(flow), cfg_(cfg), h_(initial_step) {}

    void advance(State& y, double t, double span) {
        if (cfg_.method == Method::RK4Fixed)
            rk4(y, span);
        else
            adaptive(y, t, span);
    }

private:
    void rk4(State& y, double h) const {
        const State k1 = flow_(y);
        const State k2 = flow_(y + (0.5 * h) * k1);
        const State k3 = flow_(y + (0.5 * h) * k2);
        const State k4 = flow_(y + h * k3);
        y += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    }

    void adaptive(State& y, double t, double span) {
        const double t_end = t + span;
        while (t < t_end) {
            const double floor = 16.0 * std::numeric_limits<double>::epsilon() * std::max(1.0, std::abs(t));
            if (h_ < floor) {
                std::ostringstream os;
                os << "adaptive step " << h_ << " fell below " << floor;
                throw GuardError(GuardKind::StepUnderflow, t, os.str());
            }
            const bool last = t + h_ >= t_end;
            const double h = last ? t_end - t : h_;

            const State k1 = flow_(y);
            const State k2 = flow_(y + h * (1.0 / 5.0) * k1);
            const State k3 = flow_(y + h * ((3.0 / 40.0) * k1 + (9.0 / 40.0) * k2));
            const State k4 = flow_(y + h * ((44.0 / 45.0) * k1 - (56.0 / 15.0) * k2 + (32.0 / 9.0) * k3));
            const State k5 = flow_(y + h * ((19372.0 / 6561.0) * k1 - (25360.0 / 2187.0) * k2 +
                                            (64448.0 / 6561.0) * k3 - (212.0 / 729.0) * k4));
            const State k6 = flow_(y + h * ((9017.0 / 3168.0) * k1 - (355.0 / 33.0) * k2 + (46732.0 / 5247.0) * k3 +
                                            (49.0 / 176.0) * k4 - (5103.0 / 18656.0) * k5));
            const State y5 = y + h * ((35.0 / 384.0) * k1 + (500.0 / 1113.0) * k3 + (125.0 / 192.0) * k4 -
                                      (2187.0 / 6784.0) * k5 + (11.0 / 84.0) * k6);
            const State k7 = flow_(y5);
            const State err = h * ((71.0 / 57600.0) * k1 - (71.0 / 16695.0) * k3 + (71.0 / 1920.0) * k4 -
                                   (17253.0 / 339200.0) * k5 + (22.0 / 525.0) * k6 - (1.0 / 40.0) * k7);

            const double e = weighted_error(err, y, y5, cfg_.abs_tol, cfg_.rel_tol);
            const double factor = e == 0.0 ? 5.0 : std::clamp(0.9 * std::pow(e, -0.2), 0.2, 5.0);
            if (e <= 1.0) {
                y = y5;
                t = last ? t_end : t + h;
                // A shortened final substep says nothing about the natural step.
                if (!last) h_ = h * factor;
            } else {
                h_ = h * factor;
            }
        }
    }

    const Flow& flow_;
    const IntegratorConfig& cfg_;
    double h_;
};

void check_density_guards(const Matrix2c& rho, double t, const IntegratorConfig& cfg) {
    const double trace = (rho(0, 0) + rho(1, 1)).real();
    if (!std::isfinite(trace) || std::abs(trace - 1.0) > cfg.trace_guard) {
        std::ostringstream os;
        os.precision(17);
        os << "|tr rho - 1| = " << std::abs(trace - 1.0) << " exceeds " << cfg.trace_guard;
        throw GuardError(GuardKind::TraceDrift, t, os.str());
    }
    const double lowest = DensityMatrix::from_matrix_unchecked(rho).min_eigenvalue();
    if (lowest < -cfg.positivity_guard) {
        std::ostringstream os;
        os.precision(17);
        os << "eigenvalue " << lowest << " below -" << cfg.positivity_guard;
        throw GuardError(GuardKind::PositivityViolation, t, os.str());
    }
}

void check_norm_guard(const Eigen::Vector2cd& a, double t) {
    const double norm = a.squaredNorm();
    if (!std::isfinite(norm) || std::abs(norm - 1.0) > kGpeNormGuard) {
        std::ostringstream os;
        os.precision(17);
        os << "|a_R|^2 + |a_L|^2 = " << norm;
        throw GuardError(GuardKind::NormDrift, t, os.str());
    }
}

// Shared stepping loop: OnStep(state, t) runs after every completed grid
// step and OnRecord(state, t) at every recorded sample.
template <typename State, typename Flow, typename OnStep, typename OnRecord>
void integrate(State y, const Flow& flow, const TimeGrid& grid, const IntegratorConfig& cfg, OnStep on_step,
               OnRecord on_record) {
    Propagator<State, Flow> prop(flow, cfg, grid.dt);
    const std::size_t n = grid.step_count();
    on_step(y, 0.0);
    on_record(y, 0.0);
    for (std::size_t k = 0; k < n; ++k) {
        const double t0 = grid.time_at(k);
        const double t1 = grid.time_at(k + 1);
        prop.advance(y, t0, t1 - t0);
        on_step(y, t1);
        if ((k + 1) % grid.record_stride == 0 || k + 1 == n) on_record(y, t1);
    }
}

} // namespace

void TimeGrid::validate() const {
    if (!(t_final > 0.0) || !std::isfinite(t_final)) fail("t_final must be > 0");
    if (!(dt > 0.0) || !std::isfinite(dt)) fail("dt must be > 0");
    if (dt > t_final) fail("dt must not exceed t_final");
    if (record_stride < 1) fail("record_stride must be >= 1");
}

std::size_t TimeGrid::step_count() const {
    const double ratio = t_final / dt;
    const double whole = std::round(ratio);
    // Treat t_final that is a multiple of dt up to rounding as exact.
    if (std::abs(ratio - whole) <= 1e-9 * std::max(1.0, ratio)) return static_cast<std::size_t>(whole);
    return static_cast<std::size_t>(std::ceil(ratio));
}

double TimeGrid::time_at(std::size_t step) const {
    return step >= step_count() ? t_final : static_cast<double>(step) * dt;
}

std::string_view to_string(Method method) {
    return method == Method::RK4Fixed ? "rk4_fixed" : "rk45_adaptive";
}

Method parse_method(std::string_view name) {
    if (name == "rk4_fixed" || name == "rk4") return Method::RK4Fixed;
    if (name == "rk45_adaptive" || name == "rk45") return Method::RK45Adaptive;
    fail("unknown integration method '" + std::string(name) + "'");
}

void IntegratorConfig::validate() const {
    if (!(abs_tol > 0.0) || !(rel_tol > 0.0)) fail("integrator tolerances must be > 0");
    if (!(trace_guard > 0.0) || !(positivity_guard > 0.0)) fail("integrator guards must be > 0");
}

Sample make_sample(double t, const DensityMatrix& rho) {
    return {t, rho, rho.imbalance(), rho.coherence(), rho.purity()};
}

void Trajectory::push_back(const Sample& s) {
    if (!samples_.empty() && !(s.t > samples_.back().t)) fail("trajectory times must be strictly increasing");
    samples_.push_back(s);
}

Trajectory evolve(const DensityMatrix& rho0, const ModelParams& params, const TimeGrid& grid,
                  const IntegratorConfig& cfg) {
    grid.validate();
    cfg.validate();
    const MasterEquation flow(params);
    Trajectory traj;
    integrate<Matrix2c>(
        rho0.matrix(), flow, grid, cfg, [&](const Matrix2c& y, double t) { check_density_guards(y, t, cfg); },
        [&](const Matrix2c& y, double t) { traj.push_back(make_sample(t, DensityMatrix::from_matrix_unchecked(y))); });
    return traj;
}

Trajectory evolve_gpe(const InitialState& init, const ModelParams& params, const TimeGrid& grid,
                      const IntegratorConfig& cfg) {
    grid.validate();
    cfg.validate();
    const GrossPitaevskii flow(params);
    Trajectory traj;
    integrate<Eigen::Vector2cd>(
        init.amplitudes(), flow, grid, cfg, [](const Eigen::Vector2cd& a, double t) { check_norm_guard(a, t); },
        [&](const Eigen::Vector2cd& a, double t) { traj.push_back(make_sample(t, DensityMatrix::from_pure(a))); });
    return traj;
}

SteadyState steady_state(const DensityMatrix& rho0, const ModelParams& params, const IntegratorConfig& cfg,
                         double t_max, double eps, double dt) {
    if (!(params.decoherence_rate > 0.0)) fail("steady_state requires a positive decoherence rate");
    if (!(t_max > 0.0) || !(eps > 0.0) || !(dt > 0.0)) fail("steady_state needs t_max, eps, dt > 0");
    cfg.validate();
    const MasterEquation flow(params);
    const double dwell = kSteadyStateDwell / params.v;

    Matrix2c y = rho0.matrix();
    check_density_guards(y, 0.0, cfg);
    Propagator<Matrix2c, MasterEquation> prop(flow, cfg, dt);

    bool in_window = false;
    Matrix2c candidate = y;
    double candidate_t = 0.0;
    const TimeGrid grid{t_max, std::min(dt, t_max), 1};
    const std::size_t n = grid.step_count();
    for (std::size_t k = 0;; ++k) {
        const double t = grid.time_at(k);
        if (flow(y).norm() < eps) {
            if (!in_window) {
                in_window = true;
                candidate = y;
                candidate_t = t;
            }
            if (t - candidate_t >= dwell)
                return {DensityMatrix::from_matrix_unchecked(candidate), true, candidate_t};
        } else {
            in_window = false;
        }
        if (k == n) break;
        prop.advance(y, t, grid.time_at(k + 1) - t);
        check_density_guards(y, grid.time_at(k + 1), cfg);
    }
    return {DensityMatrix::from_matrix_unchecked(y), false, t_max};
}

} // namespace duetdyn
