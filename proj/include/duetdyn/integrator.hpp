// integrator.hpp: time propagation of the master equation and of the
// closed two-mode Gross-Pitaevskii equation.

#pragma once

#include <cstddef>
#include <string_view>
#include <vector>

#include "duetdyn/model.hpp"

namespace duetdyn {

// Steps of size dt up to t_final; the last step is shortened so the run ends
// exactly on t_final. A sample is kept at every step index divisible by
// record_stride, and always at t_final.
struct TimeGrid {
    double t_final = 50.0;
    double dt = 1e-3;
    std::size_t record_stride = 1;

    void validate() const;
    std::size_t step_count() const;
    double time_at(std::size_t step) const;
};

enum class Method { RK4Fixed, RK45Adaptive };

std::string_view to_string(Method method);
Method parse_method(std::string_view name);

struct IntegratorConfig {
    Method method = Method::RK4Fixed;
    double abs_tol = 1e-10; // adaptive only
    double rel_tol = 1e-10; // adaptive only
    double trace_guard = 1e-9;
    double positivity_guard = 1e-9;

    void validate() const;
};

struct Sample {
    double t = 0.0;
    DensityMatrix rho;
    double z = 0.0;
    double coherence = 0.0;
    double purity = 1.0;
};

Sample make_sample(double t, const DensityMatrix& rho);

class Trajectory {
public:
    Trajectory() = default;

    // Throws ValidationError unless times are strictly increasing.
    void push_back(const Sample& s);

    const std::vector<Sample>& samples() const { return samples_; }
    std::size_t size() const { return samples_.size(); }
    bool empty() const { return samples_.empty(); }
    const Sample& front() const { return samples_.front(); }
    const Sample& back() const { return samples_.back(); }
    const Sample& operator[](std::size_t i) const { return samples_[i]; }

    auto begin() const { return samples_.begin(); }
    auto end() const { return samples_.end(); }

private:
    std::vector<Sample> samples_;
};

Trajectory evolve(const DensityMatrix& rho0, const ModelParams& params, const TimeGrid& grid,
                  const IntegratorConfig& cfg = {});

inline constexpr double kGpeNormGuard = 1e-8;

// Decoherence is never applied on this path regardless of params.
Trajectory evolve_gpe(const InitialState& init, const ModelParams& params, const TimeGrid& grid,
                      const IntegratorConfig& cfg = {});

struct SteadyState {
    DensityMatrix rho;
    bool converged = false;
    double t = 0.0; // time at which rho was taken
};

// Dwell window over which ||rhs||_F < eps must hold, in units of 1/v.
// Returns the state at the start of the first such window, or the t_max state
// flagged not converged. Requires a positive decoherence rate.
inline constexpr double kSteadyStateDwell = 10.0;
SteadyState steady_state(const DensityMatrix& rho0, const ModelParams& params, const IntegratorConfig& cfg,
                         double t_max, double eps, double dt = 1e-3);

} // namespace duetdyn
