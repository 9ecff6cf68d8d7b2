#include "duetdyn/validate.hpp"

#include <cmath>
#include <functional>
#include <numbers>
#include <random>
#include <sstream>

#include "duetdyn/analysis.hpp"
#include "duetdyn/integrator.hpp"

namespace duetdyn {

namespace {

BlochVector random_bloch(std::mt19937_64& rng) {
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    for (;;) {
        BlochVector s{u(rng), u(rng), u(rng)};
        if (s.norm_squared() <= 1.0) return s;
    }
}

ModelParams random_params(std::mt19937_64& rng) {
    std::uniform_real_distribution<double> u(0.0, 1.0);
    ModelParams p;
    p.gamma = 2.0 * u(rng) - 1.0;
    p.c = 4.0 * u(rng);
    p.v = 0.5 + u(rng);
    p.decoherence_rate = u(rng);
    switch (static_cast<int>(u(rng) * 4.0)) {
    case 0: p.lindblad = LindbladSpec::sigma_plus(); break;
    case 1: p.lindblad = LindbladSpec::sigma_x(); break;
    case 2: p.lindblad = LindbladSpec::sigma_z(); break;
    default:
        p.lindblad = LindbladSpec::custom({Complex{u(rng), u(rng)}, Complex{u(rng), -u(rng)}, Complex{u(rng), 0.0}});
    }
    return p;
}

std::string format(const char* label, double value) {
    std::ostringstream os;
    os.precision(3);
    os << label << value;
    return os.str();
}

PropertyResult check(std::string name, double measured, double limit) {
    return {std::move(name), measured < limit, format("max deviation ", measured) + format(" (limit ", limit) + ")"};
}

PropertyResult rhs_traceless() {
    std::mt19937_64 rng(11);
    double worst = 0.0;
    for (int k = 0; k < 1000; ++k) {
        const auto d = rhs(density_from_bloch(random_bloch(rng)), random_params(rng));
        worst = std::max(worst, std::abs(d.trace()));
    }
    return check("rhs is traceless", worst, 1e-14);
}

PropertyResult rhs_hermitian() {
    std::mt19937_64 rng(12);
    double worst = 0.0;
    for (int k = 0; k < 1000; ++k) {
        const auto d = rhs(density_from_bloch(random_bloch(rng)), random_params(rng));
        worst = std::max(worst, (d - d.adjoint()).cwiseAbs().maxCoeff());
    }
    return check("rhs preserves Hermiticity", worst, 1e-14);
}

PropertyResult energy_stationary() {
    std::mt19937_64 rng(13);
    double worst = 0.0;
    for (int k = 0; k < 1000; ++k) {
        auto p = random_params(rng);
        p.decoherence_rate = 0.0;
        const auto s = random_bloch(rng);
        const auto d = rhs(density_from_bloch(s), p);
        const double dsx = 2.0 * d(0, 1).real();
        const double dsz = (d(0, 0) - d(1, 1)).real();
        const double de = (0.5 * p.c * s.sz + 0.5 * p.gamma) * dsz + 0.5 * p.v * dsx;
        worst = std::max(worst, std::abs(de));
    }
    return check("closed-system energy is stationary", worst, 1e-12);
}

PropertyResult rabi_oracle() {
    ModelParams p;
    const auto traj = evolve(density_from_initial({1.0, 0.0}), p, {20.0, 1e-3, 1});
    double worst = 0.0;
    for (const auto& s : traj) worst = std::max(worst, std::abs(s.z - std::cos(s.t)));
    return check("Rabi oscillation matches cos(Vt)", worst, 1e-6);
}

PropertyResult closed_conservation() {
    ModelParams p;
    p.c = 3.0;
    const InitialState init{0.6, 0.0};
    const auto traj = evolve(density_from_initial(init), p, {50.0, 1e-3, 10});
    const double e0 = closed_energy(bloch_from_density(traj.front().rho), p);
    double worst_trace = 0.0, worst_purity = 0.0, worst_energy = 0.0;
    for (const auto& s : traj) {
        worst_trace = std::max(worst_trace, std::abs(s.rho.trace() - 1.0));
        worst_purity = std::max(worst_purity, std::abs(s.purity - 1.0));
        worst_energy = std::max(worst_energy, std::abs(closed_energy(bloch_from_density(s.rho), p) - e0));
    }
    PropertyResult r{"closed system conserves trace, purity, energy",
                     worst_trace < 1e-10 && worst_purity < 1e-8 && worst_energy < 1e-7, ""};
    r.detail = format("trace ", worst_trace) + format(", purity ", worst_purity) + format(", energy ", worst_energy);
    return r;
}

PropertyResult gpe_equivalence() {
    std::mt19937_64 rng(14);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    double worst = 0.0;
    for (int k = 0; k < 4; ++k) {
        ModelParams p;
        p.c = 4.0 * u(rng);
        const InitialState init{2.0 * u(rng) - 1.0, 2.0 * std::numbers::pi * u(rng)};
        const TimeGrid grid{20.0, 1e-3, 100};
        const auto a = evolve(density_from_initial(init), p, grid);
        const auto b = evolve_gpe(init, p, grid);
        for (std::size_t i = 0; i < a.size(); ++i) {
            worst = std::max(worst, std::abs(a[i].rho.rr().real() - b[i].rho.rr().real()));
            worst = std::max(worst, std::abs(a[i].rho.ll().real() - b[i].rho.ll().real()));
        }
    }
    return check("master equation at Gamma=0 matches two-mode GPE", worst, 1e-8);
}

PropertyResult sigma_x_fixed_point() {
    ModelParams p;
    p.c = 3.0;
    p.decoherence_rate = 0.5;
    p.lindblad = LindbladSpec::sigma_x();
    const double norm = rhs(DensityMatrix::maximally_mixed(), p).cwiseAbs().maxCoeff();
    return {"I/2 is a fixed point of the sigma_x channel", norm == 0.0, format("|rhs(I/2)| = ", norm)};
}

PropertyResult positivity_preserved() {
    ModelParams p;
    p.c = 2.0;
    p.decoherence_rate = 0.5;
    p.lindblad = LindbladSpec::sigma_plus();
    double lowest = 1.0;
    const auto traj = evolve(density_from_initial({-1.0, 0.0}), p, {30.0, 1e-3, 10});
    for (const auto& s : traj) lowest = std::min(lowest, s.rho.min_eigenvalue());
    return {"dissipative flow keeps rho positive", lowest >= -1e-9, format("lowest eigenvalue ", lowest)};
}

PropertyResult rk4_order() {
    ModelParams p;
    p.c = 3.0;
    const auto rho0 = density_from_initial({1.0, 0.0});
    auto final_state = [&](double dt) { return evolve(rho0, p, {10.0, dt, 1'000'000}).back().rho.matrix(); };
    const double h = 0.02;
    const auto ref = final_state(h / 16.0);
    const double e1 = (final_state(h) - ref).norm();
    const double e2 = (final_state(h / 2.0) - ref).norm();
    const double ratio = e1 / e2;
    return {"RK4 error ratio on step halving in [12, 20]", ratio >= 12.0 && ratio <= 20.0, format("ratio ", ratio)};
}

} // namespace

std::vector<PropertyResult> run_validation_suite() {
    const std::vector<std::function<PropertyResult()>> checks = {
        rhs_traceless,   rhs_hermitian,       energy_stationary,    rabi_oracle, closed_conservation,
        gpe_equivalence, sigma_x_fixed_point, positivity_preserved, rk4_order,
    };
    std::vector<PropertyResult> out;
    for (const auto& c : checks) {
        try {
            out.push_back(c());
        } catch (const std::exception& e) {
            out.push_back({"(check aborted)", false, e.what()});
        }
    }
    return out;
}

} // namespace duetdyn
