// model.hpp: domain types and the right-hand side of the mean-field master
// equation for a condensate in a double well.
//
// Basis order is (|R>, |L>). Pauli matrices in that basis:
//   sigma_x = |R><L| + |L><R|
//   sigma_y = -i|R><L| + i|L><R|
//   sigma_z = |R><R| - |L><L|
// so sigma_x + i sigma_y = 2|R><L| moves population from L to R.
//
// The generator is stored in real-time form
//   d rho/dt = -i [H(rho), rho] + (Gamma/2)(2 A rho A^+ - rho A^+ A - A^+ A rho).

#pragma once

#include <array>
#include <complex>
#include <string>
#include <string_view>

#include <Eigen/Dense>

#include "duetdyn/errors.hpp"

namespace duetdyn {

using Complex = std::complex<double>;
using Matrix2c = Eigen::Matrix2cd;

enum class LindbladPreset { SigmaPlus, SigmaX, SigmaZ, Custom };

std::string_view to_string(LindbladPreset preset);
LindbladPreset parse_lindblad_preset(std::string_view name);

// Coefficients of A = scale * (lx sigma_x + ly sigma_y + lz sigma_z).
// Named presets fix the coefficients; use custom() for anything else.
struct LindbladSpec {
    LindbladPreset preset = LindbladPreset::SigmaX;
    std::array<Complex, 3> lambdas{Complex{1.0, 0.0}, Complex{}, Complex{}};
    double scale = 1.0;

    static LindbladSpec sigma_plus(double scale = 1.0);
    static LindbladSpec sigma_x(double scale = 1.0);
    static LindbladSpec sigma_z(double scale = 1.0);
    static LindbladSpec custom(const std::array<Complex, 3>& lambdas, double scale = 1.0);
    static LindbladSpec from_preset(LindbladPreset preset, double scale = 1.0);

    bool all_zero() const;
    void validate() const;
};

// All energies and rates are in units of the inter-well coupling v; times in
// units of 1/v.
struct ModelParams {
    double gamma = 0.0;            // energy bias between the wells
    double c = 0.0;                // nonlinear self-interaction
    double v = 1.0;                // inter-well coupling
    double decoherence_rate = 0.0; // Gamma
    LindbladSpec lindblad{};

    void validate() const;
};

struct BlochVector {
    double sx = 0.0;
    double sy = 0.0;
    double sz = 0.0;

    double norm_squared() const { return sx * sx + sy * sy + sz * sz; }
};

struct InitialState {
    double z0 = 1.0;     // population imbalance, [-1, 1]
    double theta0 = 0.0; // phase of a_L relative to a_R, [0, 2 pi)

    void validate() const;
    // (a_R, a_L) with a_R real and non-negative.
    Eigen::Vector2cd amplitudes() const;
};

inline constexpr double kTraceTolerance = 1e-12;
inline constexpr double kHermiticityTolerance = 1e-12;
inline constexpr double kPositivityTolerance = 1e-9;
inline constexpr double kBlochNormTolerance = 1e-9;

class DensityMatrix {
public:
    // Maximally mixed state I/2.
    DensityMatrix();

    // Validates trace, Hermiticity and positivity against the default tolerances.
    static DensityMatrix from_matrix(const Matrix2c& m);
    // Wraps without checks; used for integrator output that is guarded elsewhere.
    static DensityMatrix from_matrix_unchecked(const Matrix2c& m);
    static DensityMatrix from_pure(const Eigen::Vector2cd& amplitudes);
    static DensityMatrix maximally_mixed() { return DensityMatrix{}; }

    const Matrix2c& matrix() const { return m_; }
    Complex rr() const { return m_(0, 0); }
    Complex rl() const { return m_(0, 1); }
    Complex lr() const { return m_(1, 0); }
    Complex ll() const { return m_(1, 1); }

    double trace() const { return (m_(0, 0) + m_(1, 1)).real(); }
    double imbalance() const { return m_(0, 0).real() - m_(1, 1).real(); }
    double coherence() const { return std::abs(m_(0, 1)); }
    double purity() const;
    // Smaller eigenvalue of the Hermitian part.
    double min_eigenvalue() const;

private:
    explicit DensityMatrix(const Matrix2c& m) : m_(m) {}
    Matrix2c m_;
};

DensityMatrix density_from_initial(const InitialState& init);

BlochVector bloch_from_density(const DensityMatrix& rho);
DensityMatrix density_from_bloch(const BlochVector& s);

Matrix2c pauli_x();
Matrix2c pauli_y();
Matrix2c pauli_z();

Matrix2c build_lindblad_operator(const LindbladSpec& spec);
Matrix2c build_hamiltonian(const DensityMatrix& rho, const ModelParams& params);
Matrix2c dissipator(const DensityMatrix& rho, const Matrix2c& a, double decoherence_rate);
Matrix2c rhs(const DensityMatrix& rho, const ModelParams& params);

// Parses "a", "bi", "a+bi", "a-bi", "i", "-i" (whitespace ignored).
Complex parse_complex_literal(std::string_view text);
std::string format_complex_literal(Complex z);

// Closed-system energy (c/4) sz^2 + (v/2) sx + (gamma/2) sz, conserved when
// the decoherence rate is zero.
double closed_energy(const BlochVector& s, const ModelParams& params);

// Precomputed generator for repeated evaluation on raw matrices (including
// Runge-Kutta stage states, which need not be valid density matrices).
class MasterEquation {
public:
    explicit MasterEquation(const ModelParams& params);

    Matrix2c hamiltonian(const Matrix2c& rho) const;
    Matrix2c operator()(const Matrix2c& rho) const;

    const ModelParams& params() const { return params_; }
    const Matrix2c& lindblad_operator() const { return a_; }

private:
    ModelParams params_;
    Matrix2c a_;
    Matrix2c a_dag_a_;
};

// Two-mode Gross-Pitaevskii flow i d/dt (a_R, a_L) = H(a) (a_R, a_L).
class GrossPitaevskii {
public:
    explicit GrossPitaevskii(const ModelParams& params);

    Eigen::Vector2cd operator()(const Eigen::Vector2cd& amplitudes) const;

private:
    ModelParams params_;
};

} // namespace duetdyn
