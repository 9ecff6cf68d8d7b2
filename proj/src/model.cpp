#include "duetdyn/model.hpp"

#include <cmath>
#include <numbers>
#include <sstream>
#include <string>

namespace duetdyn {

namespace {

constexpr Complex kI{0.0, 1.0};

[[noreturn]] void fail(const std::string& what) { throw ValidationError(what); }

bool finite(double x) { return std::isfinite(x); }

// H = (gamma/2 + (c/2) z) sigma_z + (v/2) sigma_x, with z = rho_RR - rho_LL.
Matrix2c hamiltonian_for_imbalance(double z, const ModelParams& p) {
    const double diag = 0.5 * p.gamma + 0.5 * p.c * z;
    Matrix2c h;
    h << diag, 0.5 * p.v, 0.5 * p.v, -diag;
    return h;
}

} // namespace

std::string_view to_string(GuardKind kind) {
    switch (kind) {
    case GuardKind::TraceDrift: return "TraceDrift";
    case GuardKind::PositivityViolation: return "PositivityViolation";
    case GuardKind::StepUnderflow: return "StepUnderflow";
    case GuardKind::NormDrift: return "NormDrift";
    }
    return "Unknown";
}

GuardError::GuardError(GuardKind kind, double time, const std::string& detail)
    : std::runtime_error(std::string(to_string(kind)) + " at t=" + std::to_string(time) + ": " + detail),
      kind_(kind), time_(time) {}

std::string_view to_string(LindbladPreset preset) {
    switch (preset) {
    case LindbladPreset::SigmaPlus: return "sigma_plus";
    case LindbladPreset::SigmaX: return "sigma_x";
    case LindbladPreset::SigmaZ: return "sigma_z";
    case LindbladPreset::Custom: return "custom";
    }
    return "custom";
}

LindbladPreset parse_lindblad_preset(std::string_view name) {
    if (name == "sigma_plus") return LindbladPreset::SigmaPlus;
    if (name == "sigma_x") return LindbladPreset::SigmaX;
    if (name == "sigma_z") return LindbladPreset::SigmaZ;
    if (name == "custom") return LindbladPreset::Custom;
    fail("unknown Lindblad preset '" + std::string(name) + "'");
}

LindbladSpec LindbladSpec::sigma_plus(double scale) {
    return {LindbladPreset::SigmaPlus, {Complex{1.0, 0.0}, kI, Complex{}}, scale};
}

LindbladSpec LindbladSpec::sigma_x(double scale) {
    return {LindbladPreset::SigmaX, {Complex{1.0, 0.0}, Complex{}, Complex{}}, scale};
}

LindbladSpec LindbladSpec::sigma_z(double scale) {
    return {LindbladPreset::SigmaZ, {Complex{}, Complex{}, Complex{1.0, 0.0}}, scale};
}

LindbladSpec LindbladSpec::custom(const std::array<Complex, 3>& lambdas, double scale) {
    return {LindbladPreset::Custom, lambdas, scale};
}

LindbladSpec LindbladSpec::from_preset(LindbladPreset preset, double scale) {
    switch (preset) {
    case LindbladPreset::SigmaPlus: return sigma_plus(scale);
    case LindbladPreset::SigmaX: return sigma_x(scale);
    case LindbladPreset::SigmaZ: return sigma_z(scale);
    case LindbladPreset::Custom: break;
    }
    fail("custom Lindblad preset needs explicit coefficients");
}

bool LindbladSpec::all_zero() const {
    for (const auto& l : lambdas)
        if (l != Complex{}) return false;
    return true;
}

void LindbladSpec::validate() const {
    if (!(scale > 0.0) || !finite(scale)) fail("Lindblad scale must be a positive finite number");
    for (const auto& l : lambdas)
        if (!finite(l.real()) || !finite(l.imag())) fail("Lindblad coefficients must be finite");
    if (preset != LindbladPreset::Custom) {
        const auto expected = from_preset(preset, scale);
        if (expected.lambdas != lambdas)
            fail("coefficients do not match preset '" + std::string(to_string(preset)) + "'");
    }
}

void ModelParams::validate() const {
    if (!finite(gamma) || !finite(c)) fail("bias and nonlinearity must be finite");
    if (!(v > 0.0) || !finite(v)) fail("inter-well coupling v must be > 0");
    if (!(decoherence_rate >= 0.0) || !finite(decoherence_rate)) fail("decoherence rate must be >= 0");
    lindblad.validate();
    if (decoherence_rate > 0.0 && lindblad.all_zero())
        fail("decoherence rate > 0 requires at least one nonzero Lindblad coefficient");
}

void InitialState::validate() const {
    if (!(z0 >= -1.0 && z0 <= 1.0)) {
        std::ostringstream os;
        os << "initial imbalance z0=" << z0 << " outside [-1, 1]";
        fail(os.str());
    }
    if (!(theta0 >= 0.0 && theta0 < 2.0 * std::numbers::pi)) {
        std::ostringstream os;
        os << "initial phase theta0=" << theta0 << " outside [0, 2pi)";
        fail(os.str());
    }
}

Eigen::Vector2cd InitialState::amplitudes() const {
    validate();
    const double a_r = std::sqrt(0.5 * (1.0 + z0));
    const double a_l = std::sqrt(0.5 * (1.0 - z0));
    return {Complex{a_r, 0.0}, std::polar(a_l, theta0)};
}

DensityMatrix::DensityMatrix() : m_(Matrix2c::Identity() * 0.5) {}

DensityMatrix DensityMatrix::from_matrix(const Matrix2c& m) {
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j)
            if (!finite(m(i, j).real()) || !finite(m(i, j).imag())) fail("density matrix has non-finite entries");
    const Complex tr = m(0, 0) + m(1, 1);
    if (std::abs(tr - Complex{1.0, 0.0}) > kTraceTolerance) {
        std::ostringstream os;
        os.precision(17);
        os << "density matrix trace " << tr << " differs from 1";
        fail(os.str());
    }
    if (std::abs(m(1, 0) - std::conj(m(0, 1))) > kHermiticityTolerance ||
        std::abs(m(0, 0).imag()) > kHermiticityTolerance || std::abs(m(1, 1).imag()) > kHermiticityTolerance)
        fail("density matrix is not Hermitian");
    DensityMatrix rho{m};
    if (rho.min_eigenvalue() < -kPositivityTolerance) fail("density matrix has a negative eigenvalue");
    return rho;
}

DensityMatrix DensityMatrix::from_matrix_unchecked(const Matrix2c& m) { return DensityMatrix{m}; }

DensityMatrix DensityMatrix::from_pure(const Eigen::Vector2cd& a) {
    return DensityMatrix{a * a.adjoint()};
}

double DensityMatrix::purity() const { return (m_ * m_).trace().real(); }

double DensityMatrix::min_eigenvalue() const {
    const double rr = m_(0, 0).real();
    const double ll = m_(1, 1).real();
    const Complex off = 0.5 * (m_(0, 1) + std::conj(m_(1, 0)));
    const double half_gap = std::sqrt(0.25 * (rr - ll) * (rr - ll) + std::norm(off));
    return 0.5 * (rr + ll) - half_gap;
}

DensityMatrix density_from_initial(const InitialState& init) {
    return DensityMatrix::from_pure(init.amplitudes());
}

BlochVector bloch_from_density(const DensityMatrix& rho) {
    if (std::abs(rho.lr() - std::conj(rho.rl())) > kHermiticityTolerance) fail("bloch_from_density: non-Hermitian input");
    return {2.0 * rho.rl().real(), -2.0 * rho.rl().imag(), rho.rr().real() - rho.ll().real()};
}

DensityMatrix density_from_bloch(const BlochVector& s) {
    if (!finite(s.sx) || !finite(s.sy) || !finite(s.sz)) fail("Bloch vector has non-finite components");
    if (s.norm_squared() > 1.0 + kBlochNormTolerance) fail("Bloch vector lies outside the unit ball");
    Matrix2c m;
    m << 0.5 * (1.0 + s.sz), Complex{0.5 * s.sx, -0.5 * s.sy}, Complex{0.5 * s.sx, 0.5 * s.sy}, 0.5 * (1.0 - s.sz);
    return DensityMatrix::from_matrix_unchecked(m);
}

Matrix2c pauli_x() {
    Matrix2c m;
    m << 0.0, 1.0, 1.0, 0.0;
    return m;
}

Matrix2c pauli_y() {
    Matrix2c m;
    m << 0.0, -kI, kI, 0.0;
    return m;
}

Matrix2c pauli_z() {
    Matrix2c m;
    m << 1.0, 0.0, 0.0, -1.0;
    return m;
}

Matrix2c build_lindblad_operator(const LindbladSpec& spec) {
    spec.validate();
    const auto& l = spec.lambdas;
    return spec.scale * (l[0] * pauli_x() + l[1] * pauli_y() + l[2] * pauli_z());
}

Matrix2c build_hamiltonian(const DensityMatrix& rho, const ModelParams& params) {
    return hamiltonian_for_imbalance(rho.imbalance(), params);
}

Matrix2c dissipator(const DensityMatrix& rho, const Matrix2c& a, double decoherence_rate) {
    if (!(decoherence_rate >= 0.0)) fail("decoherence rate must be >= 0");
    const Matrix2c& r = rho.matrix();
    const Matrix2c a_dag = a.adjoint();
    const Matrix2c a_dag_a = a_dag * a;
    return 0.5 * decoherence_rate * (2.0 * a * r * a_dag - r * a_dag_a - a_dag_a * r);
}

Matrix2c rhs(const DensityMatrix& rho, const ModelParams& params) {
    return MasterEquation{params}(rho.matrix());
}

double closed_energy(const BlochVector& s, const ModelParams& params) {
    return 0.25 * params.c * s.sz * s.sz + 0.5 * params.v * s.sx + 0.5 * params.gamma * s.sz;
}

MasterEquation::MasterEquation(const ModelParams& params) : params_(params) {
    params_.validate();
    a_ = build_lindblad_operator(params_.lindblad);
    a_dag_a_ = a_.adjoint() * a_;
}

Matrix2c MasterEquation::hamiltonian(const Matrix2c& rho) const {
    return hamiltonian_for_imbalance(rho(0, 0).real() - rho(1, 1).real(), params_);
}

Matrix2c MasterEquation::operator()(const Matrix2c& rho) const {
    const Matrix2c h = hamiltonian(rho);
    Matrix2c out = -kI * (h * rho - rho * h);
    const double g = params_.decoherence_rate;
    if (g > 0.0)
        out += 0.5 * g * (2.0 * a_ * rho * a_.adjoint() - rho * a_dag_a_ - a_dag_a_ * rho);
    return out;
}

GrossPitaevskii::GrossPitaevskii(const ModelParams& params) : params_(params) {
    if (!(params_.v > 0.0)) fail("inter-well coupling v must be > 0");
}

Eigen::Vector2cd GrossPitaevskii::operator()(const Eigen::Vector2cd& a) const {
    const double z = std::norm(a(0)) - std::norm(a(1));
    return -kI * (hamiltonian_for_imbalance(z, params_) * a);
}

} // namespace duetdyn
