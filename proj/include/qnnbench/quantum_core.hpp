#pragma once

// Two-qubit state algebra: pure states, density matrices, the tunable
// Hamiltonian and its piecewise-constant time evolution, plus the two scalar
// functionals the networks are trained against (the squared ZZ correlation
// and the closed-form pure-state entanglement of formation).
//
// Basis ordering is |00>, |01>, |10>, |11> with qubit A the left factor.
// hbar = 1.

#include <Eigen/Dense>

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <string>
#include <vector>

#include "errors.hpp"

namespace qnnbench {

using Complex = std::complex<double>;
using Matrix4c = Eigen::Matrix<Complex, 4, 4>;
using Vector4c = Eigen::Matrix<Complex, 4, 1>;
using Matrix4r = Eigen::Matrix4d;

namespace pauli {

inline Eigen::Matrix2d identity() { return Eigen::Matrix2d::Identity(); }

inline Eigen::Matrix2d x() {
    Eigen::Matrix2d m;
    m << 0, 1, 1, 0;
    return m;
}

inline Eigen::Matrix2d z() {
    Eigen::Matrix2d m;
    m << 1, 0, 0, -1;
    return m;
}

inline Matrix4r kron(const Eigen::Matrix2d& a, const Eigen::Matrix2d& b) {
    Matrix4r out;
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j)
            out.block<2, 2>(2 * i, 2 * j) = a(i, j) * b;
    return out;
}

inline Matrix4r xa() { return kron(x(), identity()); }
inline Matrix4r xb() { return kron(identity(), x()); }
inline Matrix4r za() { return kron(z(), identity()); }
inline Matrix4r zb() { return kron(identity(), z()); }
inline Matrix4r zz() { return kron(z(), z()); }

} // namespace pauli

/// a|00> + b e^{i theta1}|01> + c e^{i theta2}|10> + d e^{i theta3}|11>
///
/// Amplitudes are nonnegative; the phases carry all sign information.
struct PureState {
    double a = 1.0;
    double b = 0.0;
    double c = 0.0;
    double d = 0.0;
    double theta1 = 0.0;
    double theta2 = 0.0;
    double theta3 = 0.0;

    static PureState basis(int index) {
        if (index < 0 || index > 3) throw ValidationError("basis index must be in [0, 3]");
        PureState s{0.0, 0.0, 0.0, 0.0};
        std::array<double*, 4> amp{&s.a, &s.b, &s.c, &s.d};
        *amp[static_cast<std::size_t>(index)] = 1.0;
        return s;
    }

    /// Normalizes (a, b, c, d); phases are kept. Throws on a zero vector or
    /// a negative amplitude.
    static PureState from_amplitudes(double a, double b, double c, double d,
                                     double theta1 = 0.0, double theta2 = 0.0, double theta3 = 0.0) {
        if (a < 0 || b < 0 || c < 0 || d < 0) throw ValidationError("amplitudes must be nonnegative");
        const double n = std::sqrt(a * a + b * b + c * c + d * d);
        if (!(n > 0.0) || !std::isfinite(n)) throw ValidationError("amplitude vector must be nonzero and finite");
        return PureState{a / n, b / n, c / n, d / n, theta1, theta2, theta3};
    }

    double norm_squared() const { return a * a + b * b + c * c + d * d; }

    Vector4c vector() const {
        Vector4c v;
        v << Complex(a, 0.0), b * std::polar(1.0, theta1), c * std::polar(1.0, theta2),
            d * std::polar(1.0, theta3);
        return v;
    }

    void validate(double tol = 1e-9) const {
        for (double v : {a, b, c, d, theta1, theta2, theta3})
            if (!std::isfinite(v)) throw ValidationError("pure state has a non-finite field");
        if (a < 0 || b < 0 || c < 0 || d < 0) throw ValidationError("pure state amplitudes must be nonnegative");
        if (std::abs(norm_squared() - 1.0) > tol)
            throw ValidationError("pure state is not normalized (|psi|^2 = " + std::to_string(norm_squared()) + ")");
    }
};

/// Hermitian, unit-trace, positive semidefinite 4x4 matrix.
class DensityMatrix {
public:
    static constexpr double hermitian_tol = 1e-12;
    static constexpr double trace_tol = 1e-12;
    static constexpr double psd_tol = 1e-10;

    DensityMatrix() : m_(Matrix4c::Zero()) { m_(0, 0) = 1.0; }

    /// Validated construction from raw entries.
    explicit DensityMatrix(const Matrix4c& entries) : m_(entries) { validate(); }

    /// Skips validation; for results of trace- and spectrum-preserving maps.
    static DensityMatrix trusted(const Matrix4c& entries) {
        DensityMatrix r;
        r.m_ = entries;
        return r;
    }

    const Matrix4c& matrix() const noexcept { return m_; }
    Complex operator()(int i, int j) const { return m_(i, j); }

    Complex trace() const { return m_.trace(); }
    double purity() const { return (m_ * m_).trace().real(); }

    Eigen::Vector4d eigenvalues() const {
        Eigen::SelfAdjointEigenSolver<Matrix4c> es(m_, Eigen::EigenvaluesOnly);
        return es.eigenvalues();
    }

    double hermiticity_error() const { return (m_ - m_.adjoint()).cwiseAbs().maxCoeff(); }

    void validate() const {
        if (!m_.allFinite()) throw ValidationError("density matrix has non-finite entries");
        if (hermiticity_error() > hermitian_tol) throw ValidationError("density matrix is not Hermitian");
        if (std::abs(trace() - Complex(1.0, 0.0)) > trace_tol) throw ValidationError("density matrix trace is not 1");
        if (eigenvalues().minCoeff() < -psd_tol) throw ValidationError("density matrix is not positive semidefinite");
    }

private:
    Matrix4c m_;
};

/// Hamiltonian or propagator on the two-qubit space.
class TwoQubitOperator {
public:
    TwoQubitOperator() : m_(Matrix4c::Zero()) {}
    explicit TwoQubitOperator(const Matrix4c& m) : m_(m) {}

    const Matrix4c& matrix() const noexcept { return m_; }
    Complex operator()(int i, int j) const { return m_(i, j); }

    double hermiticity_error() const { return (m_ - m_.adjoint()).cwiseAbs().maxCoeff(); }
    double unitarity_error() const { return (m_ * m_.adjoint() - Matrix4c::Identity()).cwiseAbs().maxCoeff(); }

    TwoQubitOperator operator*(const TwoQubitOperator& rhs) const { return TwoQubitOperator(m_ * rhs.m_); }

private:
    Matrix4c m_;
};

/// Control amplitudes held constant over one time slice.
struct HamiltonianParams {
    double k_a = 0.0;   ///< tunneling, qubit A
    double k_b = 0.0;   ///< tunneling, qubit B
    double eps_a = 0.0; ///< bias, qubit A
    double eps_b = 0.0; ///< bias, qubit B
    double zeta = 0.0;  ///< ZZ coupling

    static constexpr std::size_t size = 5;

    double& operator[](std::size_t i) {
        switch (i) {
        case 0: return k_a;
        case 1: return k_b;
        case 2: return eps_a;
        case 3: return eps_b;
        default: return zeta;
        }
    }
    double operator[](std::size_t i) const { return const_cast<HamiltonianParams&>(*this)[i]; }

    bool finite() const {
        return std::isfinite(k_a) && std::isfinite(k_b) && std::isfinite(eps_a) && std::isfinite(eps_b) &&
               std::isfinite(zeta);
    }

    friend bool operator==(const HamiltonianParams&, const HamiltonianParams&) = default;
};

/// Piecewise-constant Hamiltonian over equal slices of [0, total_time].
struct HamiltonianSchedule {
    std::vector<HamiltonianParams> slices;
    double total_time = 1.0;

    HamiltonianSchedule() = default;
    HamiltonianSchedule(std::vector<HamiltonianParams> s, double t) : slices(std::move(s)), total_time(t) {}

    /// All-zero schedule with the given slice count.
    static HamiltonianSchedule zero(std::size_t slice_count, double total_time) {
        return HamiltonianSchedule(std::vector<HamiltonianParams>(slice_count), total_time);
    }

    std::size_t slice_count() const noexcept { return slices.size(); }
    std::size_t parameter_count() const noexcept { return slices.size() * HamiltonianParams::size; }
    double dt() const { return total_time / static_cast<double>(slices.size()); }

    /// Flat view in slice-major order {K_A, K_B, eps_A, eps_B, zeta}.
    double& parameter(std::size_t i) { return slices[i / HamiltonianParams::size][i % HamiltonianParams::size]; }
    double parameter(std::size_t i) const { return slices[i / HamiltonianParams::size][i % HamiltonianParams::size]; }

    std::vector<double> parameters() const {
        std::vector<double> out(parameter_count());
        for (std::size_t i = 0; i < out.size(); ++i) out[i] = parameter(i);
        return out;
    }

    void set_parameters(const std::vector<double>& p) {
        if (p.size() != parameter_count()) throw ValidationError("parameter vector length mismatch");
        for (std::size_t i = 0; i < p.size(); ++i) parameter(i) = p[i];
    }

    void validate() const {
        if (slices.empty()) throw ValidationError("schedule needs at least one slice");
        if (!(total_time > 0.0) || !std::isfinite(total_time)) throw ValidationError("total_time must be positive");
        for (const auto& s : slices)
            if (!s.finite()) throw ValidationError("schedule has a non-finite parameter");
    }

    friend bool operator==(const HamiltonianSchedule&, const HamiltonianSchedule&) = default;
};

/// |psi><psi|; rejects states whose norm is off by more than 1e-9.
inline DensityMatrix pure_to_density(const PureState& state) {
    state.validate(1e-9);
    const Vector4c psi = state.vector();
    Matrix4c rho = psi * psi.adjoint();
    // Undo the O(1e-9) norm slack so the trace invariant holds tightly.
    rho /= rho.trace().real();
    return DensityMatrix::trusted(rho);
}

/// H = K_A X(x)I + K_B I(x)X + eps_A Z(x)I + eps_B I(x)Z + zeta Z(x)Z
inline Matrix4r hamiltonian_real(const HamiltonianParams& p) {
    return p.k_a * pauli::xa() + p.k_b * pauli::xb() + p.eps_a * pauli::za() + p.eps_b * pauli::zb() +
           p.zeta * pauli::zz();
}

inline TwoQubitOperator build_hamiltonian(const HamiltonianParams& p) {
    if (!p.finite()) throw ValidationError("Hamiltonian parameter is not finite");
    return TwoQubitOperator(hamiltonian_real(p).cast<Complex>());
}

/// exp(-i H dt) through the eigendecomposition of the real symmetric H.
inline TwoQubitOperator slice_propagator(const HamiltonianParams& p, double dt) {
    if (!p.finite()) throw ValidationError("Hamiltonian parameter is not finite");
    Eigen::SelfAdjointEigenSolver<Matrix4r> es(hamiltonian_real(p));
    const Matrix4r& v = es.eigenvectors();
    Vector4c phases;
    for (int k = 0; k < 4; ++k) phases(k) = std::polar(1.0, -es.eigenvalues()(k) * dt);
    const Matrix4c vc = v.cast<Complex>();
    return TwoQubitOperator(vc * phases.asDiagonal() * vc.transpose());
}

/// Full propagator U = U_n ... U_1 for the schedule.
inline TwoQubitOperator schedule_propagator(const HamiltonianSchedule& schedule) {
    schedule.validate();
    const double dt = schedule.dt();
    Matrix4c u = Matrix4c::Identity();
    for (const auto& s : schedule.slices) u = slice_propagator(s, dt).matrix() * u;
    return TwoQubitOperator(u);
}

/// rho(t_f) = U rho(0) U^dagger.
inline DensityMatrix propagate(const DensityMatrix& rho0, const HamiltonianSchedule& schedule) {
    const Matrix4c u = schedule_propagator(schedule).matrix();
    Matrix4c out = u * rho0.matrix() * u.adjoint();
    out = 0.5 * (out + out.adjoint()).eval();
    return DensityMatrix::trusted(out);
}

/// <Z_A Z_B> = Tr(rho Z(x)Z).
inline double zz_expectation(const DensityMatrix& rho) {
    const auto& m = rho.matrix();
    return (m(0, 0) - m(1, 1) - m(2, 2) + m(3, 3)).real();
}

/// (Tr(rho Z(x)Z))^2, clamped into [0, 1] against round-off.
inline double correlation_squared(const DensityMatrix& rho) {
    const double c = zz_expectation(rho);
    return std::clamp(c * c, 0.0, 1.0);
}

/// Entanglement of formation of a two-qubit pure state in closed form:
/// 4a^2 d^2 + 4b^2 c^2 - 8abcd cos(theta3 - theta2 - theta1).
inline double eof_pure(const PureState& s) {
    s.validate(1e-9);
    const double e = 4.0 * s.a * s.a * s.d * s.d + 4.0 * s.b * s.b * s.c * s.c -
                     8.0 * s.a * s.b * s.c * s.d * std::cos(s.theta3 - s.theta2 - s.theta1);
    return std::clamp(e, 0.0, 1.0);
}

} // namespace qnnbench
