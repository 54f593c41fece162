#pragma once

// Exact pure-state simulation for one and two qubits.
//
// Two-qubit states use the ordering |q0 q1> with q0 the most significant
// factor: amplitude index k = 2*q0 + q1. Throughout the library q0 is the
// Bob-side particle of a group (or the channel particle when an ancilla is
// attached) and q1 is the Charlie-side particle (or the ancilla).

#include <array>
#include <cmath>
#include <complex>
#include <cstddef>
#include <initializer_list>
#include <optional>
#include <stdexcept>
#include <string_view>
#include <utility>

#include "semiqsum/random_stream.hpp"

namespace semiqsum {

using Amplitude = std::complex<double>;

inline constexpr double kStateTolerance = 1e-12;
inline const double kInvSqrt2 = 1.0 / std::sqrt(2.0);

class QuantumError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

class StateVector {
public:
    StateVector(std::initializer_list<Amplitude> amps) {
        if (amps.size() != 2 && amps.size() != 4)
            throw QuantumError("StateVector: dimension must be 2 or 4");
        dim_ = amps.size();
        std::size_t k = 0;
        for (const auto& a : amps) amps_[k++] = a;
        check_norm();
    }

    template <std::size_t N>
    explicit StateVector(const std::array<Amplitude, N>& amps) requires(N == 2 || N == 4) : dim_(N) {
        for (std::size_t k = 0; k < N; ++k) amps_[k] = amps[k];
        check_norm();
    }

    std::size_t dim() const noexcept { return dim_; }
    std::size_t qubits() const noexcept { return dim_ == 2 ? 1 : 2; }
    const Amplitude& operator[](std::size_t k) const { return amps_.at(k); }

    double norm_squared() const noexcept {
        double s = 0;
        for (std::size_t k = 0; k < dim_; ++k) s += std::norm(amps_[k]);
        return s;
    }

    bool approx_equal(const StateVector& other, double tol = kStateTolerance) const noexcept {
        if (dim_ != other.dim_) return false;
        for (std::size_t k = 0; k < dim_; ++k)
            if (std::abs(amps_[k] - other.amps_[k]) > tol) return false;
        return true;
    }

    /// Equality up to a global phase.
    bool same_ray(const StateVector& other, double tol = 1e-9) const noexcept {
        if (dim_ != other.dim_) return false;
        Amplitude overlap{};
        for (std::size_t k = 0; k < dim_; ++k) overlap += std::conj(amps_[k]) * other.amps_[k];
        return std::abs(std::abs(overlap) - 1.0) < tol;
    }

private:
    void check_norm() const {
        if (std::abs(norm_squared() - 1.0) > kStateTolerance)
            throw QuantumError("StateVector: amplitudes are not normalized");
    }

    std::size_t dim_ = 2;
    std::array<Amplitude, 4> amps_{};
};

enum class Basis { Computational, Hadamard, Bell };

/// Bell outcomes in their fixed serialization order.
enum class BellOutcome { PhiPlus = 0, PhiMinus = 1, PsiPlus = 2, PsiMinus = 3 };

constexpr std::string_view to_string(Basis b) noexcept {
    switch (b) {
        case Basis::Computational: return "Z";
        case Basis::Hadamard: return "X";
        case Basis::Bell: return "BELL";
    }
    return "?";
}

constexpr std::string_view to_string(BellOutcome o) noexcept {
    switch (o) {
        case BellOutcome::PhiPlus: return "PHI_PLUS";
        case BellOutcome::PhiMinus: return "PHI_MINUS";
        case BellOutcome::PsiPlus: return "PSI_PLUS";
        case BellOutcome::PsiMinus: return "PSI_MINUS";
    }
    return "?";
}

constexpr std::size_t basis_dim(Basis b) noexcept { return b == Basis::Bell ? 4 : 2; }
constexpr std::size_t outcome_count(Basis b) noexcept { return basis_dim(b); }

/// The k-th vector of a measurement basis.
inline StateVector basis_vector(Basis basis, std::size_t k) {
    const double h = kInvSqrt2;
    switch (basis) {
        case Basis::Computational:
            if (k == 0) return {1.0, 0.0};
            if (k == 1) return {0.0, 1.0};
            break;
        case Basis::Hadamard:
            if (k == 0) return {h, h};
            if (k == 1) return {h, -h};
            break;
        case Basis::Bell:
            switch (static_cast<BellOutcome>(k)) {
                case BellOutcome::PhiPlus: return {h, 0.0, 0.0, h};
                case BellOutcome::PhiMinus: return {h, 0.0, 0.0, -h};
                case BellOutcome::PsiPlus: return {0.0, h, h, 0.0};
                case BellOutcome::PsiMinus: return {0.0, h, -h, 0.0};
            }
            break;
    }
    throw QuantumError("basis_vector: outcome index out of range");
}

inline StateVector bell_state(BellOutcome o) { return basis_vector(Basis::Bell, static_cast<std::size_t>(o)); }

namespace states {
inline StateVector zero() { return basis_vector(Basis::Computational, 0); }
inline StateVector one() { return basis_vector(Basis::Computational, 1); }
inline StateVector plus() { return basis_vector(Basis::Hadamard, 0); }
inline StateVector minus() { return basis_vector(Basis::Hadamard, 1); }
}  // namespace states

/// Single-qubit basis state. The Bell basis is not a single-qubit preparation.
inline StateVector prepare(Basis basis, int index) {
    if (basis == Basis::Bell) throw QuantumError("prepare: Bell basis is not a single-qubit preparation");
    if (index != 0 && index != 1) throw QuantumError("prepare: index must be 0 or 1");
    return basis_vector(basis, static_cast<std::size_t>(index));
}

inline StateVector tensor(const StateVector& first, const StateVector& second) {
    if (first.dim() != 2 || second.dim() != 2) throw QuantumError("tensor: both factors must be single qubits");
    return StateVector(std::array<Amplitude, 4>{first[0] * second[0], first[0] * second[1],
                                                first[1] * second[0], first[1] * second[1]});
}

/// Controlled-NOT with q0 as control and q1 as target.
inline StateVector cnot(const StateVector& joint) {
    if (joint.dim() != 4) throw QuantumError("cnot: requires a two-qubit state");
    return StateVector(std::array<Amplitude, 4>{joint[0], joint[1], joint[3], joint[2]});
}

/// Outcome distribution of a projective measurement, indexed by basis vector.
struct Distribution {
    std::array<double, 4> p{};
    std::size_t size = 0;

    double operator[](std::size_t k) const { return p.at(k); }
    double total() const noexcept {
        double s = 0;
        for (std::size_t k = 0; k < size; ++k) s += p[k];
        return s;
    }
};

inline Distribution probabilities(const StateVector& state, Basis basis) {
    if (state.dim() != basis_dim(basis))
        throw QuantumError("probabilities: basis does not match state dimension");
    Distribution d;
    d.size = outcome_count(basis);
    for (std::size_t k = 0; k < d.size; ++k) {
        const StateVector b = basis_vector(basis, k);
        Amplitude overlap{};
        for (std::size_t i = 0; i < state.dim(); ++i) overlap += std::conj(b[i]) * state[i];
        d.p[k] = std::norm(overlap);
    }
    return d;
}

/// Computational-basis distribution of one qubit of a two-qubit state.
inline Distribution qubit_probabilities(const StateVector& joint, std::size_t position) {
    if (joint.dim() != 4 || position > 1) throw QuantumError("qubit_probabilities: requires a two-qubit state");
    Distribution d;
    d.size = 2;
    for (std::size_t k = 0; k < 4; ++k) {
        const std::size_t bit = position == 0 ? (k >> 1) : (k & 1);
        d.p[bit] += std::norm(joint[k]);
    }
    return d;
}

namespace detail {

inline std::size_t sample(const Distribution& d, RandomStream& rng) {
    const double u = rng.uniform01() * d.total();
    double acc = 0;
    std::size_t last_nonzero = 0;
    for (std::size_t k = 0; k < d.size; ++k) {
        if (d.p[k] <= 0) continue;
        last_nonzero = k;
        acc += d.p[k];
        if (u < acc) return k;
    }
    return last_nonzero;
}

}  // namespace detail

struct MeasurementResult {
    std::size_t outcome;
    StateVector collapsed;
};

/// Projective measurement with Born-rule sampling.
inline MeasurementResult measure(const StateVector& state, Basis basis, RandomStream& rng) {
    const Distribution d = probabilities(state, basis);
    const std::size_t k = detail::sample(d, rng);
    return {k, basis_vector(basis, k)};
}

/// Post-measurement state after the given qubit of a two-qubit state reads `bit`.
inline StateVector collapse_qubit(const StateVector& joint, std::size_t position, int bit) {
    const Distribution d = qubit_probabilities(joint, position);
    const double p = d.p[static_cast<std::size_t>(bit)];
    if (p <= 0) throw QuantumError("collapse_qubit: outcome has zero probability");
    const double scale = 1.0 / std::sqrt(p);
    std::array<Amplitude, 4> out{};
    for (std::size_t k = 0; k < 4; ++k) {
        const std::size_t kb = position == 0 ? (k >> 1) : (k & 1);
        if (kb == static_cast<std::size_t>(bit)) out[k] = joint[k] * scale;
    }
    return StateVector(out);
}

/// Computational-basis measurement of one qubit of a two-qubit state.
inline MeasurementResult measure_qubit(const StateVector& joint, std::size_t position, RandomStream& rng) {
    const std::size_t bit = detail::sample(qubit_probabilities(joint, position), rng);
    return {bit, collapse_qubit(joint, position, static_cast<int>(bit))};
}

/// Factor a two-qubit product state into (q0, q1); nullopt if entangled.
inline std::optional<std::pair<StateVector, StateVector>> split_product(const StateVector& joint, double tol = 1e-9) {
    if (joint.dim() != 4) throw QuantumError("split_product: requires a two-qubit state");
    // Largest row (fixed q0) gives the q1 factor up to scale.
    const double row0 = std::norm(joint[0]) + std::norm(joint[1]);
    const double row1 = std::norm(joint[2]) + std::norm(joint[3]);
    const std::size_t r = row0 >= row1 ? 0 : 2;
    const double rn = std::sqrt(r == 0 ? row0 : row1);
    const std::array<Amplitude, 2> second{joint[r] / rn, joint[r + 1] / rn};
    std::array<Amplitude, 2> first{};
    for (std::size_t q0 = 0; q0 < 2; ++q0)
        first[q0] = std::conj(second[0]) * joint[2 * q0] + std::conj(second[1]) * joint[2 * q0 + 1];
    for (std::size_t k = 0; k < 4; ++k)
        if (std::abs(first[k >> 1] * second[k & 1] - joint[k]) > tol) return std::nullopt;
    // Renormalize against rounding before the strict norm check.
    const double fn = std::sqrt(std::norm(first[0]) + std::norm(first[1]));
    return std::pair{StateVector(std::array<Amplitude, 2>{first[0] / fn, first[1] / fn}),
                     StateVector(second)};
}

}  // namespace semiqsum
