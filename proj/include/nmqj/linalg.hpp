#pragma once

// Dense complex linear algebra for the small Hilbert spaces (d <= 8) of
// few-level atoms. Row-major storage, value semantics throughout.

#include <complex>
#include <cstddef>
#include <initializer_list>
#include <span>
#include <vector>

namespace nmqj {

using Complex = std::complex<double>;

inline constexpr std::size_t kMaxDim = 8;

class StateVector {
  public:
    StateVector() = default;
    explicit StateVector(std::size_t dim) : amp_(dim, Complex{0.0, 0.0}) {}
    StateVector(std::initializer_list<Complex> amps) : amp_(amps) {}
    explicit StateVector(std::vector<Complex> amps) : amp_(std::move(amps)) {}

    static StateVector basis(std::size_t dim, std::size_t index);

    std::size_t dim() const { return amp_.size(); }
    Complex& operator[](std::size_t i) { return amp_[i]; }
    const Complex& operator[](std::size_t i) const { return amp_[i]; }
    std::span<const Complex> amplitudes() const { return amp_; }

    double norm() const;

    StateVector& operator+=(const StateVector& other);
    StateVector& operator-=(const StateVector& other);
    StateVector& operator*=(Complex factor);

  private:
    std::vector<Complex> amp_;
};

StateVector operator+(StateVector a, const StateVector& b);
StateVector operator-(StateVector a, const StateVector& b);
StateVector operator*(Complex factor, StateVector v);

/// <u|v>
Complex inner(const StateVector& u, const StateVector& v);

/// Square complex matrix. Used for operators (jump operators, Hamiltonians
/// in units of the reservoir width) and for density matrices.
class Matrix {
  public:
    Matrix() = default;
    explicit Matrix(std::size_t dim) : dim_(dim), m_(dim * dim, Complex{0.0, 0.0}) {}
    Matrix(std::initializer_list<std::initializer_list<Complex>> rows);

    static Matrix identity(std::size_t dim);
    /// |row><col|
    static Matrix transition(std::size_t dim, std::size_t row, std::size_t col);

    std::size_t dim() const { return dim_; }
    Complex& operator()(std::size_t i, std::size_t j) { return m_[i * dim_ + j]; }
    const Complex& operator()(std::size_t i, std::size_t j) const { return m_[i * dim_ + j]; }

    Matrix adjoint() const;
    Complex trace() const;
    /// Largest elementwise |A_ij - conj(A_ji)|.
    double hermiticity_defect() const;
    double max_abs() const;

    StateVector apply(const StateVector& v) const;

    Matrix& operator+=(const Matrix& other);
    Matrix& operator-=(const Matrix& other);
    Matrix& operator*=(Complex factor);

  private:
    std::size_t dim_ = 0;
    std::vector<Complex> m_;
};

Matrix operator+(Matrix a, const Matrix& b);
Matrix operator-(Matrix a, const Matrix& b);
Matrix operator*(Complex factor, Matrix a);
Matrix operator*(const Matrix& a, const Matrix& b);
StateVector operator*(const Matrix& a, const StateVector& v);

Matrix commutator(const Matrix& a, const Matrix& b);
Matrix anticommutator(const Matrix& a, const Matrix& b);

using Operator = Matrix;
using DensityMatrix = Matrix;

/// Throws ZeroNorm when ||v|| <= 1e-14 (a jump applied to a dark state).
StateVector normalize(const StateVector& v);

/// |v><v|
DensityMatrix outer(const StateVector& v);

/// |u><v|
Matrix outer(const StateVector& u, const StateVector& v);

/// <v|A|v>
Complex expectation(const StateVector& v, const Operator& a);

/// True iff |<u|v>| >= 1 - tol, i.e. the states agree up to a global phase.
bool phase_equal(const StateVector& u, const StateVector& v, double tol);

/// Global-phase tolerance used for registry deduplication.
inline constexpr double kPhaseTolerance = 1e-9;

/// Smallest eigenvalue of a Hermitian matrix. Closed form for d <= 3,
/// cyclic Jacobi on the real 2d x 2d embedding above that.
/// Throws NotHermitian if the elementwise defect exceeds 1e-10 (relative to
/// the largest entry).
double min_eigenvalue(const DensityMatrix& rho);

/// Max-norm of the elementwise difference.
double max_abs_diff(const Matrix& a, const Matrix& b);

}  // namespace nmqj
