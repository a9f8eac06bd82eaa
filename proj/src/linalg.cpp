#include "nmqj/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "nmqj/errors.hpp"

namespace nmqj {

namespace {

void require_same_dim(std::size_t a, std::size_t b, const char* where) {
    if (a != b) {
        std::ostringstream os;
        os << where << ": dimension mismatch (" << a << " vs " << b << ")";
        throw DimensionMismatch(os.str());
    }
}

double min_eigenvalue_2(const DensityMatrix& r) {
    const double a = r(0, 0).real();
    const double d = r(1, 1).real();
    const double off = std::norm(r(0, 1));
    const double mean = 0.5 * (a + d);
    const double half_gap = std::sqrt(0.25 * (a - d) * (a - d) + off);
    return mean - half_gap;
}

// Trigonometric solution of the characteristic cubic of a 3x3 Hermitian matrix.
double min_eigenvalue_3(const DensityMatrix& r) {
    const double p1 = std::norm(r(0, 1)) + std::norm(r(0, 2)) + std::norm(r(1, 2));
    const double q = (r(0, 0).real() + r(1, 1).real() + r(2, 2).real()) / 3.0;
    const double d0 = r(0, 0).real() - q;
    const double d1 = r(1, 1).real() - q;
    const double d2 = r(2, 2).real() - q;
    const double p2 = d0 * d0 + d1 * d1 + d2 * d2 + 2.0 * p1;
    if (p2 <= 0.0) {
        return q;
    }
    const double p = std::sqrt(p2 / 6.0);
    // det(B) / 2 with B = (A - qI) / p.
    const Complex b01 = r(0, 1) / p, b02 = r(0, 2) / p, b12 = r(1, 2) / p;
    const double b00 = d0 / p, b11 = d1 / p, b22 = d2 / p;
    const double det = b00 * b11 * b22 + 2.0 * (b01 * b12 * std::conj(b02)).real() -
                       b00 * std::norm(b12) - b11 * std::norm(b02) - b22 * std::norm(b01);
    const double half = std::clamp(0.5 * det, -1.0, 1.0);
    const double phi = std::acos(half) / 3.0;
    return q + 2.0 * p * std::cos(phi + 2.0 * std::numbers::pi / 3.0);
}

// Cyclic Jacobi on the real symmetric embedding [[Re, -Im], [Im, Re]];
// every eigenvalue of the Hermitian matrix appears twice.
double min_eigenvalue_jacobi(const DensityMatrix& r) {
    const std::size_t d = r.dim();
    const std::size_t n = 2 * d;
    std::vector<double> a(n * n);
    auto at = [&](std::size_t i, std::size_t j) -> double& { return a[i * n + j]; };
    for (std::size_t i = 0; i < d; ++i) {
        for (std::size_t j = 0; j < d; ++j) {
            at(i, j) = r(i, j).real();
            at(i + d, j + d) = r(i, j).real();
            at(i, j + d) = -r(i, j).imag();
            at(i + d, j) = r(i, j).imag();
        }
    }
    for (int sweep = 0; sweep < 100; ++sweep) {
        double off = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            for (std::size_t j = i + 1; j < n; ++j) {
                off += at(i, j) * at(i, j);
            }
        }
        if (off < 1e-30) {
            break;
        }
        for (std::size_t p = 0; p < n; ++p) {
            for (std::size_t q = p + 1; q < n; ++q) {
                if (std::abs(at(p, q)) < 1e-300) {
                    continue;
                }
                const double theta = (at(q, q) - at(p, p)) / (2.0 * at(p, q));
                const double t = std::copysign(1.0, theta) /
                                 (std::abs(theta) + std::sqrt(theta * theta + 1.0));
                const double c = 1.0 / std::sqrt(t * t + 1.0);
                const double s = t * c;
                for (std::size_t k = 0; k < n; ++k) {
                    const double akp = at(k, p), akq = at(k, q);
                    at(k, p) = c * akp - s * akq;
                    at(k, q) = s * akp + c * akq;
                }
                for (std::size_t k = 0; k < n; ++k) {
                    const double apk = at(p, k), aqk = at(q, k);
                    at(p, k) = c * apk - s * aqk;
                    at(q, k) = s * apk + c * aqk;
                }
            }
        }
    }
    double lo = at(0, 0);
    for (std::size_t i = 1; i < n; ++i) {
        lo = std::min(lo, at(i, i));
    }
    return lo;
}

}  // namespace

StateVector StateVector::basis(std::size_t dim, std::size_t index) {
    StateVector v(dim);
    v[index] = 1.0;
    return v;
}

double StateVector::norm() const {
    double s = 0.0;
    for (const auto& c : amp_) {
        s += std::norm(c);
    }
    return std::sqrt(s);
}

StateVector& StateVector::operator+=(const StateVector& other) {
    require_same_dim(dim(), other.dim(), "StateVector +=");
    for (std::size_t i = 0; i < amp_.size(); ++i) {
        amp_[i] += other.amp_[i];
    }
    return *this;
}

StateVector& StateVector::operator-=(const StateVector& other) {
    require_same_dim(dim(), other.dim(), "StateVector -=");
    for (std::size_t i = 0; i < amp_.size(); ++i) {
        amp_[i] -= other.amp_[i];
    }
    return *this;
}

StateVector& StateVector::operator*=(Complex factor) {
    for (auto& c : amp_) {
        c *= factor;
    }
    return *this;
}

StateVector operator+(StateVector a, const StateVector& b) { return a += b; }
StateVector operator-(StateVector a, const StateVector& b) { return a -= b; }
StateVector operator*(Complex factor, StateVector v) { return v *= factor; }

Complex inner(const StateVector& u, const StateVector& v) {
    require_same_dim(u.dim(), v.dim(), "inner");
    Complex s{0.0, 0.0};
    for (std::size_t i = 0; i < u.dim(); ++i) {
        s += std::conj(u[i]) * v[i];
    }
    return s;
}

Matrix::Matrix(std::initializer_list<std::initializer_list<Complex>> rows)
    : dim_(rows.size()), m_() {
    m_.reserve(dim_ * dim_);
    for (const auto& row : rows) {
        require_same_dim(row.size(), dim_, "Matrix literal");
        m_.insert(m_.end(), row.begin(), row.end());
    }
}

Matrix Matrix::identity(std::size_t dim) {
    Matrix m(dim);
    for (std::size_t i = 0; i < dim; ++i) {
        m(i, i) = 1.0;
    }
    return m;
}

Matrix Matrix::transition(std::size_t dim, std::size_t row, std::size_t col) {
    Matrix m(dim);
    m(row, col) = 1.0;
    return m;
}

Matrix Matrix::adjoint() const {
    Matrix out(dim_);
    for (std::size_t i = 0; i < dim_; ++i) {
        for (std::size_t j = 0; j < dim_; ++j) {
            out(j, i) = std::conj((*this)(i, j));
        }
    }
    return out;
}

Complex Matrix::trace() const {
    Complex s{0.0, 0.0};
    for (std::size_t i = 0; i < dim_; ++i) {
        s += (*this)(i, i);
    }
    return s;
}

double Matrix::hermiticity_defect() const {
    double worst = 0.0;
    for (std::size_t i = 0; i < dim_; ++i) {
        for (std::size_t j = i; j < dim_; ++j) {
            worst = std::max(worst, std::abs((*this)(i, j) - std::conj((*this)(j, i))));
        }
    }
    return worst;
}

double Matrix::max_abs() const {
    double worst = 0.0;
    for (const auto& c : m_) {
        worst = std::max(worst, std::abs(c));
    }
    return worst;
}

StateVector Matrix::apply(const StateVector& v) const {
    require_same_dim(dim_, v.dim(), "Matrix::apply");
    StateVector out(dim_);
    for (std::size_t i = 0; i < dim_; ++i) {
        Complex s{0.0, 0.0};
        for (std::size_t j = 0; j < dim_; ++j) {
            s += (*this)(i, j) * v[j];
        }
        out[i] = s;
    }
    return out;
}

Matrix& Matrix::operator+=(const Matrix& other) {
    require_same_dim(dim_, other.dim_, "Matrix +=");
    for (std::size_t i = 0; i < m_.size(); ++i) {
        m_[i] += other.m_[i];
    }
    return *this;
}

Matrix& Matrix::operator-=(const Matrix& other) {
    require_same_dim(dim_, other.dim_, "Matrix -=");
    for (std::size_t i = 0; i < m_.size(); ++i) {
        m_[i] -= other.m_[i];
    }
    return *this;
}

Matrix& Matrix::operator*=(Complex factor) {
    for (auto& c : m_) {
        c *= factor;
    }
    return *this;
}

Matrix operator+(Matrix a, const Matrix& b) { return a += b; }
Matrix operator-(Matrix a, const Matrix& b) { return a -= b; }
Matrix operator*(Complex factor, Matrix a) { return a *= factor; }

Matrix operator*(const Matrix& a, const Matrix& b) {
    require_same_dim(a.dim(), b.dim(), "Matrix *");
    const std::size_t d = a.dim();
    Matrix out(d);
    for (std::size_t i = 0; i < d; ++i) {
        for (std::size_t k = 0; k < d; ++k) {
            const Complex aik = a(i, k);
            if (aik == Complex{0.0, 0.0}) {
                continue;
            }
            for (std::size_t j = 0; j < d; ++j) {
                out(i, j) += aik * b(k, j);
            }
        }
    }
    return out;
}

StateVector operator*(const Matrix& a, const StateVector& v) { return a.apply(v); }

Matrix commutator(const Matrix& a, const Matrix& b) { return a * b - b * a; }
Matrix anticommutator(const Matrix& a, const Matrix& b) { return a * b + b * a; }

StateVector normalize(const StateVector& v) {
    const double n = v.norm();
    if (!(n > 1e-14)) {
        throw ZeroNorm("normalize: state has zero norm (jump applied to a dark state?)");
    }
    return Complex{1.0 / n, 0.0} * v;
}

DensityMatrix outer(const StateVector& v) { return outer(v, v); }

Matrix outer(const StateVector& u, const StateVector& v) {
    require_same_dim(u.dim(), v.dim(), "outer");
    Matrix m(u.dim());
    for (std::size_t i = 0; i < u.dim(); ++i) {
        for (std::size_t j = 0; j < v.dim(); ++j) {
            m(i, j) = u[i] * std::conj(v[j]);
        }
    }
    return m;
}

Complex expectation(const StateVector& v, const Operator& a) {
    require_same_dim(v.dim(), a.dim(), "expectation");
    return inner(v, a.apply(v));
}

bool phase_equal(const StateVector& u, const StateVector& v, double tol) {
    if (u.dim() != v.dim()) {
        return false;
    }
    return std::abs(inner(u, v)) >= 1.0 - tol;
}

double min_eigenvalue(const DensityMatrix& rho) {
    const double scale = std::max(1.0, rho.max_abs());
    if (rho.hermiticity_defect() > 1e-10 * scale) {
        throw NotHermitian("min_eigenvalue: matrix is not Hermitian");
    }
    switch (rho.dim()) {
        case 0:
            throw DimensionMismatch("min_eigenvalue: empty matrix");
        case 1:
            return rho(0, 0).real();
        case 2:
            return min_eigenvalue_2(rho);
        case 3:
            return min_eigenvalue_3(rho);
        default:
            return min_eigenvalue_jacobi(rho);
    }
}

double max_abs_diff(const Matrix& a, const Matrix& b) {
    require_same_dim(a.dim(), b.dim(), "max_abs_diff");
    double worst = 0.0;
    for (std::size_t i = 0; i < a.dim(); ++i) {
        for (std::size_t j = 0; j < a.dim(); ++j) {
            worst = std::max(worst, std::abs(a(i, j) - b(i, j)));
        }
    }
    return worst;
}

}  // namespace nmqj
