#pragma once

// Dense complex linear algebra on small tensor-product spaces.
//
// Storage is row-major. In every Kronecker product the LEFT factor is the
// major (slow) index, so |a>|b> lives at index a * dim(b) + b.

#include <complex>
#include <cstddef>
#include <initializer_list>
#include <span>
#include <string>
#include <vector>

namespace hom {

using Complex = std::complex<double>;

/// Tolerance for algebraic identities (norms, unitarity, Hermiticity, trace).
inline constexpr double kAlgebraTol = 1e-12;
/// Smallest eigenvalue accepted for a positive-semidefinite matrix.
inline constexpr double kEigenTol = 1e-10;
/// Upper bound on the dimension produced by a tensor product.
inline constexpr std::size_t kMaxTensorDim = 4096;

/// Builds a complex scalar, rejecting NaN and infinite components.
Complex make_complex(double re, double im = 0.0);

class StateVector {
  public:
    /// Labels default to "0", "1", ... when omitted.
    explicit StateVector(std::vector<Complex> amplitudes,
                         std::vector<std::string> basis_labels = {});

    std::size_t dim() const { return amplitudes_.size(); }
    std::span<const Complex> amplitudes() const { return amplitudes_; }
    const Complex& operator[](std::size_t i) const { return amplitudes_[i]; }
    const std::vector<std::string>& basis_labels() const { return labels_; }

    double norm_squared() const;
    bool is_normalized(double tol = kAlgebraTol) const;

    /// Index of a basis label, or dim() when absent.
    std::size_t index_of(const std::string& label) const;

  private:
    std::vector<Complex> amplitudes_;
    std::vector<std::string> labels_;
};

class Operator {
  public:
    Operator(std::size_t dim, std::vector<Complex> entries);

    static Operator identity(std::size_t dim);
    static Operator from_rows(std::initializer_list<std::initializer_list<Complex>> rows);

    std::size_t dim() const { return dim_; }
    const Complex& operator()(std::size_t row, std::size_t col) const {
        return entries_[row * dim_ + col];
    }
    std::span<const Complex> entries() const { return entries_; }

    /// U U^dagger == I entrywise within tol.
    bool is_unitary(double tol = kAlgebraTol) const;

  private:
    std::size_t dim_;
    std::vector<Complex> entries_;
};

Operator adjoint(const Operator& op);
Operator operator*(const Operator& a, const Operator& b);
Operator operator+(const Operator& a, const Operator& b);
Operator operator*(Complex scale, const Operator& op);

/// Largest entrywise magnitude of a - b.
double max_abs_difference(const Operator& a, const Operator& b);

class DensityMatrix {
  public:
    /// Validates Hermiticity, unit trace, and eigenvalues >= -kEigenTol.
    DensityMatrix(std::size_t dim, std::vector<Complex> entries);

    /// Skips validation. Used for results of non-unitary evolution.
    static DensityMatrix unchecked(std::size_t dim, std::vector<Complex> entries);

    std::size_t dim() const { return dim_; }
    const Complex& operator()(std::size_t row, std::size_t col) const {
        return entries_[row * dim_ + col];
    }
    std::span<const Complex> entries() const { return entries_; }

    Complex trace() const;
    bool is_hermitian(double tol = kAlgebraTol) const;
    /// Real eigenvalues in ascending order.
    std::vector<double> eigenvalues() const;

  private:
    struct NoCheck {};
    DensityMatrix(std::size_t dim, std::vector<Complex> entries, NoCheck);

    std::size_t dim_;
    std::vector<Complex> entries_;
};

/// Convex mixture weight * a + (1 - weight) * b; weight must lie in [0, 1].
DensityMatrix convex_combination(const DensityMatrix& a, const DensityMatrix& b,
                                 double weight);

/// Eigenvalues (ascending) of a Hermitian matrix stored row-major.
std::vector<double> hermitian_eigenvalues(std::size_t dim, std::span<const Complex> entries);

StateVector tensor(const StateVector& a, const StateVector& b);
Operator tensor(const Operator& a, const Operator& b);

StateVector apply(const Operator& op, const StateVector& v);

/// <a|b>
Complex inner_product(const StateVector& a, const StateVector& b);

/// True when |<a|b>| == 1 within tol, i.e. equal up to a global phase.
bool equal_up_to_phase(const StateVector& a, const StateVector& b,
                       double tol = kAlgebraTol);

/// |v><v| for a normalized v.
DensityMatrix outer(const StateVector& v);

/// op * rho * op^dagger. A non-unitary op triggers a warning and the
/// result is returned without density-matrix validation.
DensityMatrix conjugate_evolve(const DensityMatrix& rho, const Operator& op);

/// Re Tr(a b); throws if the imaginary part exceeds 1e-10.
double trace_product(const DensityMatrix& a, const DensityMatrix& b);

}  // namespace hom
