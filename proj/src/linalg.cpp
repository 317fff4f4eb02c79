#include "hom/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

#include "hom/diagnostics.hpp"

namespace hom {
namespace {

void require_finite(std::span<const Complex> values, const char* what) {
    for (const auto& z : values) {
        if (!std::isfinite(z.real()) || !std::isfinite(z.imag())) {
            throw std::invalid_argument(std::string(what) + ": non-finite entry");
        }
    }
}

std::vector<std::string> default_labels(std::size_t dim) {
    std::vector<std::string> labels(dim);
    for (std::size_t i = 0; i < dim; ++i) labels[i] = std::to_string(i);
    return labels;
}

std::size_t checked_product_dim(std::size_t a, std::size_t b) {
    if (a != 0 && b > kMaxTensorDim / a) {
        throw std::length_error("tensor: product dimension exceeds " +
                                std::to_string(kMaxTensorDim));
    }
    return a * b;
}

void require_same_dim(std::size_t a, std::size_t b, const char* what) {
    if (a != b) {
        std::ostringstream msg;
        msg << what << ": dimension mismatch (" << a << " vs " << b << ")";
        throw std::invalid_argument(msg.str());
    }
}

std::vector<Complex> multiply(std::size_t n, std::span<const Complex> a,
                              std::span<const Complex> b) {
    std::vector<Complex> out(n * n);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t k = 0; k < n; ++k) {
            const Complex aik = a[i * n + k];
            if (aik == Complex{}) continue;
            for (std::size_t j = 0; j < n; ++j) out[i * n + j] += aik * b[k * n + j];
        }
    }
    return out;
}

std::vector<Complex> adjoint_entries(std::size_t n, std::span<const Complex> a) {
    std::vector<Complex> out(n * n);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) out[j * n + i] = std::conj(a[i * n + j]);
    }
    return out;
}

bool hermitian(std::size_t n, std::span<const Complex> a, double tol) {
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i; j < n; ++j) {
            if (std::abs(a[i * n + j] - std::conj(a[j * n + i])) > tol) return false;
        }
    }
    return true;
}

// Cyclic Jacobi on a real symmetric matrix (row-major, destroyed).
std::vector<double> symmetric_eigenvalues(std::size_t n, std::vector<double> a) {
    auto at = [&](std::size_t r, std::size_t c) -> double& { return a[r * n + c]; };
    double frob = 0.0;
    for (double x : a) frob += x * x;
    for (int sweep = 0; sweep < 100; ++sweep) {
        double off = 0.0;
        for (std::size_t p = 0; p < n; ++p) {
            for (std::size_t q = p + 1; q < n; ++q) off += at(p, q) * at(p, q);
        }
        if (off <= 1e-32 * frob || off == 0.0) break;
        for (std::size_t p = 0; p < n; ++p) {
            for (std::size_t q = p + 1; q < n; ++q) {
                const double apq = at(p, q);
                if (std::abs(apq) < 1e-300) continue;
                const double theta = (at(q, q) - at(p, p)) / (2.0 * apq);
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
    std::vector<double> eig(n);
    for (std::size_t i = 0; i < n; ++i) eig[i] = at(i, i);
    std::sort(eig.begin(), eig.end());
    return eig;
}

}  // namespace

Complex make_complex(double re, double im) {
    if (!std::isfinite(re) || !std::isfinite(im)) {
        throw std::invalid_argument("make_complex: non-finite component");
    }
    return {re, im};
}

// ---------------------------------------------------------------------------
// StateVector

StateVector::StateVector(std::vector<Complex> amplitudes, std::vector<std::string> basis_labels)
    : amplitudes_(std::move(amplitudes)), labels_(std::move(basis_labels)) {
    if (amplitudes_.empty()) throw std::invalid_argument("StateVector: empty");
    require_finite(amplitudes_, "StateVector");
    if (labels_.empty()) labels_ = default_labels(amplitudes_.size());
    if (labels_.size() != amplitudes_.size()) {
        throw std::invalid_argument("StateVector: label count does not match dimension");
    }
}

double StateVector::norm_squared() const {
    double sum = 0.0;
    for (const auto& a : amplitudes_) sum += std::norm(a);
    return sum;
}

bool StateVector::is_normalized(double tol) const {
    return std::abs(norm_squared() - 1.0) <= tol;
}

std::size_t StateVector::index_of(const std::string& label) const {
    auto it = std::find(labels_.begin(), labels_.end(), label);
    return static_cast<std::size_t>(it - labels_.begin());
}

// ---------------------------------------------------------------------------
// Operator

Operator::Operator(std::size_t dim, std::vector<Complex> entries)
    : dim_(dim), entries_(std::move(entries)) {
    if (dim_ == 0) throw std::invalid_argument("Operator: zero dimension");
    if (entries_.size() != dim_ * dim_) {
        throw std::invalid_argument("Operator: entry count is not dim*dim");
    }
    require_finite(entries_, "Operator");
}

Operator Operator::identity(std::size_t dim) {
    std::vector<Complex> e(dim * dim);
    for (std::size_t i = 0; i < dim; ++i) e[i * dim + i] = 1.0;
    return Operator(dim, std::move(e));
}

Operator Operator::from_rows(std::initializer_list<std::initializer_list<Complex>> rows) {
    const std::size_t n = rows.size();
    std::vector<Complex> e;
    e.reserve(n * n);
    for (const auto& row : rows) {
        if (row.size() != n) throw std::invalid_argument("Operator::from_rows: not square");
        e.insert(e.end(), row.begin(), row.end());
    }
    return Operator(n, std::move(e));
}

bool Operator::is_unitary(double tol) const {
    const auto prod = multiply(dim_, entries_, adjoint_entries(dim_, entries_));
    for (std::size_t i = 0; i < dim_; ++i) {
        for (std::size_t j = 0; j < dim_; ++j) {
            const Complex expected = (i == j) ? 1.0 : 0.0;
            if (std::abs(prod[i * dim_ + j] - expected) > tol) return false;
        }
    }
    return true;
}

Operator adjoint(const Operator& op) {
    return Operator(op.dim(), adjoint_entries(op.dim(), op.entries()));
}

Operator operator*(const Operator& a, const Operator& b) {
    require_same_dim(a.dim(), b.dim(), "operator product");
    return Operator(a.dim(), multiply(a.dim(), a.entries(), b.entries()));
}

Operator operator+(const Operator& a, const Operator& b) {
    require_same_dim(a.dim(), b.dim(), "operator sum");
    std::vector<Complex> e(a.entries().begin(), a.entries().end());
    for (std::size_t i = 0; i < e.size(); ++i) e[i] += b.entries()[i];
    return Operator(a.dim(), std::move(e));
}

Operator operator*(Complex scale, const Operator& op) {
    std::vector<Complex> e(op.entries().begin(), op.entries().end());
    for (auto& z : e) z *= scale;
    return Operator(op.dim(), std::move(e));
}

double max_abs_difference(const Operator& a, const Operator& b) {
    require_same_dim(a.dim(), b.dim(), "max_abs_difference");
    double worst = 0.0;
    for (std::size_t i = 0; i < a.entries().size(); ++i) {
        worst = std::max(worst, std::abs(a.entries()[i] - b.entries()[i]));
    }
    return worst;
}

// ---------------------------------------------------------------------------
// DensityMatrix

DensityMatrix::DensityMatrix(std::size_t dim, std::vector<Complex> entries, NoCheck)
    : dim_(dim), entries_(std::move(entries)) {
    if (dim_ == 0) throw std::invalid_argument("DensityMatrix: zero dimension");
    if (entries_.size() != dim_ * dim_) {
        throw std::invalid_argument("DensityMatrix: entry count is not dim*dim");
    }
    require_finite(entries_, "DensityMatrix");
}

DensityMatrix::DensityMatrix(std::size_t dim, std::vector<Complex> entries)
    : DensityMatrix(dim, std::move(entries), NoCheck{}) {
    if (!is_hermitian()) throw std::invalid_argument("DensityMatrix: not Hermitian");
    const Complex tr = trace();
    if (std::abs(tr - 1.0) > kAlgebraTol) {
        std::ostringstream msg;
        msg << "DensityMatrix: trace " << tr.real() << " is not 1";
        throw std::invalid_argument(msg.str());
    }
    const auto eig = eigenvalues();
    if (eig.front() < -kEigenTol) {
        std::ostringstream msg;
        msg << "DensityMatrix: negative eigenvalue " << eig.front();
        throw std::invalid_argument(msg.str());
    }
}

DensityMatrix DensityMatrix::unchecked(std::size_t dim, std::vector<Complex> entries) {
    return DensityMatrix(dim, std::move(entries), NoCheck{});
}

Complex DensityMatrix::trace() const {
    Complex tr{};
    for (std::size_t i = 0; i < dim_; ++i) tr += (*this)(i, i);
    return tr;
}

bool DensityMatrix::is_hermitian(double tol) const { return hermitian(dim_, entries_, tol); }

std::vector<double> DensityMatrix::eigenvalues() const {
    return hermitian_eigenvalues(dim_, entries_);
}

DensityMatrix convex_combination(const DensityMatrix& a, const DensityMatrix& b, double weight) {
    require_same_dim(a.dim(), b.dim(), "convex_combination");
    if (!(weight >= 0.0 && weight <= 1.0)) {
        throw std::domain_error("convex_combination: weight outside [0, 1]");
    }
    std::vector<Complex> e(a.entries().size());
    for (std::size_t i = 0; i < e.size(); ++i) {
        e[i] = weight * a.entries()[i] + (1.0 - weight) * b.entries()[i];
    }
    return DensityMatrix(a.dim(), std::move(e));
}

std::vector<double> hermitian_eigenvalues(std::size_t dim, std::span<const Complex> entries) {
    if (entries.size() != dim * dim) {
        throw std::invalid_argument("hermitian_eigenvalues: entry count is not dim*dim");
    }
    // H = A + iB embeds as the real symmetric [[A, -B], [B, A]], whose
    // spectrum is that of H with every eigenvalue doubled.
    const std::size_t n2 = 2 * dim;
    std::vector<double> m(n2 * n2);
    for (std::size_t i = 0; i < dim; ++i) {
        for (std::size_t j = 0; j < dim; ++j) {
            // Symmetrize to absorb roundoff-level non-Hermiticity.
            const Complex h = 0.5 * (entries[i * dim + j] + std::conj(entries[j * dim + i]));
            m[i * n2 + j] = h.real();
            m[(i + dim) * n2 + (j + dim)] = h.real();
            m[i * n2 + (j + dim)] = -h.imag();
            m[(i + dim) * n2 + j] = h.imag();
        }
    }
    const auto doubled = symmetric_eigenvalues(n2, std::move(m));
    std::vector<double> eig(dim);
    for (std::size_t i = 0; i < dim; ++i) eig[i] = 0.5 * (doubled[2 * i] + doubled[2 * i + 1]);
    return eig;
}

// ---------------------------------------------------------------------------
// Free operations

StateVector tensor(const StateVector& a, const StateVector& b) {
    const std::size_t n = checked_product_dim(a.dim(), b.dim());
    std::vector<Complex> amps(n);
    std::vector<std::string> labels(n);
    for (std::size_t i = 0; i < a.dim(); ++i) {
        for (std::size_t j = 0; j < b.dim(); ++j) {
            amps[i * b.dim() + j] = a[i] * b[j];
            labels[i * b.dim() + j] = a.basis_labels()[i] + "⊗" + b.basis_labels()[j];
        }
    }
    return StateVector(std::move(amps), std::move(labels));
}

Operator tensor(const Operator& a, const Operator& b) {
    const std::size_t n = checked_product_dim(a.dim(), b.dim());
    const std::size_t nb = b.dim();
    std::vector<Complex> e(n * n);
    for (std::size_t ia = 0; ia < a.dim(); ++ia) {
        for (std::size_t ja = 0; ja < a.dim(); ++ja) {
            const Complex s = a(ia, ja);
            if (s == Complex{}) continue;
            for (std::size_t ib = 0; ib < nb; ++ib) {
                for (std::size_t jb = 0; jb < nb; ++jb) {
                    e[(ia * nb + ib) * n + (ja * nb + jb)] = s * b(ib, jb);
                }
            }
        }
    }
    return Operator(n, std::move(e));
}

StateVector apply(const Operator& op, const StateVector& v) {
    require_same_dim(op.dim(), v.dim(), "apply");
    const std::size_t n = v.dim();
    std::vector<Complex> out(n);
    for (std::size_t i = 0; i < n; ++i) {
        Complex sum{};
        for (std::size_t j = 0; j < n; ++j) sum += op(i, j) * v[j];
        out[i] = sum;
    }
    return StateVector(std::move(out), v.basis_labels());
}

Complex inner_product(const StateVector& a, const StateVector& b) {
    require_same_dim(a.dim(), b.dim(), "inner_product");
    Complex sum{};
    for (std::size_t i = 0; i < a.dim(); ++i) sum += std::conj(a[i]) * b[i];
    return sum;
}

bool equal_up_to_phase(const StateVector& a, const StateVector& b, double tol) {
    return std::abs(std::abs(inner_product(a, b)) - 1.0) <= tol;
}

DensityMatrix outer(const StateVector& v) {
    if (!v.is_normalized()) throw std::invalid_argument("outer: state is not normalized");
    const std::size_t n = v.dim();
    std::vector<Complex> e(n * n);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) e[i * n + j] = v[i] * std::conj(v[j]);
    }
    return DensityMatrix(n, std::move(e));
}

DensityMatrix conjugate_evolve(const DensityMatrix& rho, const Operator& op) {
    require_same_dim(rho.dim(), op.dim(), "conjugate_evolve");
    const std::size_t n = rho.dim();
    auto e = multiply(n, multiply(n, op.entries(), rho.entries()),
                      adjoint_entries(n, op.entries()));
    if (!op.is_unitary()) {
        warn("conjugate_evolve: operator is not unitary; result is not validated");
        return DensityMatrix::unchecked(n, std::move(e));
    }
    // Restore exact Hermiticity lost to roundoff.
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i; j < n; ++j) {
            const Complex h = 0.5 * (e[i * n + j] + std::conj(e[j * n + i]));
            e[i * n + j] = h;
            e[j * n + i] = std::conj(h);
        }
    }
    return DensityMatrix::unchecked(n, std::move(e));
}

double trace_product(const DensityMatrix& a, const DensityMatrix& b) {
    require_same_dim(a.dim(), b.dim(), "trace_product");
    const std::size_t n = a.dim();
    Complex sum{};
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t k = 0; k < n; ++k) sum += a(i, k) * b(k, i);
    }
    if (std::abs(sum.imag()) >= 1e-10) {
        throw std::logic_error("trace_product: imaginary part exceeds 1e-10");
    }
    return sum.real();
}

}  // namespace hom
