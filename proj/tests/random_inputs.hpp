#pragma once
// Seeded random inputs for property tests.

#include <cmath>
#include <complex>
#include <random>
#include <vector>

#include "hom/linalg.hpp"

namespace hom::testing {

class RandomInputs {
  public:
    explicit RandomInputs(std::uint64_t seed) : engine_(seed) {}

    double uniform(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(engine_); }
    double gaussian() { return normal_(engine_); }
    Complex complex_gaussian() { return {gaussian(), gaussian()}; }

    std::vector<Complex> complex_vector(std::size_t n) {
        std::vector<Complex> v(n);
        for (auto& z : v) z = complex_gaussian();
        return v;
    }

    StateVector state(std::size_t dim) {
        auto v = complex_vector(dim);
        double norm = 0.0;
        for (const auto& z : v) norm += std::norm(z);
        for (auto& z : v) z /= std::sqrt(norm);
        return StateVector(v);
    }

    Operator matrix(std::size_t dim) { return Operator(dim, complex_vector(dim * dim)); }

    // Gram-Schmidt on the columns of a Gaussian matrix.
    Operator unitary(std::size_t dim) {
        std::vector<std::vector<Complex>> cols(dim);
        for (std::size_t c = 0; c < dim; ++c) {
            auto v = complex_vector(dim);
            for (std::size_t k = 0; k < c; ++k) {
                Complex proj = 0.0;
                for (std::size_t i = 0; i < dim; ++i) proj += std::conj(cols[k][i]) * v[i];
                for (std::size_t i = 0; i < dim; ++i) v[i] -= proj * cols[k][i];
            }
            double norm = 0.0;
            for (const auto& z : v) norm += std::norm(z);
            for (auto& z : v) z /= std::sqrt(norm);
            cols[c] = std::move(v);
        }
        std::vector<Complex> entries(dim * dim);
        for (std::size_t r = 0; r < dim; ++r)
            for (std::size_t c = 0; c < dim; ++c) entries[r * dim + c] = cols[c][r];
        return Operator(dim, entries);
    }

    // A A^dagger / Tr(A A^dagger): full-rank mixed state.
    DensityMatrix density(std::size_t dim) {
        const Operator a = matrix(dim);
        const Operator m = a * adjoint(a);
        Complex tr = 0.0;
        for (std::size_t i = 0; i < dim; ++i) tr += m(i, i);
        std::vector<Complex> e(m.entries().begin(), m.entries().end());
        for (auto& z : e) z /= tr.real();
        for (std::size_t i = 0; i < dim; ++i)
            for (std::size_t j = 0; j < i; ++j) e[i * dim + j] = std::conj(e[j * dim + i]);
        for (std::size_t i = 0; i < dim; ++i) e[i * dim + i] = e[i * dim + i].real();
        return DensityMatrix(dim, e);
    }

    std::mt19937_64& engine() { return engine_; }

  private:
    std::mt19937_64 engine_;
    std::normal_distribution<double> normal_{0.0, 1.0};
};

}  // namespace hom::testing
