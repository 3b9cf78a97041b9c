#pragma once

#include <cstddef>
#include <vector>

namespace greenxva::linalg {

// Dense row-major square matrix.
class Matrix {
public:
    Matrix() = default;
    explicit Matrix(int n) : n_(n), a_(static_cast<std::size_t>(n) * static_cast<std::size_t>(n), 0.0) {}

    [[nodiscard]] int size() const { return n_; }
    double& operator()(int i, int j) { return a_[index(i, j)]; }
    double operator()(int i, int j) const { return a_[index(i, j)]; }
    double* row(int i) { return a_.data() + index(i, 0); }
    [[nodiscard]] const double* row(int i) const { return a_.data() + index(i, 0); }

private:
    [[nodiscard]] std::size_t index(int i, int j) const {
        return static_cast<std::size_t>(i) * static_cast<std::size_t>(n_) + static_cast<std::size_t>(j);
    }
    int n_ = 0;
    std::vector<double> a_;
};

[[nodiscard]] std::vector<double> multiply(const Matrix& a, const std::vector<double>& x);

// Lower Cholesky factor, in place. Throws LinearAlgebraError if not positive definite.
void cholesky(Matrix& a);

// Householder reduction of a symmetric matrix to tridiagonal form. The
// reflectors are kept so eigenvectors of the tridiagonal matrix can be
// mapped back.
class Tridiagonal {
public:
    explicit Tridiagonal(Matrix a);

    [[nodiscard]] const std::vector<double>& diagonal() const { return d_; }
    [[nodiscard]] const std::vector<double>& off_diagonal() const { return e_; }
    // x <- Q x
    void apply_q(std::vector<double>& x) const;

private:
    Matrix v_;  // row k holds reflector k in entries k+1..n-1
    std::vector<double> beta_;
    std::vector<double> d_;
    std::vector<double> e_;
};

// All eigenvalues of the symmetric tridiagonal matrix (d, e), ascending, by
// implicit QL.
[[nodiscard]] std::vector<double> tridiagonal_eigenvalues(std::vector<double> d, std::vector<double> e);

// Eigenvectors of (d, e) for the given ascending eigenvalues by inverse
// iteration, orthogonalized within clusters.
[[nodiscard]] std::vector<std::vector<double>> tridiagonal_eigenvectors(
    const std::vector<double>& d, const std::vector<double>& e, const std::vector<double>& lambda);

struct EigenPairs {
    std::vector<double> values;
    std::vector<std::vector<double>> vectors;
};

// The k smallest eigenpairs of K x = lambda M x with M symmetric positive
// definite; vectors are M-orthonormal.
[[nodiscard]] EigenPairs generalized_eigen(const Matrix& k, const Matrix& m, int count);

}  // namespace greenxva::linalg
