#pragma once

// Dense kernels for the small (n <= 10) matrices this toolkit works with:
// matrix exponential, symmetric eigendecomposition, Cholesky definiteness
// tests and spectral radius.

#include <cstddef>
#include <initializer_list>
#include <optional>
#include <stdexcept>
#include <vector>

namespace dwellcert {

class Matrix {
public:
    Matrix() = default;
    Matrix(std::size_t rows, std::size_t cols)
        : rows_(rows), cols_(cols), a_(rows * cols, 0.0) {}
    Matrix(std::initializer_list<std::initializer_list<double>> init);

    static Matrix identity(std::size_t n);
    static Matrix zero(std::size_t rows, std::size_t cols) { return Matrix(rows, cols); }

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }
    bool square() const { return rows_ == cols_ && rows_ > 0; }

    double& operator()(std::size_t i, std::size_t j) { return a_[i * cols_ + j]; }
    double operator()(std::size_t i, std::size_t j) const { return a_[i * cols_ + j]; }

    Matrix transposed() const;
    double norm1() const;       // max column sum
    double norm_inf() const;    // max row sum
    double max_abs() const;
    double frobenius() const;

    Matrix& operator+=(const Matrix& o);
    Matrix& operator-=(const Matrix& o);
    Matrix& operator*=(double s);

    const std::vector<double>& data() const { return a_; }
    std::vector<double>& data() { return a_; }

private:
    std::size_t rows_ = 0, cols_ = 0;
    std::vector<double> a_;
};

Matrix operator+(Matrix a, const Matrix& b);
Matrix operator-(Matrix a, const Matrix& b);
Matrix operator*(const Matrix& a, const Matrix& b);
Matrix operator*(double s, Matrix a);

// Symmetric by construction: assignments mirror across the diagonal.
class SymMatrix {
public:
    SymMatrix() = default;
    explicit SymMatrix(std::size_t dim) : dim_(dim), a_(dim * dim, 0.0) {}

    static SymMatrix identity(std::size_t n);
    // Symmetrizes (M + M^T)/2; throws if the asymmetry exceeds tol * scale.
    static SymMatrix from(const Matrix& m, double asym_tol = 1e-9);
    static SymMatrix sym_part(const Matrix& m);

    std::size_t dim() const { return dim_; }
    double operator()(std::size_t i, std::size_t j) const { return a_[i * dim_ + j]; }
    void set(std::size_t i, std::size_t j, double v) {
        a_[i * dim_ + j] = v;
        a_[j * dim_ + i] = v;
    }
    void add(std::size_t i, std::size_t j, double v) { set(i, j, (*this)(i, j) + v); }

    Matrix to_matrix() const;
    double max_abs() const;

    SymMatrix& operator+=(const SymMatrix& o);
    SymMatrix& operator-=(const SymMatrix& o);
    SymMatrix& operator*=(double s);

private:
    std::size_t dim_ = 0;
    std::vector<double> a_;
};

SymMatrix operator+(SymMatrix a, const SymMatrix& b);
SymMatrix operator-(SymMatrix a, const SymMatrix& b);
SymMatrix operator*(double s, SymMatrix a);

struct EigResult {
    std::vector<double> values;  // ascending
    Matrix vectors;              // columns, same order
};

// e^{M t} by scaling-and-squaring with the order-13 Pade approximant.
Matrix expm(const Matrix& m, double t);

// Eigenvalues of a symmetric matrix, ascending.
std::vector<double> sym_eig(const SymMatrix& s);
EigResult sym_eig_full(const SymMatrix& s);

// Lower Cholesky factor, or nullopt if not positive definite.
std::optional<Matrix> cholesky(const SymMatrix& s);

// True iff S - tol*I admits a Cholesky factorization.
bool is_pd(const SymMatrix& s, double tol);

// Solve A X = B for general square A (partial-pivot LU).
Matrix lu_solve(Matrix a, Matrix b);

struct NonConvergence : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// max |lambda_i(M)|; closed form for dim <= 2, Hessenberg + shifted QR above.
// Throws NonConvergence if the QR iteration exceeds its cap.
double spectral_radius(const Matrix& m);

}  // namespace dwellcert
