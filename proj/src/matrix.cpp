#include "dwellcert/matrix.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>

namespace dwellcert {

Matrix::Matrix(std::initializer_list<std::initializer_list<double>> init) {
    rows_ = init.size();
    cols_ = init.begin()->size();
    a_.reserve(rows_ * cols_);
    for (const auto& row : init) {
        if (row.size() != cols_) throw std::invalid_argument("ragged matrix initializer");
        a_.insert(a_.end(), row.begin(), row.end());
    }
}

Matrix Matrix::identity(std::size_t n) {
    Matrix m(n, n);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
    return m;
}

Matrix Matrix::transposed() const {
    Matrix t(cols_, rows_);
    for (std::size_t i = 0; i < rows_; ++i)
        for (std::size_t j = 0; j < cols_; ++j) t(j, i) = (*this)(i, j);
    return t;
}

double Matrix::norm1() const {
    double best = 0.0;
    for (std::size_t j = 0; j < cols_; ++j) {
        double s = 0.0;
        for (std::size_t i = 0; i < rows_; ++i) s += std::abs((*this)(i, j));
        best = std::max(best, s);
    }
    return best;
}

double Matrix::norm_inf() const {
    double best = 0.0;
    for (std::size_t i = 0; i < rows_; ++i) {
        double s = 0.0;
        for (std::size_t j = 0; j < cols_; ++j) s += std::abs((*this)(i, j));
        best = std::max(best, s);
    }
    return best;
}

double Matrix::max_abs() const {
    double best = 0.0;
    for (double v : a_) best = std::max(best, std::abs(v));
    return best;
}

double Matrix::frobenius() const {
    double s = 0.0;
    for (double v : a_) s += v * v;
    return std::sqrt(s);
}

Matrix& Matrix::operator+=(const Matrix& o) {
    for (std::size_t k = 0; k < a_.size(); ++k) a_[k] += o.a_[k];
    return *this;
}

Matrix& Matrix::operator-=(const Matrix& o) {
    for (std::size_t k = 0; k < a_.size(); ++k) a_[k] -= o.a_[k];
    return *this;
}

Matrix& Matrix::operator*=(double s) {
    for (double& v : a_) v *= s;
    return *this;
}

Matrix operator+(Matrix a, const Matrix& b) { return a += b; }
Matrix operator-(Matrix a, const Matrix& b) { return a -= b; }
Matrix operator*(double s, Matrix a) { return a *= s; }

Matrix operator*(const Matrix& a, const Matrix& b) {
    if (a.cols() != b.rows()) throw std::invalid_argument("matrix product shape mismatch");
    Matrix c(a.rows(), b.cols());
    for (std::size_t i = 0; i < a.rows(); ++i)
        for (std::size_t k = 0; k < a.cols(); ++k) {
            const double aik = a(i, k);
            if (aik == 0.0) continue;
            for (std::size_t j = 0; j < b.cols(); ++j) c(i, j) += aik * b(k, j);
        }
    return c;
}

SymMatrix SymMatrix::identity(std::size_t n) {
    SymMatrix s(n);
    for (std::size_t i = 0; i < n; ++i) s.set(i, i, 1.0);
    return s;
}

SymMatrix SymMatrix::from(const Matrix& m, double asym_tol) {
    if (!m.square()) throw std::invalid_argument("SymMatrix::from needs a square matrix");
    const double scale = 1.0 + m.max_abs();
    SymMatrix s(m.rows());
    for (std::size_t i = 0; i < m.rows(); ++i)
        for (std::size_t j = i; j < m.cols(); ++j) {
            if (std::abs(m(i, j) - m(j, i)) > asym_tol * scale)
                throw std::invalid_argument("matrix is not symmetric");
            s.set(i, j, 0.5 * (m(i, j) + m(j, i)));
        }
    return s;
}

SymMatrix SymMatrix::sym_part(const Matrix& m) {
    if (!m.square()) throw std::invalid_argument("sym_part needs a square matrix");
    SymMatrix s(m.rows());
    for (std::size_t i = 0; i < m.rows(); ++i)
        for (std::size_t j = i; j < m.cols(); ++j) s.set(i, j, 0.5 * (m(i, j) + m(j, i)));
    return s;
}

Matrix SymMatrix::to_matrix() const {
    Matrix m(dim_, dim_);
    for (std::size_t i = 0; i < dim_; ++i)
        for (std::size_t j = 0; j < dim_; ++j) m(i, j) = (*this)(i, j);
    return m;
}

double SymMatrix::max_abs() const {
    double best = 0.0;
    for (double v : a_) best = std::max(best, std::abs(v));
    return best;
}

SymMatrix& SymMatrix::operator+=(const SymMatrix& o) {
    for (std::size_t k = 0; k < a_.size(); ++k) a_[k] += o.a_[k];
    return *this;
}

SymMatrix& SymMatrix::operator-=(const SymMatrix& o) {
    for (std::size_t k = 0; k < a_.size(); ++k) a_[k] -= o.a_[k];
    return *this;
}

SymMatrix& SymMatrix::operator*=(double s) {
    for (double& v : a_) v *= s;
    return *this;
}

SymMatrix operator+(SymMatrix a, const SymMatrix& b) { return a += b; }
SymMatrix operator-(SymMatrix a, const SymMatrix& b) { return a -= b; }
SymMatrix operator*(double s, SymMatrix a) { return a *= s; }

Matrix lu_solve(Matrix a, Matrix b) {
    if (!a.square() || a.rows() != b.rows())
        throw std::invalid_argument("lu_solve shape mismatch");
    const std::size_t n = a.rows();
    std::vector<std::size_t> piv(n);
    for (std::size_t k = 0; k < n; ++k) {
        std::size_t p = k;
        for (std::size_t i = k + 1; i < n; ++i)
            if (std::abs(a(i, k)) > std::abs(a(p, k))) p = i;
        piv[k] = p;
        if (p != k)
            for (std::size_t j = 0; j < n; ++j) std::swap(a(k, j), a(p, j));
        if (a(k, k) == 0.0) throw std::runtime_error("lu_solve: singular matrix");
        for (std::size_t i = k + 1; i < n; ++i) {
            a(i, k) /= a(k, k);
            const double lik = a(i, k);
            for (std::size_t j = k + 1; j < n; ++j) a(i, j) -= lik * a(k, j);
        }
    }
    for (std::size_t k = 0; k < n; ++k)
        if (piv[k] != k)
            for (std::size_t j = 0; j < b.cols(); ++j) std::swap(b(k, j), b(piv[k], j));
    for (std::size_t k = 0; k < n; ++k)
        for (std::size_t i = k + 1; i < n; ++i) {
            const double lik = a(i, k);
            for (std::size_t j = 0; j < b.cols(); ++j) b(i, j) -= lik * b(k, j);
        }
    for (std::size_t k = n; k-- > 0;) {
        for (std::size_t j = 0; j < b.cols(); ++j) b(k, j) /= a(k, k);
        for (std::size_t i = 0; i < k; ++i) {
            const double uik = a(i, k);
            for (std::size_t j = 0; j < b.cols(); ++j) b(i, j) -= uik * b(k, j);
        }
    }
    return b;
}

Matrix expm(const Matrix& m, double t) {
    if (!m.square()) throw std::invalid_argument("expm needs a square matrix");
    if (!std::isfinite(t)) throw std::invalid_argument("expm: non-finite time");
    const std::size_t n = m.rows();

    Matrix a = t * m;
    // Order-13 Pade is accurate up to this 1-norm (Higham 2005); scale down by
    // powers of two beyond it and square back afterwards.
    const double theta13 = 5.371920351148152;
    const double nrm = a.norm1();
    int squarings = 0;
    if (nrm > theta13) {
        squarings = static_cast<int>(std::ceil(std::log2(nrm / theta13)));
        a *= std::ldexp(1.0, -squarings);
    }

    static const double b[] = {64764752532480000.0, 32382376266240000.0, 7771770303897600.0,
                               1187353796428800.0,  129060195264000.0,   10559470521600.0,
                               670442572800.0,      33522128640.0,       1323241920.0,
                               40840800.0,          960960.0,            16380.0,
                               182.0,               1.0};
    const Matrix ident = Matrix::identity(n);
    const Matrix a2 = a * a;
    const Matrix a4 = a2 * a2;
    const Matrix a6 = a4 * a2;
    Matrix u = a * (a6 * (b[13] * a6 + b[11] * a4 + b[9] * a2) + b[7] * a6 + b[5] * a4 +
                    b[3] * a2 + b[1] * ident);
    Matrix v = a6 * (b[12] * a6 + b[10] * a4 + b[8] * a2) + b[6] * a6 + b[4] * a4 + b[2] * a2 +
               b[0] * ident;

    Matrix r = lu_solve(v - u, v + u);
    for (int s = 0; s < squarings; ++s) r = r * r;
    return r;
}

namespace {

// Cyclic Jacobi; plenty for the dimensions this library sees.
EigResult jacobi_eig(const SymMatrix& s, bool want_vectors) {
    const std::size_t n = s.dim();
    Matrix a = s.to_matrix();
    Matrix q = want_vectors ? Matrix::identity(n) : Matrix();

    for (int sweep = 0; sweep < 64; ++sweep) {
        double off = 0.0;
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = i + 1; j < n; ++j) off += a(i, j) * a(i, j);
        if (off <= 1e-300) break;
        double scale = 0.0;
        for (std::size_t i = 0; i < n; ++i) scale = std::max(scale, std::abs(a(i, i)));
        if (std::sqrt(off) <= 1e-16 * (1.0 + scale) * static_cast<double>(n)) break;

        for (std::size_t p = 0; p < n; ++p)
            for (std::size_t qi = p + 1; qi < n; ++qi) {
                const double apq = a(p, qi);
                if (apq == 0.0) continue;
                const double app = a(p, p), aqq = a(qi, qi);
                if (std::abs(apq) <= 1e-18 * (std::abs(app) + std::abs(aqq) + 1e-300)) {
                    a(p, qi) = a(qi, p) = 0.0;
                    continue;
                }
                const double tau = (aqq - app) / (2.0 * apq);
                const double tt = (tau >= 0.0)
                                      ? 1.0 / (tau + std::sqrt(1.0 + tau * tau))
                                      : 1.0 / (tau - std::sqrt(1.0 + tau * tau));
                const double c = 1.0 / std::sqrt(1.0 + tt * tt);
                const double sn = tt * c;
                for (std::size_t k = 0; k < n; ++k) {
                    const double akp = a(k, p), akq = a(k, qi);
                    a(k, p) = c * akp - sn * akq;
                    a(k, qi) = sn * akp + c * akq;
                }
                for (std::size_t k = 0; k < n; ++k) {
                    const double apk = a(p, k), aqk = a(qi, k);
                    a(p, k) = c * apk - sn * aqk;
                    a(qi, k) = sn * apk + c * aqk;
                }
                if (want_vectors)
                    for (std::size_t k = 0; k < n; ++k) {
                        const double qkp = q(k, p), qkq = q(k, qi);
                        q(k, p) = c * qkp - sn * qkq;
                        q(k, qi) = sn * qkp + c * qkq;
                    }
            }
    }

    std::vector<std::size_t> order(n);
    for (std::size_t i = 0; i < n; ++i) order[i] = i;
    std::sort(order.begin(), order.end(),
              [&](std::size_t x, std::size_t y) { return a(x, x) < a(y, y); });

    EigResult r;
    r.values.resize(n);
    for (std::size_t i = 0; i < n; ++i) r.values[i] = a(order[i], order[i]);
    if (want_vectors) {
        r.vectors = Matrix(n, n);
        for (std::size_t j = 0; j < n; ++j)
            for (std::size_t i = 0; i < n; ++i) r.vectors(i, j) = q(i, order[j]);
    }
    return r;
}

}  // namespace

std::vector<double> sym_eig(const SymMatrix& s) { return jacobi_eig(s, false).values; }

EigResult sym_eig_full(const SymMatrix& s) { return jacobi_eig(s, true); }

std::optional<Matrix> cholesky(const SymMatrix& s) {
    const std::size_t n = s.dim();
    Matrix l(n, n);
    for (std::size_t j = 0; j < n; ++j) {
        double d = s(j, j);
        for (std::size_t k = 0; k < j; ++k) d -= l(j, k) * l(j, k);
        if (!(d > 0.0)) return std::nullopt;
        l(j, j) = std::sqrt(d);
        for (std::size_t i = j + 1; i < n; ++i) {
            double v = s(i, j);
            for (std::size_t k = 0; k < j; ++k) v -= l(i, k) * l(j, k);
            l(i, j) = v / l(j, j);
        }
    }
    return l;
}

bool is_pd(const SymMatrix& s, double tol) {
    if (tol < 0.0) throw std::invalid_argument("is_pd: tol must be >= 0");
    SymMatrix shifted = s;
    for (std::size_t i = 0; i < s.dim(); ++i) shifted.add(i, i, -tol);
    return cholesky(shifted).has_value();
}

namespace {

// Francis double-shift QR on an upper Hessenberg matrix; eigenvalue moduli only.
// Classic hqr scheme.
std::vector<double> hessenberg_qr_moduli(Matrix h) {
    const std::size_t n = h.rows();
    std::vector<double> mods;
    mods.reserve(n);

    auto norm = h.max_abs() + 1e-300;
    int nn = static_cast<int>(n) - 1;
    int total_iters = 0;
    const int cap = 40 * static_cast<int>(n) + 100;

    while (nn >= 0) {
        int its = 0;
        int l;
        for (;;) {
            for (l = nn; l >= 1; --l) {
                const double s = std::abs(h(l - 1, l - 1)) + std::abs(h(l, l));
                if (std::abs(h(l, l - 1)) <= 1e-15 * (s + norm * 1e-3)) {
                    h(l, l - 1) = 0.0;
                    break;
                }
            }
            if (l == nn) {  // 1x1 block
                mods.push_back(std::abs(h(nn, nn)));
                --nn;
                break;
            }
            if (l == nn - 1) {  // 2x2 block
                const double p = 0.5 * (h(nn - 1, nn - 1) - h(nn, nn));
                const double det = p * p + h(nn, nn - 1) * h(nn - 1, nn);
                const double tr2 = h(nn, nn) + p;  // midpoint
                if (det >= 0.0) {
                    const double z = std::sqrt(det);
                    const double s = (p >= 0.0) ? tr2 + z : tr2 - z;
                    mods.push_back(std::abs(s));
                    // second root via product to dodge cancellation
                    const double prod = h(nn - 1, nn - 1) * h(nn, nn) - h(nn, nn - 1) * h(nn - 1, nn);
                    mods.push_back(s != 0.0 ? std::abs(prod / s) : 0.0);
                } else {
                    const double mod = std::sqrt(tr2 * tr2 + (-det));
                    mods.push_back(mod);
                    mods.push_back(mod);
                }
                nn -= 2;
                break;
            }
            if (++total_iters > cap)
                throw NonConvergence("spectral_radius: QR iteration did not converge");
            // Francis double shift on rows l..nn
            double x = h(nn, nn);
            double y = h(nn - 1, nn - 1);
            double w = h(nn, nn - 1) * h(nn - 1, nn);
            double p = 0, q = 0, r = 0;
            if (its == 10 || its == 20) {  // exceptional shift
                const double t = std::abs(h(nn, nn - 1)) + std::abs(h(nn - 1, nn - 2));
                x = y = 0.75 * t + h(nn, nn);
                w = -0.4375 * t * t;
            }
            ++its;
            int m;
            for (m = nn - 2; m >= l; --m) {
                const double z = h(m, m);
                const double rr = x - z;
                const double ss = y - z;
                p = (rr * ss - w) / h(m + 1, m) + h(m, m + 1);
                q = h(m + 1, m + 1) - z - rr - ss;
                r = h(m + 2, m + 1);
                const double s = std::abs(p) + std::abs(q) + std::abs(r);
                p /= s;
                q /= s;
                r /= s;
                if (m == l) break;
                const double u = std::abs(h(m, m - 1)) * (std::abs(q) + std::abs(r));
                const double v = std::abs(p) * (std::abs(h(m - 1, m - 1)) + std::abs(h(m, m)) +
                                                std::abs(h(m + 1, m + 1)));
                if (u <= 1e-16 * v) break;
            }
            for (int i = m + 2; i <= nn; ++i) h(i, i - 2) = 0.0;
            for (int i = m + 3; i <= nn; ++i) h(i, i - 3) = 0.0;
            for (int k = m; k <= nn - 1; ++k) {
                if (k != m) {
                    p = h(k, k - 1);
                    q = h(k + 1, k - 1);
                    r = (k != nn - 1) ? h(k + 2, k - 1) : 0.0;
                    x = std::abs(p) + std::abs(q) + std::abs(r);
                    if (x == 0.0) continue;
                    p /= x;
                    q /= x;
                    r /= x;
                }
                double s = std::sqrt(p * p + q * q + r * r);
                if (p < 0.0) s = -s;
                if (s == 0.0) continue;
                if (k != m)
                    h(k, k - 1) = -s * x;
                else if (l != m)
                    h(k, k - 1) = -h(k, k - 1);
                p += s;
                x = p / s;
                y = q / s;
                const double zz = r / s;
                q /= p;
                r /= p;
                for (int j = k; j <= nn; ++j) {  // row transform
                    double pp = h(k, j) + q * h(k + 1, j);
                    if (k != nn - 1) {
                        pp += r * h(k + 2, j);
                        h(k + 2, j) -= pp * zz;
                    }
                    h(k + 1, j) -= pp * y;
                    h(k, j) -= pp * x;
                }
                const int mmin = (nn < k + 3) ? nn : k + 3;
                for (int i = l; i <= mmin; ++i) {  // column transform
                    double pp = x * h(i, k) + y * h(i, k + 1);
                    if (k != nn - 1) {
                        pp += zz * h(i, k + 2);
                        h(i, k + 2) -= pp * r;
                    }
                    h(i, k + 1) -= pp * q;
                    h(i, k) -= pp;
                }
            }
        }
    }
    return mods;
}

Matrix hessenberg(Matrix a) {
    const std::size_t n = a.rows();
    for (std::size_t k = 0; k + 2 < n; ++k) {
        double scale = 0.0;
        for (std::size_t i = k + 1; i < n; ++i) scale += std::abs(a(i, k));
        if (scale == 0.0) continue;
        std::vector<double> v(n, 0.0);
        double alpha = 0.0;
        for (std::size_t i = k + 1; i < n; ++i) {
            v[i] = a(i, k) / scale;
            alpha += v[i] * v[i];
        }
        alpha = std::sqrt(alpha);
        if (v[k + 1] < 0.0) alpha = -alpha;
        v[k + 1] += alpha;
        const double beta = alpha * v[k + 1];
        if (beta == 0.0) continue;
        // A <- (I - v v^T / beta) A (I - v v^T / beta)
        for (std::size_t j = 0; j < n; ++j) {
            double s = 0.0;
            for (std::size_t i = k + 1; i < n; ++i) s += v[i] * a(i, j);
            s /= beta;
            for (std::size_t i = k + 1; i < n; ++i) a(i, j) -= s * v[i];
        }
        for (std::size_t i = 0; i < n; ++i) {
            double s = 0.0;
            for (std::size_t j = k + 1; j < n; ++j) s += a(i, j) * v[j];
            s /= beta;
            for (std::size_t j = k + 1; j < n; ++j) a(i, j) -= s * v[j];
        }
        a(k + 1, k) = -alpha * scale;
        for (std::size_t i = k + 2; i < n; ++i) a(i, k) = 0.0;
    }
    return a;
}

}  // namespace

double spectral_radius(const Matrix& m) {
    if (!m.square()) throw std::invalid_argument("spectral_radius needs a square matrix");
    const std::size_t n = m.rows();
    if (n == 1) return std::abs(m(0, 0));
    if (n == 2) {
        const double tr = m(0, 0) + m(1, 1);
        const double det = m(0, 0) * m(1, 1) - m(0, 1) * m(1, 0);
        const double disc = tr * tr - 4.0 * det;
        if (disc >= 0.0) {
            const double z = std::sqrt(disc);
            return std::max(std::abs(0.5 * (tr + z)), std::abs(0.5 * (tr - z)));
        }
        return std::sqrt(det);
    }
    const auto mods = hessenberg_qr_moduli(hessenberg(m));
    return *std::max_element(mods.begin(), mods.end());
}

}  // namespace dwellcert
