#include "greenxva/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "greenxva/error.hpp"

namespace greenxva::linalg {

namespace {

double dot(const double* a, const double* b, int n) {
    double s = 0.0;
    for (int i = 0; i < n; ++i) s += a[i] * b[i];
    return s;
}

// Rows of a <- L^{-1} a for lower triangular l.
void forward_rows(const Matrix& l, Matrix& a) {
    const int n = a.size();
    for (int i = 0; i < n; ++i) {
        double* ai = a.row(i);
        const double* li = l.row(i);
        for (int j = 0; j < i; ++j) {
            const double f = li[j];
            if (f == 0.0) continue;
            const double* aj = a.row(j);
            for (int c = 0; c < n; ++c) ai[c] -= f * aj[c];
        }
        const double inv = 1.0 / li[i];
        for (int c = 0; c < n; ++c) ai[c] *= inv;
    }
}

Matrix transpose(const Matrix& a) {
    const int n = a.size();
    Matrix t(n);
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) t(j, i) = a(i, j);
    }
    return t;
}

}  // namespace

std::vector<double> multiply(const Matrix& a, const std::vector<double>& x) {
    std::vector<double> y(static_cast<std::size_t>(a.size()));
    for (int i = 0; i < a.size(); ++i) y[static_cast<std::size_t>(i)] = dot(a.row(i), x.data(), a.size());
    return y;
}

void cholesky(Matrix& a) {
    const int n = a.size();
    for (int j = 0; j < n; ++j) {
        double* aj = a.row(j);
        const double djj = aj[j] - dot(aj, aj, j);
        if (!(djj > 0.0)) throw LinearAlgebraError("cholesky: matrix is not positive definite");
        const double ljj = std::sqrt(djj);
        aj[j] = ljj;
        for (int i = j + 1; i < n; ++i) {
            double* ai = a.row(i);
            ai[j] = (ai[j] - dot(ai, aj, j)) / ljj;
        }
        for (int c = j + 1; c < n; ++c) aj[c] = 0.0;
    }
}

Tridiagonal::Tridiagonal(Matrix a) : v_(a.size()) {
    const int n = a.size();
    d_.assign(static_cast<std::size_t>(n), 0.0);
    e_.assign(static_cast<std::size_t>(std::max(n - 1, 0)), 0.0);
    beta_.assign(static_cast<std::size_t>(n), 0.0);
    std::vector<double> p(static_cast<std::size_t>(n));
    for (int k = 0; k + 2 < n; ++k) {
        // Reflector zeroing a(k+2..n-1, k); only the lower triangle is current.
        double* v = v_.row(k);
        double sigma = 0.0;
        for (int i = k + 1; i < n; ++i) {
            v[i] = a(i, k);
            sigma += v[i] * v[i];
        }
        const double x0 = v[k + 1];
        const double norm = std::sqrt(sigma);
        d_[static_cast<std::size_t>(k)] = a(k, k);
        if (norm == 0.0) {
            e_[static_cast<std::size_t>(k)] = 0.0;
            continue;
        }
        const double alpha = x0 > 0.0 ? -norm : norm;
        v[k + 1] = x0 - alpha;
        const double vnorm2 = sigma - x0 * x0 + v[k + 1] * v[k + 1];
        const double beta = 2.0 / vnorm2;
        beta_[static_cast<std::size_t>(k)] = beta;
        e_[static_cast<std::size_t>(k)] = alpha;
        // p = beta A v on the trailing block, using its lower triangle.
        for (int i = k + 1; i < n; ++i) p[static_cast<std::size_t>(i)] = 0.0;
        for (int i = k + 1; i < n; ++i) {
            const double* ai = a.row(i);
            double s = ai[i] * v[i];
            const double vi = v[i];
            for (int j = k + 1; j < i; ++j) {
                s += ai[j] * v[j];
                p[static_cast<std::size_t>(j)] += ai[j] * vi;
            }
            p[static_cast<std::size_t>(i)] += s;
        }
        double pv = 0.0;
        for (int i = k + 1; i < n; ++i) {
            p[static_cast<std::size_t>(i)] *= beta;
            pv += p[static_cast<std::size_t>(i)] * v[i];
        }
        const double c = 0.5 * beta * pv;
        for (int i = k + 1; i < n; ++i) p[static_cast<std::size_t>(i)] -= c * v[i];
        // A <- A - v w^T - w v^T on the lower triangle.
        for (int i = k + 1; i < n; ++i) {
            double* ai = a.row(i);
            const double vi = v[i];
            const double wi = p[static_cast<std::size_t>(i)];
            for (int j = k + 1; j <= i; ++j) ai[j] -= vi * p[static_cast<std::size_t>(j)] + wi * v[j];
        }
    }
    if (n >= 2) {
        d_[static_cast<std::size_t>(n - 2)] = a(n - 2, n - 2);
        e_[static_cast<std::size_t>(n - 2)] = a(n - 1, n - 2);
    }
    if (n >= 1) d_[static_cast<std::size_t>(n - 1)] = a(n - 1, n - 1);
}

void Tridiagonal::apply_q(std::vector<double>& x) const {
    const int n = v_.size();
    // Q = H_0 H_1 ... H_{n-3}
    for (int k = n - 3; k >= 0; --k) {
        const double beta = beta_[static_cast<std::size_t>(k)];
        if (beta == 0.0) continue;
        const double* v = v_.row(k);
        double s = 0.0;
        for (int i = k + 1; i < n; ++i) s += v[i] * x[static_cast<std::size_t>(i)];
        s *= beta;
        for (int i = k + 1; i < n; ++i) x[static_cast<std::size_t>(i)] -= s * v[i];
    }
}

std::vector<double> tridiagonal_eigenvalues(std::vector<double> d, std::vector<double> e) {
    const int n = static_cast<int>(d.size());
    e.resize(static_cast<std::size_t>(n), 0.0);
    for (int l = 0; l < n; ++l) {
        int iter = 0;
        int m;
        do {
            for (m = l; m < n - 1; ++m) {
                const double dd = std::abs(d[static_cast<std::size_t>(m)]) + std::abs(d[static_cast<std::size_t>(m + 1)]);
                if (std::abs(e[static_cast<std::size_t>(m)]) <= std::numeric_limits<double>::epsilon() * dd) break;
            }
            if (m != l) {
                if (++iter > 60) throw ConvergenceError("tridiagonal_eigenvalues: QL did not converge");
                const auto L = static_cast<std::size_t>(l);
                double g = (d[L + 1] - d[L]) / (2.0 * e[L]);
                double r = std::hypot(g, 1.0);
                g = d[static_cast<std::size_t>(m)] - d[L] + e[L] / (g + std::copysign(r, g));
                double s = 1.0, c = 1.0, p = 0.0;
                int i;
                for (i = m - 1; i >= l; --i) {
                    const auto I = static_cast<std::size_t>(i);
                    double f = s * e[I];
                    const double b = c * e[I];
                    r = std::hypot(f, g);
                    e[I + 1] = r;
                    if (r == 0.0) {
                        d[I + 1] -= p;
                        e[static_cast<std::size_t>(m)] = 0.0;
                        break;
                    }
                    s = f / r;
                    c = g / r;
                    g = d[I + 1] - p;
                    r = (d[I] - g) * s + 2.0 * c * b;
                    p = s * r;
                    d[I + 1] = g + p;
                    g = c * r - b;
                }
                if (r == 0.0 && i >= l) continue;
                d[L] -= p;
                e[L] = g;
                e[static_cast<std::size_t>(m)] = 0.0;
            }
        } while (m != l);
    }
    std::sort(d.begin(), d.end());
    return d;
}

std::vector<std::vector<double>> tridiagonal_eigenvectors(const std::vector<double>& d,
                                                          const std::vector<double>& e,
                                                          const std::vector<double>& lambda) {
    const int n = static_cast<int>(d.size());
    double tnorm = 0.0;
    for (int i = 0; i < n; ++i) {
        double r = std::abs(d[static_cast<std::size_t>(i)]);
        if (i > 0) r += std::abs(e[static_cast<std::size_t>(i - 1)]);
        if (i + 1 < n) r += std::abs(e[static_cast<std::size_t>(i)]);
        tnorm = std::max(tnorm, r);
    }
    const double eps = std::numeric_limits<double>::epsilon();
    const double cluster_tol = 1e-3 * tnorm;
    const auto N = static_cast<std::size_t>(n);
    std::vector<std::vector<double>> out;
    std::vector<double> lo(N), di(N), up(N), up2(N);
    std::vector<int> swapped(N);
    std::size_t cluster_start = 0;
    for (std::size_t k = 0; k < lambda.size(); ++k) {
        if (k > 0 && lambda[k] - lambda[k - 1] > cluster_tol) cluster_start = k;
        // Perturb coincident shifts so that LU differs between cluster members.
        const double shift = lambda[k] + static_cast<double>(k - cluster_start) * 10.0 * eps * tnorm;
        // LU of T - shift I with partial pivoting; U has two superdiagonals.
        for (std::size_t i = 0; i < N; ++i) {
            di[i] = d[i] - shift;
            up[i] = i + 1 < N ? e[i] : 0.0;
            lo[i] = i + 1 < N ? e[i] : 0.0;
            up2[i] = 0.0;
        }
        for (std::size_t i = 0; i + 1 < N; ++i) {
            if (std::abs(di[i]) >= std::abs(lo[i])) {
                swapped[i] = 0;
                if (di[i] == 0.0) di[i] = eps * tnorm;
                const double m = lo[i] / di[i];
                lo[i] = m;
                di[i + 1] -= m * up[i];
            } else {
                swapped[i] = 1;
                const double m = di[i] / lo[i];
                di[i] = lo[i];
                lo[i] = m;
                const double t = up[i];
                up[i] = di[i + 1];
                di[i + 1] = t - m * di[i + 1];
                if (i + 2 < N) {
                    up2[i] = up[i + 1];
                    up[i + 1] = -m * up[i + 1];
                }
            }
        }
        if (N > 0 && di[N - 1] == 0.0) di[N - 1] = eps * tnorm;

        std::vector<double> x(N);
        for (std::size_t i = 0; i < N; ++i) x[i] = std::sin(1.0 + 0.618 * static_cast<double>(i) + static_cast<double>(k));
        for (int it = 0; it < 5; ++it) {
            // Forward: apply the row operations to x.
            for (std::size_t i = 0; i + 1 < N; ++i) {
                if (swapped[i] != 0) std::swap(x[i], x[i + 1]);
                x[i + 1] -= lo[i] * x[i];
            }
            for (std::size_t ii = N; ii-- > 0;) {
                double s = x[ii];
                if (ii + 1 < N) s -= up[ii] * x[ii + 1];
                if (ii + 2 < N) s -= up2[ii] * x[ii + 2];
                x[ii] = s / di[ii];
            }
            for (std::size_t j = cluster_start; j < k; ++j) {
                const double p = dot(out[j].data(), x.data(), n);
                for (std::size_t i = 0; i < N; ++i) x[i] -= p * out[j][i];
            }
            const double nrm = std::sqrt(dot(x.data(), x.data(), n));
            for (auto& v : x) v /= nrm;
        }
        out.push_back(std::move(x));
    }
    return out;
}

EigenPairs generalized_eigen(const Matrix& k, const Matrix& m, int count) {
    const int n = k.size();
    if (m.size() != n) throw LinearAlgebraError("generalized_eigen: size mismatch");
    if (count < 1 || count > n) throw LinearAlgebraError("generalized_eigen: bad eigenpair count");
    Matrix l = m;
    cholesky(l);
    // C = L^{-1} K L^{-T}, computed as (L^{-1} (L^{-1} K)^T).
    Matrix y = k;
    forward_rows(l, y);
    Matrix c = transpose(y);
    forward_rows(l, c);
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < i; ++j) {
            const double s = 0.5 * (c(i, j) + c(j, i));
            c(i, j) = s;
            c(j, i) = s;
        }
    }
    const Tridiagonal tri(std::move(c));
    auto all = tridiagonal_eigenvalues(tri.diagonal(), tri.off_diagonal());
    all.resize(static_cast<std::size_t>(count));
    auto z = tridiagonal_eigenvectors(tri.diagonal(), tri.off_diagonal(), all);

    EigenPairs out;
    out.values = all;
    for (auto& v : z) {
        tri.apply_q(v);
        // Psi = L^{-T} v
        for (int i = n - 1; i >= 0; --i) {
            const double* li = l.row(i);
            const double xi = v[static_cast<std::size_t>(i)] / li[i];
            v[static_cast<std::size_t>(i)] = xi;
            for (int j = 0; j < i; ++j) v[static_cast<std::size_t>(j)] -= li[j] * xi;
        }
        out.vectors.push_back(std::move(v));
    }
    // M-orthonormalize (modified Gram-Schmidt) to clean up rounding.
    for (std::size_t a = 0; a < out.vectors.size(); ++a) {
        auto& va = out.vectors[a];
        for (int pass = 0; pass < 2; ++pass) {
            const auto mva = multiply(m, va);
            for (std::size_t b = 0; b < a; ++b) {
                const double p = dot(out.vectors[b].data(), mva.data(), n);
                if (std::abs(p) < 1e-14) continue;
                for (int i = 0; i < n; ++i) va[static_cast<std::size_t>(i)] -= p * out.vectors[b][static_cast<std::size_t>(i)];
            }
            const auto mvb = multiply(m, va);
            const double nrm = std::sqrt(dot(va.data(), mvb.data(), n));
            for (auto& x : va) x /= nrm;
        }
    }
    return out;
}

}  // namespace greenxva::linalg
