#include "matrix.hpp"

#include <cmath>

#include "error.hpp"

namespace mgcn {

namespace {
void check(bool ok, const char* what) {
    if (!ok) throw ShapeError(what);
}
}  // namespace

Matrix matmul(const Matrix& a, const Matrix& b) {
    check(a.cols() == b.rows(), "matmul: inner dimensions differ");
    Matrix c(a.rows(), b.cols());
    const int m = a.rows(), k = a.cols(), n = b.cols();
    for (int i = 0; i < m; ++i) {
        const double* ai = a.row(i);
        double* ci = c.row(i);
        for (int p = 0; p < k; ++p) {
            const double av = ai[p];
            if (av == 0.0) continue;
            const double* bp = b.row(p);
            for (int j = 0; j < n; ++j) ci[j] += av * bp[j];
        }
    }
    return c;
}

Matrix matmul_nt(const Matrix& a, const Matrix& b) {
    check(a.cols() == b.cols(), "matmul_nt: inner dimensions differ");
    Matrix c(a.rows(), b.rows());
    const int m = a.rows(), k = a.cols(), n = b.rows();
    for (int i = 0; i < m; ++i) {
        const double* ai = a.row(i);
        double* ci = c.row(i);
        for (int j = 0; j < n; ++j) {
            const double* bj = b.row(j);
            double s = 0.0;
            for (int p = 0; p < k; ++p) s += ai[p] * bj[p];
            ci[j] = s;
        }
    }
    return c;
}

Matrix matmul_tn(const Matrix& a, const Matrix& b) {
    check(a.rows() == b.rows(), "matmul_tn: inner dimensions differ");
    Matrix c(a.cols(), b.cols());
    const int m = a.rows(), k = a.cols(), n = b.cols();
    for (int i = 0; i < m; ++i) {
        const double* ai = a.row(i);
        const double* bi = b.row(i);
        for (int p = 0; p < k; ++p) {
            const double av = ai[p];
            if (av == 0.0) continue;
            double* cp = c.row(p);
            for (int j = 0; j < n; ++j) cp[j] += av * bi[j];
        }
    }
    return c;
}

Matrix add(const Matrix& a, const Matrix& b) {
    check(a.same_shape(b), "add: shapes differ");
    Matrix c = a;
    add_inplace(c, b);
    return c;
}

void add_inplace(Matrix& a, const Matrix& b) {
    check(a.same_shape(b), "add_inplace: shapes differ");
    double* pa = a.data();
    const double* pb = b.data();
    for (std::size_t i = 0; i < a.size(); ++i) pa[i] += pb[i];
}

Matrix hadamard(const Matrix& a, const Matrix& b) {
    check(a.same_shape(b), "hadamard: shapes differ");
    Matrix c = a;
    double* pc = c.data();
    const double* pb = b.data();
    for (std::size_t i = 0; i < c.size(); ++i) pc[i] *= pb[i];
    return c;
}

Matrix scale(const Matrix& a, double s) {
    Matrix c = a;
    double* pc = c.data();
    for (std::size_t i = 0; i < c.size(); ++i) pc[i] *= s;
    return c;
}

bool all_finite(const Matrix& a) {
    const double* p = a.data();
    for (std::size_t i = 0; i < a.size(); ++i)
        if (!std::isfinite(p[i])) return false;
    return true;
}

}  // namespace mgcn
