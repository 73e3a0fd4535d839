#include "vislip/kernels.hpp"

#include <cmath>
#include <string>

namespace vislip {

std::string_view kernel_name(KernelType k) { return k == KernelType::linear ? "linear" : "rbf"; }

KernelType parse_kernel(std::string_view name) {
    if (name == "linear") return KernelType::linear;
    if (name == "rbf") return KernelType::rbf;
    throw ConfigError("unknown kernel '" + std::string(name) + "'");
}

double KernelSpec::operator()(std::span<const double> a, std::span<const double> b) const {
    double acc = 0.0;
    if (type == KernelType::linear) {
        for (std::size_t i = 0; i < a.size(); ++i) acc += a[i] * b[i];
        return acc;
    }
    for (std::size_t i = 0; i < a.size(); ++i) {
        const double d = a[i] - b[i];
        acc += d * d;
    }
    return std::exp(-gamma * acc);
}

Matrix gram_matrix(const Matrix& x, const KernelSpec& kernel) {
    const auto n = static_cast<long>(x.rows());
    Matrix k(x.rows(), x.rows());
#pragma omp parallel for schedule(dynamic, 16)
    for (long i = 0; i < n; ++i) {
        const auto ri = x.row(static_cast<std::size_t>(i));
        for (long j = i; j < n; ++j) {
            const double v = kernel(ri, x.row(static_cast<std::size_t>(j)));
            k(static_cast<std::size_t>(i), static_cast<std::size_t>(j)) = v;
            k(static_cast<std::size_t>(j), static_cast<std::size_t>(i)) = v;
        }
    }
    return k;
}

Matrix gram_matrix_reference(const Matrix& x, const KernelSpec& kernel) {
    Matrix k(x.rows(), x.rows());
    for (std::size_t i = 0; i < x.rows(); ++i)
        for (std::size_t j = 0; j < x.rows(); ++j) k(i, j) = kernel(x.row(i), x.row(j));
    return k;
}

Matrix cross_kernel(const Matrix& a, const Matrix& b, const KernelSpec& kernel) {
    if (a.cols() != b.cols()) throw ShapeError("cross kernel operands differ in width");
    const auto n = static_cast<long>(a.rows());
    Matrix k(a.rows(), b.rows());
#pragma omp parallel for schedule(static)
    for (long i = 0; i < n; ++i) {
        const auto ri = a.row(static_cast<std::size_t>(i));
        for (std::size_t j = 0; j < b.rows(); ++j) k(static_cast<std::size_t>(i), j) = kernel(ri, b.row(j));
    }
    return k;
}

Matrix cross_kernel_reference(const Matrix& a, const Matrix& b, const KernelSpec& kernel) {
    if (a.cols() != b.cols()) throw ShapeError("cross kernel operands differ in width");
    Matrix k(a.rows(), b.rows());
    for (std::size_t i = 0; i < a.rows(); ++i)
        for (std::size_t j = 0; j < b.rows(); ++j) k(i, j) = kernel(a.row(i), b.row(j));
    return k;
}

}  // namespace vislip
