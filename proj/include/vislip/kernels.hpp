#pragma once

#include <span>
#include <string_view>
#include <vector>

#include "vislip/common.hpp"

namespace vislip {

enum class KernelType { linear, rbf };

std::string_view kernel_name(KernelType k);
KernelType parse_kernel(std::string_view name);

struct KernelSpec {
    KernelType type = KernelType::rbf;
    double gamma = 1.0;  // rbf only

    double operator()(std::span<const double> a, std::span<const double> b) const;
};

/// Symmetric Gram matrix of the rows of X. OpenMP over rows.
Matrix gram_matrix(const Matrix& x, const KernelSpec& kernel);
Matrix gram_matrix_reference(const Matrix& x, const KernelSpec& kernel);

/// K(a_i, b_j) for all row pairs. OpenMP over rows of `a`.
Matrix cross_kernel(const Matrix& a, const Matrix& b, const KernelSpec& kernel);
Matrix cross_kernel_reference(const Matrix& a, const Matrix& b, const KernelSpec& kernel);

}  // namespace vislip
