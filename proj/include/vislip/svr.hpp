#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "vislip/common.hpp"
#include "vislip/kernels.hpp"

namespace vislip {

struct SvrParams {
    KernelType kernel = KernelType::rbf;
    double c = 1.0;
    double epsilon = 0.01;
    double gamma = 0.1;  // rbf only

    KernelSpec kernel_spec() const { return {kernel, gamma}; }
    std::string label() const;
    void validate() const;
};

/// Per-dimension standardisation fitted on training rows. Constant dimensions
/// are dropped; `kept` indexes the surviving input columns.
struct FeatureScaling {
    std::size_t input_dim = 0;
    std::vector<std::size_t> kept;
    std::vector<double> mean;
    std::vector<double> scale;

    static FeatureScaling fit(const Matrix& x);
    std::vector<double> apply(std::span<const double> feature) const;
    Matrix apply(const Matrix& x) const;
};

struct SolverOptions {
    double tolerance = 1e-4;          // maximal-violating-pair gap
    long max_iterations = 0;          // 0: max(1e5, 100 l), as libsvm caps hard instances
    bool warn_unconverged = true;
    bool polish = true;               // exact re-solve on the free set after SMO
    std::size_t max_polish_size = 1200;
};

struct DualSolution {
    std::vector<double> beta;  // alpha - alpha*
    double bias = 0.0;
    long iterations = 0;
    double gap = 0.0;
    bool converged = false;
    bool polished = false;
};

/// epsilon-SVR dual on a precomputed Gram matrix:
///   min 1/2 b'Kb + eps |b|_1 - y'b   s.t. sum(b) = 0, |b_i| <= C
/// SMO with second-order working-set selection.
DualSolution solve_svr_dual(const Matrix& gram, std::span<const double> y, double c, double epsilon,
                            const SolverOptions& options = {});

double svr_dual_objective(const Matrix& gram, std::span<const double> y, std::span<const double> beta,
                          double epsilon);

class SvrModel {
public:
    Matrix support_vectors;        // scaled feature space
    std::vector<double> dual_coefs;
    double bias = 0.0;
    SvrParams params;
    FeatureScaling scaling;
    long iterations = 0;
    bool converged = true;  // solver reached tolerance before its iteration cap

    std::size_t input_dim() const { return scaling.input_dim; }
    double predict_raw(std::span<const double> feature) const;
    double predict(std::span<const double> feature) const;  // clamped to [0,1]

    nlohmann::json to_json() const;
    static SvrModel from_json(const nlohmann::json& j);
    std::uint64_t hash() const;
};

SvrModel train_svr(const Matrix& x, std::span<const double> y, const SvrParams& params,
                   const SolverOptions& options = {});

/// Model from an already-scaled design matrix and its Gram matrix.
SvrModel train_svr_scaled(const Matrix& scaled_x, const Matrix& gram, std::span<const double> y,
                          const SvrParams& params, const FeatureScaling& scaling,
                          const SolverOptions& options = {});

/// OpenMP batch prediction and its serial reference.
std::vector<double> predict_batch(const SvrModel& model, const Matrix& x);
std::vector<double> predict_batch_reference(const SvrModel& model, const Matrix& x);

}  // namespace vislip
