#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "vislip/common.hpp"
#include "vislip/features.hpp"
#include "vislip/svr.hpp"

namespace vislip {

/// kernel in {linear, rbf} x C in {0.1,1,10,100} x eps in {0.001,0.01,0.05},
/// rbf gamma in {0.01,0.1,1}/dim.
std::vector<SvrParams> default_grid(std::size_t dim);

struct GridSearchOptions {
    int folds = 3;
    std::uint64_t seed = 0;
    std::size_t max_train_samples = 800;  // per fit; larger training sets are stride-subsampled
    SolverOptions solver;
};

struct CvRow {
    SvrParams params;
    double cv_rmse = 0.0;              // RMSE pooled over all held-out rows
    std::vector<double> fold_rmse;
};

struct GridSearchResult {
    SvrParams best;
    double best_rmse = 0.0;
    std::vector<CvRow> table;          // grid order
    int unconverged_fits = 0;          // fits that hit the solver iteration cap
};

/// Group k-fold CV (rows of one group never straddle folds). Rows are put in a
/// canonical order first so the result does not depend on input row order.
GridSearchResult grid_search(const Matrix& x, std::span<const double> y, std::span<const int> groups,
                             std::span<const SvrParams> grid, const GridSearchOptions& options = {});

/// Rows kept when capping a training set at `cap` (evenly strided, order kept).
std::vector<std::size_t> stride_subsample(std::size_t n, std::size_t cap);

/// Permutation putting rows in (group, label, feature) lexicographic order.
std::vector<std::size_t> canonical_order(const Matrix& x, std::span<const double> y, std::span<const int> groups);

struct TrainTestSplit {
    std::vector<std::size_t> train;
    std::vector<std::size_t> test;
    std::vector<int> test_trials;
};

/// Per-trial split stratified by material: about `test_fraction` of each
/// material's trials (at least one when it has two or more) go to test.
TrainTestSplit train_test_split(const Dataset& ds, double test_fraction, std::uint64_t seed);

/// Fit on (a stride-capped subset of) the given rows.
SvrModel fit_model(const Dataset& ds, std::span<const std::size_t> rows, const SvrParams& params,
                   const GridSearchOptions& options);

}  // namespace vislip
