#include "vislip/model_select.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numeric>
#include <set>

#include "vislip/kernels.hpp"

namespace vislip {

std::vector<SvrParams> default_grid(std::size_t dim) {
    const double cs[] = {0.1, 1.0, 10.0, 100.0};
    const double eps[] = {0.001, 0.01, 0.05};
    const double gammas[] = {0.01, 0.1, 1.0};
    const double inv_dim = 1.0 / static_cast<double>(std::max<std::size_t>(dim, 1));
    std::vector<SvrParams> grid;
    for (double c : cs)
        for (double e : eps) grid.push_back({KernelType::linear, c, e, 1.0});
    for (double g : gammas)
        for (double c : cs)
            for (double e : eps) grid.push_back({KernelType::rbf, c, e, g * inv_dim});
    return grid;
}

std::vector<std::size_t> stride_subsample(std::size_t n, std::size_t cap) {
    std::vector<std::size_t> out;
    if (cap == 0 || n <= cap) {
        out.resize(n);
        std::iota(out.begin(), out.end(), 0);
        return out;
    }
    out.reserve(cap);
    for (std::size_t i = 0; i < cap; ++i) out.push_back(i * n / cap);
    return out;
}

std::vector<std::size_t> canonical_order(const Matrix& x, std::span<const double> y, std::span<const int> groups) {
    std::vector<std::size_t> idx(y.size());
    std::iota(idx.begin(), idx.end(), 0);
    std::stable_sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) {
        if (groups[a] != groups[b]) return groups[a] < groups[b];
        auto ra = x.row(a), rb = x.row(b);
        if (!std::equal(ra.begin(), ra.end(), rb.begin()))
            return std::lexicographical_compare(ra.begin(), ra.end(), rb.begin(), rb.end());
        return y[a] < y[b];
    });
    return idx;
}

namespace {

// One fold x kernel configuration: shared Gram across every (C, eps) point.
struct Task {
    std::size_t fold;
    KernelSpec kernel;
    std::vector<std::size_t> grid_points;
};

bool same_kernel(const SvrParams& a, const SvrParams& b) {
    return a.kernel == b.kernel && (a.kernel == KernelType::linear || a.gamma == b.gamma);
}

}  // namespace

GridSearchResult grid_search(const Matrix& x, std::span<const double> y, std::span<const int> groups,
                             std::span<const SvrParams> grid, const GridSearchOptions& options) {
    if (grid.empty()) throw ConfigError("grid search needs at least one grid point");
    if (options.folds < 2) throw ConfigError("grid search needs folds >= 2");
    if (x.rows() != y.size() || groups.size() != y.size()) throw ShapeError("grid search inputs differ in length");
    for (const auto& p : grid) p.validate();

    const auto order = canonical_order(x, y, groups);
    std::vector<int> group_ids(groups.begin(), groups.end());
    std::sort(group_ids.begin(), group_ids.end());
    group_ids.erase(std::unique(group_ids.begin(), group_ids.end()), group_ids.end());
    if (static_cast<std::size_t>(options.folds) > group_ids.size())
        throw ConfigError("folds (" + std::to_string(options.folds) + ") exceed the number of trial groups (" +
                          std::to_string(group_ids.size()) + ")");
    Rng rng(derive_seed(options.seed, {0x6376}));
    std::shuffle(group_ids.begin(), group_ids.end(), rng);
    std::map<int, std::size_t> fold_of;
    for (std::size_t i = 0; i < group_ids.size(); ++i) fold_of[group_ids[i]] = i % static_cast<std::size_t>(options.folds);

    const auto k = static_cast<std::size_t>(options.folds);
    std::vector<std::vector<std::size_t>> train_rows(k), test_rows(k);
    for (auto r : order) {
        const auto f = fold_of[groups[r]];
        for (std::size_t g = 0; g < k; ++g) (g == f ? test_rows : train_rows)[g].push_back(r);
    }

    std::vector<Task> tasks;
    for (std::size_t f = 0; f < k; ++f) {
        std::vector<bool> done(grid.size(), false);
        for (std::size_t p = 0; p < grid.size(); ++p) {
            if (done[p]) continue;
            Task t{f, grid[p].kernel_spec(), {}};
            for (std::size_t q = p; q < grid.size(); ++q)
                if (!done[q] && same_kernel(grid[p], grid[q])) {
                    t.grid_points.push_back(q);
                    done[q] = true;
                }
            tasks.push_back(std::move(t));
        }
    }

    // sq_err[p][f] = sum of squared held-out errors of grid point p on fold f.
    std::vector<std::vector<double>> sq_err(grid.size(), std::vector<double>(k, 0.0));
    std::vector<std::vector<char>> converged(grid.size(), std::vector<char>(k, 1));
    auto solver = options.solver;
    solver.warn_unconverged = false;
    const auto n_tasks = static_cast<long>(tasks.size());
#pragma omp parallel for schedule(dynamic)
    for (long ti = 0; ti < n_tasks; ++ti) {
        const auto& task = tasks[static_cast<std::size_t>(ti)];
        const auto& all_train = train_rows[task.fold];
        const auto keep = stride_subsample(all_train.size(), options.max_train_samples);
        std::vector<std::size_t> rows;
        for (auto i : keep) rows.push_back(all_train[i]);
        const Matrix xtr = x.select_rows(rows);
        std::vector<double> ytr;
        for (auto r : rows) ytr.push_back(y[r]);
        const auto scaling = FeatureScaling::fit(xtr);
        const Matrix str = scaling.apply(xtr);
        const Matrix gram = gram_matrix(str, task.kernel);
        const Matrix xte = x.select_rows(test_rows[task.fold]);
        for (auto p : task.grid_points) {
            const auto model = train_svr_scaled(str, gram, ytr, grid[p], scaling, solver);
            converged[p][task.fold] = model.converged;
            double acc = 0.0;
            for (std::size_t i = 0; i < xte.rows(); ++i) {
                const double e = model.predict(xte.row(i)) - y[test_rows[task.fold][i]];
                acc += e * e;
            }
            sq_err[p][task.fold] = acc;
        }
    }

    GridSearchResult res;
    res.best_rmse = std::numeric_limits<double>::infinity();
    std::size_t best = 0;
    for (std::size_t p = 0; p < grid.size(); ++p) {
        CvRow row{grid[p], 0.0, {}};
        double total = 0.0;
        for (std::size_t f = 0; f < k; ++f) {
            total += sq_err[p][f];
            res.unconverged_fits += converged[p][f] ? 0 : 1;
            row.fold_rmse.push_back(std::sqrt(sq_err[p][f] / static_cast<double>(test_rows[f].size())));
        }
        row.cv_rmse = std::sqrt(total / static_cast<double>(y.size()));
        const auto& cur = grid[best];
        const bool better = row.cv_rmse < res.best_rmse ||
                            (row.cv_rmse == res.best_rmse &&
                             (grid[p].c < cur.c || (grid[p].c == cur.c && grid[p].epsilon > cur.epsilon)));
        if (better) {
            best = p;
            res.best_rmse = row.cv_rmse;
        }
        res.table.push_back(std::move(row));
    }
    res.best = grid[best];
    if (res.unconverged_fits > 0)
        warn(std::to_string(res.unconverged_fits) + " of " + std::to_string(grid.size() * k) +
             " cross-validation fits hit the solver iteration cap");
    return res;
}

TrainTestSplit train_test_split(const Dataset& ds, double test_fraction, std::uint64_t seed) {
    if (!(test_fraction > 0.0 && test_fraction < 1.0)) throw ConfigError("test_fraction must be in (0,1)");
    std::map<std::string, std::set<int>> trials_by_material;
    for (std::size_t i = 0; i < ds.size(); ++i) trials_by_material[ds.materials[i]].insert(ds.trial_ids[i]);

    std::set<int> test_trials;
    std::uint64_t m_index = 0;
    for (const auto& [material, ids] : trials_by_material) {
        std::vector<int> v(ids.begin(), ids.end());
        Rng rng(derive_seed(seed, {0x7474, m_index++}));
        std::shuffle(v.begin(), v.end(), rng);
        if (v.size() < 2) {
            warn("material " + material + " has a single usable trial; it is used for training only");
            continue;
        }
        auto n_test = static_cast<std::size_t>(std::llround(test_fraction * static_cast<double>(v.size())));
        n_test = std::clamp<std::size_t>(n_test, 1, v.size() - 1);
        test_trials.insert(v.begin(), v.begin() + static_cast<long>(n_test));
    }
    TrainTestSplit split;
    split.test_trials.assign(test_trials.begin(), test_trials.end());
    for (std::size_t i = 0; i < ds.size(); ++i)
        (test_trials.count(ds.trial_ids[i]) ? split.test : split.train).push_back(i);
    return split;
}

SvrModel fit_model(const Dataset& ds, std::span<const std::size_t> rows, const SvrParams& params,
                   const GridSearchOptions& options) {
    const auto sub = ds.subset(rows);
    const auto order = canonical_order(sub.features, sub.labels, sub.trial_ids);
    const auto keep = stride_subsample(order.size(), options.max_train_samples);
    std::vector<std::size_t> picked;
    for (auto i : keep) picked.push_back(order[i]);
    const Matrix x = sub.features.select_rows(picked);
    std::vector<double> y;
    for (auto r : picked) y.push_back(sub.labels[r]);
    return train_svr(x, y, params, options.solver);
}

}  // namespace vislip
