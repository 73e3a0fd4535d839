#include "vislip/svr.hpp"

#include <Eigen/Dense>
#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>

namespace vislip {

std::string SvrParams::label() const {
    char buf[96];
    if (kernel == KernelType::linear)
        std::snprintf(buf, sizeof buf, "linear C=%g eps=%g", c, epsilon);
    else
        std::snprintf(buf, sizeof buf, "rbf C=%g eps=%g gamma=%g", c, epsilon, gamma);
    return buf;
}

void SvrParams::validate() const {
    if (!(c > 0.0)) throw ConfigError("SVR C must be > 0");
    if (!(epsilon >= 0.0)) throw ConfigError("SVR epsilon must be >= 0");
    if (kernel == KernelType::rbf && !(gamma > 0.0)) throw ConfigError("rbf gamma must be > 0");
}

FeatureScaling FeatureScaling::fit(const Matrix& x) {
    FeatureScaling s;
    s.input_dim = x.cols();
    const double n = static_cast<double>(x.rows());
    std::vector<std::size_t> dropped;
    for (std::size_t c = 0; c < x.cols(); ++c) {
        double m = 0.0;
        for (std::size_t r = 0; r < x.rows(); ++r) m += x(r, c);
        m /= n;
        double v = 0.0;
        for (std::size_t r = 0; r < x.rows(); ++r) v += (x(r, c) - m) * (x(r, c) - m);
        const double sd = std::sqrt(v / n);
        if (!(sd > 1e-12 * std::max(1.0, std::abs(m)))) {
            dropped.push_back(c);
            continue;
        }
        s.kept.push_back(c);
        s.mean.push_back(m);
        s.scale.push_back(sd);
    }
    if (!dropped.empty())
        warn("dropping " + std::to_string(dropped.size()) + " constant feature dimension(s)");
    return s;
}

std::vector<double> FeatureScaling::apply(std::span<const double> feature) const {
    if (feature.size() != input_dim)
        throw ShapeError("feature has " + std::to_string(feature.size()) + " dims, model expects " +
                         std::to_string(input_dim));
    std::vector<double> out(kept.size());
    for (std::size_t i = 0; i < kept.size(); ++i) out[i] = (feature[kept[i]] - mean[i]) / scale[i];
    return out;
}

Matrix FeatureScaling::apply(const Matrix& x) const {
    if (x.cols() != input_dim) throw ShapeError("design matrix width does not match scaling");
    Matrix out(x.rows(), kept.size());
    for (std::size_t r = 0; r < x.rows(); ++r)
        for (std::size_t i = 0; i < kept.size(); ++i) out(r, i) = (x(r, kept[i]) - mean[i]) / scale[i];
    return out;
}

namespace {

constexpr double kTau = 1e-12;

// Exact solve of the KKT equalities on the free set; rejected unless the
// result keeps every variable's status and satisfies KKT to `tol`.
bool polish(const Matrix& k, std::span<const double> y, double c, double eps, double tol,
            std::size_t max_size, std::vector<double>& beta, double& bias) {
    const std::size_t l = y.size();
    std::vector<std::size_t> free;
    for (std::size_t i = 0; i < l; ++i)
        if (beta[i] != 0.0 && std::abs(beta[i]) != c) free.push_back(i);
    if (free.empty() || free.size() > max_size) return false;

    const std::size_t m = free.size();
    Eigen::MatrixXd a = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(m + 1), static_cast<Eigen::Index>(m + 1));
    Eigen::VectorXd rhs(static_cast<Eigen::Index>(m + 1));
    std::vector<bool> is_free(l, false);
    for (auto i : free) is_free[i] = true;
    double fixed_sum = 0.0;
    for (std::size_t j = 0; j < l; ++j)
        if (!is_free[j]) fixed_sum += beta[j];
    for (std::size_t f = 0; f < m; ++f) {
        const auto i = free[f];
        for (std::size_t g = 0; g < m; ++g) a(static_cast<Eigen::Index>(f), static_cast<Eigen::Index>(g)) = k(i, free[g]);
        a(static_cast<Eigen::Index>(f), static_cast<Eigen::Index>(m)) = 1.0;
        a(static_cast<Eigen::Index>(m), static_cast<Eigen::Index>(f)) = 1.0;
        double fixed = 0.0;
        for (std::size_t j = 0; j < l; ++j)
            if (!is_free[j] && beta[j] != 0.0) fixed += k(i, j) * beta[j];
        rhs(static_cast<Eigen::Index>(f)) = y[i] - eps * (beta[i] > 0.0 ? 1.0 : -1.0) - fixed;
    }
    rhs(static_cast<Eigen::Index>(m)) = -fixed_sum;

    Eigen::FullPivLU<Eigen::MatrixXd> lu(a);
    if (lu.rank() < static_cast<Eigen::Index>(m + 1)) return false;
    const Eigen::VectorXd sol = lu.solve(rhs);

    std::vector<double> candidate = beta;
    for (std::size_t f = 0; f < m; ++f) {
        const double v = sol(static_cast<Eigen::Index>(f));
        const double sign = beta[free[f]] > 0.0 ? 1.0 : -1.0;
        if (!(sign * v > 0.0 && sign * v <= c)) return false;
        candidate[free[f]] = v;
    }
    const double b = sol(static_cast<Eigen::Index>(m));
    for (std::size_t i = 0; i < l; ++i) {
        if (is_free[i]) continue;
        double fx = b;
        for (std::size_t j = 0; j < l; ++j)
            if (candidate[j] != 0.0) fx += k(i, j) * candidate[j];
        const double r = y[i] - fx;
        if (candidate[i] == 0.0 && std::abs(r) > eps + tol) return false;
        if (candidate[i] == c && r < eps - tol) return false;
        if (candidate[i] == -c && r > -eps + tol) return false;
    }
    beta = std::move(candidate);
    bias = b;
    return true;
}

}  // namespace

DualSolution solve_svr_dual(const Matrix& gram, std::span<const double> y, double c, double epsilon,
                            const SolverOptions& options) {
    const std::size_t l = y.size();
    if (gram.rows() != l || gram.cols() != l) throw ShapeError("Gram matrix does not match labels");
    if (l < 1) throw LengthError("SVR needs at least one sample");
    const std::size_t n = 2 * l;

    // Variables 0..l-1 are alpha (sign +1), l..2l-1 alpha* (sign -1);
    // Q(s,t) = sgn_s sgn_t K(s mod l, t mod l).
    std::vector<double> a(n, 0.0), g(n), diag(l);
    for (std::size_t t = 0; t < l; ++t) {
        g[t] = epsilon - y[t];
        g[t + l] = epsilon + y[t];
        diag[t] = gram(t, t);
    }
    auto sign = [l](std::size_t t) { return t < l ? 1.0 : -1.0; };
    auto upper = [&](std::size_t t) { return a[t] >= c; };
    auto lower = [&](std::size_t t) { return a[t] <= 0.0; };
    constexpr double inf = std::numeric_limits<double>::infinity();

    DualSolution sol;
    long iter = 0;
    double gap = inf;
    const long max_iter = options.max_iterations > 0
                              ? options.max_iterations
                              : std::max<long>(100'000, 100 * static_cast<long>(l));
    while (iter < max_iter) {
        // i: maximal violator among "up" candidates.
        double gmax = -inf;
        long i = -1;
        for (std::size_t t = 0; t < l; ++t)
            if (!upper(t) && -g[t] >= gmax) { gmax = -g[t]; i = static_cast<long>(t); }
        for (std::size_t t = l; t < n; ++t)
            if (!lower(t) && g[t] >= gmax) { gmax = g[t]; i = static_cast<long>(t); }

        // j: second-order selection among "low" candidates.
        double gmax2 = -inf, best = inf;
        long j = -1;
        if (i >= 0) {
            const auto iu = static_cast<std::size_t>(i);
            const double si = sign(iu);
            const auto krow = gram.row(iu % l);
            const double qii = diag[iu % l];
            for (std::size_t t = 0; t < l; ++t) {
                if (lower(t)) continue;
                gmax2 = std::max(gmax2, g[t]);
                const double d = gmax + g[t];
                if (d > 0.0) {
                    double quad = qii + diag[t] - 2.0 * si * krow[t];
                    if (quad <= 0.0) quad = kTau;
                    const double obj = -(d * d) / quad;
                    if (obj <= best) { best = obj; j = static_cast<long>(t); }
                }
            }
            for (std::size_t t = l; t < n; ++t) {
                if (upper(t)) continue;
                gmax2 = std::max(gmax2, -g[t]);
                const double d = gmax - g[t];
                if (d > 0.0) {
                    double quad = qii + diag[t - l] - 2.0 * si * krow[t - l];
                    if (quad <= 0.0) quad = kTau;
                    const double obj = -(d * d) / quad;
                    if (obj <= best) { best = obj; j = static_cast<long>(t); }
                }
            }
        }
        gap = gmax + gmax2;
        if (i < 0 || j < 0 || gap < options.tolerance) break;
        ++iter;

        const auto iu = static_cast<std::size_t>(i), ju = static_cast<std::size_t>(j);
        const double si = sign(iu), sj = sign(ju);
        const double qij = si * sj * gram(iu % l, ju % l);
        const double qii = diag[iu % l], qjj = diag[ju % l];
        const double ai_old = a[iu], aj_old = a[ju];
        if (si != sj) {
            double quad = qii + qjj + 2.0 * qij;
            if (quad <= 0.0) quad = kTau;
            const double delta = (-g[iu] - g[ju]) / quad;
            const double diff = a[iu] - a[ju];
            a[iu] += delta;
            a[ju] += delta;
            if (diff > 0.0) {
                if (a[ju] < 0.0) { a[ju] = 0.0; a[iu] = diff; }
            } else {
                if (a[iu] < 0.0) { a[iu] = 0.0; a[ju] = -diff; }
            }
            if (diff > 0.0) {
                if (a[iu] > c) { a[iu] = c; a[ju] = c - diff; }
            } else {
                if (a[ju] > c) { a[ju] = c; a[iu] = c + diff; }
            }
        } else {
            double quad = qii + qjj - 2.0 * qij;
            if (quad <= 0.0) quad = kTau;
            const double delta = (g[iu] - g[ju]) / quad;
            const double sum = a[iu] + a[ju];
            a[iu] -= delta;
            a[ju] += delta;
            if (sum > c) {
                if (a[iu] > c) { a[iu] = c; a[ju] = sum - c; }
            } else {
                if (a[ju] < 0.0) { a[ju] = 0.0; a[iu] = sum; }
            }
            if (sum > c) {
                if (a[ju] > c) { a[ju] = c; a[iu] = sum - c; }
            } else {
                if (a[iu] < 0.0) { a[iu] = 0.0; a[ju] = sum; }
            }
        }
        // g_t += Q(t,i) dai + Q(t,j) daj, split into the alpha and alpha* halves.
        const double wi = si * (a[iu] - ai_old), wj = sj * (a[ju] - aj_old);
        const auto ki = gram.row(iu % l), kj = gram.row(ju % l);
        for (std::size_t t = 0; t < l; ++t) {
            const double v = ki[t] * wi + kj[t] * wj;
            g[t] += v;
            g[t + l] -= v;
        }
    }
    sol.iterations = iter;
    sol.gap = gap;
    sol.converged = gap < options.tolerance;
    if (!sol.converged && options.warn_unconverged) warn("SVR solver stopped before reaching tolerance (gap " + std::to_string(gap) + ")");

    // Bias from the free variables, else the midpoint of the feasible interval.
    double ub = inf, lb = -inf, free_sum = 0.0;
    int free_count = 0;
    for (std::size_t t = 0; t < n; ++t) {
        const double yg = sign(t) * g[t];
        if (upper(t)) {
            if (t >= l) ub = std::min(ub, yg); else lb = std::max(lb, yg);
        } else if (lower(t)) {
            if (t < l) ub = std::min(ub, yg); else lb = std::max(lb, yg);
        } else {
            ++free_count;
            free_sum += yg;
        }
    }
    const double rho = free_count > 0 ? free_sum / free_count : 0.5 * (ub + lb);
    sol.bias = -rho;
    sol.beta.resize(l);
    for (std::size_t t = 0; t < l; ++t) sol.beta[t] = a[t] - a[t + l];

    if (options.polish)
        sol.polished = polish(gram, y, c, epsilon, options.tolerance, options.max_polish_size, sol.beta, sol.bias);
    return sol;
}

double svr_dual_objective(const Matrix& gram, std::span<const double> y, std::span<const double> beta,
                          double epsilon) {
    double quad = 0.0, lin = 0.0;
    for (std::size_t i = 0; i < beta.size(); ++i) {
        double row = 0.0;
        for (std::size_t j = 0; j < beta.size(); ++j) row += gram(i, j) * beta[j];
        quad += beta[i] * row;
        lin += epsilon * std::abs(beta[i]) - y[i] * beta[i];
    }
    return 0.5 * quad + lin;
}

double SvrModel::predict_raw(std::span<const double> feature) const {
    const auto z = scaling.apply(feature);
    const auto kernel = params.kernel_spec();
    double acc = bias;
    for (std::size_t i = 0; i < dual_coefs.size(); ++i) acc += dual_coefs[i] * kernel(support_vectors.row(i), z);
    return acc;
}

double SvrModel::predict(std::span<const double> feature) const {
    return std::clamp(predict_raw(feature), 0.0, 1.0);
}

nlohmann::json SvrModel::to_json() const {
    nlohmann::json sv = nlohmann::json::array();
    for (std::size_t i = 0; i < support_vectors.rows(); ++i) {
        auto r = support_vectors.row(i);
        sv.push_back(std::vector<double>(r.begin(), r.end()));
    }
    return {
        {"format", "vislip-svr"},
        {"version", 1},
        {"params",
         {{"kernel", kernel_name(params.kernel)}, {"c", params.c}, {"epsilon", params.epsilon}, {"gamma", params.gamma}}},
        {"scaling",
         {{"input_dim", scaling.input_dim}, {"kept", scaling.kept}, {"mean", scaling.mean}, {"scale", scaling.scale}}},
        {"support_vectors", sv},
        {"dual_coefs", dual_coefs},
        {"bias", bias},
        {"iterations", iterations},
        {"converged", converged},
    };
}

SvrModel SvrModel::from_json(const nlohmann::json& j) {
    if (j.value("format", "") != "vislip-svr") throw ConfigError("not a vislip SVR model document");
    SvrModel m;
    const auto& p = j.at("params");
    m.params.kernel = parse_kernel(p.at("kernel").get<std::string>());
    m.params.c = p.at("c").get<double>();
    m.params.epsilon = p.at("epsilon").get<double>();
    m.params.gamma = p.at("gamma").get<double>();
    const auto& s = j.at("scaling");
    m.scaling.input_dim = s.at("input_dim").get<std::size_t>();
    m.scaling.kept = s.at("kept").get<std::vector<std::size_t>>();
    m.scaling.mean = s.at("mean").get<std::vector<double>>();
    m.scaling.scale = s.at("scale").get<std::vector<double>>();
    for (const auto& row : j.at("support_vectors")) m.support_vectors.append_row(row.get<std::vector<double>>());
    m.dual_coefs = j.at("dual_coefs").get<std::vector<double>>();
    m.bias = j.at("bias").get<double>();
    m.iterations = j.value("iterations", 0L);
    m.converged = j.value("converged", true);
    if (m.dual_coefs.size() != m.support_vectors.rows()) throw ShapeError("model support vector count mismatch");
    return m;
}

std::uint64_t SvrModel::hash() const { return fnv1a64(to_json().dump()); }

SvrModel train_svr_scaled(const Matrix& scaled_x, const Matrix& gram, std::span<const double> y,
                          const SvrParams& params, const FeatureScaling& scaling,
                          const SolverOptions& options) {
    params.validate();
    SvrModel model;
    model.params = params;
    model.scaling = scaling;
    if (scaling.kept.empty()) {
        // Nothing to regress on: the best constant is the label mean.
        model.bias = mean(y);
        return model;
    }
    const auto sol = solve_svr_dual(gram, y, params.c, params.epsilon, options);
    model.bias = sol.bias;
    model.iterations = sol.iterations;
    model.converged = sol.converged;
    for (std::size_t i = 0; i < y.size(); ++i) {
        if (sol.beta[i] == 0.0) continue;
        model.support_vectors.append_row(scaled_x.row(i));
        model.dual_coefs.push_back(sol.beta[i]);
    }
    if (model.support_vectors.rows() == 0) model.support_vectors = Matrix(0, scaling.kept.size());
    return model;
}

SvrModel train_svr(const Matrix& x, std::span<const double> y, const SvrParams& params,
                   const SolverOptions& options) {
    if (x.rows() != y.size()) throw ShapeError("feature rows and labels differ in count");
    if (x.rows() < 2) throw LengthError("SVR training needs at least 2 samples");
    params.validate();
    auto scaling = FeatureScaling::fit(x);
    if (scaling.kept.empty()) {
        warn("all feature dimensions are constant; using the label mean");
        SvrModel model;
        model.params = params;
        model.scaling = std::move(scaling);
        model.bias = mean(y);
        model.support_vectors = Matrix(0, 0);
        return model;
    }
    const auto scaled = scaling.apply(x);
    const auto gram = gram_matrix(scaled, params.kernel_spec());
    return train_svr_scaled(scaled, gram, y, params, scaling, options);
}

std::vector<double> predict_batch(const SvrModel& model, const Matrix& x) {
    std::vector<double> out(x.rows());
    const auto n = static_cast<long>(x.rows());
#pragma omp parallel for schedule(static)
    for (long i = 0; i < n; ++i) out[static_cast<std::size_t>(i)] = model.predict(x.row(static_cast<std::size_t>(i)));
    return out;
}

std::vector<double> predict_batch_reference(const SvrModel& model, const Matrix& x) {
    std::vector<double> out;
    out.reserve(x.rows());
    for (std::size_t i = 0; i < x.rows(); ++i) out.push_back(model.predict(x.row(i)));
    return out;
}

}  // namespace vislip
