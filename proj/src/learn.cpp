#include "reacquire/learn.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <deque>
#include <limits>
#include <numeric>
#include <stdexcept>

namespace reacquire::learn {

int to_signed_label(double label) {
    if (label == 1.0) return 1;
    if (label == 0.0 || label == -1.0) return -1;
    throw std::invalid_argument("labels must be 0/1 or -1/+1");
}

double sigmoid(double t) {
    if (t >= 0.0) {
        return 1.0 / (1.0 + std::exp(-t));
    }
    const double e = std::exp(t);
    return e / (1.0 + e);
}

double log1pexp(double t) {
    if (t > 0.0) {
        return t + std::log1p(std::exp(-t));
    }
    return std::log1p(std::exp(t));
}

Dataset Dataset::from_rows(const std::vector<std::vector<double>>& rows, std::span<const double> labels,
                           std::vector<std::string> feature_names) {
    if (rows.size() != labels.size()) {
        throw std::invalid_argument("row and label counts differ");
    }
    const std::size_t dims = rows.empty() ? feature_names.size() : rows.front().size();
    if (!feature_names.empty() && feature_names.size() != dims) {
        throw std::invalid_argument("feature name count does not match row width");
    }
    Dataset d;
    d.features.resize(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(dims));
    d.labels.reserve(rows.size());
    for (std::size_t r = 0; r < rows.size(); ++r) {
        if (rows[r].size() != dims) {
            throw std::invalid_argument("row " + std::to_string(r) + " has " + std::to_string(rows[r].size()) +
                                        " features, expected " + std::to_string(dims));
        }
        for (std::size_t c = 0; c < dims; ++c) {
            d.features(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = rows[r][c];
        }
        d.labels.push_back(to_signed_label(labels[r]));
    }
    d.feature_names = std::move(feature_names);
    return d;
}

Dataset Dataset::subset(std::span<const std::size_t> rows) const {
    Dataset d;
    d.feature_names = feature_names;
    d.features.resize(static_cast<Eigen::Index>(rows.size()), features.cols());
    d.labels.reserve(rows.size());
    for (std::size_t k = 0; k < rows.size(); ++k) {
        d.features.row(static_cast<Eigen::Index>(k)) = features.row(static_cast<Eigen::Index>(rows[k]));
        d.labels.push_back(labels.at(rows[k]));
    }
    return d;
}

void Dataset::require_both_classes() const {
    const bool pos = std::find(labels.begin(), labels.end(), 1) != labels.end();
    const bool neg = std::find(labels.begin(), labels.end(), -1) != labels.end();
    if (!pos || !neg) {
        throw std::domain_error("training data must contain both classes");
    }
}

// ---------------------------------------------------------------------------

Eigen::Index LinearModel::nonzero_count() const {
    return (coefficients.array() != 0.0).count();
}

double LinearModel::score(std::span<const double> x) const {
    if (static_cast<Eigen::Index>(x.size()) != coefficients.size()) {
        throw std::invalid_argument("feature vector has the wrong dimension");
    }
    double s = intercept;
    for (Eigen::Index j = 0; j < coefficients.size(); ++j) {
        s += coefficients[j] * x[static_cast<std::size_t>(j)];
    }
    return s;
}

double l1_objective(const Dataset& data, double intercept, const Eigen::VectorXd& beta, double lambda) {
    const Eigen::VectorXd z = (data.features * beta).array() + intercept;
    double loss = 0.0;
    for (Eigen::Index i = 0; i < z.size(); ++i) {
        loss += log1pexp(-data.labels[static_cast<std::size_t>(i)] * z[i]);
    }
    return loss + lambda * beta.lpNorm<1>();
}

Eigen::VectorXd logistic_loss_gradient(const Dataset& data, double intercept, const Eigen::VectorXd& beta) {
    const Eigen::VectorXd z = (data.features * beta).array() + intercept;
    Eigen::VectorXd r(z.size());
    for (Eigen::Index i = 0; i < z.size(); ++i) {
        const double y = data.labels[static_cast<std::size_t>(i)];
        r[i] = -y * sigmoid(-y * z[i]);
    }
    Eigen::VectorXd g(beta.size() + 1);
    g[0] = r.sum();
    g.tail(beta.size()) = data.features.transpose() * r;
    return g;
}

L1Fit fit_l1_logistic(const Dataset& data, double lambda, const L1Options& options) {
    if (!(lambda >= 0.0)) {
        throw std::invalid_argument("lambda must be nonnegative");
    }
    data.require_both_classes();
    const auto n = data.rows();
    const auto p = data.dims();
    const Eigen::VectorXd ones = Eigen::VectorXd::Ones(n);

    L1Fit fit;
    auto& m = fit.model;
    m.lambda = lambda;
    m.coefficients = Eigen::VectorXd::Zero(p);
    Eigen::VectorXd z = Eigen::VectorXd::Zero(n);
    Eigen::VectorXd y(n);
    for (Eigen::Index i = 0; i < n; ++i) {
        y[i] = data.labels[static_cast<std::size_t>(i)];
    }

    constexpr double kArmijo = 0.01;
    constexpr int kMaxHalvings = 50;

    for (int sweep = 0; sweep < options.max_sweeps; ++sweep) {
        double max_change = 0.0;
        for (Eigen::Index j = -1; j < p; ++j) {
            const bool penalized = j >= 0;
            const Eigen::Ref<const Eigen::VectorXd> col = penalized ? Eigen::Ref<const Eigen::VectorXd>(data.features.col(j))
                                                                    : Eigen::Ref<const Eigen::VectorXd>(ones);
            double& w = penalized ? m.coefficients[j] : m.intercept;

            double g = 0.0;
            double h = 0.0;
            for (Eigen::Index i = 0; i < n; ++i) {
                if (col[i] == 0.0) continue;
                const double s = sigmoid(-y[i] * z[i]);  // 1 - P(correct)
                g -= y[i] * col[i] * s;
                h += col[i] * col[i] * s * (1.0 - s);
            }
            h = std::max(h, 1e-12);

            double d;
            if (!penalized) {
                d = -g / h;
            } else if (g + lambda <= h * w) {
                d = -(g + lambda) / h;
            } else if (g - lambda >= h * w) {
                d = -(g - lambda) / h;
            } else {
                d = -w;
            }
            if (d == 0.0) continue;

            const double pen = penalized ? lambda : 0.0;
            const double predicted = g * d + pen * (std::abs(w + d) - std::abs(w));
            double step = 1.0;
            bool accepted = false;
            for (int k = 0; k < kMaxHalvings; ++k) {
                double change = pen * (std::abs(w + step * d) - std::abs(w));
                for (Eigen::Index i = 0; i < n; ++i) {
                    if (col[i] == 0.0) continue;
                    change += log1pexp(-y[i] * (z[i] + step * d * col[i])) - log1pexp(-y[i] * z[i]);
                }
                if (change <= kArmijo * step * predicted) {
                    accepted = true;
                    break;
                }
                step *= 0.5;
            }
            if (!accepted) continue;
            // A full step onto zero lands exactly on zero.
            w = (step == 1.0 && d == -w) ? 0.0 : w + step * d;
            z += (step * d) * col;
            max_change = std::max(max_change, std::abs(step * d));
        }
        fit.sweeps = sweep + 1;
        fit.objective_history.push_back(l1_objective(data, m.intercept, m.coefficients, lambda));
        if (max_change < options.tolerance) {
            fit.converged = true;
            break;
        }
    }
    return fit;
}

LinearModel train_l1_logistic(const Dataset& data, double lambda, const L1Options& options) {
    return fit_l1_logistic(data, lambda, options).model;
}

// ---------------------------------------------------------------------------

double quadratic_kernel(std::span<const double> x, std::span<const double> y) {
    if (x.size() != y.size()) {
        throw std::invalid_argument("kernel arguments differ in dimension");
    }
    const double dot = std::inner_product(x.begin(), x.end(), y.begin(), 0.0);
    return (1.0 + dot) * (1.0 + dot);
}

Eigen::MatrixXd gram_matrix(const Eigen::MatrixXd& points) {
    Eigen::MatrixXd k = points * points.transpose();
    k.array() += 1.0;
    return k.array().square().matrix();
}

double KernelModel::score(std::span<const double> x) const {
    if (static_cast<Eigen::Index>(x.size()) != support_points.cols()) {
        throw std::invalid_argument("feature vector has the wrong dimension");
    }
    const Eigen::Map<const Eigen::VectorXd> v(x.data(), static_cast<Eigen::Index>(x.size()));
    const Eigen::VectorXd dots = (support_points * v).array() + 1.0;
    return alphas.dot(dots.array().square().matrix());
}

namespace {

double objective_from_margins(const Eigen::VectorXd& margins, std::span<const int> labels,
                              const Eigen::VectorXd& alpha, double lambda) {
    double loss = 0.0;
    for (Eigen::Index i = 0; i < margins.size(); ++i) {
        loss += log1pexp(-labels[static_cast<std::size_t>(i)] * margins[i]);
    }
    return loss + lambda * alpha.squaredNorm();
}

Eigen::VectorXd gradient_from_margins(const Eigen::MatrixXd& gram, const Eigen::VectorXd& margins,
                                      std::span<const int> labels, const Eigen::VectorXd& alpha, double lambda) {
    Eigen::VectorXd r(margins.size());
    for (Eigen::Index i = 0; i < margins.size(); ++i) {
        const double y = labels[static_cast<std::size_t>(i)];
        r[i] = -y * sigmoid(-y * margins[i]);
    }
    // The Gram matrix is symmetric, so K^T r = K r.
    return gram * r + 2.0 * lambda * alpha;
}

}  // namespace

double kernel_objective(const Eigen::MatrixXd& gram, std::span<const int> labels, const Eigen::VectorXd& alpha,
                        double lambda) {
    return objective_from_margins(gram * alpha, labels, alpha, lambda);
}

Eigen::VectorXd kernel_gradient(const Eigen::MatrixXd& gram, std::span<const int> labels,
                                const Eigen::VectorXd& alpha, double lambda) {
    return gradient_from_margins(gram, gram * alpha, labels, alpha, lambda);
}

KernelFit fit_kernel_logistic(const Dataset& data, double lambda, const KernelOptions& options) {
    if (!(lambda >= 0.0)) {
        throw std::invalid_argument("lambda must be nonnegative");
    }
    data.require_both_classes();
    const auto n = data.rows();
    const std::span<const int> y(data.labels);
    const Eigen::MatrixXd gram = gram_matrix(data.features);

    KernelFit fit;
    fit.model.support_points = data.features;
    fit.model.lambda = lambda;
    Eigen::VectorXd alpha = Eigen::VectorXd::Zero(n);
    Eigen::VectorXd margins = Eigen::VectorXd::Zero(n);
    double f = objective_from_margins(margins, y, alpha, lambda);
    Eigen::VectorXd g = gradient_from_margins(gram, margins, y, alpha, lambda);
    fit.objective_history.push_back(f);

    std::deque<Eigen::VectorXd> s_hist;
    std::deque<Eigen::VectorXd> y_hist;
    std::vector<double> a(static_cast<std::size_t>(options.history));

    for (int it = 0; it < options.max_iterations; ++it) {
        fit.gradient_norm = g.norm();
        if (fit.gradient_norm <= options.gradient_tolerance) {
            fit.converged = true;
            break;
        }

        // Two-loop recursion for d = -H g.
        Eigen::VectorXd d = -g;
        const auto m = s_hist.size();
        for (std::size_t k = m; k-- > 0;) {
            a[k] = s_hist[k].dot(d) / y_hist[k].dot(s_hist[k]);
            d -= a[k] * y_hist[k];
        }
        if (m > 0) {
            d *= s_hist.back().dot(y_hist.back()) / y_hist.back().squaredNorm();
        } else {
            d /= std::max(1.0, fit.gradient_norm);
        }
        for (std::size_t k = 0; k < m; ++k) {
            const double b = y_hist[k].dot(d) / y_hist[k].dot(s_hist[k]);
            d += (a[k] - b) * s_hist[k];
        }
        double slope = g.dot(d);
        if (!(slope < 0.0)) {
            s_hist.clear();
            y_hist.clear();
            d = -g / std::max(1.0, fit.gradient_norm);
            slope = g.dot(d);
        }

        const Eigen::VectorXd kd = gram * d;
        double step = 1.0;
        bool accepted = false;
        double f_new = f;
        for (int k = 0; k < 60; ++k) {
            f_new = objective_from_margins(margins + step * kd, y, alpha + step * d, lambda);
            if (f_new <= f + 1e-4 * step * slope) {
                accepted = true;
                break;
            }
            step *= 0.5;
        }
        if (!accepted) {
            if (s_hist.empty()) {
                break;  // no descent possible at working precision
            }
            s_hist.clear();
            y_hist.clear();
            continue;
        }

        alpha += step * d;
        margins += step * kd;
        Eigen::VectorXd g_new = gradient_from_margins(gram, margins, y, alpha, lambda);
        Eigen::VectorXd s = step * d;
        Eigen::VectorXd yk = g_new - g;
        if (s.dot(yk) > 1e-12 * s.norm() * yk.norm()) {
            s_hist.push_back(std::move(s));
            y_hist.push_back(std::move(yk));
            if (static_cast<int>(s_hist.size()) > options.history) {
                s_hist.pop_front();
                y_hist.pop_front();
            }
        }
        g = std::move(g_new);
        f = f_new;
        fit.iterations = it + 1;
        fit.objective_history.push_back(f);
    }
    fit.gradient_norm = g.norm();
    fit.converged = fit.converged || fit.gradient_norm <= options.gradient_tolerance;
    fit.model.alphas = std::move(alpha);
    return fit;
}

KernelModel train_kernel_logistic(const Dataset& data, double lambda, const KernelOptions& options) {
    return fit_kernel_logistic(data, lambda, options).model;
}

double predict(const LinearModel& model, std::span<const double> x) {
    return sigmoid(model.score(x));
}

double predict(const KernelModel& model, std::span<const double> x) {
    return sigmoid(model.score(x));
}

// ---------------------------------------------------------------------------

RocCurve roc_auc(std::span<const double> scores, std::span<const int> labels) {
    if (scores.size() != labels.size()) {
        throw std::invalid_argument("score and label counts differ");
    }
    std::vector<std::size_t> order(scores.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return scores[a] > scores[b]; });

    std::uint64_t pos = 0;
    std::uint64_t neg = 0;
    for (auto l : labels) {
        (l == 1 ? pos : neg) += 1;
        if (l != 1 && l != 0 && l != -1) {
            throw std::invalid_argument("labels must be 0/1 or -1/+1");
        }
    }
    if (pos == 0 || neg == 0) {
        throw std::domain_error("ROC needs both positive and negative examples");
    }

    RocCurve curve;
    curve.points.push_back({std::numeric_limits<double>::infinity(), 0.0, 0.0});
    std::uint64_t tp = 0;
    std::uint64_t fp = 0;
    // Twice the area in units of 1/(pos*neg): sum of fp_step * (tp_before + tp_after).
    unsigned __int128 twice_area = 0;
    for (std::size_t k = 0; k < order.size();) {
        const double s = scores[order[k]];
        std::uint64_t dtp = 0;
        std::uint64_t dfp = 0;
        while (k < order.size() && scores[order[k]] == s) {
            (labels[order[k]] == 1 ? dtp : dfp) += 1;
            ++k;
        }
        twice_area += static_cast<unsigned __int128>(dfp) * (2 * tp + dtp);
        tp += dtp;
        fp += dfp;
        curve.points.push_back({s, static_cast<double>(fp) / static_cast<double>(neg),
                                static_cast<double>(tp) / static_cast<double>(pos)});
    }
    curve.auc = static_cast<double>(twice_area) / (2.0 * static_cast<double>(pos) * static_cast<double>(neg));
    return curve;
}

}  // namespace reacquire::learn
