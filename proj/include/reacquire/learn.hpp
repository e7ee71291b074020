#pragma once

#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace reacquire::learn {

/// Training rows with labels normalized to -1 / +1.
struct Dataset {
    Eigen::MatrixXd features;  // one row per sample
    std::vector<int> labels;   // -1 or +1
    std::vector<std::string> feature_names;

    Eigen::Index rows() const { return features.rows(); }
    Eigen::Index dims() const { return features.cols(); }

    /// Accepts labels in {0,1} or {-1,+1}; throws std::invalid_argument on
    /// ragged rows or other label values.
    static Dataset from_rows(const std::vector<std::vector<double>>& rows, std::span<const double> labels,
                             std::vector<std::string> feature_names = {});

    Dataset subset(std::span<const std::size_t> rows) const;
    /// Throws std::domain_error unless both classes are present.
    void require_both_classes() const;
};

/// Maps a 0/1 or -1/+1 label to -1/+1.
int to_signed_label(double label);

/// sigma(t) = 1 / (1 + e^-t), stable for large |t|.
double sigmoid(double t);
/// log(1 + e^t), stable for large |t|.
double log1pexp(double t);

// ---------------------------------------------------------------------------
// L1-regularized linear logistic regression.

/// Probability is sigma(intercept + coefficients . x). The intercept is not
/// penalized; lambda multiplies ||coefficients||_1 added to the summed log-loss.
struct LinearModel {
    double intercept = 0.0;
    Eigen::VectorXd coefficients;
    double lambda = 0.0;

    Eigen::Index nonzero_count() const;
    double score(std::span<const double> x) const;
};

struct L1Options {
    /// Stop once no coordinate moves more than this in a full sweep.
    double tolerance = 1e-6;
    int max_sweeps = 100000;
};

struct L1Fit {
    LinearModel model;
    int sweeps = 0;
    bool converged = false;
    std::vector<double> objective_history;  // after each sweep
};

/// Sum of log(1 + exp(-y (b0 + x.b))) + lambda ||b||_1.
double l1_objective(const Dataset& data, double intercept, const Eigen::VectorXd& beta, double lambda);

/// Gradient of the smooth log-loss part: first the intercept entry, then one per feature.
Eigen::VectorXd logistic_loss_gradient(const Dataset& data, double intercept, const Eigen::VectorXd& beta);

/// Coordinate descent with one-dimensional Newton steps and a backtracking
/// line search on each coordinate.
L1Fit fit_l1_logistic(const Dataset& data, double lambda, const L1Options& options = {});
LinearModel train_l1_logistic(const Dataset& data, double lambda, const L1Options& options = {});

// ---------------------------------------------------------------------------
// L2-regularized quadratic-kernel logistic regression.

/// K(x, y) = (1 + x.y)^2.
double quadratic_kernel(std::span<const double> x, std::span<const double> y);
Eigen::MatrixXd gram_matrix(const Eigen::MatrixXd& points);

/// Probability is sigma(sum_i alpha_i K(x, x_i)).
struct KernelModel {
    Eigen::MatrixXd support_points;
    Eigen::VectorXd alphas;
    double lambda = 0.0;

    double score(std::span<const double> x) const;
};

struct KernelOptions {
    double gradient_tolerance = 1e-5;
    int max_iterations = 20000;
    int history = 10;
};

struct KernelFit {
    KernelModel model;
    int iterations = 0;
    bool converged = false;
    double gradient_norm = 0.0;
    std::vector<double> objective_history;  // initial value, then after each iteration
};

/// Sum of log(1 + exp(-y_i (K alpha)_i)) + lambda alpha.alpha.
double kernel_objective(const Eigen::MatrixXd& gram, std::span<const int> labels, const Eigen::VectorXd& alpha,
                        double lambda);
Eigen::VectorXd kernel_gradient(const Eigen::MatrixXd& gram, std::span<const int> labels,
                                const Eigen::VectorXd& alpha, double lambda);

/// L-BFGS with an Armijo backtracking line search, started from alpha = 0.
KernelFit fit_kernel_logistic(const Dataset& data, double lambda, const KernelOptions& options = {});
KernelModel train_kernel_logistic(const Dataset& data, double lambda, const KernelOptions& options = {});

double predict(const LinearModel& model, std::span<const double> x);
double predict(const KernelModel& model, std::span<const double> x);

template <class Model>
std::vector<double> predict_all(const Model& model, const Eigen::MatrixXd& rows) {
    std::vector<double> out;
    out.reserve(static_cast<std::size_t>(rows.rows()));
    Eigen::VectorXd row(rows.cols());
    for (Eigen::Index r = 0; r < rows.rows(); ++r) {
        row = rows.row(r).transpose();
        out.push_back(predict(model, std::span<const double>(row.data(), static_cast<std::size_t>(row.size()))));
    }
    return out;
}

// ---------------------------------------------------------------------------
// ROC / AUC.

struct RocPoint {
    double threshold = 0.0;
    double false_positive_rate = 0.0;
    double true_positive_rate = 0.0;
};

struct RocCurve {
    std::vector<RocPoint> points;  // starts at (0,0), ends at (1,1)
    double auc = 0.0;
};

/// Descending-score sweep; tied scores enter together, so the trapezoid area
/// equals the Mann-Whitney statistic P(s+ > s-) + P(s+ = s-)/2. Labels are
/// 0/1 or -1/+1; throws std::domain_error unless both classes appear.
RocCurve roc_auc(std::span<const double> scores, std::span<const int> labels);

}  // namespace reacquire::learn
