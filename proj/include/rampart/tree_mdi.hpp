#pragma once

#include <algorithm>
#include <numeric>
#include <vector>

#include <Eigen/Dense>

#include "rampart/data.hpp"

namespace rampart {

struct TreeOptions {
    int max_depth = 5;
    int min_samples_split = 10;
};

namespace detail {

// Running sufficient statistics for one side of a candidate split. For Gini the
// response is binary, so sum == count of ones.
struct SplitStats {
    double count = 0.0;
    double sum = 0.0;
    double sum_sq = 0.0;

    void add(double v) {
        count += 1.0;
        sum += v;
        sum_sq += v * v;
    }
    void remove(double v) {
        count -= 1.0;
        sum -= v;
        sum_sq -= v * v;
    }

    // Node impurity times node size, so children combine by plain addition.
    double weighted_impurity(Task task) const {
        if (count <= 0.0) return 0.0;
        if (task == Task::Classification) {
            const double p = sum / count;
            return count * 2.0 * p * (1.0 - p);
        }
        return std::max(0.0, sum_sq - sum * sum / count);
    }
};

class MdiTreeBuilder {
public:
    MdiTreeBuilder(const Eigen::MatrixXd& x, const Eigen::VectorXd& y, Task task,
                   const TreeOptions& opts)
        : x_(x), y_(y), task_(task), opts_(opts), importance_(Eigen::VectorXd::Zero(x.cols())) {}

    Eigen::VectorXd run() {
        std::vector<Eigen::Index> rows(static_cast<std::size_t>(x_.rows()));
        std::iota(rows.begin(), rows.end(), Eigen::Index{0});
        grow(rows, 0);
        return importance_ / static_cast<double>(x_.rows());
    }

private:
    struct Split {
        Eigen::Index feature = -1;
        double threshold = 0.0;
        double decrease = 0.0;
    };

    void grow(std::vector<Eigen::Index>& rows, int depth) {
        if (depth >= opts_.max_depth || static_cast<int>(rows.size()) < opts_.min_samples_split) {
            return;
        }
        SplitStats node;
        for (auto r : rows) node.add(y_[r]);
        const double node_impurity = node.weighted_impurity(task_);
        if (node_impurity <= 0.0) return;

        const Split best = best_split(rows, node, node_impurity);
        if (best.feature < 0) return;
        // Weighted decrease already carries the n_node factor; run() divides by n_root.
        importance_[best.feature] += best.decrease;

        std::vector<Eigen::Index> left;
        std::vector<Eigen::Index> right;
        for (auto r : rows) {
            (x_(r, best.feature) <= best.threshold ? left : right).push_back(r);
        }
        rows.clear();
        rows.shrink_to_fit();
        grow(left, depth + 1);
        grow(right, depth + 1);
    }

    // Exhaustive search over midpoints between consecutive distinct values. Ties in
    // gain keep the earliest candidate (lowest feature, then lowest threshold).
    Split best_split(const std::vector<Eigen::Index>& rows, const SplitStats& node,
                     double node_impurity) const {
        Split best;
        const double min_gain = 1e-12 * std::max(1.0, node_impurity);
        std::vector<Eigen::Index> order(rows);
        for (Eigen::Index f = 0; f < x_.cols(); ++f) {
            std::sort(order.begin(), order.end(), [&](Eigen::Index a, Eigen::Index b) {
                return x_(a, f) < x_(b, f) || (x_(a, f) == x_(b, f) && a < b);
            });
            SplitStats left;
            SplitStats right = node;
            for (std::size_t i = 0; i + 1 < order.size(); ++i) {
                const double v = y_[order[i]];
                left.add(v);
                right.remove(v);
                const double here = x_(order[i], f);
                const double next = x_(order[i + 1], f);
                if (!(here < next)) continue;
                const double gain = node_impurity - left.weighted_impurity(task_) -
                                    right.weighted_impurity(task_);
                if (gain > best.decrease + min_gain) {
                    best.feature = f;
                    best.threshold = here + 0.5 * (next - here);
                    best.decrease = gain;
                }
            }
        }
        return best;
    }

    const Eigen::MatrixXd& x_;
    const Eigen::VectorXd& y_;
    Task task_;
    TreeOptions opts_;
    Eigen::VectorXd importance_;
};

}  // namespace detail

/// Mean decrease in impurity of a single CART tree: for every split, the impurity
/// decrease (variance for regression, Gini for classification) weighted by the
/// fraction of samples reaching the node, summed per feature. Unsplit features get 0.
inline Eigen::VectorXd tree_mdi_importance(const Eigen::MatrixXd& x, const Eigen::VectorXd& y,
                                           Task task, const TreeOptions& opts = {}) {
    return detail::MdiTreeBuilder(x, y, task, opts).run();
}

}  // namespace rampart
