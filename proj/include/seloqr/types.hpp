#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace seloqr {

using Vector = Eigen::VectorXd;

// Rows are observations, so X.row(i) is one design vector. Row-major keeps
// per-observation access contiguous.
using Matrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

using Index = Eigen::Index;

/// Violated precondition or invariant (caller error).
struct contract_error : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

/// Malformed or unusable input data (CSV parsing, bad cells, short files).
struct data_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Numerical failure inside an iterative routine.
struct numerical_error : std::runtime_error {
    explicit numerical_error(const std::string& msg, int iteration_ = -1)
        : std::runtime_error(msg), iteration(iteration_) {}
    int iteration;
};

/// Quantile index tau, restricted to (0,1).
class QuantileLevel {
public:
    explicit QuantileLevel(double tau) : tau_(tau) {
        if (!(tau > 0.0 && tau < 1.0))
            throw contract_error("QuantileLevel: tau must lie in (0,1), got " + std::to_string(tau));
    }
    double value() const { return tau_; }

private:
    double tau_;
};

/// Response vector plus dense design matrix. All entries must be finite;
/// dimensions are fixed at construction.
class Dataset {
public:
    Dataset(Vector y, Matrix X) : y_(std::move(y)), X_(std::move(X)) {
        if (y_.size() < 1 || X_.cols() < 1)
            throw contract_error("Dataset: need n >= 1 and d >= 1");
        if (X_.rows() != y_.size())
            throw contract_error("Dataset: X has " + std::to_string(X_.rows()) +
                                 " rows but y has length " + std::to_string(y_.size()));
        if (!y_.allFinite() || !X_.allFinite())
            throw contract_error("Dataset: non-finite entries are not allowed");
    }

    const Vector& y() const { return y_; }
    const Matrix& X() const { return X_; }
    Index n() const { return y_.size(); }
    Index d() const { return X_.cols(); }

private:
    Vector y_;
    Matrix X_;
};

/// Strictly increasing set of column indices.
class IndexSet {
public:
    IndexSet() = default;

    /// Members must already be strictly increasing and nonnegative.
    explicit IndexSet(std::vector<Index> members) : members_(std::move(members)) {
        for (std::size_t k = 0; k < members_.size(); ++k) {
            if (members_[k] < 0)
                throw contract_error("IndexSet: negative index");
            if (k > 0 && members_[k] <= members_[k - 1])
                throw contract_error("IndexSet: indices must be strictly increasing");
        }
    }

    const std::vector<Index>& members() const { return members_; }
    std::size_t size() const { return members_.size(); }
    bool empty() const { return members_.empty(); }

    bool contains(Index j) const {
        return std::binary_search(members_.begin(), members_.end(), j);
    }
    bool is_subset_of(const IndexSet& other) const {
        return std::includes(other.members_.begin(), other.members_.end(),
                             members_.begin(), members_.end());
    }
    Index max_index() const { return members_.empty() ? -1 : members_.back(); }

    friend bool operator==(const IndexSet& a, const IndexSet& b) {
        return a.members_ == b.members_;
    }
    friend bool operator!=(const IndexSet& a, const IndexSet& b) { return !(a == b); }

private:
    std::vector<Index> members_;
};

}  // namespace seloqr
