#pragma once

#include "pdenet/conv.hpp"

#include <vector>

namespace pdenet {

/// Dense matrix form of a boundary-aware convolution, used as a test oracle
/// and for small direct solves. Row r = co*N + i, column c = ci*N + j.
class DenseOperator {
public:
    DenseOperator() = default;
    DenseOperator(int rows, int cols) : m_(static_cast<size_t>(rows) * cols, 0.0), rows_(rows), cols_(cols) {}

    int rows() const { return rows_; }
    int cols() const { return cols_; }
    double& at(int r, int c) { return m_[static_cast<size_t>(r) * cols_ + c]; }
    double at(int r, int c) const { return m_[static_cast<size_t>(r) * cols_ + c]; }
    std::vector<double>& data() { return m_; }
    const std::vector<double>& data() const { return m_; }

    std::vector<double> apply(const std::vector<double>& x) const;
    DenseOperator transposed() const;

private:
    std::vector<double> m_;
    int rows_ = 0;
    int cols_ = 0;
};

/// Assemble the exact dense matrix M with M vec(u) = vec(conv_apply(u, K))
/// by probing unit vectors through conv_apply.
DenseOperator dense_operator_of(const KernelBank& k, int n);

} // namespace pdenet
