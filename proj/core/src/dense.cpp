#include "pdenet/dense.hpp"
#include "pdenet/errors.hpp"

namespace pdenet {

std::vector<double> DenseOperator::apply(const std::vector<double>& x) const {
    if (static_cast<int>(x.size()) != cols_)
        throw DimensionError("DenseOperator::apply: size mismatch");
    std::vector<double> y(rows_, 0.0);
    for (int r = 0; r < rows_; ++r) {
        double s = 0.0;
        const double* row = m_.data() + static_cast<size_t>(r) * cols_;
        for (int c = 0; c < cols_; ++c) s += row[c] * x[c];
        y[r] = s;
    }
    return y;
}

DenseOperator DenseOperator::transposed() const {
    DenseOperator t(cols_, rows_);
    for (int r = 0; r < rows_; ++r)
        for (int c = 0; c < cols_; ++c) t.at(c, r) = at(r, c);
    return t;
}

DenseOperator dense_operator_of(const KernelBank& k, int n) {
    if (n < 2) throw DimensionError("dense_operator_of: length must be >= 2");
    const int rows = k.out_channels() * n;
    const int cols = k.in_channels() * n;
    DenseOperator m(rows, cols);
    SignalBundle e(k.in_channels(), n);
    for (int c = 0; c < cols; ++c) {
        e.data().assign(e.data().size(), 0.0);
        e.data()[c] = 1.0;
        SignalBundle col = conv_apply(e, k);
        for (int r = 0; r < rows; ++r) m.at(r, c) = col.data()[r];
    }
    return m;
}

} // namespace pdenet
