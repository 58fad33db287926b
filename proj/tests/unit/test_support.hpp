#pragma once

// Shared helpers for the unit suites: random generators with fixed seeds and
// Eigen-facing conversions. Eigen stays test-only; it is the independent
// oracle for the hand-written operators.

#include "pdenet/dense.hpp"
#include "pdenet/kernel.hpp"
#include "pdenet/signal.hpp"

#include <Eigen/Dense>

#include <random>

namespace testsupport {

inline Eigen::MatrixXd to_eigen(const pdenet::DenseOperator& m) {
    Eigen::MatrixXd out(m.rows(), m.cols());
    for (int r = 0; r < m.rows(); ++r)
        for (int c = 0; c < m.cols(); ++c) out(r, c) = m.at(r, c);
    return out;
}

inline Eigen::VectorXd to_eigen(const pdenet::SignalBundle& u) {
    Eigen::VectorXd v(u.data().size());
    for (size_t i = 0; i < u.data().size(); ++i) v(static_cast<Eigen::Index>(i)) = u.data()[i];
    return v;
}

inline pdenet::SignalBundle random_signal(std::mt19937_64& rng, int channels, int n,
                                          double lo = -1.0, double hi = 1.0) {
    std::uniform_real_distribution<double> dist(lo, hi);
    pdenet::SignalBundle u(channels, n);
    for (double& v : u.data()) v = dist(rng);
    return u;
}

inline pdenet::KernelBank random_bank(std::mt19937_64& rng, int out_c, int in_c,
                                      double scale = 1.0) {
    std::uniform_real_distribution<double> dist(-scale, scale);
    pdenet::KernelBank k(out_c, in_c);
    for (double& t : k.taps()) t = dist(rng);
    return k;
}

} // namespace testsupport
