#include "qnet.hpp"

#include <cmath>

#include "errors.hpp"

namespace tracesynth {

namespace {

void fill_uniform(Eigen::MatrixXd& m, double scale, Rng& rng) {
    double* p = m.data();
    for (Eigen::Index i = 0; i < m.size(); ++i)
        p[i] = uniform_symmetric(rng, scale);
}

} // namespace

QNetwork QNetwork::init(std::uint32_t n, std::uint32_t hidden, Rng& rng) {
    if (n == 0 || hidden == 0)
        fail(ErrorCode::invalid_argument, "network dimensions must be positive");
    QNetwork net;
    net.w1.resize(hidden, n);
    net.w2.resize(hidden, hidden);
    net.w3.resize(n, hidden);
    net.b1 = Eigen::VectorXd::Zero(hidden);
    net.b2 = Eigen::VectorXd::Zero(hidden);
    net.b3 = Eigen::VectorXd::Zero(n);
    fill_uniform(net.w1, std::sqrt(6.0 / n), rng);
    fill_uniform(net.w2, std::sqrt(6.0 / hidden), rng);
    fill_uniform(net.w3, std::sqrt(6.0 / hidden), rng);
    return net;
}

Eigen::VectorXd QNetwork::forward(const Eigen::VectorXd& state) const {
    if (state.size() != w1.cols())
        fail(ErrorCode::invalid_argument,
             "state dimension " + std::to_string(state.size()) + " does not match network input " +
                 std::to_string(w1.cols()));
    Eigen::VectorXd a1 = (w1 * state + b1).cwiseMax(0.0);
    Eigen::VectorXd a2 = (w2 * a1 + b2).cwiseMax(0.0);
    return w3 * a2 + b3;
}

Eigen::VectorXd QNetwork::forward(const StateEncoding& state) const {
    return forward(to_vector(state));
}

Eigen::MatrixXd QNetwork::forward_batch(const Eigen::MatrixXd& x, Activations* acts) const {
    if (x.rows() != w1.cols())
        fail(ErrorCode::invalid_argument,
             "state dimension " + std::to_string(x.rows()) + " does not match network input " +
                 std::to_string(w1.cols()));
    Eigen::MatrixXd z1 = (w1 * x).colwise() + b1;
    Eigen::MatrixXd a1 = z1.cwiseMax(0.0);
    Eigen::MatrixXd z2 = (w2 * a1).colwise() + b2;
    Eigen::MatrixXd a2 = z2.cwiseMax(0.0);
    Eigen::MatrixXd q = (w3 * a2).colwise() + b3;
    if (acts) {
        acts->x = x;
        acts->z1 = std::move(z1);
        acts->a1 = std::move(a1);
        acts->z2 = std::move(z2);
        acts->a2 = std::move(a2);
        acts->q = q;
    }
    return q;
}

bool QNetwork::finite() const {
    return w1.allFinite() && b1.allFinite() && w2.allFinite() && b2.allFinite() &&
           w3.allFinite() && b3.allFinite();
}

Eigen::VectorXd to_vector(const StateEncoding& state) {
    Eigen::VectorXd v(static_cast<Eigen::Index>(state.size()));
    for (std::size_t i = 0; i < state.size(); ++i)
        v[static_cast<Eigen::Index>(i)] = static_cast<double>(state[i]);
    return v;
}

} // namespace tracesynth
