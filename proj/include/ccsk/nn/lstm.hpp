#ifndef CCSK_NN_LSTM_HPP
#define CCSK_NN_LSTM_HPP

// Single-direction LSTM layer over a batch of sequences, with backpropagation
// through time. Gate rows are ordered input, forget, cell, output:
//   z = W x_t + U h_{t-1} + b
//   c_t = f * c_{t-1} + i * g,  h_t = o * tanh(c_t)
// A reverse layer walks t = T-1 .. 0 and stores h_t at position t.

#include "ccsk/nn/tensor.hpp"

namespace ccsk::nn {

struct LstmParams {
    Mat W;  // 4H x in
    Mat U;  // 4H x H
    Mat b;  // 4H x 1

    [[nodiscard]] Index hidden() const { return U.cols(); }
};

struct LstmCache {
    Mat x;      // in x BT
    Mat gates;  // 4H x BT, post-activation
    Mat c;      // H x BT
    Mat h;      // H x BT
    Index batch{0};
    Index steps{0};
    bool reverse{false};
};

inline void lstm_forward(const LstmParams& p, const Mat& x, Index batch, Index steps, bool reverse, LstmCache& cache)
{
    const Index H = p.hidden();
    const Index cols = batch * steps;
    cache.batch = batch;
    cache.steps = steps;
    cache.reverse = reverse;
    cache.x = x;
    cache.gates.resize(4 * H, cols);
    cache.gates.noalias() = p.W * x;
    cache.gates.colwise() += p.b.col(0);
    cache.c.resize(H, cols);
    cache.h.resize(H, cols);

    Mat h_prev = Mat::Zero(H, batch);
    Mat c_prev = Mat::Zero(H, batch);
    for (Index s = 0; s < steps; ++s) {
        const Index t = reverse ? steps - 1 - s : s;
        auto z = step_view(cache.gates, t, steps, batch);
        z.noalias() += p.U * h_prev;
        z.topRows(2 * H) = sigmoid(z.topRows(2 * H).array()).matrix();
        z.middleRows(2 * H, H) = z.middleRows(2 * H, H).array().tanh().matrix();
        z.bottomRows(H) = sigmoid(z.bottomRows(H).array()).matrix();

        auto c = step_view(cache.c, t, steps, batch);
        auto h = step_view(cache.h, t, steps, batch);
        c = (z.middleRows(H, H).array() * c_prev.array() + z.topRows(H).array() * z.middleRows(2 * H, H).array())
                .matrix();
        h = (z.bottomRows(H).array() * c.array().tanh()).matrix();
        h_prev = h;
        c_prev = c;
    }
}

// dh_out: gradient w.r.t. every stored h (H x BT). Accumulates into grad and,
// when dx is non-null, writes the gradient w.r.t. the layer input.
inline void lstm_backward(const LstmParams& p, const LstmCache& cache, const Mat& dh_out, LstmParams& grad, Mat* dx)
{
    const Index H = p.hidden();
    const Index B = cache.batch;
    const Index T = cache.steps;
    Mat dz_all(4 * H, B * T);
    Mat dh_next = Mat::Zero(H, B);
    Mat dc_next = Mat::Zero(H, B);
    const Mat zeros = Mat::Zero(H, B);

    for (Index s = T - 1; s >= 0; --s) {
        const Index t = cache.reverse ? T - 1 - s : s;
        const Index t_prev = cache.reverse ? t + 1 : t - 1;
        const auto gates = step_view(cache.gates, t, T, B);
        const auto c = step_view(cache.c, t, T, B);
        const Mat c_prev = s > 0 ? Mat(step_view(cache.c, t_prev, T, B)) : zeros;

        const auto i = gates.topRows(H).array();
        const auto f = gates.middleRows(H, H).array();
        const auto g = gates.middleRows(2 * H, H).array();
        const auto o = gates.bottomRows(H).array();

        const Eigen::ArrayXXd dh = step_view(dh_out, t, T, B).array() + dh_next.array();
        const Eigen::ArrayXXd tc = c.array().tanh();
        const Eigen::ArrayXXd dc = dh * o * (1.0 - tc.square()) + dc_next.array();

        auto dz = step_view(dz_all, t, T, B);
        dz.topRows(H) = (dc * g * i * (1.0 - i)).matrix();
        dz.middleRows(H, H) = (dc * c_prev.array() * f * (1.0 - f)).matrix();
        dz.middleRows(2 * H, H) = (dc * i * (1.0 - g.square())).matrix();
        dz.bottomRows(H) = (dh * tc * o * (1.0 - o)).matrix();

        dc_next = (dc * f).matrix();
        dh_next.noalias() = p.U.transpose() * dz;
    }

    // h_{t-1} in processing order, zero for the first processed step.
    Mat h_prev = Mat::Zero(H, B * T);
    for (Index b = 0; b < B; ++b) {
        if (T < 2) break;
        if (cache.reverse)
            h_prev.block(0, b * T, H, T - 1) = cache.h.block(0, b * T + 1, H, T - 1);
        else
            h_prev.block(0, b * T + 1, H, T - 1) = cache.h.block(0, b * T, H, T - 1);
    }

    grad.W.noalias() += dz_all * cache.x.transpose();
    grad.U.noalias() += dz_all * h_prev.transpose();
    grad.b += dz_all.rowwise().sum();
    if (dx) dx->noalias() = p.W.transpose() * dz_all;
}

} // namespace ccsk::nn

#endif
