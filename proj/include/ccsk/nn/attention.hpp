#ifndef CCSK_NN_ATTENTION_HPP
#define CCSK_NN_ATTENTION_HPP

// Multi-head scaled dot-product self-attention over the steps of each example.
// No positional encoding: the block is permutation-equivariant in time.

#include <cmath>
#include <vector>

#include "ccsk/nn/tensor.hpp"

namespace ccsk::nn {

struct AttentionParams {
    Mat Wq, bq;  // D x in, D x 1
    Mat Wk, bk;
    Mat Wv, bv;
    Mat Wo, bo;  // out x D, out x 1
};

struct AttentionCache {
    Mat x;
    Mat q, k, v;   // D x BT
    Mat ctx;       // D x BT, concatenated heads
    // Transposed attention weights per (example, head): probs_t(j, i) is the
    // weight query i puts on key j; each column sums to 1.
    std::vector<Mat> probs_t;
    Index batch{0};
    Index steps{0};
    Index heads{1};
};

inline Mat attention_forward(const AttentionParams& p, const Mat& x, Index batch, Index steps, Index heads,
                             AttentionCache& cache)
{
    const Index D = p.Wq.rows();
    const Index dh = D / heads;
    const double scale = 1.0 / std::sqrt(static_cast<double>(dh));
    cache.batch = batch;
    cache.steps = steps;
    cache.heads = heads;
    cache.x = x;
    cache.q.noalias() = p.Wq * x;
    cache.q.colwise() += p.bq.col(0);
    cache.k.noalias() = p.Wk * x;
    cache.k.colwise() += p.bk.col(0);
    cache.v.noalias() = p.Wv * x;
    cache.v.colwise() += p.bv.col(0);
    cache.ctx.resize(D, batch * steps);
    cache.probs_t.resize(static_cast<std::size_t>(batch * heads));

    for (Index b = 0; b < batch; ++b) {
        for (Index h = 0; h < heads; ++h) {
            Mat& pt = cache.probs_t[static_cast<std::size_t>(b * heads + h)];
            const auto qh = cache.q.block(h * dh, b * steps, dh, steps);
            const auto kh = cache.k.block(h * dh, b * steps, dh, steps);
            const auto vh = cache.v.block(h * dh, b * steps, dh, steps);
            pt.noalias() = scale * (kh.transpose() * qh);
            for (Index i = 0; i < steps; ++i) {
                auto col = pt.col(i);
                col.array() = (col.array() - col.maxCoeff()).exp();
                col /= col.sum();
            }
            cache.ctx.block(h * dh, b * steps, dh, steps).noalias() = vh * pt;
        }
    }
    Mat out = p.Wo * cache.ctx;
    out.colwise() += p.bo.col(0);
    return out;
}

// Accumulates parameter gradients into grad; returns the gradient w.r.t. x.
inline Mat attention_backward(const AttentionParams& p, const AttentionCache& cache, const Mat& dout,
                              AttentionParams& grad)
{
    const Index D = p.Wq.rows();
    const Index heads = cache.heads;
    const Index dh = D / heads;
    const Index T = cache.steps;
    const double scale = 1.0 / std::sqrt(static_cast<double>(dh));

    grad.Wo.noalias() += dout * cache.ctx.transpose();
    grad.bo += dout.rowwise().sum();
    const Mat dctx = p.Wo.transpose() * dout;

    Mat dq(D, dout.cols()), dk(D, dout.cols()), dv(D, dout.cols());
    Mat dpt(T, T);
    for (Index b = 0; b < cache.batch; ++b) {
        for (Index h = 0; h < heads; ++h) {
            const Mat& pt = cache.probs_t[static_cast<std::size_t>(b * heads + h)];
            const auto qh = cache.q.block(h * dh, b * T, dh, T);
            const auto kh = cache.k.block(h * dh, b * T, dh, T);
            const auto vh = cache.v.block(h * dh, b * T, dh, T);
            const auto dch = dctx.block(h * dh, b * T, dh, T);

            dv.block(h * dh, b * T, dh, T).noalias() = dch * pt.transpose();
            dpt.noalias() = vh.transpose() * dch;
            // Softmax Jacobian, column-wise.
            for (Index i = 0; i < T; ++i) {
                const double dotp = pt.col(i).dot(dpt.col(i));
                dpt.col(i) = (pt.col(i).array() * (dpt.col(i).array() - dotp)).matrix();
            }
            dq.block(h * dh, b * T, dh, T).noalias() = scale * (kh * dpt);
            dk.block(h * dh, b * T, dh, T).noalias() = scale * (qh * dpt.transpose());
        }
    }

    grad.Wq.noalias() += dq * cache.x.transpose();
    grad.bq += dq.rowwise().sum();
    grad.Wk.noalias() += dk * cache.x.transpose();
    grad.bk += dk.rowwise().sum();
    grad.Wv.noalias() += dv * cache.x.transpose();
    grad.bv += dv.rowwise().sum();

    Mat dx = p.Wq.transpose() * dq;
    dx.noalias() += p.Wk.transpose() * dk;
    dx.noalias() += p.Wv.transpose() * dv;
    return dx;
}

} // namespace ccsk::nn

#endif
