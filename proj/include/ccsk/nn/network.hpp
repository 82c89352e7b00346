#ifndef CCSK_NN_NETWORK_HPP
#define CCSK_NN_NETWORK_HPP

// Window classifier:
//   input (C_in x T) -> BiLSTM 1 (2H x T) -> self-attention (2H x T) -> dropout
//   -> BiLSTM 2, final states only (2H) -> dropout -> dense (2) -> softmax.
// Class 1 = window carries the Cubic segment, class 0 = Logistic only.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "ccsk/nn/attention.hpp"
#include "ccsk/nn/config.hpp"
#include "ccsk/nn/lstm.hpp"
#include "ccsk/nn/tensor.hpp"
#include "ccsk/rng.hpp"

namespace ccsk::nn {

struct NetParams {
    NetConfig config;
    std::uint64_t config_fingerprint{0};
    LstmParams lstm1_fwd, lstm1_bwd;
    AttentionParams attention;
    LstmParams lstm2_fwd, lstm2_bwd;
    Mat dense_W;  // 2 x 2H
    Mat dense_b;  // 2 x 1
};

// Visits every weight tensor with a stable name. Works for const and mutable params.
template <typename Params, typename F>
void for_each_tensor(Params& p, F&& f)
{
    auto lstm = [&f](const char* prefix, auto& l) {
        f(std::string(prefix) + ".W", l.W);
        f(std::string(prefix) + ".U", l.U);
        f(std::string(prefix) + ".b", l.b);
    };
    lstm("lstm1.fwd", p.lstm1_fwd);
    lstm("lstm1.bwd", p.lstm1_bwd);
    f(std::string("attention.Wq"), p.attention.Wq);
    f(std::string("attention.bq"), p.attention.bq);
    f(std::string("attention.Wk"), p.attention.Wk);
    f(std::string("attention.bk"), p.attention.bk);
    f(std::string("attention.Wv"), p.attention.Wv);
    f(std::string("attention.bv"), p.attention.bv);
    f(std::string("attention.Wo"), p.attention.Wo);
    f(std::string("attention.bo"), p.attention.bo);
    lstm("lstm2.fwd", p.lstm2_fwd);
    lstm("lstm2.bwd", p.lstm2_bwd);
    f(std::string("dense.W"), p.dense_W);
    f(std::string("dense.b"), p.dense_b);
}

// Two parameter sets visited in lock step (same config).
template <typename A, typename B, typename F>
void for_each_tensor_pair(A& a, B& b, F&& f)
{
    std::vector<Mat*> bs;
    for_each_tensor(b, [&bs](const std::string&, auto& m) { bs.push_back(const_cast<Mat*>(&m)); });
    std::size_t i = 0;
    for_each_tensor(a, [&](const std::string& name, auto& m) { f(name, m, *bs[i++]); });
}

// All tensors zero-filled with the shapes implied by the config.
inline NetParams zero_params(const NetConfig& cfg)
{
    validate(cfg);
    const auto H = static_cast<Index>(cfg.hidden);
    const auto F = static_cast<Index>(cfg.features());
    const auto D = static_cast<Index>(cfg.attention_dim);
    const auto in = static_cast<Index>(cfg.input_channels);
    NetParams p;
    p.config = cfg;
    p.config_fingerprint = fingerprint(cfg);
    auto lstm = [H](Index input) { return LstmParams{Mat::Zero(4 * H, input), Mat::Zero(4 * H, H), Mat::Zero(4 * H, 1)}; };
    p.lstm1_fwd = lstm(in);
    p.lstm1_bwd = lstm(in);
    p.attention = {Mat::Zero(D, F), Mat::Zero(D, 1), Mat::Zero(D, F), Mat::Zero(D, 1),
                   Mat::Zero(D, F), Mat::Zero(D, 1), Mat::Zero(F, D), Mat::Zero(F, 1)};
    p.lstm2_fwd = lstm(F);
    p.lstm2_bwd = lstm(F);
    p.dense_W = Mat::Zero(2, F);
    p.dense_b = Mat::Zero(2, 1);
    return p;
}

inline NetParams zeros_like(const NetParams& p) { return zero_params(p.config); }

// Uniform(-1/sqrt(fan_in), 1/sqrt(fan_in)) weights, zero biases, forget-gate bias 1.
inline NetParams init_params(const NetConfig& cfg, Seed seed)
{
    NetParams p = zero_params(cfg);
    Rng rng = make_rng(seed);
    auto fill = [&rng](Mat& m, double fan_in) {
        const double bound = 1.0 / std::sqrt(fan_in);
        for (Index j = 0; j < m.cols(); ++j)
            for (Index i = 0; i < m.rows(); ++i) m(i, j) = bound * (2.0 * uniform01(rng) - 1.0);
    };
    const auto H = static_cast<Index>(cfg.hidden);
    for (LstmParams* l : {&p.lstm1_fwd, &p.lstm1_bwd, &p.lstm2_fwd, &p.lstm2_bwd}) {
        fill(l->W, static_cast<double>(l->W.cols()));
        fill(l->U, static_cast<double>(H));
        l->b.middleRows(H, H).setOnes();
    }
    fill(p.attention.Wq, static_cast<double>(cfg.features()));
    fill(p.attention.Wk, static_cast<double>(cfg.features()));
    fill(p.attention.Wv, static_cast<double>(cfg.features()));
    fill(p.attention.Wo, static_cast<double>(cfg.attention_dim));
    fill(p.dense_W, static_cast<double>(cfg.features()));
    return p;
}

inline std::size_t parameter_count(const NetParams& p)
{
    std::size_t n = 0;
    for_each_tensor(p, [&n](const std::string&, const Mat& m) { n += static_cast<std::size_t>(m.size()); });
    return n;
}

inline bool all_finite(const NetParams& p)
{
    bool ok = true;
    for_each_tensor(p, [&ok](const std::string&, const Mat& m) { ok = ok && m.allFinite(); });
    return ok;
}

// Batched network input from row-major windows (batch x T).
inline Mat make_input(std::span<const double> windows, Index batch, const NetConfig& cfg)
{
    const auto T = static_cast<Index>(cfg.window_length);
    require(static_cast<Index>(windows.size()) == batch * T,
            "window length does not match the network input length " + std::to_string(T));
    Mat x = Mat::Zero(static_cast<Index>(cfg.input_channels), batch * T);
    for (Index c = 0; c < batch * T; ++c) x(0, c) = windows[static_cast<std::size_t>(c)];
    if (cfg.input_channels == 2 && cfg.aux == AuxChannel::Lag) {
        for (Index b = 0; b < batch; ++b)
            for (Index t = 1; t < T; ++t) x(1, b * T + t) = windows[static_cast<std::size_t>(b * T + t - 1)];
    }
    return x;
}

struct Mode {
    bool train{false};
    Seed dropout_seed{0};

    static Mode infer() { return {}; }
    static Mode training(Seed s) { return {true, s}; }
};

// Everything the backward pass needs from one forward pass.
struct ForwardState {
    Index batch{0};
    Index steps{0};
    LstmCache lstm1_fwd, lstm1_bwd;
    Mat seq1;  // 2H x BT
    AttentionCache attention;
    Mat mask1;  // empty when dropout is inactive
    Mat seq2;   // 2H x BT, attention output after dropout
    LstmCache lstm2_fwd, lstm2_bwd;
    Mat mask2;
    Mat features;  // 2H x B, after dropout
    Mat probs;     // 2 x B
};

namespace detail {

inline Mat dropout_mask(Index rows, Index cols, double p, Rng& rng)
{
    Mat m(rows, cols);
    const double keep_scale = 1.0 / (1.0 - p);
    for (Index j = 0; j < cols; ++j)
        for (Index i = 0; i < rows; ++i) m(i, j) = uniform01(rng) < p ? 0.0 : keep_scale;
    return m;
}

} // namespace detail

// Inverted-dropout mask for a (rows x cols) activation; exposed for testing.
inline Mat dropout_mask(Index rows, Index cols, double p, Seed seed)
{
    Rng rng = make_rng(seed);
    return detail::dropout_mask(rows, cols, p, rng);
}

// Forward pass over `batch` examples; returns 2 x batch class probabilities.
inline const Mat& forward_batch(const NetParams& p, const Mat& x, Index batch, Mode mode, ForwardState& st)
{
    const NetConfig& cfg = p.config;
    const auto H = static_cast<Index>(cfg.hidden);
    const auto T = static_cast<Index>(cfg.window_length);
    const bool drop = mode.train && cfg.dropout > 0.0;
    Rng rng = make_rng(mode.dropout_seed);
    st.batch = batch;
    st.steps = T;

    lstm_forward(p.lstm1_fwd, x, batch, T, false, st.lstm1_fwd);
    lstm_forward(p.lstm1_bwd, x, batch, T, true, st.lstm1_bwd);
    st.seq1.resize(2 * H, batch * T);
    st.seq1.topRows(H) = st.lstm1_fwd.h;
    st.seq1.bottomRows(H) = st.lstm1_bwd.h;
    check_finite(st.seq1, "bilstm1");

    st.seq2 = attention_forward(p.attention, st.seq1, batch, T, static_cast<Index>(cfg.heads), st.attention);
    check_finite(st.seq2, "attention");
    if (drop) {
        st.mask1 = detail::dropout_mask(st.seq2.rows(), st.seq2.cols(), cfg.dropout, rng);
        st.seq2.array() *= st.mask1.array();
    } else {
        st.mask1.resize(0, 0);
    }

    lstm_forward(p.lstm2_fwd, st.seq2, batch, T, false, st.lstm2_fwd);
    lstm_forward(p.lstm2_bwd, st.seq2, batch, T, true, st.lstm2_bwd);
    st.features.resize(2 * H, batch);
    for (Index b = 0; b < batch; ++b) {
        st.features.col(b).head(H) = st.lstm2_fwd.h.col(b * T + T - 1);
        st.features.col(b).tail(H) = st.lstm2_bwd.h.col(b * T);
    }
    check_finite(st.features, "bilstm2");
    if (drop) {
        st.mask2 = detail::dropout_mask(st.features.rows(), st.features.cols(), cfg.dropout, rng);
        st.features.array() *= st.mask2.array();
    } else {
        st.mask2.resize(0, 0);
    }

    Mat logits = p.dense_W * st.features;
    logits.colwise() += p.dense_b.col(0);
    check_finite(logits, "dense");
    st.probs.resize(2, batch);
    for (Index b = 0; b < batch; ++b) {
        const double m = logits.col(b).maxCoeff();
        const double e0 = std::exp(logits(0, b) - m);
        const double e1 = std::exp(logits(1, b) - m);
        st.probs(0, b) = e0 / (e0 + e1);
        st.probs(1, b) = e1 / (e0 + e1);
    }
    return st.probs;
}

// Single-window convenience: returns {p0, p1}.
inline std::array<double, 2> forward(std::span<const double> window, const NetParams& p, Mode mode = Mode::infer())
{
    ForwardState st;
    const Mat& probs = forward_batch(p, make_input(window, 1, p.config), 1, mode, st);
    return {probs(0, 0), probs(1, 0)};
}

// P(class = Cubic) for each of `batch` row-major windows (inference mode).
inline std::vector<double> cubic_probabilities(std::span<const double> windows, std::size_t batch, const NetParams& p)
{
    std::vector<double> out;
    out.reserve(batch);
    constexpr std::size_t chunk = 256;
    const std::size_t T = p.config.window_length;
    ForwardState st;
    for (std::size_t start = 0; start < batch; start += chunk) {
        const std::size_t n = std::min(chunk, batch - start);
        const Mat x = make_input(windows.subspan(start * T, n * T), static_cast<Index>(n), p.config);
        const Mat& probs = forward_batch(p, x, static_cast<Index>(n), Mode::infer(), st);
        for (std::size_t b = 0; b < n; ++b) out.push_back(probs(1, static_cast<Index>(b)));
    }
    return out;
}

inline constexpr double kProbClamp = 1e-12;

inline double cross_entropy(const Mat& probs, std::span<const int> labels)
{
    double loss = 0.0;
    for (Index b = 0; b < probs.cols(); ++b) {
        const double py = std::clamp(probs(labels[static_cast<std::size_t>(b)], b), kProbClamp, 1.0 - kProbClamp);
        loss -= std::log(py);
    }
    return loss / static_cast<double>(probs.cols());
}

struct LossAndGrad {
    double loss{0.0};
    NetParams grad;
    std::size_t correct{0};
};

// Mean binary cross-entropy over the batch and its gradient (train mode:
// dropout masks drawn from `seed`).
inline LossAndGrad loss_and_grad(std::span<const double> windows, std::span<const int> labels, const NetParams& p,
                                 Seed seed)
{
    const auto B = static_cast<Index>(labels.size());
    require(B > 0, "loss_and_grad needs a non-empty batch");
    const NetConfig& cfg = p.config;
    const auto H = static_cast<Index>(cfg.hidden);
    const auto T = static_cast<Index>(cfg.window_length);

    ForwardState st;
    const Mat x = make_input(windows, B, cfg);
    forward_batch(p, x, B, Mode::training(seed), st);

    LossAndGrad out{cross_entropy(st.probs, labels), zeros_like(p), 0};
    NetParams& g = out.grad;

    // d loss / d logits = (p - onehot) / B, zero where the clamp is active.
    Mat dlogits(2, B);
    for (Index b = 0; b < B; ++b) {
        const int y = labels[static_cast<std::size_t>(b)];
        const double py = st.probs(y, b);
        if ((st.probs(1, b) > st.probs(0, b)) == (y == 1)) ++out.correct;
        if (py < kProbClamp || py > 1.0 - kProbClamp) {
            dlogits.col(b).setZero();
            continue;
        }
        for (int c = 0; c < 2; ++c) dlogits(c, b) = (st.probs(c, b) - (c == y ? 1.0 : 0.0)) / static_cast<double>(B);
    }

    g.dense_W.noalias() += dlogits * st.features.transpose();
    g.dense_b += dlogits.rowwise().sum();
    Mat dfeat = p.dense_W.transpose() * dlogits;
    if (st.mask2.size() > 0) dfeat.array() *= st.mask2.array();

    Mat dh_fwd = Mat::Zero(H, B * T);
    Mat dh_bwd = Mat::Zero(H, B * T);
    for (Index b = 0; b < B; ++b) {
        dh_fwd.col(b * T + T - 1) = dfeat.col(b).head(H);
        dh_bwd.col(b * T) = dfeat.col(b).tail(H);
    }
    Mat dseq2, dtmp;
    lstm_backward(p.lstm2_fwd, st.lstm2_fwd, dh_fwd, g.lstm2_fwd, &dseq2);
    lstm_backward(p.lstm2_bwd, st.lstm2_bwd, dh_bwd, g.lstm2_bwd, &dtmp);
    dseq2 += dtmp;
    if (st.mask1.size() > 0) dseq2.array() *= st.mask1.array();

    const Mat dseq1 = attention_backward(p.attention, st.attention, dseq2, g.attention);
    lstm_backward(p.lstm1_fwd, st.lstm1_fwd, dseq1.topRows(H), g.lstm1_fwd, nullptr);
    lstm_backward(p.lstm1_bwd, st.lstm1_bwd, dseq1.bottomRows(H), g.lstm1_bwd, nullptr);
    return out;
}

} // namespace ccsk::nn

#endif
