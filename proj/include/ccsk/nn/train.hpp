#ifndef CCSK_NN_TRAIN_HPP
#define CCSK_NN_TRAIN_HPP

// Mini-batch Adam training with a held-out validation split and early
// stopping on validation loss. Single-threaded and deterministic for a fixed
// TrainingConfig::seed.

#include <cmath>
#include <functional>
#include <limits>
#include <numeric>
#include <optional>
#include <vector>

#include "ccsk/nn/config.hpp"
#include "ccsk/nn/dataset.hpp"
#include "ccsk/nn/network.hpp"

namespace ccsk::nn {

struct EpochStats {
    std::size_t epoch{0};
    double train_loss{0.0};
    double train_accuracy{0.0};  // running, train mode
    double val_loss{0.0};
    double val_accuracy{0.0};
};

struct TrainResult {
    NetParams params;  // best validation loss
    std::vector<EpochStats> history;
    std::size_t best_epoch{0};
    bool stopped_early{false};
    bool diverged{false};
};

class Adam {
public:
    Adam(const NetParams& shape, const TrainingConfig& cfg)
        : m_(zeros_like(shape)), v_(zeros_like(shape)), lr_(cfg.learning_rate), b1_(cfg.beta1), b2_(cfg.beta2),
          eps_(cfg.epsilon)
    {
    }

    void step(NetParams& params, const NetParams& grad)
    {
        ++t_;
        const double c1 = 1.0 - std::pow(b1_, static_cast<double>(t_));
        const double c2 = 1.0 - std::pow(b2_, static_cast<double>(t_));
        std::vector<Mat*> ms, vs;
        for_each_tensor(m_, [&ms](const std::string&, Mat& m) { ms.push_back(&m); });
        for_each_tensor(v_, [&vs](const std::string&, Mat& m) { vs.push_back(&m); });
        std::size_t i = 0;
        for_each_tensor_pair(params, grad, [&](const std::string&, Mat& p, const Mat& g) {
            Mat& m = *ms[i];
            Mat& v = *vs[i];
            ++i;
            m = b1_ * m + (1.0 - b1_) * g;
            v = b2_ * v + (1.0 - b2_) * g.cwiseProduct(g);
            p.array() -= lr_ * (m.array() / c1) / ((v.array() / c2).sqrt() + eps_);
        });
    }

private:
    NetParams m_, v_;
    double lr_, b1_, b2_, eps_;
    std::size_t t_{0};
};

struct Evaluation {
    double loss{0.0};
    double accuracy{0.0};
};

inline Evaluation evaluate(const NetParams& p, const Dataset& data, std::span<const std::size_t> idx)
{
    if (idx.empty()) return {};
    constexpr std::size_t chunk = 256;
    double loss = 0.0;
    std::size_t correct = 0;
    ForwardState st;
    std::vector<double> w;
    std::vector<int> y;
    for (std::size_t start = 0; start < idx.size(); start += chunk) {
        const std::size_t n = std::min(chunk, idx.size() - start);
        w.clear();
        y.clear();
        for (std::size_t j = start; j < start + n; ++j) {
            const auto win = data.window(idx[j]);
            w.insert(w.end(), win.begin(), win.end());
            y.push_back(data.labels[idx[j]]);
        }
        const Mat& probs = forward_batch(p, make_input(w, static_cast<Index>(n), p.config), static_cast<Index>(n),
                                         Mode::infer(), st);
        loss += cross_entropy(probs, y) * static_cast<double>(n);
        for (std::size_t b = 0; b < n; ++b)
            if ((probs(1, static_cast<Index>(b)) > probs(0, static_cast<Index>(b))) == (y[b] == 1)) ++correct;
    }
    return {loss / static_cast<double>(idx.size()), static_cast<double>(correct) / static_cast<double>(idx.size())};
}

inline Evaluation evaluate(const NetParams& p, const Dataset& data)
{
    std::vector<std::size_t> all(data.size());
    std::iota(all.begin(), all.end(), 0);
    return evaluate(p, data, all);
}

using EpochCallback = std::function<void(const EpochStats&)>;

inline TrainResult train(const Dataset& data, const NetConfig& net_cfg, const TrainingConfig& tr,
                         const EpochCallback& on_epoch = {}, std::optional<NetParams> initial = std::nullopt)
{
    validate(net_cfg);
    validate(tr);
    require(data.window_length == net_cfg.window_length, "dataset window length does not match the network");
    require(data.size() >= tr.batch_size, "dataset must hold at least one batch");

    std::vector<std::size_t> order(data.size());
    std::iota(order.begin(), order.end(), 0);
    {
        Rng rng = make_rng(derive_seed(tr.seed, {0x5b1170}));
        std::shuffle(order.begin(), order.end(), rng);
    }
    auto n_val = static_cast<std::size_t>(std::llround(tr.validation_fraction * static_cast<double>(data.size())));
    n_val = std::clamp<std::size_t>(n_val, 1, data.size() - 1);
    const std::vector<std::size_t> val(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(n_val));
    std::vector<std::size_t> trn(order.begin() + static_cast<std::ptrdiff_t>(n_val), order.end());

    TrainResult result;
    NetParams params = initial ? std::move(*initial) : init_params(net_cfg, derive_seed(tr.seed, {0x1417}));
    require(params.config == net_cfg, "initial parameters do not match the network config");
    Adam adam(params, tr);
    result.params = params;
    double best = std::numeric_limits<double>::infinity();
    std::size_t since_best = 0;

    const std::size_t T = net_cfg.window_length;
    std::vector<double> w;
    std::vector<int> y;
    for (std::size_t epoch = 1; epoch <= tr.max_epochs; ++epoch) {
        Rng rng = make_rng(derive_seed(tr.seed, {0xe90c, epoch}));
        std::shuffle(trn.begin(), trn.end(), rng);
        double loss_sum = 0.0;
        std::size_t correct = 0;
        std::size_t batch_no = 0;
        try {
            for (std::size_t start = 0; start < trn.size(); start += tr.batch_size, ++batch_no) {
                const std::size_t n = std::min(tr.batch_size, trn.size() - start);
                w.clear();
                y.clear();
                w.reserve(n * T);
                for (std::size_t j = start; j < start + n; ++j) {
                    const auto win = data.window(trn[j]);
                    w.insert(w.end(), win.begin(), win.end());
                    y.push_back(data.labels[trn[j]]);
                }
                auto lg = loss_and_grad(w, y, params, derive_seed(tr.seed, {0xd409, epoch, batch_no}));
                if (!std::isfinite(lg.loss)) throw NumericError("non-finite training loss");
                loss_sum += lg.loss * static_cast<double>(n);
                correct += lg.correct;
                adam.step(params, lg.grad);
            }
        } catch (const NumericError&) {
            result.diverged = true;
            break;
        }
        if (!all_finite(params)) {
            result.diverged = true;
            break;
        }

        EpochStats es;
        es.epoch = epoch;
        es.train_loss = loss_sum / static_cast<double>(trn.size());
        es.train_accuracy = static_cast<double>(correct) / static_cast<double>(trn.size());
        const Evaluation ev = evaluate(params, data, val);
        es.val_loss = ev.loss;
        es.val_accuracy = ev.accuracy;
        result.history.push_back(es);
        if (on_epoch) on_epoch(es);

        if (ev.loss < best) {
            best = ev.loss;
            result.params = params;
            result.best_epoch = epoch;
            since_best = 0;
        } else if (++since_best >= tr.patience) {
            result.stopped_early = true;
            break;
        }
    }
    return result;
}

} // namespace ccsk::nn

#endif
