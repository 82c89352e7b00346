#ifndef CCSK_NN_CONFIG_HPP
#define CCSK_NN_CONFIG_HPP

#include <cstdint>
#include <string>
#include <utility>

#include "ccsk/channel.hpp"
#include "ccsk/error.hpp"
#include "ccsk/rng.hpp"

namespace ccsk::nn {

// Second input channel. The received baseband is real, so the default keeps
// the channel at zero; Lag feeds the previous sample of the window instead.
enum class AuxChannel : std::uint32_t { Zero = 0, Lag = 1 };

inline const char* to_string(AuxChannel a) { return a == AuxChannel::Zero ? "zero" : "lag"; }

inline AuxChannel parse_aux_channel(const std::string& s)
{
    if (s == "zero") return AuxChannel::Zero;
    if (s == "lag") return AuxChannel::Lag;
    throw ParameterError("unknown auxiliary channel '" + s + "' (expected zero|lag)");
}

struct NetConfig {
    std::size_t input_channels{2};
    std::size_t hidden{64};          // per direction
    std::size_t heads{4};
    std::size_t attention_dim{128};
    double dropout{0.2};
    std::size_t classes{2};
    std::size_t window_length{32};   // T
    AuxChannel aux{AuxChannel::Zero};

    bool operator==(const NetConfig&) const = default;

    [[nodiscard]] std::size_t features() const { return 2 * hidden; }
};

inline void validate(const NetConfig& c)
{
    require(c.input_channels == 1 || c.input_channels == 2, "input_channels must be 1 or 2");
    require(c.hidden >= 1, "hidden units must be >= 1");
    require(c.heads >= 1 && c.attention_dim >= c.heads && c.attention_dim % c.heads == 0,
            "attention_dim must be a positive multiple of heads");
    require(c.dropout >= 0.0 && c.dropout < 1.0, "dropout must lie in [0,1)");
    require(c.classes == 2, "the window classifier has exactly 2 classes");
    require(c.window_length >= 1, "window length must be >= 1");
}

inline std::uint64_t fingerprint(const NetConfig& c)
{
    std::uint64_t h = mix64(0x43435348);
    auto add = [&h](std::uint64_t v) { h = mix64(h ^ v); };
    add(c.input_channels);
    add(c.hidden);
    add(c.heads);
    add(c.attention_dim);
    add(static_cast<std::uint64_t>(c.dropout * 1e6));
    add(c.classes);
    add(c.window_length);
    add(static_cast<std::uint64_t>(c.aux));
    return h;
}

struct TrainingConfig {
    std::size_t dataset_size{200000};
    std::size_t batch_size{128};
    double learning_rate{1e-3};
    double validation_fraction{0.2};
    std::size_t max_epochs{50};
    std::size_t patience{5};
    std::pair<double, double> train_snr_range_db{12.0, 14.0};
    channel::ChannelKind channel_kind{channel::ChannelKind::AWGN};
    Seed seed{1};
    // Adam moments.
    double beta1{0.9};
    double beta2{0.999};
    double epsilon{1e-8};

    // Default training SNR range per channel.
    static std::pair<double, double> default_snr_range(channel::ChannelKind k)
    {
        return k == channel::ChannelKind::AWGN ? std::pair{12.0, 14.0} : std::pair{14.0, 16.0};
    }
};

inline void validate(const TrainingConfig& c)
{
    require(c.batch_size >= 1, "batch size must be >= 1");
    require(c.learning_rate > 0.0, "learning rate must be positive");
    require(c.validation_fraction > 0.0 && c.validation_fraction < 1.0, "validation fraction must lie in (0,1)");
    require(c.max_epochs >= 1, "max_epochs must be >= 1");
    require(c.train_snr_range_db.first <= c.train_snr_range_db.second, "training SNR range must satisfy lo <= hi");
}

} // namespace ccsk::nn

#endif
