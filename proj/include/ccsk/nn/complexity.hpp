#ifndef CCSK_NN_COMPLEXITY_HPP
#define CCSK_NN_COMPLEXITY_HPP

// Multiply-accumulate estimate of the window classifier:
//   sum_{l=1}^{2} (N_in,l N_h + N_h^2) T  +  D T^2  +  D T  +  N_h C
// with N_h the bidirectional feature width (2 x hidden), N_in,1 = C_in,
// N_in,2 = N_h (attention output), D the attention dimension, C = 2 classes.

#include <cstdint>
#include <string>
#include <vector>

#include "ccsk/nn/config.hpp"

namespace ccsk::nn {

struct ComplexityTerm {
    std::string name;
    std::uint64_t macs;
};

struct ComplexityReport {
    std::vector<ComplexityTerm> terms;
    std::uint64_t total{0};
};

inline ComplexityReport estimate_complexity(const NetConfig& cfg)
{
    validate(cfg);
    const std::uint64_t nh = cfg.features();
    const std::uint64_t t = cfg.window_length;
    const std::uint64_t d = cfg.attention_dim;
    const std::uint64_t cin = cfg.input_channels;
    ComplexityReport r;
    r.terms = {
        {"bilstm1", (cin * nh + nh * nh) * t},
        {"bilstm2", (nh * nh + nh * nh) * t},
        {"attention_scores", d * t * t},
        {"attention_values", d * t},
        {"dense", nh * cfg.classes},
    };
    for (const auto& term : r.terms) r.total += term.macs;
    return r;
}

} // namespace ccsk::nn

#endif
