#ifndef CCSK_NN_TENSOR_HPP
#define CCSK_NN_TENSOR_HPP

// Sequence batches are stored as (features x batch*steps) column-major
// matrices with column index b*steps + t. One example is a contiguous block of
// columns; one time step across the batch is a strided view.

#include <Eigen/Dense>

#include <string>

#include "ccsk/error.hpp"

namespace ccsk::nn {

using Mat = Eigen::MatrixXd;
using Index = Eigen::Index;
using StepView = Eigen::Map<Mat, 0, Eigen::OuterStride<>>;
using ConstStepView = Eigen::Map<const Mat, 0, Eigen::OuterStride<>>;

inline StepView step_view(Mat& m, Index t, Index steps, Index batch)
{
    return {m.data() + t * m.rows(), m.rows(), batch, Eigen::OuterStride<>(steps * m.rows())};
}

inline ConstStepView step_view(const Mat& m, Index t, Index steps, Index batch)
{
    return {m.data() + t * m.rows(), m.rows(), batch, Eigen::OuterStride<>(steps * m.rows())};
}

template <typename Derived>
auto sigmoid(const Eigen::ArrayBase<Derived>& x)
{
    return (1.0 + (-x).exp()).inverse();
}

inline void check_finite(const Mat& m, const char* layer)
{
    if (!m.allFinite()) throw NumericError(std::string("non-finite activation in layer '") + layer + "'");
}

} // namespace ccsk::nn

#endif
