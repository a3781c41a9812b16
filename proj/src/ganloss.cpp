#include "synreg/ganloss.hpp"

#include <cmath>

#include "synreg/errors.hpp"

namespace synreg {

namespace {

void check_pair(const ImagePair& p, const char* which) {
    if (p.x.rows != p.gx.rows || p.x.cols != p.gx.cols)
        throw ShapeMismatch(std::string(which) + ": members differ in shape");
    if (p.x.rows < 1 || p.x.cols < 1)
        throw ShapeMismatch(std::string(which) + ": empty image");
}

double mean_l1(const ImagePair& p) {
    double sum = 0.0;
    for (std::size_t n = 0; n < p.x.data.size(); ++n)
        sum += std::abs(static_cast<double>(p.gx.data[n]) - p.x.data[n]);
    return sum / static_cast<double>(p.x.data.size());
}

} // namespace

double intensity_loss(const ImagePair& p, const ImagePair& q) {
    check_pair(p, "intensity_loss first pair");
    check_pair(q, "intensity_loss second pair");
    return mean_l1(p) + mean_l1(q);
}

double gradient_difference_loss(const ImagePair& p) {
    check_pair(p, "gradient_difference_loss");
    const Slice2D& x = p.x;
    const Slice2D& gx = p.gx;
    if (x.rows < 2 || x.cols < 2)
        throw ShapeMismatch("gradient_difference_loss needs at least 2 rows and columns");

    double sum = 0.0;
    for (int i = 1; i < x.rows; ++i)
        for (int j = 0; j < x.cols; ++j) {
            const double dx = std::abs(static_cast<double>(x.at(i, j)) - x.at(i - 1, j));
            const double dg = std::abs(static_cast<double>(gx.at(i, j)) - gx.at(i - 1, j));
            sum += (dx - dg) * (dx - dg);
        }
    for (int i = 0; i < x.rows; ++i)
        for (int j = 1; j < x.cols; ++j) {
            const double dx = std::abs(static_cast<double>(x.at(i, j)) - x.at(i, j - 1));
            const double dg = std::abs(static_cast<double>(gx.at(i, j)) - gx.at(i, j - 1));
            sum += (dx - dg) * (dx - dg);
        }

    const std::size_t valid = static_cast<std::size_t>(x.rows - 1) * x.cols +
                              static_cast<std::size_t>(x.rows) * (x.cols - 1);
    return sum / static_cast<double>(valid);
}

double total_generator_loss(double adv, double cyc, double intensity,
                            double gdl_fwd, double gdl_bwd, const LossWeights& w) {
    return adv + w.lambda_cyc * cyc + w.lambda_int * intensity +
           w.lambda_gdl * (gdl_fwd + gdl_bwd);
}

} // namespace synreg
