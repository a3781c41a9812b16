#pragma once

#include <cstddef>
#include <vector>

namespace synreg {

// 2D scalar array, row-major (x fastest), as extracted from an axial slice.
struct Slice2D {
    int rows = 0;
    int cols = 0;
    std::vector<float> data;

    Slice2D() = default;
    Slice2D(int r, int c, float fill = 0.0f)
        : rows(r), cols(c), data(static_cast<std::size_t>(r) * c, fill) {}
    float& at(int i, int j) { return data[static_cast<std::size_t>(i) * cols + j]; }
    float at(int i, int j) const { return data[static_cast<std::size_t>(i) * cols + j]; }
};

// An input image and its mapped counterpart, equal shape.
struct ImagePair {
    Slice2D x;
    Slice2D gx;
};

struct LossWeights {
    double lambda_cyc = 0.0;
    double lambda_int = 0.0;
    double lambda_gdl = 0.0;

    // Weight triples used per modality: 10/10/5 for CBCT and CT, 10/0.4/0.4 for MRI.
    static LossWeights cbct() { return {10.0, 10.0, 5.0}; }
    static LossWeights ct() { return {10.0, 10.0, 5.0}; }
    static LossWeights mri() { return {10.0, 0.4, 0.4}; }
};

// Mean L1 distance within each pair, summed over the two pairs. The mean
// reduction (rather than the plain sum) keeps values resolution-independent.
double intensity_loss(const ImagePair& p, const ImagePair& q);

// Squared mismatch of absolute forward differences along rows and columns,
// starting at index 1 (no padding), mean-reduced over the valid positions.
double gradient_difference_loss(const ImagePair& p);

// adv + lambda_cyc*cyc + lambda_int*int + lambda_gdl*(gdl_fwd + gdl_bwd).
double total_generator_loss(double adv, double cyc, double intensity,
                            double gdl_fwd, double gdl_bwd, const LossWeights& w);

} // namespace synreg
