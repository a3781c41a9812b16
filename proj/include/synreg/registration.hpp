#pragma once

#include <string>
#include <vector>

#include "synreg/bspline.hpp"
#include "synreg/volume.hpp"

namespace synreg {

enum class SimilarityMetric { MMI, NC, MS };

const char* similarity_name(SimilarityMetric m);
SimilarityMetric similarity_from_name(const std::string& name);

struct RegistrationConfig {
    SimilarityMetric metric = SimilarityMetric::MMI;
    int histogram_bins = 50;        // MMI only
    double learning_rate = 1.0;     // mm of max control-point step per iteration
    int max_iterations = 300;
    double grid_spacing = 50.0;     // mm
    double sampling_fraction = 1.0; // 1 = every fixed voxel
    std::uint64_t sampling_seed = 0;
    int workers = 1;
    double convergence_tolerance = 1e-7;
    int convergence_window = 10;

    void validate() const;
};

struct RegistrationResult {
    BSplineTransform transform;
    std::vector<double> metric_trace; // metric at each visited iterate
    bool converged = false;
    bool diverged = false;
    int iterations = 0;
    double wall_time_seconds = 0.0;
};

struct MetricEvaluation {
    double value = 0.0;
    std::vector<double> gradient; // per coefficient, same layout as transform
};

// Similarity value and its analytic gradient with respect to the transform
// coefficients. MS is the mean squared difference, NC the negative Pearson
// correlation, MMI the negative Mattes mutual information (cubic B-spline
// Parzen kernel on the moving axis, zero-order on the fixed axis). All three
// are minimized.
MetricEvaluation metric_value_and_gradient(const Volume& fixed, const Volume& moving,
                                           const BSplineTransform& transform,
                                           const RegistrationConfig& cfg);

// Plain gradient descent on B-spline coefficients. The gradient is scaled
// so the largest control-point step per iteration is learning_rate mm.
// Stops early when the metric change stays below convergence_tolerance for
// convergence_window consecutive iterations; a non-finite metric flags the
// result diverged and returns the last finite iterate.
RegistrationResult register_volumes(const Volume& fixed, const Volume& moving,
                                    const RegistrationConfig& cfg);

// Resamples through the transform: out(x) = moving(x + T(x)).
Volume apply_transform(const Volume& moving, const BSplineTransform& t,
                       const GridGeometry& out_geom);
LabelMap apply_transform(const LabelMap& moving, const BSplineTransform& t,
                         const GridGeometry& out_geom);

// Morphological closing (dilate then erode) with a discretized ball of the
// given physical radius.
LabelMap close_mask(const LabelMap& m, double radius_mm);

struct RegistrationEvaluation {
    double pre_dice = 0.0;
    double post_dice = 0.0;
};

// Warps the moving mask by the final transform (nearest neighbor) and
// reports Dice against the fixed mask, before and after registration.
RegistrationEvaluation evaluate_registration(const RegistrationResult& result,
                                             const LabelMap& moving_mask,
                                             const LabelMap& fixed_mask);

} // namespace synreg
