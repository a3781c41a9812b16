#pragma once

#include <map>
#include <string>
#include <vector>

#include "synreg/volume.hpp"

namespace synreg {

// Radial noise power spectrum estimate over an ROI.
struct RadialNps {
    std::vector<double> bin_centers; // spatial frequency, mm^-1
    std::vector<double> power;
    std::size_t roi_voxels = 0;
    std::size_t patch_count = 0;
};

struct Histogram {
    std::vector<double> edges;  // nbins + 1, strictly increasing
    std::vector<double> counts; // nbins
    bool excluded_background = false;
};

// Flat per-volume map of metric name -> value.
struct MetricReport {
    std::map<std::string, double> values;
};

// Mean absolute error over voxels whose mask label is nonzero.
double mae(const Volume& a, const Volume& b, const LabelMap& mask);

// Mean local SSIM, 11x11 Gaussian window (sigma 1.5), K1=0.01, K2=0.03,
// computed per axial slice over fully covered windows and averaged.
// dynamic_range is the declared intensity span L.
double ssim(const Volume& a, const Volume& b, double dynamic_range);

// Slicewise feature similarity from phase congruency (log-Gabor bank,
// 4 scales x 4 orientations) and Scharr gradient magnitude; images are
// rescaled from [range_lo, range_hi] to [0,255] so that the standard
// constants T1=0.85, T2=160 apply.
double fsim(const Volume& a, const Volume& b, double range_lo, double range_hi);

// Slicewise Canny edge maps (Gaussian sigma 1.0, hysteresis at 0.1/0.2 of
// the per-slice dynamic range). EPR counts reference edges with a synthetic
// edge within a 1-pixel radius over |E_ref|; EGR counts synthetic edges with
// no reference edge within that radius, also over |E_ref|.
struct EdgeRatios {
    double epr = 0.0;
    double egr = 0.0;
};
EdgeRatios edge_ratios(const Volume& reference, const Volume& synthetic);

// Binary Canny edge map of one slice; exposed for the edge-oracle tests.
std::vector<std::uint8_t> canny_slice(const float* slice, int nx, int ny);

// Radial NPS over the ROI: non-overlapping axial patches fully inside the
// ROI, per-patch first-order detrend, 2D periodogram (normalized by patch
// and pixel area), averaged, then radially binned at df = 1/(patch*spacing).
RadialNps radial_nps(const Volume& v, const LabelMap& roi, std::uint16_t organ_id,
                     int patch = 32);

// Pearson correlation of two radial NPS estimates on identical bins.
double ncc(const RadialNps& p, const RadialNps& q);

// Population standard deviation over the ROI voxels.
double noise_magnitude(const Volume& v, const LabelMap& roi, std::uint16_t organ_id);

// Counts of v over uniform bins in [lo, hi]; values outside are clamped to
// the end bins. Background (mask label 0) can be excluded when a mask is given.
Histogram histogram(const Volume& v, double lo, double hi, int nbins,
                    const LabelMap* mask = nullptr, bool exclude_background = false);

// Pearson correlation of two histograms after density normalization.
double hist_cc(const Histogram& h1, const Histogram& h2);

// Dice overlap of the nonzero voxels; 1.0 when both masks are empty.
double dice(const LabelMap& m1, const LabelMap& m2);

// Pearson correlation of two equally sized vectors (shared helper).
double pearson(const std::vector<double>& x, const std::vector<double>& y);

} // namespace synreg
