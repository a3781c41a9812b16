#pragma once

#include <optional>

#include "synreg/volume.hpp"

namespace synreg {

// Trilinear interpolation of the 8 enclosing voxels at world point p.
// Points outside the voxel-center hull return `background`; the overload
// without it uses the volume minimum (an O(n) scan -- hot paths should
// resolve the background once and pass it in).
float trilinear_sample(const Volume& v, const Vec3& p, float background);
float trilinear_sample(const Volume& v, const Vec3& p);

// Trilinear value together with its world-space gradient (units per mm).
struct SampleWithGradient {
    float value = 0.0f;
    Vec3 gradient;
};
SampleWithGradient trilinear_sample_gradient(const Volume& v, const Vec3& p, float background);

// Nearest-neighbor label lookup; outside the grid returns `background`.
std::uint16_t nearest_sample(const LabelMap& m, const Vec3& p, std::uint16_t background = 0);

// Resamples onto a grid with the given spacing covering the same world
// extent; dims are rounded up so no extent is lost.
Volume resample(const Volume& v, const Vec3& target_spacing);

// Resolves a WindowSpec against a volume. Percentile ranks use the
// nearest-rank rule over all voxels of the whole 3D matrix.
ResolvedWindow resolve_window(const Volume& v, const WindowSpec& w);

// Clamps to the resolved window and maps it linearly onto [-1, 1].
// Throws DegenerateWindow if the resolved endpoints coincide.
Volume window_normalize(const Volume& v, const WindowSpec& w);
Volume window_normalize(const Volume& v, const WindowSpec& w, ResolvedWindow& resolved);

// Backward warp: out(x) = v(x + d(x)). Trilinear for volumes, nearest
// neighbor for label maps so IDs stay integral. Geometry of d must match.
Volume warp(const Volume& v, const DisplacementField& d,
            std::optional<float> background = std::nullopt);
LabelMap warp(const LabelMap& m, const DisplacementField& d);

// Per-voxel nearest-rank percentile of the stored values.
float percentile_nearest_rank(std::vector<float> values, double rank);

} // namespace synreg
