#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "synreg/volume.hpp"

namespace synreg {

// Organ inventory of the procedural phantom. IDs key the tissue table, so
// extending the anatomy is a data change.
enum class Organ : std::uint16_t {
    Background = 0,
    Body = 1,
    Liver = 2,
    LungLeft = 3,
    LungRight = 4,
    KidneyLeft = 5,
    KidneyRight = 6,
    Spleen = 7,
    Spine = 8,
    Ribs = 9,
    Aorta = 10,
    Stomach = 11,
    Arms = 12,
};

const char* organ_name(Organ o);

// Superellipsoid primitive: |x'/rx|^p + |y'/ry|^p + |z'/rz|^q <= 1 in the
// shape frame (yaw-rotated about z). shell_frac > 0 hollows the shape to a
// surface band; the paint rule controls how it composes with earlier shapes.
struct OrganShape {
    std::uint16_t label = 0;
    Vec3 center;       // mm
    Vec3 radii;        // mm
    double exp_xy = 2.0;
    double exp_z = 2.0;
    double yaw_deg = 0.0;
    double shell_frac = 0.0;
    enum class Paint { Overwrite, OnlyBackground, OnlyForeground };
    Paint paint = Paint::Overwrite;
    double jitter_scale = 1.0; // relative weight of the per-seed jitter

    bool contains(const Vec3& p) const;
};

struct PhantomSpec {
    std::uint64_t seed = 0;
    double body_scale = 1.0;
    bool include_arms = false;
    Vec3 fov{320.0, 260.0, 420.0};      // world extent, centered on the origin
    std::vector<OrganShape> organ_params; // canonical (pre-jitter) shapes

    static PhantomSpec with_seed(std::uint64_t seed, bool include_arms = false);
};

struct RespirationParams {
    double diaphragm_amplitude = 15.0; // mm, superior-inferior
    double chest_expansion = 5.0;      // mm, anterior-posterior
    double phase = 1.0;                // 0 = exhale (reference), 1 = inhale
};

// The realized anatomy for one seed: jittered shapes plus the anchors the
// respiration model hangs off.
struct PhantomModel {
    std::vector<OrganShape> shapes; // paint order
    double diaphragm_z = 0.0;       // mm, respiration SI peak
    double chest_center_y = 0.0;
    double chest_radius_y = 1.0;
    double chest_center_z = 0.0;
    Vec3 liver_center;

    const OrganShape& shape(Organ o) const;
};

// Applies body_scale and the seeded jitter; throws SpecOutOfBounds if any
// organ leaves the fov. Pure function of the spec.
PhantomModel build_model(const PhantomSpec& spec);

// Rasterizes the model onto the grid. Deterministic for a fixed spec.
LabelMap generate_phantom(const PhantomSpec& spec, const GridGeometry& grid);

// Continuous ground-truth displacement (mm) at a world point: a Gaussian
// superior-inferior bump peaking at the diaphragm plus an anterior-posterior
// chest-wall expansion, both linear in phase. This is the backward field:
// inhale(x) = exhale(x + d(x)).
Vec3 respiration_displacement(const PhantomModel& model, const RespirationParams& p, const Vec3& world);

// The continuous field sampled at voxel centers. Stored so that the
// phase-t payload is bitwise t times the phase-1 payload.
DisplacementField respiration_field(const PhantomSpec& spec, const RespirationParams& p,
                                    const GridGeometry& grid);

// Label map of one respiratory state: exhale is generate_phantom itself,
// other phases are its backward warp through the respiration field.
LabelMap phantom_state(const PhantomSpec& spec, const RespirationParams& p,
                       const GridGeometry& grid);

// Binary mask of one organ, same geometry as the labels.
LabelMap organ_mask(const LabelMap& labels, Organ o);

} // namespace synreg
