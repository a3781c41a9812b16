#include "synreg/phantom.hpp"

#include <algorithm>
#include <cmath>

#include "synreg/errors.hpp"
#include "synreg/rng.hpp"
#include "synreg/volume_ops.hpp"

namespace synreg {

const char* organ_name(Organ o) {
    switch (o) {
        case Organ::Background: return "background";
        case Organ::Body: return "body";
        case Organ::Liver: return "liver";
        case Organ::LungLeft: return "lung_left";
        case Organ::LungRight: return "lung_right";
        case Organ::KidneyLeft: return "kidney_left";
        case Organ::KidneyRight: return "kidney_right";
        case Organ::Spleen: return "spleen";
        case Organ::Spine: return "spine";
        case Organ::Ribs: return "ribs";
        case Organ::Aorta: return "aorta";
        case Organ::Stomach: return "stomach";
        case Organ::Arms: return "arms";
    }
    return "unknown";
}

namespace {

inline double axis_term(double d, double r, double e) {
    const double t = std::abs(d) / r;
    if (e == 2.0) return t * t;
    return std::pow(t, e);
}

double shape_value(const OrganShape& s, const Vec3& p, double shrink) {
    double dx = p.x - s.center.x;
    double dy = p.y - s.center.y;
    const double dz = p.z - s.center.z;
    if (s.yaw_deg != 0.0) {
        const double a = s.yaw_deg * 0.017453292519943295;
        const double c = std::cos(a), sn = std::sin(a);
        const double rx = c * dx + sn * dy;
        const double ry = -sn * dx + c * dy;
        dx = rx;
        dy = ry;
    }
    return axis_term(dx, s.radii.x * shrink, s.exp_xy) +
           axis_term(dy, s.radii.y * shrink, s.exp_xy) +
           axis_term(dz, s.radii.z * shrink, s.exp_z);
}

// Canonical adult-abdomen layout, mm, torso centered on the origin. The
// desk-scale grid covers the liver section; lungs/arms extend beyond it.
std::vector<OrganShape> canonical_organs() {
    using P = OrganShape::Paint;
    auto sh = [](Organ o, Vec3 c, Vec3 r, double pxy, double pz) {
        OrganShape s;
        s.label = static_cast<std::uint16_t>(o);
        s.center = c;
        s.radii = r;
        s.exp_xy = pxy;
        s.exp_z = pz;
        return s;
    };
    std::vector<OrganShape> v;
    OrganShape body = sh(Organ::Body, {0, 0, 0}, {112, 82, 180}, 2.5, 8.0);
    body.jitter_scale = 0.4; // the torso anchors the frame; keep it steadier
    v.push_back(body);
    v.push_back(sh(Organ::LungLeft, {-52, 8, 118}, {40, 48, 62}, 2.2, 2.2));
    v.push_back(sh(Organ::LungRight, {55, 8, 122}, {43, 50, 64}, 2.2, 2.2));
    OrganShape liver = sh(Organ::Liver, {42, 14, 8}, {52, 55, 55}, 2.2, 2.0);
    liver.yaw_deg = -12.0;
    v.push_back(liver);
    v.push_back(sh(Organ::Stomach, {-45, 28, 18}, {30, 26, 30}, 2.0, 2.0));
    v.push_back(sh(Organ::Spleen, {-72, -18, 8}, {24, 20, 30}, 2.0, 2.0));
    v.push_back(sh(Organ::KidneyLeft, {-48, -42, -58}, {20, 24, 38}, 2.0, 2.0));
    v.push_back(sh(Organ::KidneyRight, {50, -42, -62}, {20, 24, 38}, 2.0, 2.0));
    v.push_back(sh(Organ::Aorta, {0, -48, -10}, {11, 11, 160}, 2.0, 8.0));
    v.push_back(sh(Organ::Spine, {0, -72, 0}, {16, 14, 172}, 2.2, 8.0));
    OrganShape ribs = sh(Organ::Ribs, {0, 2, 95}, {104, 78, 82}, 2.5, 3.0);
    ribs.shell_frac = 0.14;
    ribs.paint = P::OnlyForeground;
    v.push_back(ribs);
    OrganShape arm_l = sh(Organ::Arms, {-132, 0, 60}, {14, 14, 120}, 2.0, 8.0);
    arm_l.paint = P::OnlyBackground;
    arm_l.jitter_scale = 0.4;
    v.push_back(arm_l);
    OrganShape arm_r = arm_l;
    arm_r.center.x = 132;
    v.push_back(arm_r);
    return v;
}

} // namespace

bool OrganShape::contains(const Vec3& p) const {
    if (shape_value(*this, p, 1.0) > 1.0) return false;
    if (shell_frac > 0.0 && shape_value(*this, p, 1.0 - shell_frac) <= 1.0) return false;
    return true;
}

PhantomSpec PhantomSpec::with_seed(std::uint64_t seed, bool include_arms) {
    PhantomSpec spec;
    spec.seed = seed;
    spec.include_arms = include_arms;
    spec.organ_params = canonical_organs();
    return spec;
}

const OrganShape& PhantomModel::shape(Organ o) const {
    for (const auto& s : shapes)
        if (s.label == static_cast<std::uint16_t>(o)) return s;
    throw UnknownLabel(std::string("no shape for organ ") + organ_name(o));
}

PhantomModel build_model(const PhantomSpec& spec) {
    PhantomModel model;
    model.shapes = spec.organ_params.empty() ? canonical_organs() : spec.organ_params;

    Rng rng(mix_seed(spec.seed, 0x7068616e746f6dULL)); // "phantom"
    for (auto& s : model.shapes) {
        // Jitter is always drawn for every shape, in list order, so the
        // realized anatomy is identical whether or not arms are painted.
        const double j = 0.10 * s.jitter_scale;
        Vec3 center_shift{rng.uniform(-j, j) * s.radii.x,
                          rng.uniform(-j, j) * s.radii.y,
                          rng.uniform(-j, j) * s.radii.z};
        Vec3 radii_factor{1.0 + rng.uniform(-j, j),
                          1.0 + rng.uniform(-j, j),
                          1.0 + rng.uniform(-j, j)};
        s.center = (s.center + center_shift) * spec.body_scale;
        s.radii = {s.radii.x * radii_factor.x * spec.body_scale,
                   s.radii.y * radii_factor.y * spec.body_scale,
                   s.radii.z * radii_factor.z * spec.body_scale};
        for (int a = 0; a < 3; ++a) {
            if (s.radii[a] <= 0.0) throw SpecOutOfBounds("non-positive radii");
            const double extreme = std::abs(s.center[a]) + s.radii[a];
            if (extreme > 0.5 * spec.fov[a])
                throw SpecOutOfBounds(std::string(organ_name(static_cast<Organ>(s.label))) +
                                      " exceeds fov on axis " + std::to_string(a));
        }
    }

    const OrganShape& liver = model.shape(Organ::Liver);
    const OrganShape& body = model.shape(Organ::Body);
    model.liver_center = liver.center;
    model.diaphragm_z = liver.center.z + 0.8 * liver.radii.z;
    model.chest_center_y = body.center.y;
    model.chest_radius_y = body.radii.y;
    model.chest_center_z = model.diaphragm_z + 60.0;
    return model;
}

LabelMap generate_phantom(const PhantomSpec& spec, const GridGeometry& grid) {
    if (!grid.valid()) throw GeometryMismatch("invalid phantom grid");
    const PhantomModel model = build_model(spec);
    LabelMap labels(grid, 0);

    for (const auto& s : model.shapes) {
        if (s.label == static_cast<std::uint16_t>(Organ::Arms) && !spec.include_arms) continue;
        // Conservative bounding box; yaw can swap the in-plane radii.
        const double rxy = std::max(s.radii.x, s.radii.y);
        const double bx = s.yaw_deg == 0.0 ? s.radii.x : rxy;
        const double by = s.yaw_deg == 0.0 ? s.radii.y : rxy;
        const Vec3 lo_w{s.center.x - bx, s.center.y - by, s.center.z - s.radii.z};
        const Vec3 hi_w{s.center.x + bx, s.center.y + by, s.center.z + s.radii.z};
        const Vec3 lo_v = grid.world_to_voxel(lo_w);
        const Vec3 hi_v = grid.world_to_voxel(hi_w);
        const int i0 = std::max(0, static_cast<int>(std::floor(lo_v.x)));
        const int j0 = std::max(0, static_cast<int>(std::floor(lo_v.y)));
        const int k0 = std::max(0, static_cast<int>(std::floor(lo_v.z)));
        const int i1 = std::min(grid.dims.x - 1, static_cast<int>(std::ceil(hi_v.x)));
        const int j1 = std::min(grid.dims.y - 1, static_cast<int>(std::ceil(hi_v.y)));
        const int k1 = std::min(grid.dims.z - 1, static_cast<int>(std::ceil(hi_v.z)));

        for (int k = k0; k <= k1; ++k)
            for (int j = j0; j <= j1; ++j)
                for (int i = i0; i <= i1; ++i) {
                    if (!s.contains(grid.voxel_center(i, j, k))) continue;
                    std::uint16_t& cell = labels.at(i, j, k);
                    if (s.paint == OrganShape::Paint::OnlyBackground && cell != 0) continue;
                    if (s.paint == OrganShape::Paint::OnlyForeground && cell == 0) continue;
                    cell = s.label;
                }
    }
    return labels;
}

Vec3 respiration_displacement(const PhantomModel& model, const RespirationParams& p, const Vec3& w) {
    const double dz_si = w.z - model.diaphragm_z;
    const double sigma_si = 150.0;
    const double si = p.diaphragm_amplitude * std::exp(-dz_si * dz_si / (2.0 * sigma_si * sigma_si));

    const double dz_ch = w.z - model.chest_center_z;
    const double sigma_ch = 80.0;
    const double ap = -p.chest_expansion * ((w.y - model.chest_center_y) / model.chest_radius_y) *
                      std::exp(-dz_ch * dz_ch / (2.0 * sigma_ch * sigma_ch));

    return {0.0, p.phase * ap, p.phase * si};
}

DisplacementField respiration_field(const PhantomSpec& spec, const RespirationParams& p,
                                    const GridGeometry& grid) {
    if (!grid.valid()) throw GeometryMismatch("invalid field grid");
    const PhantomModel model = build_model(spec);
    RespirationParams unit = p;
    unit.phase = 1.0;

    // Build the phase-1 field in float32 and scale by phase afterwards so
    // field(t) is bitwise t * field(1) voxelwise.
    DisplacementField field(grid);
    for (int k = 0; k < grid.dims.z; ++k)
        for (int j = 0; j < grid.dims.y; ++j)
            for (int i = 0; i < grid.dims.x; ++i)
                field.set(i, j, k, respiration_displacement(model, unit, grid.voxel_center(i, j, k)));
    if (p.phase != 1.0) {
        const double t = p.phase;
        for (auto& c : field.data) c = static_cast<float>(t * static_cast<double>(c));
    }
    return field;
}

LabelMap phantom_state(const PhantomSpec& spec, const RespirationParams& p,
                       const GridGeometry& grid) {
    LabelMap exhale = generate_phantom(spec, grid);
    if (p.phase == 0.0) return exhale;
    const DisplacementField field = respiration_field(spec, p, grid);
    return warp(exhale, field);
}

LabelMap organ_mask(const LabelMap& labels, Organ o) {
    LabelMap mask(labels.geom, 0);
    const std::uint16_t id = static_cast<std::uint16_t>(o);
    for (std::size_t n = 0; n < labels.data.size(); ++n)
        mask.data[n] = labels.data[n] == id ? 1 : 0;
    return mask;
}

} // namespace synreg
