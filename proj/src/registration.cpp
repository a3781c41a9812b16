#include "synreg/registration.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>

#include "synreg/errors.hpp"
#include "synreg/metrics.hpp"
#include "synreg/parallel.hpp"
#include "synreg/rng.hpp"
#include "synreg/volume_ops.hpp"

namespace synreg {

const char* similarity_name(SimilarityMetric m) {
    switch (m) {
        case SimilarityMetric::MMI: return "mmi";
        case SimilarityMetric::NC: return "nc";
        case SimilarityMetric::MS: return "ms";
    }
    return "unknown";
}

SimilarityMetric similarity_from_name(const std::string& name) {
    if (name == "mmi" || name == "MMI") return SimilarityMetric::MMI;
    if (name == "nc" || name == "NC") return SimilarityMetric::NC;
    if (name == "ms" || name == "MS") return SimilarityMetric::MS;
    throw ConfigError("unknown similarity metric: " + name);
}

void RegistrationConfig::validate() const {
    if (histogram_bins < 2) throw ConfigError("histogram_bins must be >= 2");
    if (!(learning_rate > 0.0)) throw ConfigError("learning_rate must be positive");
    if (max_iterations < 1) throw ConfigError("max_iterations must be >= 1");
    if (!(grid_spacing > 0.0)) throw ConfigError("grid_spacing must be positive");
    if (!(sampling_fraction > 0.0) || sampling_fraction > 1.0)
        throw ConfigError("sampling_fraction must lie in (0, 1]");
}

namespace {

// Per-axis spline support tables for the fixed grid: voxel index ->
// (first control point, basis weights, basis derivatives). The tables are
// what makes full-volume evaluation affordable -- positions never change
// between iterations, only the coefficients do.
struct AxisTable {
    std::vector<int> base;
    std::vector<std::array<double, 4>> w;
    std::vector<std::array<double, 4>> dw;
};

AxisTable build_axis_table(int nvox, double vox0, double vox_spacing,
                           double cp0, double cp_spacing, int cp_count) {
    AxisTable t;
    t.base.resize(static_cast<std::size_t>(nvox));
    t.w.resize(static_cast<std::size_t>(nvox));
    t.dw.resize(static_cast<std::size_t>(nvox));
    for (int i = 0; i < nvox; ++i) {
        const double g = (vox0 + i * vox_spacing - cp0) / cp_spacing;
        const int cell = static_cast<int>(std::floor(g));
        if (cell < 1 || cell + 2 > cp_count - 1)
            throw OutOfSupport("fixed grid voxel outside spline lattice");
        t.base[static_cast<std::size_t>(i)] = cell - 1;
        bspline_weights(g - cell, t.w[static_cast<std::size_t>(i)].data());
        bspline_weight_derivatives(g - cell, t.dw[static_cast<std::size_t>(i)].data());
    }
    return t;
}

class MetricEngine {
public:
    MetricEngine(const Volume& fixed, const Volume& moving, const RegistrationConfig& cfg)
        : fixed_(fixed), moving_(moving), cfg_(cfg) {
        cfg_.validate();
        if (!fixed.geom.valid() || !moving.geom.valid()) throw GeometryMismatch("invalid volumes");
        moving_min_ = moving.min_value();
        moving_max_ = moving.max_value();
        fixed_min_ = fixed.min_value();
        fixed_max_ = fixed.max_value();
    }

    MetricEvaluation evaluate(const BSplineTransform& t, std::uint64_t iteration) {
        prepare_tables(t);
        const std::size_t total = fixed_.geom.voxel_count();
        samples_.clear();
        if (cfg_.sampling_fraction >= 1.0) {
            full_sampling_ = true;
            sample_count_ = total;
        } else {
            full_sampling_ = false;
            sample_count_ = std::max<std::size_t>(
                1, static_cast<std::size_t>(cfg_.sampling_fraction * static_cast<double>(total)));
            Rng rng(mix_seed(cfg_.sampling_seed, splitmix64(iteration + 1)));
            samples_.resize(sample_count_);
            for (auto& s : samples_) s = rng.below(total);
        }

        switch (cfg_.metric) {
            case SimilarityMetric::MS: return evaluate_ms(t);
            case SimilarityMetric::NC: return evaluate_nc(t);
            case SimilarityMetric::MMI: return evaluate_mmi(t);
        }
        throw ConfigError("bad metric");
    }

private:
    struct SampleState {
        float fixed_value;
        SampleWithGradient moving;
        int vi, vj, vk; // voxel index, for the spline tables
    };

    void prepare_tables(const BSplineTransform& t) {
        if (tables_ready_ && t.grid_spacing == table_spacing_ && t.grid_dims.x == table_dims_.x &&
            t.grid_dims.y == table_dims_.y && t.grid_dims.z == table_dims_.z &&
            t.grid_origin.x == table_origin_.x && t.grid_origin.y == table_origin_.y &&
            t.grid_origin.z == table_origin_.z)
            return;
        const GridGeometry& g = fixed_.geom;
        ax_ = build_axis_table(g.dims.x, g.origin.x, g.spacing.x, t.grid_origin.x, t.grid_spacing, t.grid_dims.x);
        ay_ = build_axis_table(g.dims.y, g.origin.y, g.spacing.y, t.grid_origin.y, t.grid_spacing, t.grid_dims.y);
        az_ = build_axis_table(g.dims.z, g.origin.z, g.spacing.z, t.grid_origin.z, t.grid_spacing, t.grid_dims.z);
        tables_ready_ = true;
        table_spacing_ = t.grid_spacing;
        table_dims_ = t.grid_dims;
        table_origin_ = t.grid_origin;
    }

    std::size_t sample_voxel(std::size_t s) const {
        return full_sampling_ ? s : samples_[s];
    }

    SampleState load_sample(const BSplineTransform& t, std::size_t voxel) const {
        SampleState st;
        const GridGeometry& g = fixed_.geom;
        st.vi = static_cast<int>(voxel % static_cast<std::size_t>(g.dims.x));
        const std::size_t rest = voxel / static_cast<std::size_t>(g.dims.x);
        st.vj = static_cast<int>(rest % static_cast<std::size_t>(g.dims.y));
        st.vk = static_cast<int>(rest / static_cast<std::size_t>(g.dims.y));
        st.fixed_value = fixed_.data[voxel];

        const auto& wx = ax_.w[static_cast<std::size_t>(st.vi)];
        const auto& wy = ay_.w[static_cast<std::size_t>(st.vj)];
        const auto& wz = az_.w[static_cast<std::size_t>(st.vk)];
        const int bx = ax_.base[static_cast<std::size_t>(st.vi)];
        const int by = ay_.base[static_cast<std::size_t>(st.vj)];
        const int bz = az_.base[static_cast<std::size_t>(st.vk)];

        Vec3 d;
        for (int c = 0; c < 4; ++c)
            for (int b = 0; b < 4; ++b) {
                const double wyz = wy[static_cast<std::size_t>(b)] * wz[static_cast<std::size_t>(c)];
                const std::size_t row = t.coefficient_index(bx, by + b, bz + c);
                for (int a = 0; a < 4; ++a) {
                    const double w = wx[static_cast<std::size_t>(a)] * wyz;
                    const std::size_t idx = row + static_cast<std::size_t>(a) * 3;
                    d.x += w * t.coefficients[idx];
                    d.y += w * t.coefficients[idx + 1];
                    d.z += w * t.coefficients[idx + 2];
                }
            }

        const Vec3 x = g.voxel_center(st.vi, st.vj, st.vk);
        st.moving = trilinear_sample_gradient(moving_, x + d, static_cast<float>(moving_min_));
        return st;
    }

    // Adds common * (dm/dcoefficients) for one sample into grad.
    void accumulate_gradient(const BSplineTransform& t, const SampleState& st,
                             const Vec3& dmetric_dm, std::vector<double>& grad) const {
        const auto& wx = ax_.w[static_cast<std::size_t>(st.vi)];
        const auto& wy = ay_.w[static_cast<std::size_t>(st.vj)];
        const auto& wz = az_.w[static_cast<std::size_t>(st.vk)];
        const int bx = ax_.base[static_cast<std::size_t>(st.vi)];
        const int by = ay_.base[static_cast<std::size_t>(st.vj)];
        const int bz = az_.base[static_cast<std::size_t>(st.vk)];
        for (int c = 0; c < 4; ++c)
            for (int b = 0; b < 4; ++b) {
                const double wyz = wy[static_cast<std::size_t>(b)] * wz[static_cast<std::size_t>(c)];
                const std::size_t row = t.coefficient_index(bx, by + b, bz + c);
                for (int a = 0; a < 4; ++a) {
                    const double w = wx[static_cast<std::size_t>(a)] * wyz;
                    const std::size_t idx = row + static_cast<std::size_t>(a) * 3;
                    grad[idx] += w * dmetric_dm.x;
                    grad[idx + 1] += w * dmetric_dm.y;
                    grad[idx + 2] += w * dmetric_dm.z;
                }
            }
    }

    MetricEvaluation evaluate_ms(const BSplineTransform& t) {
        const std::size_t ncoef = t.coefficients.size();
        const int workers = std::max(1, cfg_.workers);
        std::vector<double> value_part(static_cast<std::size_t>(workers), 0.0);
        std::vector<std::vector<double>> grad_part(static_cast<std::size_t>(workers),
                                                   std::vector<double>(ncoef, 0.0));
        parallel_chunks(sample_count_, workers, [&](std::size_t lo, std::size_t hi, int w) {
            double local = 0.0;
            auto& grad = grad_part[static_cast<std::size_t>(w)];
            for (std::size_t s = lo; s < hi; ++s) {
                const SampleState st = load_sample(t, sample_voxel(s));
                const double r = static_cast<double>(st.moving.value) - st.fixed_value;
                local += r * r;
                const double common = 2.0 * r / static_cast<double>(sample_count_);
                accumulate_gradient(t, st, st.moving.gradient * common, grad);
            }
            value_part[static_cast<std::size_t>(w)] = local;
        });

        MetricEvaluation e;
        e.gradient.assign(ncoef, 0.0);
        double value = 0.0;
        for (int w = 0; w < workers; ++w) {
            value += value_part[static_cast<std::size_t>(w)];
            const auto& gp = grad_part[static_cast<std::size_t>(w)];
            for (std::size_t i = 0; i < ncoef; ++i) e.gradient[i] += gp[i];
        }
        e.value = value / static_cast<double>(sample_count_);
        return e;
    }

    MetricEvaluation evaluate_nc(const BSplineTransform& t) {
        const std::size_t ncoef = t.coefficients.size();
        const int workers = std::max(1, cfg_.workers);

        struct Sums {
            double f = 0, m = 0, ff = 0, mm = 0, fm = 0;
        };
        std::vector<Sums> parts(static_cast<std::size_t>(workers));
        parallel_chunks(sample_count_, workers, [&](std::size_t lo, std::size_t hi, int w) {
            Sums s;
            for (std::size_t i = lo; i < hi; ++i) {
                const SampleState st = load_sample(t, sample_voxel(i));
                const double f = st.fixed_value, m = st.moving.value;
                s.f += f;
                s.m += m;
                s.ff += f * f;
                s.mm += m * m;
                s.fm += f * m;
            }
            parts[static_cast<std::size_t>(w)] = s;
        });
        Sums total;
        for (const auto& s : parts) {
            total.f += s.f;
            total.m += s.m;
            total.ff += s.ff;
            total.mm += s.mm;
            total.fm += s.fm;
        }
        const double n = static_cast<double>(sample_count_);
        const double mu_f = total.f / n, mu_m = total.m / n;
        const double s_ff = total.ff - n * mu_f * mu_f;
        const double s_mm = total.mm - n * mu_m * mu_m;
        const double s_fm = total.fm - n * mu_f * mu_m;
        if (s_ff <= 0.0 || s_mm <= 0.0)
            throw ZeroVariance("normalized correlation needs intensity variance in both images");
        const double denom = std::sqrt(s_ff * s_mm);
        const double r = s_fm / denom;

        std::vector<std::vector<double>> grad_part(static_cast<std::size_t>(workers),
                                                   std::vector<double>(ncoef, 0.0));
        parallel_chunks(sample_count_, workers, [&](std::size_t lo, std::size_t hi, int w) {
            auto& grad = grad_part[static_cast<std::size_t>(w)];
            for (std::size_t i = lo; i < hi; ++i) {
                const SampleState st = load_sample(t, sample_voxel(i));
                const double ft = st.fixed_value - mu_f;
                const double mt = st.moving.value - mu_m;
                // d(-r)/dm_i for the centered Pearson correlation
                const double common = -(ft - (s_fm / s_mm) * mt) / denom;
                accumulate_gradient(t, st, st.moving.gradient * common, grad);
            }
        });

        MetricEvaluation e;
        e.value = -r;
        e.gradient.assign(ncoef, 0.0);
        for (int w = 0; w < workers; ++w) {
            const auto& gp = grad_part[static_cast<std::size_t>(w)];
            for (std::size_t i = 0; i < ncoef; ++i) e.gradient[i] += gp[i];
        }
        return e;
    }

    MetricEvaluation evaluate_mmi(const BSplineTransform& t) {
        const std::size_t ncoef = t.coefficients.size();
        const int workers = std::max(1, cfg_.workers);
        const int nb = cfg_.histogram_bins;
        if (!(fixed_max_ > fixed_min_) || !(moving_max_ > moving_min_))
            throw DegenerateHistogram("constant image");
        const double fixed_scale = static_cast<double>(nb) / (fixed_max_ - fixed_min_);
        // Continuous moving bin position in [1, nb-3]: the cubic kernel then
        // spreads over 4 bins that always stay inside [0, nb-1].
        const double moving_scale = static_cast<double>(nb - 4) / (moving_max_ - moving_min_);

        auto fixed_bin = [&](double f) {
            int b = static_cast<int>((f - fixed_min_) * fixed_scale);
            return std::clamp(b, 0, nb - 1);
        };
        auto moving_pos = [&](double m) {
            const double mu = 1.0 + (m - moving_min_) * moving_scale;
            return std::clamp(mu, 1.0, static_cast<double>(nb - 3));
        };

        const std::size_t nb2 = static_cast<std::size_t>(nb) * nb;
        std::vector<std::vector<double>> hist_part(static_cast<std::size_t>(workers),
                                                   std::vector<double>(nb2, 0.0));
        parallel_chunks(sample_count_, workers, [&](std::size_t lo, std::size_t hi, int w) {
            auto& hist = hist_part[static_cast<std::size_t>(w)];
            for (std::size_t s = lo; s < hi; ++s) {
                const SampleState st = load_sample(t, sample_voxel(s));
                const int fb = fixed_bin(st.fixed_value);
                const double mu = moving_pos(st.moving.value);
                const int kappa = static_cast<int>(std::floor(mu));
                double w4[4];
                bspline_weights(mu - kappa, w4);
                double* row = hist.data() + static_cast<std::size_t>(fb) * nb;
                for (int m = 0; m < 4; ++m) row[kappa - 1 + m] += w4[m];
            }
        });

        std::vector<double> joint(nb2, 0.0);
        for (int w = 0; w < workers; ++w) {
            const auto& hp = hist_part[static_cast<std::size_t>(w)];
            for (std::size_t i = 0; i < nb2; ++i) joint[i] += hp[i];
        }
        const double n = static_cast<double>(sample_count_);
        for (auto& p : joint) p /= n;

        std::vector<double> pf(static_cast<std::size_t>(nb), 0.0), pm(static_cast<std::size_t>(nb), 0.0);
        int occupied = 0;
        for (int i = 0; i < nb; ++i)
            for (int j = 0; j < nb; ++j) {
                const double p = joint[static_cast<std::size_t>(i) * nb + j];
                if (p > 0.0) ++occupied;
                pf[static_cast<std::size_t>(i)] += p;
                pm[static_cast<std::size_t>(j)] += p;
            }
        if (occupied < 2) throw DegenerateHistogram("fewer than 2 occupied joint bins");

        double mi = 0.0;
        std::vector<double> log_term(nb2, 0.0); // ln(P(i,j)/pM(j)) where P > 0
        for (int i = 0; i < nb; ++i)
            for (int j = 0; j < nb; ++j) {
                const double p = joint[static_cast<std::size_t>(i) * nb + j];
                if (p <= 0.0) continue;
                const double denom = pf[static_cast<std::size_t>(i)] * pm[static_cast<std::size_t>(j)];
                mi += p * std::log(p / denom);
                log_term[static_cast<std::size_t>(i) * nb + j] = std::log(p / pm[static_cast<std::size_t>(j)]);
            }

        std::vector<std::vector<double>> grad_part(static_cast<std::size_t>(workers),
                                                   std::vector<double>(ncoef, 0.0));
        parallel_chunks(sample_count_, workers, [&](std::size_t lo, std::size_t hi, int w) {
            auto& grad = grad_part[static_cast<std::size_t>(w)];
            for (std::size_t s = lo; s < hi; ++s) {
                const SampleState st = load_sample(t, sample_voxel(s));
                const int fb = fixed_bin(st.fixed_value);
                const double mu = moving_pos(st.moving.value);
                const int kappa = static_cast<int>(std::floor(mu));
                double dw4[4];
                bspline_weight_derivatives(mu - kappa, dw4);
                const double* lrow = log_term.data() + static_cast<std::size_t>(fb) * nb;
                double dmi_dmu = 0.0;
                for (int m = 0; m < 4; ++m) dmi_dmu += dw4[m] * lrow[kappa - 1 + m];
                // metric = -MI; dmu/dvalue = moving_scale (inside the clamp range)
                const double common = -(dmi_dmu / n) * moving_scale;
                if (common != 0.0)
                    accumulate_gradient(t, st, st.moving.gradient * common, grad);
            }
        });

        MetricEvaluation e;
        e.value = -mi;
        e.gradient.assign(ncoef, 0.0);
        for (int w = 0; w < workers; ++w) {
            const auto& gp = grad_part[static_cast<std::size_t>(w)];
            for (std::size_t i = 0; i < ncoef; ++i) e.gradient[i] += gp[i];
        }
        return e;
    }

    const Volume& fixed_;
    const Volume& moving_;
    RegistrationConfig cfg_;
    double moving_min_ = 0, moving_max_ = 0, fixed_min_ = 0, fixed_max_ = 0;

    AxisTable ax_, ay_, az_;
    bool tables_ready_ = false;
    double table_spacing_ = 0.0;
    Index3 table_dims_;
    Vec3 table_origin_;

    bool full_sampling_ = true;
    std::size_t sample_count_ = 0;
    std::vector<std::size_t> samples_;
};

double max_control_point_step(const BSplineTransform& t, const std::vector<double>& grad) {
    double best = 0.0;
    for (std::size_t cp = 0; cp < t.control_point_count(); ++cp) {
        const double gx = grad[cp * 3], gy = grad[cp * 3 + 1], gz = grad[cp * 3 + 2];
        best = std::max(best, std::sqrt(gx * gx + gy * gy + gz * gz));
    }
    return best;
}

} // namespace

MetricEvaluation metric_value_and_gradient(const Volume& fixed, const Volume& moving,
                                           const BSplineTransform& transform,
                                           const RegistrationConfig& cfg) {
    MetricEngine engine(fixed, moving, cfg);
    return engine.evaluate(transform, 0);
}

RegistrationResult register_volumes(const Volume& fixed, const Volume& moving,
                                    const RegistrationConfig& cfg) {
    const auto t0 = std::chrono::steady_clock::now();
    MetricEngine engine(fixed, moving, cfg);

    RegistrationResult result;
    result.transform = BSplineTransform::for_domain(fixed.geom, cfg.grid_spacing);
    std::vector<double> previous = result.transform.coefficients;

    int stable = 0;
    for (int iter = 0; iter < cfg.max_iterations; ++iter) {
        MetricEvaluation e;
        try {
            e = engine.evaluate(result.transform, static_cast<std::uint64_t>(iter));
        } catch (const DegenerateHistogram&) {
            throw; // a structurally broken problem, not a diverged iterate
        }
        if (!std::isfinite(e.value)) {
            result.transform.coefficients = previous;
            result.diverged = true;
            break;
        }
        result.metric_trace.push_back(e.value);

        if (result.metric_trace.size() >= 2) {
            const auto& tr = result.metric_trace;
            if (std::abs(tr[tr.size() - 1] - tr[tr.size() - 2]) < cfg.convergence_tolerance)
                ++stable;
            else
                stable = 0;
            if (stable >= cfg.convergence_window) {
                result.converged = true;
                break;
            }
        }
        if (iter == cfg.max_iterations - 1) break;

        const double max_step = max_control_point_step(result.transform, e.gradient);
        if (max_step == 0.0) {
            result.converged = true;
            break;
        }
        previous = result.transform.coefficients;
        const double scale = cfg.learning_rate / max_step;
        for (std::size_t i = 0; i < e.gradient.size(); ++i)
            result.transform.coefficients[i] -= scale * e.gradient[i];
    }

    result.iterations = static_cast<int>(result.metric_trace.size());
    result.wall_time_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return result;
}

Volume apply_transform(const Volume& moving, const BSplineTransform& t,
                       const GridGeometry& out_geom) {
    Volume out(out_geom);
    const float bg = moving.min_value();
    for (int k = 0; k < out_geom.dims.z; ++k)
        for (int j = 0; j < out_geom.dims.y; ++j)
            for (int i = 0; i < out_geom.dims.x; ++i) {
                const Vec3 x = out_geom.voxel_center(i, j, k);
                out.at(i, j, k) = trilinear_sample(moving, x + t.displace(x), bg);
            }
    return out;
}

LabelMap apply_transform(const LabelMap& moving, const BSplineTransform& t,
                         const GridGeometry& out_geom) {
    LabelMap out(out_geom);
    for (int k = 0; k < out_geom.dims.z; ++k)
        for (int j = 0; j < out_geom.dims.y; ++j)
            for (int i = 0; i < out_geom.dims.x; ++i) {
                const Vec3 x = out_geom.voxel_center(i, j, k);
                out.at(i, j, k) = nearest_sample(moving, x + t.displace(x), 0);
            }
    return out;
}

LabelMap close_mask(const LabelMap& m, double radius_mm) {
    if (radius_mm < 0.0) throw ConfigError("closing radius must be >= 0");
    if (radius_mm == 0.0) return m;
    const GridGeometry& g = m.geom;

    std::vector<Index3> ball;
    const int rx = static_cast<int>(radius_mm / g.spacing.x);
    const int ry = static_cast<int>(radius_mm / g.spacing.y);
    const int rz = static_cast<int>(radius_mm / g.spacing.z);
    const double r2 = radius_mm * radius_mm + 1e-9;
    for (int dk = -rz; dk <= rz; ++dk)
        for (int dj = -ry; dj <= ry; ++dj)
            for (int di = -rx; di <= rx; ++di) {
                const double d2 = di * g.spacing.x * di * g.spacing.x +
                                  dj * g.spacing.y * dj * g.spacing.y +
                                  dk * g.spacing.z * dk * g.spacing.z;
                if (d2 <= r2) ball.push_back({di, dj, dk});
            }

    LabelMap dilated(g, 0);
    for (int k = 0; k < g.dims.z; ++k)
        for (int j = 0; j < g.dims.y; ++j)
            for (int i = 0; i < g.dims.x; ++i) {
                if (m.at(i, j, k) == 0) continue;
                for (const auto& o : ball) {
                    const int ii = i + o.x, jj = j + o.y, kk = k + o.z;
                    if (g.contains_index(ii, jj, kk)) dilated.at(ii, jj, kk) = 1;
                }
            }

    // Erode; voxels beyond the grid count as set so the closing never
    // shrinks a mask that touches the volume boundary.
    LabelMap closed(g, 0);
    for (int k = 0; k < g.dims.z; ++k)
        for (int j = 0; j < g.dims.y; ++j)
            for (int i = 0; i < g.dims.x; ++i) {
                if (dilated.at(i, j, k) == 0) continue;
                bool all = true;
                for (const auto& o : ball) {
                    const int ii = i + o.x, jj = j + o.y, kk = k + o.z;
                    if (g.contains_index(ii, jj, kk) && dilated.at(ii, jj, kk) == 0) {
                        all = false;
                        break;
                    }
                }
                closed.at(i, j, k) = all ? 1 : 0;
            }
    return closed;
}

RegistrationEvaluation evaluate_registration(const RegistrationResult& result,
                                             const LabelMap& moving_mask,
                                             const LabelMap& fixed_mask) {
    if (moving_mask.geom != fixed_mask.geom)
        throw GeometryMismatch("registration evaluation masks");
    RegistrationEvaluation e;
    e.pre_dice = dice(moving_mask, fixed_mask);
    const LabelMap warped = apply_transform(moving_mask, result.transform, fixed_mask.geom);
    e.post_dice = dice(warped, fixed_mask);
    return e;
}

} // namespace synreg
