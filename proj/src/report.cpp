#include "tubelab/report.hpp"

#include <cmath>
#include <cstdio>
#include <limits>
#include <sstream>

#include "tubelab/density.hpp"
#include "tubelab/rng.hpp"
#include "tubelab/series.hpp"
#include "tubelab/transforms.hpp"
#include "tubelab/tube.hpp"

namespace tubelab::report {

namespace {

using geo::ChartMetric;
using geo::Vec;
using spaces::SpaceKind;
using spaces::SpaceSpec;

std::string fmt17(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

SpaceSpec space_from_alias(const std::string& s) {
    if (s == "r2" || s == "e2") return SpaceSpec::euclidean_space(2);
    if (s == "r3" || s == "e3") return SpaceSpec::euclidean_space(3);
    if (s == "r4" || s == "e4") return SpaceSpec::euclidean_space(4);
    if (s == "r5" || s == "e5") return SpaceSpec::euclidean_space(5);
    if (s == "s2") return SpaceSpec::sphere_space(2, 1.0);
    if (s == "s3") return SpaceSpec::sphere_space(3, 1.0);
    if (s == "h2") return SpaceSpec::hyperbolic_space(2, -1.0);
    if (s == "h3") return SpaceSpec::hyperbolic_space(3, -1.0);
    if (s == "s2xr")
        return SpaceSpec::product_space(SpaceSpec::sphere_space(2, 1.0),
                                        SpaceSpec::euclidean_space(1));
    if (s == "dr_2_1" || s == "dr21") return SpaceSpec::damek_ricci_space(2, 1);
    if (s == "dr_4_3" || s == "dr43") return SpaceSpec::damek_ricci_space(4, 3);
    if (s == "ellipsoid") return SpaceSpec::ellipsoid_surface({1.0, 1.0, 1.3});
    throw UsageError("unknown space alias: " + s);
}

SpaceSpec parse_space(const Json& j) {
    if (j.is_string()) return space_from_alias(j.get<std::string>());
    if (!j.is_object()) throw UsageError("space must be an alias string or an object");
    const std::string kind = j.value("kind", "");
    if (kind == "euclidean") return SpaceSpec::euclidean_space(j.value("dim", 3));
    if (kind == "sphere")
        return SpaceSpec::sphere_space(j.value("dim", 3), j.value("curvature", 1.0));
    if (kind == "hyperbolic")
        return SpaceSpec::hyperbolic_space(j.value("dim", 3), j.value("curvature", -1.0));
    if (kind == "product") {
        if (!j.contains("factors") || j["factors"].size() != 2)
            throw UsageError("product space needs exactly two factors");
        return SpaceSpec::product_space(parse_space(j["factors"][0]),
                                        parse_space(j["factors"][1]));
    }
    if (kind == "damek_ricci")
        return SpaceSpec::damek_ricci_space(j.value("p", 2), j.value("q", 1));
    if (kind == "ellipsoid") {
        SpaceSpec s = SpaceSpec::ellipsoid_surface(
            j.value("semi_axes", std::vector<double>{1.0, 1.0, 1.3}));
        return s;
    }
    if (kind == "generic") return SpaceSpec::generic_space(j.value("name", ""));
    throw UsageError("unknown space kind: " + kind);
}

std::vector<double> parse_radii(const Json& j) {
    std::vector<double> out;
    if (j.is_array()) {
        for (const auto& v : j) out.push_back(v.get<double>());
    } else if (j.is_object()) {
        const double start = j.at("start").get<double>();
        const double stop = j.at("stop").get<double>();
        const int count = j.at("count").get<int>();
        if (count < 1) throw UsageError("radii.count must be positive");
        for (int i = 0; i < count; ++i)
            out.push_back(count == 1 ? start : start + (stop - start) * i / (count - 1));
    } else if (j.is_number()) {
        out.push_back(j.get<double>());
    } else {
        throw UsageError("radii must be a number, list, or {start,stop,count}");
    }
    if (out.empty()) throw UsageError("radii must be nonempty");
    for (double r : out)
        if (r <= 0.0) throw UsageError("radii must be positive");
    for (size_t i = 1; i < out.size(); ++i)
        if (out[i] <= out[i - 1]) throw UsageError("radii must be strictly increasing");
    return out;
}

// Named spherical test functions for the transform experiments.
rules::SphericalFunction named_function(const std::string& name, int m) {
    using rules::Parity;
    if (name == "const")
        return {m, [](const Vec&) { return 1.0; }, Parity::even};
    if (name == "odd-cubic")
        return {m, [](const Vec& v) { return v[0] * v[0] * v[0]; }, Parity::odd};
    if (name == "odd-mixed")
        return {m, [m](const Vec& v) { return v[0] * v[1] * (m > 2 ? v[2] : 1.0); },
                Parity::odd};
    if (name == "odd-trig")
        return {m, [](const Vec& v) { return std::sin(v[0]) * std::cos(v[1]); }, Parity::odd};
    if (name == "even-square")
        return {m, [](const Vec& v) { return v[1] * v[1]; }, Parity::even};
    throw UsageError("unknown spherical function: " + name);
}

bool is_harmonic_kind(const SpaceSpec& s) {
    return s.kind == SpaceKind::euclidean || s.kind == SpaceKind::sphere ||
           s.kind == SpaceKind::hyperbolic || s.kind == SpaceKind::damek_ricci;
}

struct Context {
    const ExperimentConfig& cfg;
    ChartMetric metric;
    std::string space_name;
    std::vector<ReportRow> rows;

    void add(const std::string& quantity, double r, double value, double error,
             std::optional<double> reference, double tol, bool relative = true) {
        ReportRow row;
        row.experiment = experiment_name(cfg.experiment);
        row.space = space_name;
        row.r = r;
        row.quantity = quantity;
        row.value = value;
        row.error = error;
        row.reference = reference;
        if (reference) {
            const double scale = relative ? std::max(1.0, std::fabs(*reference)) : 1.0;
            row.pass = std::fabs(value - *reference) <= tol * scale ? "pass" : "fail";
        } else {
            row.pass = "na";
        }
        rows.push_back(std::move(row));
    }

    void add_bounded(const std::string& quantity, double r, double value, double error,
                     double bound) {
        ReportRow row;
        row.experiment = experiment_name(cfg.experiment);
        row.space = space_name;
        row.r = r;
        row.quantity = quantity;
        row.value = value;
        row.error = error;
        row.reference = 0.0;
        row.pass = std::fabs(value) <= bound ? "pass" : "fail";
        rows.push_back(std::move(row));
    }
};

Vec normalized_direction(const ChartMetric& m, const Vec& p, Vec dir) {
    if (dir.empty()) {
        dir.assign(m.dim(), 0.0);
        dir[0] = 1.0;
    }
    if (static_cast<int>(dir.size()) != m.dim())
        throw UsageError("curve.direction dimension mismatch");
    const double n = m.norm(p, dir);
    if (n <= 0.0) throw UsageError("curve.direction must be nonzero");
    for (double& c : dir) c /= n;
    return dir;
}

Vec base_point(const ChartMetric& m, const Vec& base) {
    if (base.empty()) return Vec(m.dim(), 0.0);
    if (static_cast<int>(base.size()) != m.dim())
        throw UsageError("curve.base dimension mismatch");
    return base;
}

std::vector<Vec> sample_points(const ChartMetric& m, int count, Rng& rng, double box) {
    std::vector<Vec> pts;
    for (int i = 0; i < count; ++i) {
        Vec p(m.dim());
        for (int d = 0; d < m.dim(); ++d) p[d] = rng.uniform(-box, box);
        pts.push_back(std::move(p));
    }
    return pts;
}

tube::TubeQuadrature tube_quadrature(const ExperimentConfig& cfg) {
    tube::TubeQuadrature q;
    q.t_order = cfg.quadrature.t_order;
    q.t_panels = cfg.quadrature.t_panels;
    q.angular_level = cfg.quadrature.rule_level;
    q.angular_kind = cfg.quadrature.rule_kind == "lowdisc" ? rules::RuleKind::lowdisc
                                                           : rules::RuleKind::product;
    q.radial_order = cfg.quadrature.radial_order;
    return q;
}

tube::FramedCurve make_curve(const ExperimentConfig& cfg, const ChartMetric& m) {
    if (cfg.curve.type == "geodesic") {
        const Vec p = base_point(m, cfg.curve.base);
        return tube::FramedCurve::geodesic(m, p, normalized_direction(m, p, cfg.curve.direction),
                                           cfg.curve.length);
    }
    if (cfg.curve.type == "circle") {
        if (cfg.space.kind != SpaceKind::euclidean)
            throw UsageError("circle curves are only wired up for euclidean space");
        return tube::FramedCurve::flat_circle(m, cfg.curve.circle_radius, cfg.curve.length);
    }
    throw UsageError("unknown curve type: " + cfg.curve.type);
}

void run_density_profile(Context& ctx) {
    const ExperimentConfig& cfg = ctx.cfg;
    const ChartMetric& m = ctx.metric;
    const Vec p = base_point(m, cfg.curve.base);
    const Vec u = normalized_direction(m, p, cfg.curve.direction);
    std::optional<spaces::RadialProfile> prof;
    if (is_harmonic_kind(cfg.space)) prof = spaces::closed_form_profile(cfg.space);
    density::JacobiOptions jopt;
    density::JacobiTransport jt = density::jacobi_transport(m, p, u, cfg.radii, jopt);
    for (size_t i = 0; i < cfg.radii.size(); ++i) {
        const double th = jt.theta(i);
        std::optional<double> ref;
        if (prof) ref = prof->value(cfg.radii[i]);
        ctx.add("theta", cfg.radii[i], th, 2e-9 * std::fabs(th), ref, cfg.pass_tolerance);
    }
    // Mean curvature of the geodesic sphere along the same direction:
    // shape-operator trace vs the radial-derivative formula.
    for (double r : cfg.radii) {
        Vec v(m.dim());
        for (int i = 0; i < m.dim(); ++i) v[i] = r * u[i];
        const geo::TangentVector tv = geo::TangentVector::make(m, p, v);
        const double h_trace = density::sphere_mean_curvature(m, tv);
        const double h_radial = density::sphere_mean_curvature_radial(m, tv);
        ctx.add("mean_curvature", r, h_trace, 0.0, h_radial, cfg.pass_tolerance);
    }
}

void run_ball_volumes(Context& ctx) {
    const ExperimentConfig& cfg = ctx.cfg;
    const ChartMetric& m = ctx.metric;
    const Vec p = base_point(m, cfg.curve.base);
    const Vec u = normalized_direction(m, p, cfg.curve.direction);
    const rules::SphereRule rule = rules::build_rule(
        m.dim(), cfg.quadrature.rule_level,
        cfg.quadrature.rule_kind == "lowdisc" ? rules::RuleKind::lowdisc
                                              : rules::RuleKind::product);
    std::optional<spaces::RadialProfile> prof;
    if (is_harmonic_kind(cfg.space)) prof = spaces::closed_form_profile(cfg.space);
    const int n = m.dim();
    for (double r : cfg.radii) {
        density::BallVolumes bv =
            density::ball_volumes(m, p, u, r, rule, cfg.quadrature.radial_order);
        std::optional<double> area_ref, ball_ref;
        if (prof) {
            area_ref = geo::unit_sphere_area(n) * std::pow(r, n - 1) * prof->value(r);
            // radial Gauss integration of the closed form
            Vec gx, gw;
            rules::gauss_legendre(64, gx, gw);
            double acc = 0.0;
            for (size_t q = 0; q < gx.size(); ++q) {
                const double rho = 0.5 * r * (gx[q] + 1.0);
                acc += gw[q] * std::pow(rho, n - 1) * prof->value(rho);
            }
            ball_ref = geo::unit_sphere_area(n) * 0.5 * r * acc;
        }
        ctx.add("sphere_area", r, bv.sphere_area, 0.0, area_ref, cfg.pass_tolerance);
        ctx.add("ball_volume", r, bv.ball_volume, 0.0, ball_ref, cfg.pass_tolerance);
        std::optional<double> half_ref;
        if (ball_ref) half_ref = 0.5 * *ball_ref;
        ctx.add("half_ball", r, bv.half_ball, 0.0, half_ref, cfg.pass_tolerance);
        ctx.add("half_ball_opposite", r, bv.half_ball_opposite, 0.0, half_ref,
                cfg.pass_tolerance);
        ctx.add_bounded("partition_defect", r,
                        bv.half_ball + bv.half_ball_opposite - bv.ball_volume, 0.0,
                        cfg.pass_tolerance * std::max(1.0, bv.ball_volume));
    }
}

void run_tube_volume(Context& ctx) {
    const ExperimentConfig& cfg = ctx.cfg;
    const ChartMetric& m = ctx.metric;
    const tube::FramedCurve fc = make_curve(cfg, m);
    std::optional<spaces::RadialProfile> prof;
    if (is_harmonic_kind(cfg.space)) prof = spaces::closed_form_profile(cfg.space);
    const tube::TubeQuadrature quad = tube_quadrature(cfg);
    tube::TubeQuadrature coarse = quad;
    coarse.angular_level = std::max(2, quad.angular_level - 1);
    coarse.radial_order = std::max(6, quad.radial_order / 2);
    const std::vector<double> vals = tube::tube_volumes(m, fc, cfg.radii, quad);
    const std::vector<double> low = tube::tube_volumes(m, fc, cfg.radii, coarse);
    for (size_t i = 0; i < cfg.radii.size(); ++i) {
        const double r = cfg.radii[i];
        std::optional<double> ref;
        if (prof)
            ref = tube::harmonic_closed_forms(*prof, m.dim(), r, fc.length()).invariants.volume;
        const double err = std::fabs(vals[i] - low[i]) + 1e-9 * std::fabs(vals[i]);
        ctx.add("tube_volume", r, vals[i], err, ref, cfg.pass_tolerance);
    }
}

void run_tube_invariants(Context& ctx) {
    const ExperimentConfig& cfg = ctx.cfg;
    const ChartMetric& m = ctx.metric;
    const tube::FramedCurve fc = make_curve(cfg, m);
    std::optional<spaces::RadialProfile> prof;
    if (is_harmonic_kind(cfg.space)) prof = spaces::closed_form_profile(cfg.space);
    tube::TubeQuadrature quad = tube_quadrature(cfg);
    quad.estimate_error = true;
    for (double r : cfg.radii) {
        tube::TubeInvariants inv = tube::tube_invariants(m, fc, r, quad);
        std::optional<double> vol_ref, area_ref, h_ref, c_ref;
        if (prof) {
            tube::HarmonicTubeForms forms =
                tube::harmonic_closed_forms(*prof, m.dim(), r, fc.length());
            vol_ref = forms.invariants.volume;
            area_ref = forms.invariants.area;
            h_ref = forms.invariants.total_mean_curvature;
            c_ref = forms.invariants.total_scalar_curvature;
        }
        ctx.add("volume", r, inv.volume, inv.volume_error, vol_ref, cfg.pass_tolerance);
        ctx.add("area", r, inv.area, inv.area_error, area_ref, cfg.pass_tolerance);
        ctx.add("total_mean_curvature", r, inv.total_mean_curvature, inv.area_error, h_ref,
                cfg.pass_tolerance);
        ctx.add("total_scalar_curvature", r, inv.total_scalar_curvature, inv.invariants_error,
                c_ref, cfg.pass_tolerance);
        ctx.add("normal_ricci_integral", r, inv.normal_ricci_integral, inv.invariants_error,
                std::nullopt, cfg.pass_tolerance);
    }
}

void run_check_harmonic(Context& ctx) {
    const ExperimentConfig& cfg = ctx.cfg;
    Rng rng(cfg.seed);
    std::vector<Vec> pts = sample_points(ctx.metric, cfg.base_points, rng, cfg.sample_box);
    series::FitOptions fopt;
    fopt.order = cfg.max_order;
    fopt.r_min = cfg.window_lo;
    fopt.r_max = cfg.window_hi;
    series::HarmonicOrderReport rep = series::harmonic_up_to_order(
        ctx.metric, cfg.max_order, pts, cfg.directions, cfg.seed + 1, fopt);
    for (int i = 0; i <= rep.max_order; ++i) {
        ReportRow row;
        row.experiment = experiment_name(cfg.experiment);
        row.space = ctx.space_name;
        row.r = std::numeric_limits<double>::quiet_NaN();
        row.quantity = "a" + std::to_string(i) + "_variation";
        row.value = rep.variation[i];
        row.error = rep.error_bar[i];
        row.reference = 0.0;
        row.pass = rep.order_passes[i] ? "pass" : "fail";
        ctx.rows.push_back(std::move(row));
    }
    ReportRow sum;
    sum.experiment = experiment_name(cfg.experiment);
    sum.space = ctx.space_name;
    sum.r = std::numeric_limits<double>::quiet_NaN();
    sum.quantity = "harmonic_up_to";
    sum.value = rep.harmonic_up_to;
    sum.error = 0.0;
    sum.reference = static_cast<double>(rep.max_order);
    sum.pass = rep.harmonic_up_to == rep.max_order ? "pass" : "fail";
    ctx.rows.push_back(std::move(sum));
}

void run_check_datri(Context& ctx) {
    const ExperimentConfig& cfg = ctx.cfg;
    Rng rng(cfg.seed);
    density::DatriOptions opt;
    opt.base_points = sample_points(ctx.metric, cfg.base_points, rng, cfg.sample_box);
    opt.directions_per_point = cfg.directions;
    opt.radii = cfg.radii;
    opt.speeds = cfg.speeds;
    opt.rule_level = cfg.quadrature.rule_level;
    opt.radial_order = cfg.quadrature.radial_order;
    opt.seed = cfg.seed + 1;
    opt.check_half_ball = false;
    opt.check_first_integral = false;
    opt.check_involution = false;
    for (const std::string& c : cfg.checks) {
        if (c == "half-ball")
            opt.check_half_ball = true;
        else if (c == "first-integral")
            opt.check_first_integral = true;
        else if (c == "involution")
            opt.check_involution = true;
        else
            throw UsageError("unknown datri check: " + c);
    }
    density::DatriReport rep = density::datri_checks(ctx.metric, opt);
    if (opt.check_half_ball)
        ctx.add_bounded("half_ball_defect", cfg.radii.front(), rep.half_ball_defect,
                        rep.half_ball_error_estimate, cfg.pass_tolerance);
    if (opt.check_first_integral)
        ctx.add_bounded("first_integral_defect", cfg.radii.front(), rep.first_integral_defect,
                        rep.first_integral_error_estimate, cfg.pass_tolerance);
    if (opt.check_involution)
        ctx.add_bounded("involution_defect", cfg.speeds.front(), rep.involution_defect, 0.0,
                        cfg.pass_tolerance);
}

void run_transform_cosine(Context& ctx) {
    const ExperimentConfig& cfg = ctx.cfg;
    Rng rng(cfg.seed);
    for (int m : cfg.dims) {
        const Vec u = rng.unit_vector(m);
        for (const std::string& name : cfg.functions) {
            if ((name == "odd-mixed") && m < 3) continue;
            const rules::SphericalFunction f = named_function(name, m);
            const double ct = rules::cosine_transform(f, u, cfg.quadrature.rule_level);
            const std::string label = "C[" + name + "]:n=" + std::to_string(m);
            if (name == "const") {
                ctx.add(label, std::numeric_limits<double>::quiet_NaN(), ct, 0.0,
                        2.0 * geo::unit_ball_volume(m - 1), cfg.pass_tolerance);
            } else if (f.parity == rules::Parity::odd) {
                ctx.add_bounded(label, std::numeric_limits<double>::quiet_NaN(), ct, 0.0,
                                cfg.pass_tolerance);
            } else {
                const double hm = rules::hemisphere_moment(f, u, cfg.quadrature.rule_level);
                ctx.add(label + ":hemi*2", std::numeric_limits<double>::quiet_NaN(), 2.0 * hm,
                        0.0, ct, cfg.pass_tolerance);
            }
        }
    }
}

void run_stiefel_fubini(Context& ctx) {
    const ExperimentConfig& cfg = ctx.cfg;
    const std::vector<std::string> names =
        cfg.functions_set ? cfg.functions
                          : std::vector<std::string>{"const", "square", "exp"};
    for (int m : cfg.dims) {
        struct Named {
            std::string name;
            std::function<double(const Vec&, const Vec&)> f;
            bool has_ref;
            double ref;
        };
        std::vector<Named> fs;
        for (const std::string& name : names) {
            if (name == "const")
                fs.push_back({"const", [](const Vec&, const Vec&) { return 1.0; }, true,
                              m * (m - 1) * geo::unit_ball_volume(m) *
                                  geo::unit_ball_volume(m - 1)});
            else if (name == "square")
                fs.push_back({"square",
                              [](const Vec& a, const Vec& b) {
                                  return a[0] * a[0] * b[1] * b[1];
                              },
                              false, 0.0});
            else if (name == "exp")
                fs.push_back({"exp",
                              [](const Vec& a, const Vec& b) { return std::exp(a[0] * b[1]); },
                              false, 0.0});
            else
                throw UsageError("unknown stiefel-fubini function: " + name);
        }
        for (const auto& nf : fs) {
            rules::FubiniPair pr = rules::stiefel_fubini_check(m, nf.f, cfg.quadrature.rule_level);
            const std::string label = nf.name + ":n=" + std::to_string(m);
            if (nf.has_ref) {
                ctx.add("lhs[" + label + "]", std::numeric_limits<double>::quiet_NaN(), pr.lhs,
                        0.0, nf.ref, cfg.pass_tolerance);
                ctx.add("rhs[" + label + "]", std::numeric_limits<double>::quiet_NaN(), pr.rhs,
                        0.0, nf.ref, cfg.pass_tolerance);
            } else {
                ctx.add_bounded("diff[" + label + "]", std::numeric_limits<double>::quiet_NaN(),
                                pr.lhs - pr.rhs, 0.0,
                                cfg.pass_tolerance * std::max(1.0, std::fabs(pr.lhs)));
            }
        }
    }
}

void run_series_fit(Context& ctx) {
    const ExperimentConfig& cfg = ctx.cfg;
    const ChartMetric& m = ctx.metric;
    const Vec p = base_point(m, cfg.curve.base);
    const Vec u = normalized_direction(m, p, cfg.curve.direction);
    series::FitOptions fopt;
    fopt.order = cfg.max_order;
    fopt.r_min = cfg.window_lo;
    fopt.r_max = cfg.window_hi;
    series::CoefficientFit fit = series::fit_coefficients(m, p, u, fopt);
    // a2 reference from the curvature tensor: a2(u) = -Ric(u,u)/6.
    geo::CurvatureData curv = m.curvature_at(p);
    double ric_uu = 0.0;
    for (int i = 0; i < m.dim(); ++i)
        for (int j = 0; j < m.dim(); ++j) ric_uu += curv.ricci(i, j) * u[i] * u[j];
    for (int i = 0; i <= cfg.max_order; ++i) {
        // a0 = 1 is pinned hard; a1 = 0 is compared against its error
        // bar (fitted quantity); a2 against the curvature tensor at the
        // config tolerance.
        if (i == 0) {
            ReportRow row;
            row.experiment = experiment_name(cfg.experiment);
            row.space = ctx.space_name;
            row.quantity = "a0";
            row.value = fit.coeffs[0];
            row.error = fit.stderrs[0];
            row.reference = 1.0;
            row.pass = std::fabs(fit.coeffs[0] - 1.0) <= 1e-8 ? "pass" : "fail";
            ctx.rows.push_back(std::move(row));
            continue;
        }
        if (i == 1) {
            ReportRow row;
            row.experiment = experiment_name(cfg.experiment);
            row.space = ctx.space_name;
            row.quantity = "a1";
            row.value = fit.coeffs[1];
            row.error = fit.stderrs[1];
            row.reference = 0.0;
            row.pass =
                std::fabs(fit.coeffs[1]) <= 4.0 * fit.stderrs[1] + 1e-9 ? "pass" : "fail";
            ctx.rows.push_back(std::move(row));
            continue;
        }
        std::optional<double> ref;
        if (i == 2) ref = -ric_uu / 6.0;
        const auto extra = cfg.coefficient_references.find("a" + std::to_string(i));
        if (extra != cfg.coefficient_references.end()) ref = extra->second;
        ctx.add("a" + std::to_string(i), std::numeric_limits<double>::quiet_NaN(),
                fit.coeffs[i], fit.stderrs[i], ref, cfg.pass_tolerance);
    }
    ReportRow cond;
    cond.experiment = experiment_name(cfg.experiment);
    cond.space = ctx.space_name;
    cond.quantity = "condition_number";
    cond.value = fit.condition_number;
    cond.error = 0.0;
    cond.pass = "na";
    ctx.rows.push_back(std::move(cond));
}

void run_steiner_check(Context& ctx) {
    const ExperimentConfig& cfg = ctx.cfg;
    const ChartMetric& m = ctx.metric;
    const tube::FramedCurve fc = make_curve(cfg, m);
    const double r = cfg.radii.front();
    tube::SteinerReport rep =
        tube::steiner_check(m, fc, r, cfg.deltas, tube_quadrature(cfg));
    ctx.add("area_coeff_fd", r, rep.fd1, 0.0, rep.area_coeff, cfg.pass_tolerance);
    ctx.add("second_coeff_fd", r, rep.fd2, 0.0, rep.second_coeff, cfg.pass_tolerance);
    ctx.add("third_coeff_fd", r, rep.fd3, 0.0, rep.third_coeff, cfg.pass_tolerance);
    if (rep.decay_ratio > 0.0) {
        ReportRow row;
        row.experiment = experiment_name(cfg.experiment);
        row.space = ctx.space_name;
        row.r = r;
        row.quantity = "residual_decay_ratio";
        row.value = rep.decay_ratio;
        row.error = 0.0;
        row.reference = 16.0;
        row.pass = (rep.decay_ratio >= 12.0 && rep.decay_ratio <= 20.0) ? "pass" : "fail";
        ctx.rows.push_back(std::move(row));
    }
}

}  // namespace

Experiment experiment_from_name(const std::string& name) {
    if (name == "density-profile") return Experiment::density_profile;
    if (name == "ball-volumes") return Experiment::ball_volumes;
    if (name == "tube-volume") return Experiment::tube_volume;
    if (name == "tube-invariants") return Experiment::tube_invariants;
    if (name == "check-harmonic") return Experiment::check_harmonic;
    if (name == "check-datri") return Experiment::check_datri;
    if (name == "transform-cosine") return Experiment::transform_cosine;
    if (name == "stiefel-fubini") return Experiment::stiefel_fubini;
    if (name == "series-fit") return Experiment::series_fit;
    if (name == "steiner-check") return Experiment::steiner_check;
    throw UsageError("unknown experiment: " + name);
}

std::string experiment_name(Experiment e) {
    switch (e) {
        case Experiment::density_profile: return "density-profile";
        case Experiment::ball_volumes: return "ball-volumes";
        case Experiment::tube_volume: return "tube-volume";
        case Experiment::tube_invariants: return "tube-invariants";
        case Experiment::check_harmonic: return "check-harmonic";
        case Experiment::check_datri: return "check-datri";
        case Experiment::transform_cosine: return "transform-cosine";
        case Experiment::stiefel_fubini: return "stiefel-fubini";
        case Experiment::series_fit: return "series-fit";
        case Experiment::steiner_check: return "steiner-check";
    }
    return "?";
}

ExperimentConfig parse_config(const Json& doc) {
    if (!doc.is_object()) throw UsageError("config must be a JSON object");
    ExperimentConfig cfg;
    try {
        if (!doc.contains("space")) throw UsageError("config needs a 'space'");
        cfg.space = parse_space(doc["space"]);
        if (!doc.contains("experiment")) throw UsageError("config needs an 'experiment'");
        cfg.experiment = experiment_from_name(doc["experiment"].get<std::string>());
        if (doc.contains("radii")) cfg.radii = parse_radii(doc["radii"]);
        if (doc.contains("curve")) {
            const Json& c = doc["curve"];
            cfg.curve.type = c.value("type", "geodesic");
            if (c.contains("base")) cfg.curve.base = c["base"].get<std::vector<double>>();
            if (c.contains("direction"))
                cfg.curve.direction = c["direction"].get<std::vector<double>>();
            cfg.curve.length = c.value("length", 1.0);
            cfg.curve.circle_radius = c.value("radius", 1.0);
        }
        if (doc.contains("quadrature")) {
            const Json& q = doc["quadrature"];
            cfg.quadrature.rule_level = q.value("rule_level", 6);
            cfg.quadrature.rule_kind = q.value("rule_kind", "product");
            cfg.quadrature.radial_order = q.value("radial_order", 16);
            cfg.quadrature.t_panels = q.value("t_panels", 1);
            cfg.quadrature.t_order = q.value("t_order", 8);
        }
        if (doc.contains("tolerances")) cfg.pass_tolerance = doc["tolerances"].value("pass", 1e-4);
        cfg.seed = doc.value("seed", 1);
        cfg.expected_fail = doc.value("expected_fail", false);
        if (doc.contains("output")) {
            cfg.format = doc["output"].value("format", "csv");
            cfg.out_path = doc["output"].value("path", "");
        }
        if (doc.contains("functions")) {
            cfg.functions = doc["functions"].get<std::vector<std::string>>();
            cfg.functions_set = true;
        }
        if (doc.contains("dims")) cfg.dims = doc["dims"].get<std::vector<int>>();
        cfg.max_order = doc.value("max_order", 6);
        if (doc.contains("window")) {
            cfg.window_lo = doc["window"][0].get<double>();
            cfg.window_hi = doc["window"][1].get<double>();
        }
        cfg.directions = doc.value("directions", 8);
        cfg.base_points = doc.value("base_points", 3);
        if (doc.contains("speeds")) cfg.speeds = doc["speeds"].get<std::vector<double>>();
        if (doc.contains("deltas")) cfg.deltas = doc["deltas"].get<std::vector<double>>();
        if (doc.contains("checks")) cfg.checks = doc["checks"].get<std::vector<std::string>>();
        cfg.sample_box = doc.value("sample_box", 0.2);
        if (doc.contains("coefficient_references"))
            cfg.coefficient_references =
                doc["coefficient_references"].get<std::map<std::string, double>>();
    } catch (const Json::exception& e) {
        throw UsageError(std::string("config parse error: ") + e.what());
    }
    if (cfg.format != "csv" && cfg.format != "json" && cfg.format != "plot")
        throw UsageError("output.format must be csv, json or plot");
    return cfg;
}

void apply_override(Json& doc, const std::string& assignment) {
    const size_t eq = assignment.find('=');
    if (eq == std::string::npos) throw UsageError("override must look like key.path=value");
    const std::string path = assignment.substr(0, eq);
    const std::string raw = assignment.substr(eq + 1);
    Json value;
    try {
        value = Json::parse(raw);
    } catch (...) {
        value = raw;  // plain string
    }
    Json* node = &doc;
    size_t pos = 0;
    std::vector<std::string> keys;
    while (pos != std::string::npos) {
        const size_t dot = path.find('.', pos);
        keys.push_back(path.substr(pos, dot == std::string::npos ? dot : dot - pos));
        pos = dot == std::string::npos ? dot : dot + 1;
    }
    for (size_t i = 0; i + 1 < keys.size(); ++i) node = &((*node)[keys[i]]);
    (*node)[keys.back()] = value;
}

RunResult run(const ExperimentConfig& cfg) {
    Context ctx{cfg, spaces::make_space(cfg.space), cfg.space.name(), {}};
    RunResult out;
    try {
        switch (cfg.experiment) {
            case Experiment::density_profile: run_density_profile(ctx); break;
            case Experiment::ball_volumes: run_ball_volumes(ctx); break;
            case Experiment::tube_volume: run_tube_volume(ctx); break;
            case Experiment::tube_invariants: run_tube_invariants(ctx); break;
            case Experiment::check_harmonic: run_check_harmonic(ctx); break;
            case Experiment::check_datri: run_check_datri(ctx); break;
            case Experiment::transform_cosine: run_transform_cosine(ctx); break;
            case Experiment::stiefel_fubini: run_stiefel_fubini(ctx); break;
            case Experiment::series_fit: run_series_fit(ctx); break;
            case Experiment::steiner_check: run_steiner_check(ctx); break;
        }
    } catch (const UsageError&) {
        throw;
    } catch (const std::runtime_error& e) {
        // Conjugate points, tube self-focus, chart escapes, stiffness:
        // report a diagnostic row and signal a numerical failure.
        ReportRow row;
        row.experiment = experiment_name(cfg.experiment);
        row.space = ctx.space_name;
        row.quantity = std::string("numerical-failure: ") + e.what();
        row.pass = "fail";
        out.rows = std::move(ctx.rows);
        out.rows.push_back(std::move(row));
        out.exit_code = 3;
        return out;
    }

    out.rows = std::move(ctx.rows);
    bool any_fail = false, any_expected = false;
    for (ReportRow& row : out.rows) {
        if (row.pass == "fail" && cfg.expected_fail) {
            row.pass = "expected-fail";
            any_expected = true;
        } else if (row.pass == "fail") {
            any_fail = true;
        }
    }
    if (cfg.expected_fail && !any_expected) {
        ReportRow row;
        row.experiment = experiment_name(cfg.experiment);
        row.space = ctx.space_name;
        row.quantity = "expected-fail-but-all-passed";
        row.pass = "fail";
        out.rows.push_back(std::move(row));
        any_fail = true;
    }
    out.exit_code = any_fail ? 1 : 0;
    return out;
}

std::string emit_csv(const std::vector<ReportRow>& rows) {
    std::ostringstream os;
    os << "experiment,space,r,quantity,value,error,reference,pass\n";
    for (const ReportRow& row : rows) {
        os << row.experiment << ',' << row.space << ',';
        if (std::isfinite(row.r)) os << fmt17(row.r);
        os << ',' << row.quantity << ',' << fmt17(row.value) << ',' << fmt17(row.error) << ',';
        if (row.reference) os << fmt17(*row.reference);
        os << ',' << row.pass << '\n';
    }
    return os.str();
}

std::string emit_json(const Json& config_doc, const std::vector<ReportRow>& rows,
                      const std::string& timestamp) {
    std::ostringstream os;
    os << "{\n  \"meta\": {\n    \"config\": " << config_doc.dump()
       << ",\n    \"version\": \"" << kVersion << "\",\n    \"timestamp\": ";
    if (timestamp.empty())
        os << "null";
    else
        os << '"' << timestamp << '"';
    os << "\n  },\n  \"rows\": [\n";
    for (size_t i = 0; i < rows.size(); ++i) {
        const ReportRow& row = rows[i];
        os << "    {\"experiment\": \"" << row.experiment << "\", \"space\": \"" << row.space
           << "\", \"r\": ";
        if (std::isfinite(row.r))
            os << fmt17(row.r);
        else
            os << "null";
        os << ", \"quantity\": \"" << row.quantity << "\", \"value\": " << fmt17(row.value)
           << ", \"error\": " << fmt17(row.error) << ", \"reference\": ";
        if (row.reference)
            os << fmt17(*row.reference);
        else
            os << "null";
        os << ", \"pass\": \"" << row.pass << "\"}";
        os << (i + 1 < rows.size() ? ",\n" : "\n");
    }
    os << "  ]\n}\n";
    return os.str();
}

std::string emit_plot(const std::vector<ReportRow>& rows) {
    // (r, value, reference) triples grouped by quantity, sorted by r.
    std::vector<std::string> quantities;
    for (const ReportRow& row : rows)
        if (std::find(quantities.begin(), quantities.end(), row.quantity) == quantities.end())
            quantities.push_back(row.quantity);
    std::ostringstream os;
    os << "quantity,r,value,reference\n";
    for (const std::string& q : quantities) {
        std::vector<const ReportRow*> group;
        for (const ReportRow& row : rows)
            if (row.quantity == q && std::isfinite(row.r)) group.push_back(&row);
        std::sort(group.begin(), group.end(),
                  [](const ReportRow* a, const ReportRow* b) { return a->r < b->r; });
        for (const ReportRow* row : group) {
            os << q << ',' << fmt17(row->r) << ',' << fmt17(row->value) << ',';
            if (row->reference) os << fmt17(*row->reference);
            os << '\n';
        }
    }
    return os.str();
}

RunResult run_document(const Json& doc) {
    RunResult total;
    if (doc.contains("suite")) {
        if (!doc["suite"].is_array()) throw UsageError("'suite' must be a list of configs");
        for (const Json& sub : doc["suite"]) {
            ExperimentConfig cfg = parse_config(sub);
            RunResult r = run(cfg);
            total.rows.insert(total.rows.end(), r.rows.begin(), r.rows.end());
            total.exit_code = std::max(total.exit_code, r.exit_code);
        }
        return total;
    }
    ExperimentConfig cfg = parse_config(doc);
    return run(cfg);
}

}  // namespace tubelab::report
