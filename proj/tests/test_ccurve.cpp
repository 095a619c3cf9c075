#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <algorithm>
#include <cmath>
#include <vector>

#include "ckam/ccurve.hpp"

using namespace ckam;

namespace {

const ContactHamiltonianSpec& pendulum_spec() {
    static const ContactHamiltonianSpec spec =
        ContactHamiltonianSpec::pendulum_example();
    return spec;
}

const LagrangianView& pendulum_view() {
    static const LagrangianView view = LagrangianView::make(
        pendulum_spec(), LagrangianView::Strategy::closed_form, 4.0, 65);
    return view;
}

const ContactHamiltonianSpec& piecewise_spec() {
    static const ContactHamiltonianSpec spec =
        ContactHamiltonianSpec::piecewise_example();
    return spec;
}

const LagrangianView& piecewise_view() {
    static const LagrangianView view = LagrangianView::make(
        piecewise_spec(), LagrangianView::Strategy::closed_form, 4.0, 65);
    return view;
}

/// Kinetic-only spec: H = p^2/2, u plays no role.
const LagrangianView& free_view() {
    static const ContactHamiltonianSpec spec = ContactHamiltonianSpec::mechanical(
        1.0, PeriodicCurve::smooth(TrigPoly::constant(1.0, 0.0)),
        PeriodicCurve::smooth(TrigPoly::constant(1.0, 0.0)));
    static const LagrangianView view = LagrangianView::make(
        spec, LagrangianView::Strategy::closed_form, 4.0, 65);
    return view;
}

/// Uniformly damped spec: H = p^2/2 + u, so c(theta) = theta exactly.
const LagrangianView& damped_view() {
    static const ContactHamiltonianSpec spec = ContactHamiltonianSpec::mechanical(
        1.0, PeriodicCurve::smooth(TrigPoly::constant(1.0, 0.0)),
        PeriodicCurve::smooth(TrigPoly::constant(1.0, 1.0)));
    static const LagrangianView view = LagrangianView::make(
        spec, LagrangianView::Strategy::closed_form, 4.0, 65);
    return view;
}

double pendulum_c(double theta) { return std::max(0.0, 2.0 * (theta - 1.0)); }

/// Shared 31-sample cross-method scan of the pendulum preset over [-1, 2];
/// theta_k = -1 + k/10, so k = 10 sits at theta 0 and k = 25 at theta 1.5.
const std::vector<CCurveSample>& pendulum_scan() {
    static const std::vector<CCurveSample> samples =
        scan(pendulum_view(), -1.0, 2.0, 31, ScanMethod::both,
             ScanGrids::defaults(1.0));
    return samples;
}

} // namespace

TEST_CASE("pendulum scan recovers the kinked curve with both methods agreeing") {
    const std::vector<CCurveSample>& samples = pendulum_scan();
    REQUIRE(samples.size() == 31);

    bool all_valid = true, curve_ok = true, gaps_ok = true, monotone = true;
    bool flat_side_ok = true, growing_side_ok = true;
    for (size_t k = 0; k < samples.size(); ++k) {
        const CCurveSample& s = samples[k];
        all_valid = all_valid && s.valid;
        curve_ok = curve_ok && std::abs(s.c - pendulum_c(s.theta)) <= 1e-2;
        gaps_ok = gaps_ok && std::isfinite(s.method_gap) &&
                  s.method_gap <= 2e-2 && !s.method_disagrees;
        if (k > 0) monotone = monotone && s.c >= samples[k - 1].c - 1e-6;
        if (s.theta <= 0.95)
            flat_side_ok = flat_side_ok && s.ordinal_nonempty &&
                           std::abs(s.integral_duH) <= 1e-2;
        if (s.theta >= 1.05)
            growing_side_ok = growing_side_ok && !s.ordinal_nonempty &&
                              std::abs(s.integral_duH - 2.0) <= 1e-2 &&
                              s.min_face_duH >= 1e-2;
    }
    CHECK(all_valid);
    CHECK(curve_ok);
    CHECK(gaps_ok);
    CHECK(monotone);
    CHECK(flat_side_ok);
    CHECK(growing_side_ok);
    CHECK(samples[10].theta == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(samples[25].theta == doctest::Approx(1.5).epsilon(1e-12));
}

TEST_CASE("pendulum scan passes every itemized slope check") {
    const H4Report report = verify_h4(pendulum_scan());
    for (const auto& item : report.items) REQUIRE(item.size() == 31);

    CHECK(report.items[1][10] == ItemVerdict::pass); // ordinal => flat left slope
    CHECK(report.items[2][25] == ItemVerdict::pass); // non-ordinal => growth
    CHECK(report.items[3][25] == ItemVerdict::pass); // slope matches pairing

    int fails = 0, passes = 0;
    for (const auto& item : report.items)
        for (ItemVerdict v : item) {
            fails += v == ItemVerdict::fail;
            passes += v == ItemVerdict::pass;
        }
    CHECK(fails == 0);
    CHECK(passes > 60);
    CHECK(report.all_pass);
    CHECK(report.lipschitz_bound == doctest::Approx(2.05).epsilon(0.02));

    const std::array<bool, 8> expected_approx = {false, false, true,  false,
                                                 true,  true,  true, true};
    CHECK(report.approximate == expected_approx);
}

TEST_CASE("uniform damping gives the identity curve and a full-line range") {
    const ScanGrids grids = ScanGrids::defaults(1.0);
    const std::vector<CCurveSample> samples =
        scan(damped_view(), -1.0, 1.0, 11, ScanMethod::lp, grids);
    REQUIRE(samples.size() == 11);

    bool all_ok = true;
    for (const CCurveSample& s : samples) {
        all_ok = all_ok && s.valid && std::abs(s.c - s.theta) <= 1e-9 &&
                 !s.ordinal_nonempty && std::abs(s.integral_duH - 1.0) <= 1e-9 &&
                 s.min_face_duH >= 1e-2 && std::isnan(s.method_gap);
        if (std::isfinite(s.slope_left))
            all_ok = all_ok && std::abs(s.slope_left - 1.0) <= 1e-6;
        if (std::isfinite(s.slope_right))
            all_ok = all_ok && std::abs(s.slope_right - 1.0) <= 1e-6;
    }
    CHECK(all_ok);

    const H4Report report = verify_h4(samples);
    CHECK(report.all_pass);
    CHECK(report.items[2][5] == ItemVerdict::pass);
    CHECK(report.items[3][5] == ItemVerdict::pass);

    // Damped fixed-point runs converge for every constant, so the probe
    // cannot bracket a bottom end and the sampled range keeps growing.
    const AdmissibleProbe probe =
        admissible_interval_probe(damped_view(), grids.x_grid,
                                  16.0 * grids.x_grid.h() / 4.0, -1.0, 1.0, 10,
                                  4000, 4.0);
    CHECK(!probe.bracket_valid);
    const AdmissibleClassification cls = classify_admissible_set(samples, probe);
    CHECK(cls.shape == AdmissibleShape::line);
    CHECK(!cls.flat_left);
    CHECK(cls.grows_right);
    CHECK(cls.c0 == doctest::Approx(-1.0).epsilon(1e-9));
}

TEST_CASE("pendulum classification finds a closed ray with convex samples") {
    const ScanGrids grids = ScanGrids::defaults(1.0);
    const AdmissibleProbe probe =
        admissible_interval_probe(pendulum_view(), grids.x_grid,
                                  16.0 * grids.x_grid.h() / 4.0, -1.0, 1.0, 10,
                                  4000, 4.0);
    REQUIRE(probe.bracket_valid);
    REQUIRE(probe.attained);
    REQUIRE(std::abs(probe.c_hi) <= 2e-3);

    const AdmissibleClassification cls =
        classify_admissible_set(pendulum_scan(), probe);
    CHECK(cls.shape == AdmissibleShape::closed_ray);
    CHECK(cls.attained);
    CHECK(cls.flat_left);
    CHECK(cls.grows_right);
    CHECK(std::abs(cls.c0) <= 1e-6);
    CHECK(cls.convexity_defect <= 1e-3);

    // Samples that carry an ordinal vertex sit at the bottom of the ray: the
    // sampled constant agrees with the probe's bottom end.
    bool ordinal_at_bottom = true;
    for (const CCurveSample& s : pendulum_scan())
        if (s.ordinal_nonempty)
            ordinal_at_bottom =
                ordinal_at_bottom && std::abs(s.c - probe.c_hi) <= 2e-2;
    CHECK(ordinal_at_bottom);
}

TEST_CASE("a u-independent Hamiltonian collapses the curve to a point") {
    const ScanGrids grids = ScanGrids::defaults(1.0);
    const std::vector<CCurveSample> samples =
        scan(free_view(), -1.0, 1.0, 11, ScanMethod::both, grids);

    bool all_ok = true;
    for (const CCurveSample& s : samples)
        all_ok = all_ok && s.valid && std::abs(s.c) <= 1e-9 &&
                 s.ordinal_nonempty && std::abs(s.integral_duH) <= 1e-12 &&
                 s.method_gap <= 1e-6;
    CHECK(all_ok);

    // The probe still brackets (runs drift down below 0 and up above it) but
    // its endpoint never converges exactly at the bottom constant.
    const AdmissibleProbe probe =
        admissible_interval_probe(free_view(), grids.x_grid,
                                  16.0 * grids.x_grid.h() / 4.0, -1.0, 1.0, 10,
                                  4000, 4.0);
    CHECK(probe.bracket_valid);

    const AdmissibleClassification cls = classify_admissible_set(samples, probe);
    CHECK(cls.shape == AdmissibleShape::point);
    CHECK(cls.flat_left);
    CHECK(!cls.grows_right);
    CHECK(std::abs(cls.c0) <= 1e-9);
}

TEST_CASE("piecewise preset crosses methods on its own period") {
    const std::vector<CCurveSample> samples =
        scan(piecewise_view(), -0.5, 1.5, 5, ScanMethod::both,
             ScanGrids::defaults(2.0));
    REQUIRE(samples.size() == 5);

    const double expected[5] = {0.0, 0.0, 1.0, 2.0, 3.0};
    bool all_ok = true;
    for (size_t k = 0; k < samples.size(); ++k) {
        const CCurveSample& s = samples[k];
        all_ok = all_ok && s.valid && std::abs(s.c - expected[k]) <= 1e-2 &&
                 s.method_gap <= 2e-2;
    }
    CHECK(all_ok);

    // theta = -0.5 rests where the damping vanishes; theta >= 0.5 rests on
    // the damping peak.  theta = 0 has optima of both kinds, so its face
    // diagnostics are not pinned here.
    CHECK(samples[0].ordinal_nonempty);
    CHECK(std::abs(samples[0].integral_duH) <= 1e-2);
    bool peak_ok = true;
    for (size_t k = 2; k < 5; ++k)
        peak_ok = peak_ok && !samples[k].ordinal_nonempty &&
                  std::abs(samples[k].integral_duH - 2.0) <= 1e-2;
    CHECK(peak_ok);

    CHECK(verify_h4(samples).all_pass);
}

TEST_CASE("scan and its reports validate their arguments") {
    const ScanGrids grids = ScanGrids::defaults(1.0);
    CHECK_THROWS_AS(scan(pendulum_view(), 0.0, 1.0, 4, ScanMethod::lp, grids),
                    std::invalid_argument);
    CHECK_THROWS_AS(scan(pendulum_view(), 1.0, 1.0, 5, ScanMethod::lp, grids),
                    std::invalid_argument);
    CHECK_THROWS_AS(scan(pendulum_view(), 1.0, 0.0, 5, ScanMethod::lp, grids),
                    std::invalid_argument);

    const std::vector<CCurveSample> four(4);
    CHECK_THROWS_AS(verify_h4(four), std::invalid_argument);
    CHECK_THROWS_AS(classify_admissible_set(four, AdmissibleProbe{}),
                    std::invalid_argument);
}

TEST_CASE("per-theta failures invalidate samples without aborting the scan") {
    ScanGrids grids = ScanGrids::defaults(1.0);
    grids.dt = 1e-6; // too small to reach the neighboring node in one step
    const std::vector<CCurveSample> samples =
        scan(pendulum_view(), -1.0, 2.0, 5, ScanMethod::laxoleinik, grids);
    REQUIRE(samples.size() == 5);

    bool all_invalid = true;
    for (const CCurveSample& s : samples)
        all_invalid = all_invalid && !s.valid && std::isnan(s.c) &&
                      std::isnan(s.slope_left) && std::isnan(s.slope_right);
    CHECK(all_invalid);

    // Nothing to grade: every verdict stays not_applicable.
    const H4Report report = verify_h4(samples);
    CHECK(report.all_pass);
    for (const auto& item : report.items)
        for (ItemVerdict v : item) CHECK(v == ItemVerdict::not_applicable);

    // Too few valid samples to call a shape.
    CHECK_THROWS_AS(classify_admissible_set(samples, AdmissibleProbe{}),
                    std::invalid_argument);
}
