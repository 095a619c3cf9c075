#include "ckam/ccurve.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "ckam/util.hpp"

namespace ckam {

namespace {

constexpr double kMethodTol = 2e-2;

double nan_value() { return std::numeric_limits<double>::quiet_NaN(); }

// Every enumerated face pairs at least 10 eps away from zero (one sign).
bool robustly_non_ordinal(const CCurveSample& s, double eps_ordinal) {
    return !s.ordinal_nonempty && (s.min_face_duH >= 10.0 * eps_ordinal ||
                                   s.max_face_duH <= -10.0 * eps_ordinal);
}

bool faces_all_near_zero(const CCurveSample& s, double tol) {
    return std::abs(s.min_face_duH) <= tol && std::abs(s.max_face_duH) <= tol;
}

} // namespace

ScanGrids ScanGrids::defaults(double period) {
    ScanGrids g;
    g.x_grid = TorusGrid1D::make(period, 64);
    g.v_grid = VelocityGrid::make(2.0, 33);
    return g;
}

std::vector<CCurveSample> scan(const LagrangianView& view, double theta_min,
                               double theta_max, int n_samples,
                               ScanMethod method, const ScanGrids& grids) {
    if (!(theta_min < theta_max))
        throw std::invalid_argument("scan: theta_min must be < theta_max");
    if (n_samples < 5)
        throw std::invalid_argument("scan: need at least 5 samples");

    const double dt =
        grids.dt > 0.0 ? grids.dt : 16.0 * grids.x_grid.h() / grids.v_max;
    const double step = (theta_max - theta_min) / (n_samples - 1);

    std::vector<CCurveSample> samples(static_cast<size_t>(n_samples));
    parallel_for(n_samples, [&](int k) {
        CCurveSample s;
        s.theta = theta_min + step * k;
        s.slope_left = nan_value();
        s.slope_right = nan_value();
        s.method_gap = nan_value();
        try {
            const MatherFamily family = enumerate_mather_measures(
                view, s.theta, grids.x_grid, grids.v_grid, grids.enumerate_max);
            const double c_lp = family.critical_value;
            s.integral_duH =
                -ordinal_classify(family.measures.front(), view, s.theta,
                                  grids.eps_ordinal)
                     .integral_duL;
            s.min_face_duH = HUGE_VAL;
            s.max_face_duH = -HUGE_VAL;
            for (const DiscreteMeasure& mu : family.measures) {
                const OrdinalReport rep =
                    ordinal_classify(mu, view, s.theta, grids.eps_ordinal);
                s.ordinal_nonempty = s.ordinal_nonempty || rep.is_ordinal;
                s.min_face_duH = std::min(s.min_face_duH, -rep.integral_duL);
                s.max_face_duH = std::max(s.max_face_duH, -rep.integral_duL);
            }
            if (method == ScanMethod::lp) {
                s.c = c_lp;
            } else {
                const double c_drift = frozen_critical_value(
                    view, grids.x_grid, s.theta, dt, grids.n_iter, grids.v_max);
                if (method == ScanMethod::laxoleinik) {
                    s.c = c_drift;
                } else {
                    s.c = c_lp;
                    s.method_gap = std::abs(c_lp - c_drift);
                    s.method_disagrees = s.method_gap > kMethodTol;
                }
            }
        } catch (const std::exception&) {
            s.valid = false;
            s.c = nan_value();
            s.integral_duH = nan_value();
            s.min_face_duH = nan_value();
            s.max_face_duH = nan_value();
        }
        samples[static_cast<size_t>(k)] = s;
    });

    for (int k = 0; k < n_samples; ++k) {
        CCurveSample& s = samples[static_cast<size_t>(k)];
        if (!s.valid) continue;
        if (k > 0 && samples[static_cast<size_t>(k) - 1].valid) {
            const CCurveSample& prev = samples[static_cast<size_t>(k) - 1];
            if (s.c < prev.c - grids.tol_mono)
                throw verification_error(
                    "scan: sampled curve decreased beyond tol_mono");
            s.slope_left = (s.c - prev.c) / step;
        }
        if (k + 1 < n_samples && samples[static_cast<size_t>(k) + 1].valid)
            s.slope_right =
                (samples[static_cast<size_t>(k) + 1].c - s.c) / step;
    }
    return samples;
}

H4Report verify_h4(const std::vector<CCurveSample>& samples, double tol_slope,
                   double delta_pos, double eps_ordinal) {
    if (samples.size() < 5)
        throw std::invalid_argument("verify_h4: need at least 5 samples");
    const int n = static_cast<int>(samples.size());

    H4Report report;
    for (auto& item : report.items)
        item.assign(static_cast<size_t>(n), ItemVerdict::not_applicable);
    report.approximate = {false, false, true, false, true, true, true, true};

    double k_bound = 0.0;
    for (const CCurveSample& s : samples)
        if (s.valid) k_bound = std::max(k_bound, std::abs(s.integral_duH));
    k_bound += tol_slope;
    report.lipschitz_bound = k_bound;

    auto set = [&](int item, int k, bool ok) {
        report.items[static_cast<size_t>(item)][static_cast<size_t>(k)] =
            ok ? ItemVerdict::pass : ItemVerdict::fail;
        if (!ok) report.all_pass = false;
    };

    for (int k = 0; k < n; ++k) {
        const CCurveSample& s = samples[static_cast<size_t>(k)];
        if (!s.valid) continue;
        const bool has_prev =
            k > 0 && samples[static_cast<size_t>(k) - 1].valid;
        const bool has_next =
            k + 1 < n && samples[static_cast<size_t>(k) + 1].valid;
        const CCurveSample* prev =
            has_prev ? &samples[static_cast<size_t>(k) - 1] : nullptr;
        const CCurveSample* next =
            has_next ? &samples[static_cast<size_t>(k) + 1] : nullptr;

        // 1: local Lipschitz bound against the measure pairing.
        if (has_prev)
            set(0, k,
                std::abs(s.c - prev->c) <=
                    k_bound * (s.theta - prev->theta) + 1e-12);

        // 2: an ordinal vertex freezes the left slope.
        if (s.ordinal_nonempty && std::isfinite(s.slope_left))
            set(1, k, std::abs(s.slope_left) <= tol_slope);

        // 3: robust non-ordinality forces strict growth to the right.
        if (robustly_non_ordinal(s, eps_ordinal) && std::isfinite(s.slope_right))
            set(2, k, s.slope_right >= delta_pos);

        // 4: where the two one-sided slopes agree, they match the pairing.
        if (std::isfinite(s.slope_left) && std::isfinite(s.slope_right) &&
            std::abs(s.slope_left - s.slope_right) <= tol_slope)
            set(3, k,
                std::abs(0.5 * (s.slope_left + s.slope_right) -
                         s.integral_duH) <= tol_slope);

        // 5: a flat left slope means measures from the left approach the
        // ordinal set, so the left neighbor's faces must all pair near zero.
        if (has_prev && std::abs(s.slope_left) <= tol_slope)
            set(4, k, faces_all_near_zero(*prev, tol_slope));

        // 6: a strictly positive left slope rules out ordinal faces here.
        if (std::isfinite(s.slope_left) && s.slope_left >= delta_pos)
            set(5, k, !s.ordinal_nonempty);

        // 7: a flat right slope means every face here is ordinal.
        if (std::isfinite(s.slope_right) && std::abs(s.slope_right) <= tol_slope)
            set(6, k, faces_all_near_zero(s, tol_slope));

        // 8: a strictly positive right slope means measures from the right
        // avoid the ordinal set, so the right neighbor has no ordinal face.
        if (has_next && std::isfinite(s.slope_right) &&
            s.slope_right >= delta_pos)
            set(7, k, !next->ordinal_nonempty);
    }
    return report;
}

AdmissibleClassification classify_admissible_set(
    const std::vector<CCurveSample>& samples, const AdmissibleProbe& probe,
    double saturation_rel) {
    if (samples.size() < 5)
        throw std::invalid_argument(
            "classify_admissible_set: need at least 5 samples");

    std::vector<const CCurveSample*> valid;
    for (const CCurveSample& s : samples)
        if (s.valid) valid.push_back(&s);
    if (valid.size() < 5)
        throw std::invalid_argument(
            "classify_admissible_set: fewer than 5 valid samples");

    double c_min = HUGE_VAL, c_max = -HUGE_VAL;
    for (const CCurveSample* s : valid) {
        c_min = std::min(c_min, s->c);
        c_max = std::max(c_max, s->c);
    }

    AdmissibleClassification out;
    out.c0 = c_min;
    out.attained = probe.bracket_valid && probe.attained;

    const double theta_lo = valid.front()->theta;
    const double theta_hi = valid.back()->theta;
    const double edge = 0.1 * (theta_hi - theta_lo);
    auto span_over = [&](double lo, double hi) {
        double a = HUGE_VAL, b = -HUGE_VAL;
        for (const CCurveSample* s : valid)
            if (s->theta >= lo - 1e-12 && s->theta <= hi + 1e-12) {
                a = std::min(a, s->c);
                b = std::max(b, s->c);
            }
        return b - a;
    };
    const double flat_tol = saturation_rel * std::max(1.0, c_max - c_min);
    out.flat_left = span_over(theta_lo, theta_lo + edge) <= flat_tol;
    out.grows_right = span_over(theta_hi - edge, theta_hi) > flat_tol;

    if (c_max - c_min <= flat_tol) {
        out.shape = AdmissibleShape::point;
    } else if (out.flat_left && out.grows_right) {
        if (!probe.bracket_valid)
            out.shape = AdmissibleShape::ray_undetermined;
        else
            out.shape = probe.attained ? AdmissibleShape::closed_ray
                                       : AdmissibleShape::open_ray;
    } else if (!out.flat_left && out.grows_right) {
        out.shape = AdmissibleShape::line;
    } else {
        out.shape = AdmissibleShape::ray_undetermined;
    }

    // Midpoint convexity defect over every evenly spaced sample triple.
    for (size_t i = 0; i < valid.size(); ++i)
        for (size_t k = i + 2; k < valid.size(); k += 2) {
            const size_t j = (i + k) / 2;
            const double defect =
                valid[j]->c - 0.5 * (valid[i]->c + valid[k]->c);
            out.convexity_defect = std::max(out.convexity_defect, defect);
        }
    return out;
}

} // namespace ckam
