#pragma once

#include <array>
#include <vector>

#include "ckam/grid.hpp"
#include "ckam/hamiltonian.hpp"
#include "ckam/lax_oleinik.hpp"
#include "ckam/measures.hpp"

namespace ckam {

/// How the scan computes the critical value at each theta: by the measure
/// linear program, by the drift rate of frozen fixed-point runs, or by both
/// with a recorded gap.
enum class ScanMethod { lp, laxoleinik, both };

/// Discretization knobs shared by every theta sample of a scan.
struct ScanGrids {
    TorusGrid1D x_grid;
    VelocityGrid v_grid;
    double v_max = 4.0;       // reachability speed of the drift runs
    double dt = 0.0;          // drift-run step; 0 selects 16 h / v_max
    long n_iter = 2000;       // drift-run iterations
    double eps_ordinal = 1e-3;
    int enumerate_max = 4;    // vertex-enumeration budget per theta
    double tol_mono = 1e-6;   // allowed backsliding between neighbor samples
    /// 64 position nodes on the given period, 33 velocity nodes up to 2.
    static ScanGrids defaults(double period);
};

/// One point of the theta -> c curve together with the measure diagnostics
/// the slope claims are checked against.
struct CCurveSample {
    double theta = 0.0;
    double c = 0.0;
    double slope_left = 0.0;   // neighbor difference; NaN at the first sample
    double slope_right = 0.0;  // neighbor difference; NaN at the last sample
    /// dH/du paired with the minimizing measure of the linear program.
    double integral_duH = 0.0;
    /// Some enumerated optimal vertex pairs to ~zero with dH/du.
    bool ordinal_nonempty = false;
    double min_face_duH = 0.0; // smallest pairing over enumerated vertices
    double max_face_duH = 0.0; // largest pairing over enumerated vertices
    /// |c_lp - c_drift| under ScanMethod::both, NaN otherwise.
    double method_gap = 0.0;
    bool method_disagrees = false; // method_gap above the combined tolerance
    bool valid = true;             // false when the per-theta computation threw
};

/// Samples theta uniformly (n_samples >= 5) and fills one CCurveSample per
/// node; per-theta computations run concurrently and failures mark the
/// sample invalid instead of aborting the scan.  Consecutive valid samples
/// must satisfy c_{k+1} >= c_k - tol_mono (throws verification_error
/// otherwise: the curve is non-decreasing).
std::vector<CCurveSample> scan(const LagrangianView& view, double theta_min,
                               double theta_max, int n_samples,
                               ScanMethod method, const ScanGrids& grids);

enum class ItemVerdict : unsigned char { pass, fail, not_applicable };

/// Itemized slope/ordinality report.  items[m][k] is the verdict of claim
/// m+1 at sample k:
///   1  local Lipschitz bound |dc| <= K |dtheta|, K = max |integral_duH| + tol
///   2  ordinal vertex present  =>  |slope_left| <= tol_slope
///   3  robustly non-ordinal    =>  slope_right >= delta_pos
///   4  two-sided differentiable => slope matches integral_duH within tol
///   5  flat left slope  =>  the left neighbor's faces all pair near zero
///      (its measures approach the ordinal set; approximate)
///   6  left slope >= delta_pos  =>  no ordinal face at the sample
///      (approximate)
///   7  flat right slope  =>  every face at the sample pairs near zero
///      (approximate)
///   8  right slope >= delta_pos  =>  no ordinal face at the right neighbor
///      (approximate)
/// Items 5-8 stand in for limit statements about measure families; they
/// grade ordinality of the enumerated faces of the sample and its immediate
/// neighbors only and carry the approximate flag.
struct H4Report {
    std::array<std::vector<ItemVerdict>, 8> items;
    std::array<bool, 8> approximate{};
    double lipschitz_bound = 0.0;
    bool all_pass = true; // no fail verdict anywhere
};

H4Report verify_h4(const std::vector<CCurveSample>& samples,
                   double tol_slope = 5e-2, double delta_pos = 1e-2,
                   double eps_ordinal = 1e-3);

/// Shape of the set of constants that admit a solution.
enum class AdmissibleShape { point, closed_ray, open_ray, line, ray_undetermined };

struct AdmissibleClassification {
    AdmissibleShape shape = AdmissibleShape::point;
    double c0 = 0.0;        // smallest sampled c
    bool attained = false;  // from the probe: the bottom constant converged
    /// max over sample triples (a, (a+b)/2, b) of the midpoint convexity
    /// defect c_mid - (c_a + c_b)/2.
    double convexity_defect = 0.0;
    bool flat_left = false;
    bool grows_right = false;
};

/// Classifies the sampled curve's range: flat everywhere -> point; flat on
/// the left and growing on the right -> a ray whose bottom end is closed or
/// open according to probe.attained (undetermined when the probe had no
/// valid bracket); growing on both ends -> line.  Flatness over an end
/// means the c-variation across the outer 10% of samples is below
/// saturation_rel * max(1, total c span).
AdmissibleClassification classify_admissible_set(
    const std::vector<CCurveSample>& samples, const AdmissibleProbe& probe,
    double saturation_rel = 1e-3);

} // namespace ckam
