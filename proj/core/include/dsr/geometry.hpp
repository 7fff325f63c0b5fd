#ifndef DSR_GEOMETRY_HPP
#define DSR_GEOMETRY_HPP

#include <string>
#include <vector>

#include "dsr/classifier.hpp"
#include "dsr/compression.hpp"
#include "dsr/image.hpp"
#include "dsr/random.hpp"

namespace dsr {

/// A 2D slice through input space around a center image: grid point (i, j)
/// sits at clip(center + alpha_j*u + beta_i*v, 0, 1) with alpha/beta spanning
/// [-radius, radius]. u is the normalized loss-gradient direction, v a random
/// unit direction orthogonal to it. resolution must be odd so (0,0) lands on
/// a grid point.
struct PlaneSpec {
    Image center;
    int label = 0;
    std::vector<double> u;
    std::vector<double> v;
    double radius = 0.35;
    int resolution = 61;

    /// Signed plane coordinate of grid index i in [-radius, radius].
    double coordinate(int i) const;
};

struct PlaneGrid {
    PlaneSpec spec;
    std::vector<int> labels;     // resolution x resolution, row-major (beta, alpha)
    std::vector<double> margins; // same layout
    std::string compression = "none";

    int resolution() const { return spec.resolution; }
};

/// Local decision-geometry summary of one grid.
struct DsrMetrics {
    double area_fraction = 0.0;    // fraction of points predicted as the true class
    double mean_margin = 0.0;      // average true-class margin over the grid
    double boundary_intrusion = 0.0; // fraction of points with negative margin
    double boundary_density = 0.0; // fraction of 4-neighbor pairs with differing labels
};

/// Construct the slice: u = normalized cross-entropy gradient at (x, y), v a
/// random direction Gram-Schmidt-orthogonalized against u (up to 8 redraws on
/// degeneracy). Throws DegeneratePlaneError when the gradient vanishes or no
/// usable v is found; ValueError for a non-positive radius or even/negative
/// resolution.
PlaneSpec build_plane(const Classifier& model, const Image& x, int y, RandomSource& rng,
                      double radius = 0.35, int resolution = 61);

/// Evaluate predictions and margins over the grid, optionally through a
/// compression operator (pass nullptr for the plain model). Each point is
/// independent, so results do not depend on evaluation order.
PlaneGrid evaluate_grid(const Classifier& model, const CompressionOperator* op,
                        const PlaneSpec& spec);

/// Reduce a grid to {A, mean margin, B, boundary density}. Throws ValueError
/// on an empty or inconsistent grid.
DsrMetrics dsr_metrics(const PlaneGrid& grid);

/// First-order distance-to-boundary estimate margin/||grad margin||. Returns
/// 0 for misclassified inputs and +infinity when the margin is positive but
/// its gradient vanishes (norm <= 1e-12).
double robust_radius_proxy(const Classifier& model, const Image& x, int y);

struct Proposition1Report {
    double bound = 0.0;            // margin(C(x)) / (L_f * L_C)
    double empirical_radius = 0.0; // smallest misclassifying ||delta||_2 found;
                                   // +infinity when no probe direction misclassifies
    double lipschitz_f = 0.0;
    double lipschitz_c = 0.0;
    bool certified = false; // constants exact (linear classifier, projection-like C)
    bool holds = false;     // empirical_radius >= bound - 1e-9
};

/// Compare the margin-derived robust-radius lower bound against the smallest
/// misclassification distance found by bisection along seeded probe
/// directions (searched within L2 radius 0.35). Lipschitz constants are exact
/// for a single-layer classifier with an identity/PCA operator (certified);
/// otherwise they are max finite-difference ratios over seeded probe pairs
/// and the report is advisory. Throws PreconditionError when x is already
/// misclassified after compression.
Proposition1Report proposition1_check(const Classifier& model, const CompressionOperator& op,
                                      const Image& x, int y, int probe_budget,
                                      RandomSource& rng);

} // namespace dsr

#endif // DSR_GEOMETRY_HPP
