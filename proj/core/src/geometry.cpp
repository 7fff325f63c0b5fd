#include "dsr/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "dsr/errors.hpp"
#include "dsr/numerics.hpp"

namespace dsr {

namespace {

constexpr double kProbeRadius = 0.35; // L2 search radius for the bound checker

std::vector<double> random_unit_direction(RandomSource& rng, std::size_t d) {
    for (int attempt = 0; attempt < 8; ++attempt) {
        std::vector<double> dir(d);
        for (double& v : dir)
            v = rng.normal();
        const double norm = l2_norm(dir);
        if (norm > 1e-12) {
            for (double& v : dir)
                v /= norm;
            return dir;
        }
    }
    throw DegenerateDirectionError("random_unit_direction: repeated zero draws");
}

Image offset_point(const Image& center, const std::vector<double>& dir, double t) {
    Image p = center;
    for (std::size_t j = 0; j < p.values.size(); ++j)
        p.values[j] = std::clamp(center.values[j] + t * dir[j], 0.0, 1.0);
    return p;
}

void validate_spec(const PlaneSpec& spec) {
    const std::size_t d = spec.center.values.size();
    if (spec.u.size() != d || spec.v.size() != d)
        throw ValueError("plane spec: u/v dimension does not match the center image");
    if (!(spec.radius > 0.0) || !std::isfinite(spec.radius))
        throw ValueError("plane spec: radius must be positive and finite");
    if (spec.resolution < 1 || spec.resolution % 2 == 0)
        throw ValueError("plane spec: resolution must be a positive odd count");
    if (std::fabs(l2_norm(spec.u) - 1.0) > 1e-9 || std::fabs(l2_norm(spec.v) - 1.0) > 1e-9)
        throw ValueError("plane spec: u and v must be unit vectors");
    if (std::fabs(dot(spec.u, spec.v)) > 1e-9)
        throw ValueError("plane spec: u and v must be orthogonal");
}

} // namespace

double PlaneSpec::coordinate(int i) const {
    if (resolution <= 1)
        return 0.0;
    return radius * (2.0 * static_cast<double>(i) / static_cast<double>(resolution - 1) - 1.0);
}

PlaneSpec build_plane(const Classifier& model, const Image& x, int y, RandomSource& rng,
                      double radius, int resolution) {
    if (!(radius > 0.0) || !std::isfinite(radius))
        throw ValueError("build_plane: radius must be positive and finite");
    if (resolution < 1 || resolution % 2 == 0)
        throw ValueError("build_plane: resolution must be a positive odd count");

    Image grad = input_gradient(model, x, y);
    const double norm = l2_norm(grad.values);
    if (norm <= 1e-12)
        throw DegeneratePlaneError("build_plane: loss gradient vanished at the center point");

    PlaneSpec spec;
    spec.center = x;
    spec.label = y;
    spec.radius = radius;
    spec.resolution = resolution;
    spec.u.resize(grad.values.size());
    for (std::size_t j = 0; j < spec.u.size(); ++j)
        spec.u[j] = grad.values[j] / norm;

    // One initial draw plus up to 8 redraws for the orthogonal direction.
    for (int attempt = 0; attempt < 9; ++attempt) {
        std::vector<double> candidate(spec.u.size());
        for (double& v : candidate)
            v = rng.normal();
        try {
            spec.v = orthogonal_complement(spec.u, candidate);
            return spec;
        } catch (const DegenerateDirectionError&) {
            continue;
        }
    }
    throw DegeneratePlaneError("build_plane: no usable orthogonal direction after 8 redraws");
}

PlaneGrid evaluate_grid(const Classifier& model, const CompressionOperator* op,
                        const PlaneSpec& spec) {
    validate_spec(spec);
    const int n = spec.resolution;
    PlaneGrid grid;
    grid.spec = spec;
    grid.compression = op != nullptr ? op->label() : "none";
    grid.labels.resize(static_cast<std::size_t>(n) * n);
    grid.margins.resize(static_cast<std::size_t>(n) * n);

    const std::size_t d = spec.center.values.size();
    Image point = spec.center;
    for (int r = 0; r < n; ++r) {
        const double beta = spec.coordinate(r);
        for (int c = 0; c < n; ++c) {
            const double alpha = spec.coordinate(c);
            for (std::size_t j = 0; j < d; ++j) {
                const double v = spec.center.values[j] + alpha * spec.u[j] + beta * spec.v[j];
                point.values[j] = std::clamp(v, 0.0, 1.0);
            }
            const Logits logits =
                op != nullptr ? forward(model, op->apply(point)) : forward(model, point);
            const std::size_t idx = static_cast<std::size_t>(r) * n + c;
            grid.labels[idx] = predicted_label(logits);
            grid.margins[idx] = margin(logits, spec.label);
        }
    }
    return grid;
}

DsrMetrics dsr_metrics(const PlaneGrid& grid) {
    const int n = grid.resolution();
    const std::size_t total = static_cast<std::size_t>(n) * n;
    if (total == 0 || grid.labels.size() != total || grid.margins.size() != total)
        throw ValueError("dsr_metrics: grid is empty or not fully populated");

    std::size_t true_class = 0;
    std::size_t negative = 0;
    for (std::size_t i = 0; i < total; ++i) {
        if (grid.labels[i] == grid.spec.label)
            ++true_class;
        if (grid.margins[i] < 0.0)
            ++negative;
    }

    DsrMetrics m;
    m.area_fraction = static_cast<double>(true_class) / static_cast<double>(total);
    m.mean_margin = compensated_sum(grid.margins) / static_cast<double>(total);
    m.boundary_intrusion = static_cast<double>(negative) / static_cast<double>(total);

    // 4-neighbor transitions: every horizontally or vertically adjacent pair.
    std::size_t transitions = 0;
    std::size_t pairs = 0;
    for (int r = 0; r < n; ++r) {
        for (int c = 0; c < n; ++c) {
            const std::size_t idx = static_cast<std::size_t>(r) * n + c;
            if (c + 1 < n) {
                ++pairs;
                if (grid.labels[idx] != grid.labels[idx + 1])
                    ++transitions;
            }
            if (r + 1 < n) {
                ++pairs;
                if (grid.labels[idx] != grid.labels[idx + n])
                    ++transitions;
            }
        }
    }
    m.boundary_density =
        pairs == 0 ? 0.0 : static_cast<double>(transitions) / static_cast<double>(pairs);
    return m;
}

double robust_radius_proxy(const Classifier& model, const Image& x, int y) {
    const Logits logits = forward(model, x);
    const double m = margin(logits, y);
    if (m <= 0.0)
        return 0.0;
    const Image grad = margin_gradient(model, x, y);
    const double norm = l2_norm(grad.values);
    if (norm <= 1e-12)
        return std::numeric_limits<double>::infinity();
    return m / norm;
}

Proposition1Report proposition1_check(const Classifier& model, const CompressionOperator& op,
                                      const Image& x, int y, int probe_budget,
                                      RandomSource& rng) {
    if (probe_budget < 1)
        throw ValueError("proposition1_check: probe budget must be >= 1");

    const Image z = op.apply(x);
    const double m0 = margin(forward(model, z), y);
    if (m0 <= 0.0)
        throw PreconditionError("proposition1_check: center misclassified after compression");

    Proposition1Report report;
    const bool linear_model = model.layers.size() == 1;
    const bool projection_like = op.kind() == CompressionOperator::Kind::identity ||
                                 op.kind() == CompressionOperator::Kind::pca;
    report.certified = linear_model && projection_like;

    if (report.certified) {
        // Margin Lipschitz constant of a linear classifier: the largest
        // spectral norm among the row differences w_y - w_k. An orthonormal
        // projection followed by clipping never expands distances, so L_C = 1.
        const Matrix& w = model.layers.front().weights;
        const std::size_t d = w.cols();
        double worst = 0.0;
        std::vector<double> diff(d);
        for (std::size_t k = 0; k < w.rows(); ++k) {
            if (static_cast<int>(k) == y)
                continue;
            for (std::size_t j = 0; j < d; ++j)
                diff[j] = w(static_cast<std::size_t>(y), j) - w(k, j);
            worst = std::max(worst, l2_norm(diff));
        }
        report.lipschitz_f = std::max(worst, 1e-12);
        report.lipschitz_c = 1.0;
    } else {
        // Advisory path: max finite-difference ratios over seeded point pairs
        // inside the probe ball.
        double lf = 0.0;
        double lc = 0.0;
        std::vector<double> delta;
        for (int i = 0; i < probe_budget; ++i) {
            const std::vector<double> d1 = random_unit_direction(rng, x.values.size());
            const double r1 = rng.uniform01() * kProbeRadius;
            const std::vector<double> d2 = random_unit_direction(rng, x.values.size());
            const double r2 = rng.uniform01() * kProbeRadius;
            const Image a = offset_point(x, d1, r1);
            const Image b = offset_point(x, d2, r2);

            delta.resize(a.values.size());
            for (std::size_t j = 0; j < delta.size(); ++j)
                delta[j] = a.values[j] - b.values[j];
            const double dist_ab = l2_norm(delta);
            if (dist_ab <= 1e-12)
                continue;

            const Image ca = op.apply(a);
            const Image cb = op.apply(b);
            for (std::size_t j = 0; j < delta.size(); ++j)
                delta[j] = ca.values[j] - cb.values[j];
            const double dist_c = l2_norm(delta);
            lc = std::max(lc, dist_c / dist_ab);
            if (dist_c <= 1e-12)
                continue; // compression collapsed the pair; no classifier ratio

            const double gap = std::fabs(margin(forward(model, ca), y) -
                                         margin(forward(model, cb), y));
            lf = std::max(lf, gap / dist_c);
        }
        report.lipschitz_f = std::max(lf, 1e-12);
        report.lipschitz_c = std::max(lc, 1e-12);
    }

    report.bound = m0 / (report.lipschitz_f * report.lipschitz_c);

    // Smallest misclassifying radius over seeded rays: coarse scan to bracket
    // the first label flip, then bisection on the ray parameter.
    double best = std::numeric_limits<double>::infinity();
    constexpr int kScanSteps = 16;
    for (int i = 0; i < probe_budget; ++i) {
        const std::vector<double> dir = random_unit_direction(rng, x.values.size());
        double lo = 0.0;
        double hi = -1.0;
        for (int s = 1; s <= kScanSteps; ++s) {
            const double t = kProbeRadius * static_cast<double>(s) / kScanSteps;
            const Image p = offset_point(x, dir, t);
            if (predicted_label(forward(model, op.apply(p))) != y) {
                hi = t;
                break;
            }
            lo = t;
        }
        if (hi < 0.0)
            continue; // this ray stays correctly classified within the ball
        for (int iter = 0; iter < 50; ++iter) {
            const double mid = 0.5 * (lo + hi);
            const Image p = offset_point(x, dir, mid);
            if (predicted_label(forward(model, op.apply(p))) != y)
                hi = mid;
            else
                lo = mid;
        }
        const Image hit = offset_point(x, dir, hi);
        std::vector<double> delta(hit.values.size());
        for (std::size_t j = 0; j < delta.size(); ++j)
            delta[j] = hit.values[j] - x.values[j];
        best = std::min(best, l2_norm(delta));
    }
    report.empirical_radius = best;
    report.holds = report.empirical_radius >= report.bound - 1e-9;
    return report;
}

} // namespace dsr
