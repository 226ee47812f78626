#include "cathsim/scenario/metrics.hpp"

#include "cathsim/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <set>

namespace cathsim::scenario {

int TrajectoryLog::repetitions() const
{
    std::set<int> reps;
    for (const auto &s : samples) {
        reps.insert(s.rep);
    }
    return static_cast<int>(reps.size());
}

std::vector<TrajectorySample> TrajectoryLog::rep(int index) const
{
    std::vector<TrajectorySample> out;
    for (const auto &s : samples) {
        if (s.rep == index) {
            out.push_back(s);
        }
    }
    return out;
}

const char *plane_name(Plane p)
{
    switch (p) {
    case Plane::XY:
        return "x-y";
    case Plane::XZ:
        return "x-z";
    case Plane::YZ:
        return "y-z";
    }
    return "?";
}

namespace {

Eigen::Vector2d project(const Vec3 &v, Plane p)
{
    switch (p) {
    case Plane::XY:
        return {v.x(), v.y()};
    case Plane::XZ:
        return {v.x(), v.z()};
    case Plane::YZ:
        return {v.y(), v.z()};
    }
    return {};
}

struct Accum
{
    double l2 = 0.0;
    double l1 = 0.0;
    std::size_t n = 0;

    void add(const Eigen::Vector2d &e)
    {
        l2 += e.norm();
        l1 += e.cwiseAbs().sum();
        ++n;
    }

    PlaneError result() const { return n ? PlaneError{l2 / n, l1 / n, n} : PlaneError{}; }
};

} // namespace

Eigen::Vector2d nearest_point_error(const Eigen::Vector2d &point, const std::vector<Eigen::Vector2d> &polyline)
{
    double best = std::numeric_limits<double>::infinity();
    Eigen::Vector2d best_err = Eigen::Vector2d::Zero();
    for (std::size_t i = 0; i + 1 < polyline.size(); ++i) {
        const Eigen::Vector2d a = polyline[i];
        const Eigen::Vector2d ab = polyline[i + 1] - a;
        const double len2 = ab.squaredNorm();
        const double t = len2 > 0.0 ? std::clamp((point - a).dot(ab) / len2, 0.0, 1.0) : 0.0;
        const Eigen::Vector2d e = point - (a + t * ab);
        const double d = e.squaredNorm();
        if (d < best) {
            best = d;
            best_err = e;
        }
    }
    return best_err;
}

ErrorReport compute_errors(const TrajectoryLog &log, const std::vector<Vec3> &reference)
{
    if (log.samples.empty()) {
        throw EmptyInputError("compute_errors: empty trajectory log");
    }
    if (reference.size() < 2) {
        throw PreconditionError("compute_errors: reference needs at least two points");
    }

    ErrorReport report;
    std::array<Accum, 3> pooled;
    std::map<int, std::array<Accum, 3>> per_rep;
    for (std::size_t k = 0; k < kPlanes.size(); ++k) {
        std::vector<Eigen::Vector2d> poly;
        poly.reserve(reference.size());
        for (const auto &r : reference) {
            poly.push_back(project(r, kPlanes[k]));
        }
        for (const auto &s : log.samples) {
            const Eigen::Vector2d e = nearest_point_error(project(s.tip_cm, kPlanes[k]), poly);
            pooled[k].add(e);
            per_rep[s.rep][k].add(e);
        }
    }
    for (std::size_t k = 0; k < 3; ++k) {
        report.pooled[k] = pooled[k].result();
    }
    for (const auto &[rep, acc] : per_rep) {
        report.reps.push_back(rep);
        PlaneErrors pe;
        for (std::size_t k = 0; k < 3; ++k) {
            pe[k] = acc[k].result();
        }
        report.per_rep.push_back(pe);
    }
    return report;
}

namespace {

bool same_tuple(const ActuationTuple &a, const ActuationTuple &b, double tol = 1e-6)
{
    return std::abs(a.translation_mm - b.translation_mm) < tol && std::abs(a.rotation_deg - b.rotation_deg) < tol &&
           std::abs(a.knob_deg - b.knob_deg) < tol;
}

bool between(const ActuationTuple &p, const ActuationTuple &a, const ActuationTuple &b)
{
    auto in = [](double v, double x, double y) { return v >= std::min(x, y) - 1e-9 && v <= std::max(x, y) + 1e-9; };
    return in(p.translation_mm, a.translation_mm, b.translation_mm) && in(p.rotation_deg, a.rotation_deg, b.rotation_deg) &&
           in(p.knob_deg, a.knob_deg, b.knob_deg);
}

} // namespace

TwoPathGap two_path_gap(const std::vector<TrajectorySample> &rep, const ActuationTuple &a, const ActuationTuple &b)
{
    // Locate the a -> b traversal: last sample commanded at a before the
    // first sample commanded at b, and the later b -> a traversal.
    const std::size_t n = rep.size();
    auto find = [&](std::size_t from, const ActuationTuple &t) {
        while (from < n && !same_tuple(rep[from].cmd, t)) {
            ++from;
        }
        return from;
    };
    const std::size_t fwd_start = find(0, a);
    const std::size_t fwd_end = find(fwd_start, b);
    std::size_t bwd_start = fwd_end;
    while (bwd_start < n && same_tuple(rep[bwd_start].cmd, b)) {
        ++bwd_start;
    }
    // Continue to the next time the commanded tuple returns to b.
    bwd_start = find(bwd_start, b);
    const std::size_t bwd_end = find(bwd_start, a);
    if (fwd_end >= n || bwd_end >= n) {
        return {};
    }

    TwoPathGap gap;
    double sum = 0.0;
    for (std::size_t k = fwd_start; k <= fwd_end; ++k) {
        if (!between(rep[k].cmd, a, b)) {
            continue;
        }
        for (std::size_t m = bwd_start; m <= bwd_end; ++m) {
            if (same_tuple(rep[k].cmd, rep[m].cmd)) {
                const double d = (rep[k].tip_cm - rep[m].tip_cm).norm();
                sum += d;
                gap.max_cm = std::max(gap.max_cm, d);
                ++gap.pairs;
                break;
            }
        }
    }
    gap.mean_cm = gap.pairs ? sum / gap.pairs : 0.0;
    return gap;
}

} // namespace cathsim::scenario
